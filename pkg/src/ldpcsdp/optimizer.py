"""Degree-distribution design problems and their conic formulations.

Three problems share one pipeline:

* ``MAX_THRESHOLD``: fixed check side, minimize ``t = 1/epsilon`` over the
  variable side subject to ``t*x - lam(1 - rho(1 - x)) >= 0`` on [0, 1].
* ``MAX_RATE``: fixed check side and channel, maximize ``sum lam_i / i``.
* ``MIN_CHECK_AVERAGE``: fixed variable side and channel, minimize
  ``sum rho_j / j`` subject to ``rho(1 - epsilon*lam(x)) - (1 - x) >= 0``.

The polynomial constraint becomes a Gram-matrix LMI on its lifted even
polynomial.  Assembly works from Bernstein coefficients and a binomially
scaled Gram basis, so the conic data stays O(1) even when the constraint
degree is near 100.
"""
from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import comb

from . import bernstein as bz
from .de import DeReport, analytic_threshold, de_converges, grid_check, threshold_bisect
from .ensemble import (
    DegreeDistribution,
    Ensemble,
    capacity_gap,
    dd_to_poly,
    inv_avg,
    rate,
    validate,
)
from .poly import (
    ONE,
    X,
    AffinePoly,
    Poly,
    affine_substitute,
    poly_add,
    poly_compose,
    poly_eval,
    poly_pow,
    poly_scale,
)
from .sdp import ConicProblem, ConicSolution, SolverSettings, Status, smat, solve, svec_dim, svec_index
from .sos import GramCertificate, SosLift, gram_constraints, lift, lift_bernstein, verify_certificate

log = logging.getLogger(__name__)

DE_AGREEMENT_TOL = 2e-3
GRID_POINTS = 100_000
DESIGN_SETTINGS = SolverSettings()
# the grid LP is small and well conditioned, so it is solved far more tightly
LP_SETTINGS = SolverSettings(gap_tol=1e-12, feas_tol=1e-12)


class Mode(str, enum.Enum):
    MAX_THRESHOLD = "max-threshold"
    MAX_RATE = "max-rate"
    MIN_CHECK_AVERAGE = "min-check-average"


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class DesignProblem:
    mode: Mode
    fixed_side: DegreeDistribution
    max_free_degree: int
    epsilon: float | None = None
    grid_size: int = 1000
    min_free_degree: int = 2

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.max_free_degree < 2 or self.min_free_degree < 2:
            raise ConfigurationError("free-side degrees must be >= 2")
        if self.min_free_degree > self.max_free_degree:
            raise ConfigurationError("min_free_degree exceeds max_free_degree")
        report = validate(self.fixed_side)
        if not report.ok:
            raise ConfigurationError("fixed side invalid: " + "; ".join(report.violations))
        if self.mode is not Mode.MAX_THRESHOLD:
            if self.epsilon is None:
                raise ConfigurationError(f"mode {self.mode.value} requires epsilon")
            if not 0.0 < self.epsilon < 1.0:
                raise ConfigurationError("epsilon must lie in (0, 1)")

    @property
    def free_side_name(self) -> str:
        return "rho" if self.mode is Mode.MIN_CHECK_AVERAGE else "lambda"

    @property
    def free_degrees(self) -> list[int]:
        return list(range(self.min_free_degree, self.max_free_degree + 1))

    @property
    def has_t(self) -> bool:
        return self.mode is Mode.MAX_THRESHOLD

    @property
    def n_vars(self) -> int:
        return len(self.free_degrees) + int(self.has_t)

    @property
    def constraint_degree(self) -> int:
        fixed_deg = self.fixed_side.max_degree - 1
        return max(1, (self.max_free_degree - 1) * fixed_deg)

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "fixed_side": self.fixed_side.to_json(),
            "max_free_degree": self.max_free_degree,
            "min_free_degree": self.min_free_degree,
            "epsilon": self.epsilon,
            "grid_size": self.grid_size,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DesignProblem":
        return cls(
            mode=Mode(obj["mode"]),
            fixed_side=DegreeDistribution.from_json(obj["fixed_side"]),
            max_free_degree=int(obj["max_free_degree"]),
            epsilon=obj.get("epsilon"),
            grid_size=int(obj.get("grid_size", 1000)),
            min_free_degree=int(obj.get("min_free_degree", 2)),
        )


# ---------------------------------------------------------------------------
# constraint polynomial


def _check_basis(problem: DesignProblem) -> Poly:
    """``1 - rho(1 - x)`` for the fixed check side."""
    rho = dd_to_poly(problem.fixed_side)
    return poly_add(ONE, poly_scale(poly_compose(rho, Poly([1.0, -1.0])), -1.0))


def build_constraint_poly(problem: DesignProblem) -> AffinePoly:
    """Monomial-basis constraint polynomial as affine forms in the decision variables.

    Variables are the free-side fractions in degree order, then ``t`` in
    max-threshold mode.  Nonnegativity on [0, 1] is the design constraint.
    """
    degs = problem.free_degrees
    if problem.mode is Mode.MIN_CHECK_AVERAGE:
        lam = dd_to_poly(problem.fixed_side)
        inner = poly_add(ONE, poly_scale(lam, -problem.epsilon))
        terms = [poly_pow(inner, j - 1) for j in degs]
        return AffinePoly.from_terms(Poly([-1.0, 1.0]), terms)
    h = _check_basis(problem)
    terms = [poly_scale(poly_pow(h, i - 1), -1.0) for i in degs]
    if problem.has_t:
        return AffinePoly.from_terms(Poly([0.0]), terms + [X])
    return AffinePoly.from_terms(poly_scale(X, 1.0 / problem.epsilon), terms)


def constraint_bernstein(problem: DesignProblem) -> np.ndarray:
    """Bernstein coefficients (degree ``constraint_degree``) of the constraint as affine forms.

    Shape ``(q + 1, n_vars + 1)``; column 0 is the constant.  In
    min-check-average mode the ``-(1 - x)`` term is distributed over the
    fractions (equal on the simplex) so the constant term vanishes.
    """
    q = problem.constraint_degree
    degs = problem.free_degrees
    cols = [np.zeros(q + 1)]
    if problem.mode is Mode.MIN_CHECK_AVERAGE:
        lam = dd_to_poly(problem.fixed_side)
        base = 1.0 - problem.epsilon * bz.from_monomial(lam.coeffs)
        one_minus_x = bz.elevate(np.array([1.0, 0.0]), q)
        for j in degs:
            cols.append(bz.elevate(bz.power(base, j - 1), q) - one_minus_x)
    else:
        h = bz.from_monomial(_check_basis(problem).coeffs)
        x_b = bz.elevate(np.array([0.0, 1.0]), q)
        for i in degs:
            cols.append(-bz.elevate(bz.power(h, i - 1), q))
        if problem.has_t:
            cols.append(x_b)
        else:
            cols[0] = x_b / problem.epsilon
    return np.stack(cols, axis=1)


def constraint_function(problem: DesignProblem, free: DegreeDistribution, t: float | None = None):
    """Vectorized, numerically stable evaluation of the constraint for concrete values."""
    fixed = dd_to_poly(problem.fixed_side)
    fp = dd_to_poly(free)
    if problem.mode is Mode.MIN_CHECK_AVERAGE:
        eps = problem.epsilon
        return lambda x: poly_eval(fp, 1.0 - eps * poly_eval(fixed, x)) - (1.0 - np.asarray(x))
    s = t if problem.has_t else 1.0 / problem.epsilon
    return lambda x: s * np.asarray(x) - poly_eval(fp, 1.0 - poly_eval(fixed, 1.0 - np.asarray(x)))


# ---------------------------------------------------------------------------
# conic assembly


@dataclass
class Assembly:
    conic: ConicProblem
    q: int
    reduced_by: int
    frac_slice: slice
    t_index: int | None
    free_split: int = 0


def _reduce_face(forms: np.ndarray) -> tuple[np.ndarray, int]:
    """Divide out factors of ``x`` whose coefficient forms vanish identically."""
    k = 0
    scale = np.abs(forms).max()
    while forms.shape[0] > 2 and np.all(np.abs(forms[0]) <= 1e-14 * scale):
        forms = bz.divide_by_x(forms)
        k += 1
    return forms, k


def gram_rows(q: int, nvar_cols: int) -> tuple[np.ndarray, np.ndarray]:
    """Scaled anti-diagonal equations over ``svec(Bs)`` where ``B = D Bs D``.

    ``D = diag(sqrt(C(q, i)))``.  Row ``l`` is divided by the largest weight on
    its anti-diagonal.  Returns ``(psd_part, row_scale)`` where the true lifted
    coefficient ``Pi_l`` equals ``row_scale[l] * (psd_part[l] @ svec(Bs))``.
    """
    n = q + 1
    d = np.sqrt(comb(q, np.arange(n)))
    rows = np.zeros((2 * q + 1, svec_dim(n)))
    scale = np.zeros(2 * q + 1)
    for l in range(2 * q + 1):
        lo, hi = max(0, l - q), l // 2
        w = np.array([d[i] * d[l - i] for i in range(lo, hi + 1)])
        scale[l] = w.max()
        for i, wi in zip(range(lo, hi + 1), w):
            j = l - i
            coef = wi / scale[l]
            rows[l, svec_index(i, j, n)] = coef if i == j else np.sqrt(2.0) * coef
    return rows, scale


def assemble_sdp(problem: DesignProblem, reduce: bool = False) -> Assembly:
    """Conic form: fractions and ``t - 1`` in the orthant, scaled Gram matrix as the PSD block.

    With ``reduce=True`` identically-zero low-order coefficients are divided
    out first, which removes a face on which every feasible Gram matrix sits.
    """
    forms = constraint_bernstein(problem)
    reduced_by = 0
    if reduce:
        forms, reduced_by = _reduce_face(forms)
    q = forms.shape[0] - 1
    lifted = lift_bernstein(forms).pi_coeffs  # (2q+1, nv+1)
    nf = len(problem.free_degrees)
    nl = nf + int(problem.has_t)
    psd, row_scale = gram_rows(q, nl)

    # Pi_l(z) = const + V z ;  equation: psd @ svec - V z / scale = const / scale
    const = lifted[:, 0].copy()
    V = lifted[:, 1:].copy()
    if problem.has_t:
        # t = 1 + t'
        const += V[:, -1]
    A_gram = np.hstack([-V / row_scale[:, None], psd])
    b_gram = const / row_scale
    simplex = np.zeros((1, A_gram.shape[1]))
    simplex[0, :nf] = 1.0
    A = np.vstack([simplex, A_gram])
    b = np.concatenate([[1.0], b_gram])

    c = np.zeros(A.shape[1])
    degs = np.array(problem.free_degrees, dtype=float)
    if problem.mode is Mode.MAX_THRESHOLD:
        c[nf] = 1.0
    elif problem.mode is Mode.MAX_RATE:
        c[:nf] = -1.0 / degs
    else:
        c[:nf] = 1.0 / degs
    conic = ConicProblem(c=c, A=A, b=b, orthant_dim=nl, psd_order=q + 1,
                         labels={"row_scale": row_scale, "forms": forms})
    return Assembly(conic, q, reduced_by, slice(0, nf), nf if problem.has_t else None)


def unscale_gram(Bs: np.ndarray, q: int) -> np.ndarray:
    d = np.sqrt(comb(q, np.arange(q + 1)))
    return Bs * np.outer(d, d)


def embed_gram(B: np.ndarray, shift: int) -> np.ndarray:
    """Gram matrix of ``x**shift * R`` from that of ``R`` (pad leading rows/cols)."""
    if shift == 0:
        return B
    n = B.shape[0] + shift
    out = np.zeros((n, n))
    out[shift:, shift:] = B
    return out


@dataclass
class AffineSdpResult:
    z: np.ndarray
    certificate: GramCertificate | None
    status: Status
    solution: ConicSolution
    conic: ConicProblem


def assemble_affine_sdp(p: AffinePoly, c, q: int | None = None) -> ConicProblem:
    """``minimize c @ z`` subject to ``p_z >= 0`` on [0, 1], with ``z`` free.

    Monomial lift and unscaled Gram basis: one equation per lifted coefficient.
    ``z`` is split into nonnegative parts ``z+ - z-`` ahead of the Gram block.
    """
    q = max(1, p.max_degree) if q is None else q
    pi = lift(p, q).pi_coeffs
    n = p.n_vars
    m = q + 1
    psd = np.zeros((2 * q + 1, svec_dim(m)))
    for eq in gram_constraints(SosLift(q, pi)):
        for (i, j), w in eq.entries:
            psd[eq.order, svec_index(i, j, m)] = w if i == j else w / np.sqrt(2.0)
    V = pi[:, 1:]
    A = np.hstack([-V, V, psd])
    c = np.asarray(c, dtype=float).reshape(n)
    cost = np.concatenate([c, -c, np.zeros(svec_dim(m))])
    return ConicProblem(c=cost, A=A, b=pi[:, 0].copy(), orthant_dim=2 * n, psd_order=m)


def solve_affine_sdp(p: AffinePoly, c, q: int | None = None,
                     settings: SolverSettings | None = None) -> AffineSdpResult:
    conic = assemble_affine_sdp(p, c, q)
    sol = solve(conic, settings or DESIGN_SETTINGS)
    n = p.n_vars
    xl, B = conic.split(sol.primal)
    z = xl[:n] - xl[n:]
    cert = None
    if sol.status is Status.OPTIMAL:
        qq = conic.psd_order - 1
        cert = verify_certificate(affine_substitute(p, z), qq, B)
    return AffineSdpResult(z, cert, sol.status, sol, conic)


# ---------------------------------------------------------------------------
# results


@dataclass
class DesignResult:
    mode: Mode
    free_side: DegreeDistribution
    fixed_side: DegreeDistribution
    t_star: float | None
    objective: float
    rate: float
    epsilon_used: float
    delta: float
    certificate: GramCertificate | None
    solver_status: Status
    de_verification: DeReport | None
    iterations: int = 0
    gap: float = float("nan")
    method: str = "sdp"
    raw_free: np.ndarray | None = None
    seconds: float = 0.0
    notes: list[str] = field(default_factory=list)
    issues: list[str] = field(default_factory=list)

    @property
    def lam(self) -> DegreeDistribution:
        return self.fixed_side if self.mode is Mode.MIN_CHECK_AVERAGE else self.free_side

    @property
    def rho(self) -> DegreeDistribution:
        return self.free_side if self.mode is Mode.MIN_CHECK_AVERAGE else self.fixed_side

    @property
    def ok(self) -> bool:
        return self.solver_status is Status.OPTIMAL

    @property
    def verified(self) -> bool:
        """Optimal and every independent check passed."""
        return self.ok and not self.issues

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "method": self.method,
            "lambda": self.lam.to_json(),
            "rho": self.rho.to_json(),
            "t_star": self.t_star,
            "epsilon": self.epsilon_used,
            "rate": self.rate,
            "delta": self.delta,
            "objective": self.objective,
            "certificate": self.certificate.to_json() if self.certificate else None,
            "de": self.de_verification.to_json() if self.de_verification else None,
            "status": self.solver_status.value,
            "solver": {"iterations": self.iterations, "gap": self.gap, "seconds": self.seconds},
            "notes": list(self.notes),
            "issues": list(self.issues),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DesignResult":
        mode = Mode(obj["mode"])
        lam = DegreeDistribution.from_json(obj["lambda"])
        rho = DegreeDistribution.from_json(obj["rho"])
        free, fixed = (rho, lam) if mode is Mode.MIN_CHECK_AVERAGE else (lam, rho)
        cert = GramCertificate.from_json(obj["certificate"]) if obj.get("certificate") else None
        de = DeReport(**obj["de"]) if obj.get("de") else None
        solver = obj.get("solver", {})
        return cls(
            mode=mode, free_side=free, fixed_side=fixed, t_star=obj.get("t_star"),
            objective=float(obj.get("objective", float("nan"))), rate=float(obj["rate"]),
            epsilon_used=float(obj["epsilon"]), delta=float(obj["delta"]), certificate=cert,
            solver_status=Status(obj["status"]), de_verification=de,
            iterations=int(solver.get("iterations", 0)), gap=float(solver.get("gap", float("nan"))),
            method=obj.get("method", "sdp"), seconds=float(solver.get("seconds", 0.0)),
            notes=list(obj.get("notes", [])),
            issues=list(obj.get("issues", [])),
        )


def _ensemble_numbers(problem: DesignProblem, free: DegreeDistribution, t: float | None):
    ens = (Ensemble(problem.fixed_side, free) if problem.mode is Mode.MIN_CHECK_AVERAGE
           else Ensemble(free, problem.fixed_side))
    eps = 1.0 / t if problem.has_t else problem.epsilon
    r = rate(ens)
    return ens, eps, r, capacity_gap(r, eps)


def verify_design(problem: DesignProblem, free: DegreeDistribution, t: float | None,
                  epsilon: float, n_grid: int = GRID_POINTS,
                  threshold_tol: float = 1e-4) -> tuple[DeReport, list[str]]:
    """Independent density-evolution and grid checks for a designed ensemble."""
    lam_d, rho_d = ((problem.fixed_side, free) if problem.mode is Mode.MIN_CHECK_AVERAGE
                    else (free, problem.fixed_side))
    lam, rho = dd_to_poly(lam_d), dd_to_poly(rho_d)
    thr = threshold_bisect(lam, rho, tol=threshold_tol)
    gmin = grid_check(constraint_function(problem, free, t), n_grid)
    report = de_converges(max(epsilon - 0.005, 0.0), lam, rho)
    report.threshold_estimate = thr
    report.grid_min = gmin
    issues = []
    if problem.has_t:
        if abs(thr - epsilon) > DE_AGREEMENT_TOL:
            issues.append(f"DE threshold {thr:.5f} disagrees with 1/t* = {epsilon:.5f}")
    elif thr < epsilon - DE_AGREEMENT_TOL:
        issues.append(f"DE threshold {thr:.5f} below design epsilon {epsilon:.5f}")
    if not report.converged:
        issues.append(f"DE at {report.epsilon_tested:.5f} stalls at {report.final_erasure:.3g}")
    if gmin < -1e-6:
        issues.append(f"constraint dips to {gmin:.3g} on the verification grid")
    return report, issues


def _failed(problem, status, sol: ConicSolution | None, t0, note) -> DesignResult:
    free = DegreeDistribution({}, problem.free_side_name)
    return DesignResult(problem.mode, free, problem.fixed_side, None, float("nan"), float("nan"),
                        problem.epsilon if problem.epsilon is not None else float("nan"),
                        float("nan"), None, status, None,
                        iterations=sol.iterations if sol else 0,
                        gap=sol.duality_gap if sol else float("nan"),
                        seconds=time.perf_counter() - t0, notes=[note])


def solve_design(problem: DesignProblem, settings: SolverSettings | None = None,
                 verify: bool = True) -> DesignResult:
    t0 = time.perf_counter()
    st = settings or DESIGN_SETTINGS
    asm = assemble_sdp(problem, reduce=True)
    sol = solve(asm.conic, st)
    if sol.status is not Status.OPTIMAL:
        return _failed(problem, sol.status, sol, t0, f"solver returned {sol.status.value}")

    x = sol.primal
    raw = x[asm.frac_slice]
    t = 1.0 + float(x[asm.t_index]) if asm.t_index is not None else None
    free = DegreeDistribution(dict(zip(problem.free_degrees, raw)), problem.free_side_name).pruned()
    _, Bs = asm.conic.split(x)
    B = embed_gram(unscale_gram(Bs, asm.q), asm.reduced_by)
    q_full = problem.constraint_degree
    t_solver = t
    if problem.has_t:
        # report the exact reciprocal threshold of the returned lambda; the
        # slack (t - t_solver) * x is a nonnegative diagonal Gram term
        t_exact = 1.0 / analytic_threshold(dd_to_poly(free), dd_to_poly(problem.fixed_side))
        t = max(t_exact, t_solver)
        j = np.arange(q_full + 1)
        B = B + (t - t_solver) * np.diag(np.where(j > 0, comb(q_full - 1, j - 1), 0.0))
    ens, eps, r, delta = _ensemble_numbers(problem, free, t)

    # certificate for the full constraint polynomial
    z = np.array([free.coeffs.get(d, 0.0) for d in problem.free_degrees]
                 + ([t] if problem.has_t else []))
    pi = lift_bernstein(constraint_bernstein(problem) @ np.concatenate([[1.0], z])).pi_coeffs
    cert = verify_certificate(SosLift(q_full, pi), q_full, B)

    notes, issues = [], []
    status = Status.OPTIMAL
    if not cert.valid:
        status = Status.NUMERICAL_FAILURE
        issues.append("Gram certificate rejected")
    de_report = None
    if verify:
        de_report, found = verify_design(problem, free, t, eps)
        issues.extend(found)
    if problem.has_t:
        objective = t
        if t - t_solver > 1e-6:
            notes.append(f"solver t {t_solver:.8f} raised to exact {t:.8f}")
    else:
        objective = float(asm.conic.c @ x)
        if problem.mode is Mode.MAX_RATE:
            objective = -objective
    return DesignResult(problem.mode, free, problem.fixed_side, t, objective, r, eps, delta,
                        cert, status, de_report, iterations=sol.iterations,
                        gap=sol.duality_gap, raw_free=raw,
                        seconds=time.perf_counter() - t0, notes=notes, issues=issues)


# ---------------------------------------------------------------------------
# discretized LP baseline


def _grid_values(problem: DesignProblem, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Constraint at grid points as ``g0 + G @ z`` with ``z`` the (fractions, t) variables."""
    degs = problem.free_degrees
    fixed = dd_to_poly(problem.fixed_side)
    if problem.mode is Mode.MIN_CHECK_AVERAGE:
        inner = 1.0 - problem.epsilon * poly_eval(fixed, xs)
        G = np.stack([inner ** (j - 1) for j in degs], axis=1)
        g0 = -(1.0 - xs)
    else:
        h = 1.0 - poly_eval(fixed, 1.0 - xs)
        G = np.stack([-(h ** (i - 1)) for i in degs], axis=1)
        if problem.has_t:
            G = np.hstack([G, xs[:, None]])
            g0 = np.zeros_like(xs)
        else:
            g0 = xs / problem.epsilon
    return g0, G


def solve_baseline_lp(problem: DesignProblem, grid_size: int | None = None,
                      settings: SolverSettings | None = None,
                      verify: bool = False) -> DesignResult:
    """Enforce the constraint only at ``k / N`` for ``k = 1..N`` and solve the LP.

    The LP is posed in the solver's dual form: design variables are the
    multipliers ``y`` and every inequality is one orthant slack.  The last
    free fraction is eliminated through the simplex equation.
    """
    t0 = time.perf_counter()
    st = settings or LP_SETTINGS
    N = grid_size or problem.grid_size
    if N < 2:
        raise ConfigurationError("grid size must be at least 2")
    xs = np.arange(1, N + 1) / N
    g0, G = _grid_values(problem, xs)
    degs = problem.free_degrees
    nf = len(degs)
    # z = E y + e0 : last fraction = 1 - sum(others)
    ny = nf - 1 + int(problem.has_t)
    E = np.zeros((nf + int(problem.has_t), ny))
    e0 = np.zeros(nf + int(problem.has_t))
    E[: nf - 1, : nf - 1] = np.eye(nf - 1)
    E[nf - 1, : nf - 1] = -1.0
    e0[nf - 1] = 1.0
    if problem.has_t:
        E[nf, nf - 1] = 1.0
    # inequalities: fractions >= 0, t >= 1, grid
    ineq_G = [np.eye(nf, nf + int(problem.has_t)), G]
    ineq_0 = [np.zeros(nf), g0]
    if problem.has_t:
        row = np.zeros((1, nf + 1))
        row[0, nf] = 1.0
        ineq_G.insert(1, row)
        ineq_0.insert(1, np.array([-1.0]))
    Gall = np.vstack(ineq_G)
    h0 = np.concatenate(ineq_0) + Gall @ e0
    Gy = Gall @ E
    # objective over z -> over y
    if problem.mode is Mode.MAX_THRESHOLD:
        wz = np.zeros(nf + 1)
        wz[nf] = -1.0  # maximize -t
    elif problem.mode is Mode.MAX_RATE:
        wz = np.concatenate([1.0 / np.array(degs, dtype=float), np.zeros(0)])
    else:
        wz = -1.0 / np.array(degs, dtype=float)
    by = E.T @ wz

    if ny == 0:
        z = e0
        feasible = bool(np.all(h0 >= -1e-12))
        status = Status.OPTIMAL if feasible else Status.INFEASIBLE
        sol = None
    else:
        conic = ConicProblem(c=h0, A=-Gy.T, b=by, orthant_dim=h0.size, psd_order=0)
        sol = solve(conic, st)
        status = sol.status
        z = E @ sol.dual + e0
    if status is not Status.OPTIMAL:
        res = _failed(problem, status, sol, t0, f"LP solver returned {status.value}")
        res.method = f"lp-grid-{N}"
        return res
    raw = z[:nf]
    t = float(z[nf]) if problem.has_t else None
    free = DegreeDistribution(dict(zip(degs, raw)), problem.free_side_name).pruned()
    ens, eps, r, delta = _ensemble_numbers(problem, free, t)
    de_report, issues = (verify_design(problem, free, t, eps) if verify else (None, []))
    objective = t if problem.has_t else float(wz @ z) * (-1 if problem.mode is Mode.MIN_CHECK_AVERAGE else 1)
    return DesignResult(problem.mode, free, problem.fixed_side, t, objective, r, eps, delta, None,
                        Status.OPTIMAL, de_report,
                        iterations=sol.iterations if sol else 0,
                        gap=sol.duality_gap if sol else 0.0, method=f"lp-grid-{N}",
                        raw_free=raw, seconds=time.perf_counter() - t0, issues=issues)
