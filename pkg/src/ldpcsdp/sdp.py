"""Dense primal-dual interior-point solver for one orthant block and one PSD block.

Primal and dual pair::

    minimize    c @ x              maximize    b @ y
    subject to  A @ x == b         subject to  A.T @ y + s == c
                x in K                         s in K

with ``K = R^n_+ x S^m_+``.  The PSD block is stored in ``svec`` layout: the
upper triangle row by row, off-diagonal entries multiplied by ``sqrt(2)`` so
that ``svec(X) @ svec(S) == trace(X @ S)``.

The iteration is an infeasible-start Mehrotra predictor-corrector method with
Nesterov-Todd scaling.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

log = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    MAX_ITERATIONS = "MaxIterations"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass
class SolverSettings:
    gap_tol: float = 1e-8
    feas_tol: float = 1e-8
    max_iter: int = 200
    step_factor: float = 0.98
    infeas_tol: float = 1e-8
    record_history: bool = False


def svec_dim(m: int) -> int:
    return m * (m + 1) // 2


def svec(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    iu = np.triu_indices(M.shape[0])
    w = np.where(iu[0] == iu[1], 1.0, SQRT2)
    return M[iu] * w


def smat(v, m: int | None = None) -> np.ndarray:
    """Inverse of :func:`svec`. A 2-D ``v`` is treated as a stack of rows."""
    v = np.asarray(v, dtype=float)
    if m is None:
        m = int(round((np.sqrt(8 * v.shape[-1] + 1) - 1) / 2))
    iu = np.triu_indices(m)
    w = np.where(iu[0] == iu[1], 1.0, 1.0 / SQRT2)
    out = np.zeros(v.shape[:-1] + (m, m))
    out[..., iu[0], iu[1]] = v * w
    out[..., iu[1], iu[0]] = v * w
    return out


def svec_index(i: int, j: int, m: int) -> int:
    """Position of entry ``(i, j)`` (``i <= j``) in the svec layout."""
    if i > j:
        i, j = j, i
    return i * m - i * (i - 1) // 2 + (j - i)


@dataclass
class ConicProblem:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    orthant_dim: int
    psd_order: int
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        n = self.orthant_dim + svec_dim(self.psd_order)
        if self.A.shape != (self.b.size, n) or self.c.size != n:
            raise ValueError(
                f"inconsistent dimensions: A {self.A.shape}, b {self.b.size}, c {self.c.size}, "
                f"expected {n} columns"
            )

    @property
    def n_vars(self) -> int:
        return self.c.size

    def split(self, v):
        """Split a primal/slack vector into its orthant part and PSD matrix."""
        v = np.asarray(v, dtype=float)
        return v[: self.orthant_dim], smat(v[self.orthant_dim :], self.psd_order)


@dataclass
class ConicSolution:
    primal: np.ndarray
    dual: np.ndarray
    slack: np.ndarray
    status: Status
    iterations: int
    duality_gap: float
    primal_residual: float
    dual_residual: float
    primal_objective: float = float("nan")
    dual_objective: float = float("nan")
    condition_estimate: float = float("nan")
    history: list[dict] = field(default_factory=list)


def _drop_dependent_rows(A, b, tol=1e-10):
    if A.shape[0] == 0:
        return A, b, np.arange(0), True
    _, R, piv = sla.qr(A.T, mode="economic", pivoting=True)
    d = np.abs(np.diag(R))
    rank = int(np.sum(d > tol * max(1.0, d[0]))) if d.size else 0
    keep = np.sort(piv[:rank])
    consistent = True
    if rank < A.shape[0]:
        log.warning("dropping %d linearly dependent equality rows", A.shape[0] - rank)
        coef, *_ = np.linalg.lstsq(A[keep].T, A.T, rcond=None)
        consistent = bool(np.allclose(coef.T @ b[keep], b, atol=1e-8 * (1 + np.abs(b).max())))
    return A[keep], b[keep], keep, consistent


def _max_step(lam, D):
    """Largest alpha with ``diag(lam) + alpha * D`` PSD, capped at 1e30."""
    if lam.size == 0:
        return 1e30
    isq = 1.0 / np.sqrt(lam)
    T = D * np.outer(isq, isq)
    e = np.linalg.eigvalsh(0.5 * (T + T.T))[0]
    return 1e30 if e >= 0 else -1.0 / e


def _max_step_lp(x, dx):
    neg = dx < 0
    if not np.any(neg):
        return 1e30
    return float(np.min(-x[neg] / dx[neg]))


def solve(p: ConicProblem, settings: SolverSettings | None = None) -> ConicSolution:
    st = settings or SolverSettings()
    nl, m = p.orthant_dim, p.psd_order
    A_full, b_full = p.A, p.b

    A, b, keep, consistent = _drop_dependent_rows(A_full, b_full)
    if not consistent:
        z = np.zeros(p.n_vars)
        return ConicSolution(z, np.zeros(b_full.size), z.copy(), Status.INFEASIBLE, 0,
                             float("nan"), float("inf"), float("nan"))
    # row equilibration
    rn = np.linalg.norm(A, axis=1)
    rn[rn == 0] = 1.0
    A = A / rn[:, None]
    b = b / rn
    r = A.shape[0]

    Al = A[:, :nl]
    As = smat(A[:, nl:], m) if m else np.zeros((r, 0, 0))
    cl = p.c[:nl]
    C = smat(p.c[nl:], m) if m else np.zeros((0, 0))

    # starting point: scaled identity / ones, zero multipliers
    nu = nl + m
    anorm = np.linalg.norm(A, axis=1)
    xi = max(10.0, np.sqrt(max(nu, 1)), float(np.max((1 + np.abs(b)) / (1 + anorm))) if r else 1.0)
    eta = max(10.0, np.sqrt(max(nu, 1)), np.linalg.norm(p.c), float(anorm.max()) if r else 1.0)
    xl = np.full(nl, xi)
    sl = np.full(nl, eta)
    X = xi * np.eye(m)
    S = eta * np.eye(m)
    y = np.zeros(r)

    bnorm = 1.0 + np.linalg.norm(b)
    cnorm = 1.0 + np.linalg.norm(p.c)
    history: list[dict] = []
    status = Status.MAX_ITERATIONS
    cond = float("nan")
    it = 0

    def residuals():
        rp = b - Al @ xl - np.einsum("kij,ij->k", As, X)
        Rdl = cl - Al.T @ y - sl
        Rds = C - np.einsum("k,kij->ij", y, As) - S
        return rp, Rdl, Rds

    for it in range(st.max_iter + 1):
        rp, Rdl, Rds = residuals()
        pobj = float(cl @ xl + np.sum(C * X))
        dobj = float(b @ y)
        comp = float(xl @ sl + np.sum(X * S))
        mu = comp / nu if nu else 0.0
        pinf = np.linalg.norm(rp) / bnorm
        dinf = np.sqrt(np.sum(Rdl**2) + np.sum(Rds**2)) / cnorm
        gap = abs(pobj - dobj)
        if st.record_history:
            history.append(dict(iter=it, pobj=pobj, dobj=dobj, pinf=pinf, dinf=dinf, mu=mu))

        scale = 1.0 + abs(pobj)
        if gap <= st.gap_tol * scale and comp <= st.gap_tol * scale and pinf <= st.feas_tol and dinf <= st.feas_tol:
            status = Status.OPTIMAL
            break
        # infeasibility rays
        if dobj > 0:
            ray = np.sqrt(np.sum((cl - Rdl) ** 2) + np.sum((C - Rds) ** 2)) / dobj
            if ray <= st.infeas_tol:
                status = Status.INFEASIBLE
                break
        if pobj < 0:
            axn = np.linalg.norm(Al @ xl + np.einsum("kij,ij->k", As, X))
            if axn / -pobj <= st.infeas_tol:
                status = Status.UNBOUNDED
                break
        if it == st.max_iter:
            break

        # Nesterov-Todd scaling of the PSD block: G.T S G == G^-1 X G^-T == diag(lam)
        try:
            if m:
                Lx = np.linalg.cholesky(X)
                Ls = np.linalg.cholesky(S)
                U, lam, Vt = np.linalg.svd(Ls.T @ Lx)
                G = Lx @ Vt.T / np.sqrt(lam)
            else:
                lam = np.zeros(0)
                G = np.zeros((0, 0))
        except np.linalg.LinAlgError:
            status = Status.NUMERICAL_FAILURE
            break
        dl = xl / sl
        sq = np.sqrt(dl)
        At = np.matmul(G.T, np.matmul(As, G)) if m else As
        # scaled constraint matrix K; K K^T is the Schur complement, never formed
        K = np.hstack([Al * sq, At.reshape(r, -1)])
        try:
            Q, R = sla.qr(K.T, mode="economic", check_finite=False)
        except (ValueError, np.linalg.LinAlgError):
            status = Status.NUMERICAL_FAILURE
            break
        rdiag = np.abs(np.diag(R))
        cond = float(rdiag.max() / rdiag.min()) ** 2 if r and rdiag.min() > 0 else float("inf")
        if r and not rdiag.min() > 1e-300:
            status = Status.NUMERICAL_FAILURE
            break
        RdG = G.T @ Rds @ G if m else Rds
        Rv = np.concatenate([sq * Rdl, RdG.ravel()])
        w_rp = sla.solve_triangular(R, rp, trans="T", check_finite=False) if r else rp
        lsum = lam[:, None] + lam[None, :]

        def direction(Hs, hl):
            Z = 2.0 * Hs / lsum if m else Hs
            zl = hl / sl
            V = np.concatenate([zl / sq, Z.ravel()]) - Rv
            qv = Q.T @ V
            # primal step: range part fixed by the equations, null-space part by centrality
            Dv = Q @ (w_rp - qv) + V
            dy = sla.solve_triangular(R, w_rp - qv, check_finite=False) if r else np.zeros(0)
            dxl = Dv[:nl] * sq
            Dx = Dv[nl:].reshape(m, m)
            Dx = 0.5 * (Dx + Dx.T)
            dS = Rds - np.einsum("k,kij->ij", dy, As)
            Ds = G.T @ dS @ G if m else dS
            dsl = Rdl - Al.T @ dy
            return dy, Dx, Ds, dxl, dsl, dS

        def steps(Dx, Ds, dxl, dsl):
            ap = min(_max_step(lam, Dx), _max_step_lp(xl, dxl))
            ad = min(_max_step(lam, Ds), _max_step_lp(sl, dsl))
            return ap, ad

        # predictor
        Lam2 = np.diag(lam**2)
        dy_a, Dx_a, Ds_a, dxl_a, dsl_a, _ = direction(-Lam2, -xl * sl)
        ap, ad = steps(Dx_a, Ds_a, dxl_a, dsl_a)
        ap, ad = min(1.0, ap), min(1.0, ad)
        if m:
            Lm = np.diag(lam)
            comp_a = np.sum((Lm + ap * Dx_a) * (Lm + ad * Ds_a))
        else:
            comp_a = 0.0
        comp_a += (xl + ap * dxl_a) @ (sl + ad * dsl_a)
        mu_a = max(comp_a, 0.0) / nu
        sigma = min(1.0, (mu_a / mu) ** 3) if mu > 0 else 0.0

        # corrector
        cross = Dx_a @ Ds_a if m else np.zeros((0, 0))
        Hs = sigma * mu * np.eye(m) - Lam2 - 0.5 * (cross + cross.T)
        hl = sigma * mu - xl * sl - dxl_a * dsl_a
        dy, Dx, Ds, dxl, dsl, dS = direction(Hs, hl)
        ap, ad = steps(Dx, Ds, dxl, dsl)
        ap = min(1.0, st.step_factor * ap)
        ad = min(1.0, st.step_factor * ad)
        if st.record_history:
            history[-1].update(alpha_p=ap, alpha_d=ad, sigma=sigma)
        if ap < 1e-12 and ad < 1e-12:
            status = Status.NUMERICAL_FAILURE
            break

        xl = xl + ap * dxl
        sl = sl + ad * dsl
        y = y + ad * dy
        if m:
            dX = G @ Dx @ G.T
            X = X + ap * 0.5 * (dX + dX.T)
            S = S + ad * 0.5 * (dS + dS.T)

    rp, Rdl, Rds = residuals()
    pobj = float(cl @ xl + np.sum(C * X))
    dobj = float(b @ y)
    primal = np.concatenate([xl, svec(X) if m else np.zeros(0)])
    slack = np.concatenate([sl, svec(S) if m else np.zeros(0)])
    dual = np.zeros(b_full.size)
    dual[keep] = y / rn
    return ConicSolution(
        primal=primal,
        dual=dual,
        slack=slack,
        status=status,
        iterations=it,
        duality_gap=abs(pobj - dobj),
        primal_residual=float(np.linalg.norm(rp) / bnorm),
        dual_residual=float(np.sqrt(np.sum(Rdl**2) + np.sum(Rds**2)) / cnorm),
        primal_objective=pobj,
        dual_objective=dobj,
        condition_estimate=cond,
        history=history,
    )


@dataclass
class KKTReport:
    primal_residual: float
    dual_residual: float
    duality_gap: float
    primal_cone_violation: float
    dual_cone_violation: float
    flags: list[str]

    @property
    def ok(self) -> bool:
        return not self.flags


def _cone_violation(p: ConicProblem, v) -> float:
    vl, V = p.split(v)
    worst = max(0.0, float(-vl.min())) if vl.size else 0.0
    if p.psd_order:
        worst = max(worst, float(-np.linalg.eigvalsh(V)[0]))
    return worst


def check_kkt(p: ConicProblem, s: ConicSolution, settings: SolverSettings | None = None) -> KKTReport:
    """Recompute optimality conditions from scratch and flag anything beyond 10x tolerance."""
    st = settings or SolverSettings()
    x, y, z = s.primal, s.dual, s.slack
    pres = float(np.linalg.norm(p.A @ x - p.b) / (1 + np.linalg.norm(p.b)))
    dres = float(np.linalg.norm(p.A.T @ y + z - p.c) / (1 + np.linalg.norm(p.c)))
    pobj, dobj = float(p.c @ x), float(p.b @ y)
    gap = abs(pobj - dobj)
    pviol = _cone_violation(p, x)
    dviol = _cone_violation(p, z)
    flags = []
    lim = 10.0
    if pres > lim * st.feas_tol:
        flags.append(f"primal residual {pres:.3g}")
    if dres > lim * st.feas_tol:
        flags.append(f"dual residual {dres:.3g}")
    if gap > lim * st.gap_tol * (1 + abs(pobj)):
        flags.append(f"duality gap {gap:.3g}")
    xscale = 1.0 + float(np.abs(x).max(initial=0.0))
    zscale = 1.0 + float(np.abs(z).max(initial=0.0))
    if pviol > lim * st.feas_tol * xscale:
        flags.append(f"primal cone violation {pviol:.3g}")
    if dviol > lim * st.feas_tol * zscale:
        flags.append(f"dual cone violation {dviol:.3g}")
    return KKTReport(pres, dres, gap, pviol, dviol, flags)
