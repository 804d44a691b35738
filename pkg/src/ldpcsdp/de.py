"""Density evolution for LDPC ensembles on the binary erasure channel."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .poly import Poly, poly_eval

MAX_ITER = 10_000
CONV_TOL = 1e-10
BISECT_TOL = 1e-4


class MonotonicityError(RuntimeError):
    pass


@dataclass
class DeReport:
    epsilon_tested: float
    converged: bool
    final_erasure: float
    iterations_used: int
    threshold_estimate: float = float("nan")
    grid_min: float = float("nan")

    def to_json(self) -> dict:
        return asdict(self)


def de_step(x, epsilon: float, lam: Poly, rho: Poly):
    """One BEC decoding iteration: ``epsilon * lam(1 - rho(1 - x))``."""
    return epsilon * poly_eval(lam, 1.0 - poly_eval(rho, 1.0 - np.asarray(x, dtype=float)))


def de_trajectory(epsilon: float, lam: Poly, rho: Poly, max_iter: int = MAX_ITER,
                  tol: float = CONV_TOL) -> np.ndarray:
    """Erasure fractions from ``x0 = epsilon`` until convergence, a stall, or ``max_iter``."""
    xs = [float(epsilon)]
    x = float(epsilon)
    for _ in range(max_iter):
        if x <= tol:
            break
        nxt = float(de_step(x, epsilon, lam, rho))
        if nxt >= x:
            # fixed point reached in floating point; rounding may nudge it upward
            if nxt - x > 1e-12 * max(x, 1e-300) + 1e-300:
                raise MonotonicityError(f"density evolution increased: {x!r} -> {nxt!r}")
            break
        x = nxt
        xs.append(x)
    return np.array(xs)


def de_converges(epsilon: float, lam: Poly, rho: Poly, max_iter: int = MAX_ITER,
                 tol: float = CONV_TOL) -> DeReport:
    if epsilon <= 0:
        return DeReport(float(epsilon), True, 0.0, 1)
    traj = de_trajectory(epsilon, lam, rho, max_iter, tol)
    final = float(traj[-1])
    return DeReport(float(epsilon), final <= tol, final, len(traj) - 1)


def threshold_bisect(lam: Poly, rho: Poly, tol: float = BISECT_TOL,
                     max_iter: int = MAX_ITER, conv_tol: float = CONV_TOL) -> float:
    lo, hi = 0.0, 1.0
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if de_converges(mid, lam, rho, max_iter, conv_tol).converged:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def grid_check(q, n: int) -> float:
    """Minimum of ``q`` over ``k / n`` for ``k = 0..n``.

    ``q`` is a :class:`Poly` or any vectorized callable on [0, 1].
    """
    if n < 2:
        raise ValueError("grid needs at least two intervals")
    x = np.arange(n + 1) / n
    vals = poly_eval(q, x) if isinstance(q, Poly) else np.asarray(q(x), dtype=float)
    return float(np.min(vals))


def _ratio(lam: Poly, rho: Poly):
    """``x -> lam(1 - rho(1 - x)) / x`` built from positive terms only.

    ``(1 - rho(1 - x)) / x = sum_k rho_k (1 + y + ... + y**(k-1))`` with
    ``y = 1 - x`` and ``lam(h) / h = sum_k lam_k h**(k-1)``, so nothing
    cancels near ``x = 0``.
    """
    if abs(lam.coeffs[0]) > 0 or abs(rho.coeffs[0]) > 0:
        raise ValueError("degree distributions have no constant term")
    lam_shift = Poly(lam.coeffs[1:]) if lam.degree else Poly([0.0])

    def phi(x):
        y = 1.0 - np.asarray(x, dtype=float)
        g = np.zeros_like(y)
        geo = np.zeros_like(y)
        term = np.ones_like(y)
        for c in rho.coeffs[1:]:
            geo = geo + term
            term = term * y
            g = g + c * geo
        return g * poly_eval(lam_shift, (1.0 - y) * g)

    return phi


def analytic_threshold(lam: Poly, rho: Poly, n: int = 20_000) -> float:
    """``min over (0, 1] of x / lam(1 - rho(1 - x))``, the BEC threshold in closed form.

    Dense grid followed by a bounded local refinement of the best cells.
    """
    from scipy.optimize import minimize_scalar

    phi = _ratio(lam, rho)
    x = np.linspace(0.0, 1.0, n + 1)
    v = phi(x)
    best = float(v.max())
    for k in np.argsort(v)[-3:]:
        lo, hi = x[max(k - 1, 0)], x[min(k + 1, n)]
        res = minimize_scalar(lambda s: -float(phi(s)), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return 1.0 / best if best > 0 else 1.0
