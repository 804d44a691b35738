"""Dense real polynomials and polynomials with affine coefficients.

Coefficients are stored in ascending-power order: ``coeffs[k]`` multiplies
``x**k``.  Arithmetic never drops small coefficients; only trailing exact
zeros are removed.  Use :func:`normalize` to trim near-zero tails.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TRIM_TOL = 1e-14


def _strip_exact(c: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(c)
    n = nz[-1] + 1 if nz.size else 1
    return c[:n]


@dataclass(frozen=True, eq=False)
class Poly:
    coeffs: np.ndarray

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=float)).copy()
        if c.ndim != 1:
            raise ValueError("polynomial coefficients must be one-dimensional")
        if c.size == 0:
            c = np.zeros(1)
        c = _strip_exact(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def monomial(cls, k: int, c: float = 1.0) -> "Poly":
        out = np.zeros(k + 1)
        out[k] = c
        return cls(out)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return poly_eval(self, x)

    def __add__(self, other):
        return poly_add(self, _as_poly(other))

    __radd__ = __add__

    def __sub__(self, other):
        return poly_add(self, poly_scale(_as_poly(other), -1.0))

    def __rsub__(self, other):
        return poly_add(_as_poly(other), poly_scale(self, -1.0))

    def __mul__(self, other):
        if np.isscalar(other):
            return poly_scale(self, float(other))
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return poly_scale(self, -1.0)

    def __pow__(self, n: int):
        return poly_pow(self, n)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(
            np.all(self.coeffs == other.coeffs)
        )

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"Poly({self.coeffs.tolist()})"

    def derivative(self) -> "Poly":
        if self.degree == 0:
            return Poly([0.0])
        return Poly(self.coeffs[1:] * np.arange(1, len(self.coeffs)))


def _as_poly(p) -> Poly:
    return p if isinstance(p, Poly) else Poly([float(p)])


X = Poly([0.0, 1.0])
ONE = Poly([1.0])


def normalize(p: Poly, tol: float = TRIM_TOL) -> Poly:
    """Drop trailing coefficients whose magnitude is below ``tol``."""
    c = p.coeffs
    n = len(c)
    while n > 1 and abs(c[n - 1]) < tol:
        n -= 1
    return Poly(c[:n])


def poly_scale(a: Poly, s: float) -> Poly:
    return Poly(a.coeffs * s)


def poly_add(a: Poly, b: Poly) -> Poly:
    n = max(len(a.coeffs), len(b.coeffs))
    out = np.zeros(n)
    out[: len(a.coeffs)] += a.coeffs
    out[: len(b.coeffs)] += b.coeffs
    return Poly(out)


def poly_mul(a: Poly, b: Poly) -> Poly:
    return Poly(np.convolve(a.coeffs, b.coeffs))


def poly_pow(a: Poly, n: int) -> Poly:
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    result = ONE
    base = a
    while n:
        if n & 1:
            result = poly_mul(result, base)
        n >>= 1
        if n:
            base = poly_mul(base, base)
    return result


def poly_compose(outer: Poly, inner: Poly) -> Poly:
    """Return ``outer(inner(x))`` by Horner's scheme."""
    c = outer.coeffs
    result = Poly([c[-1]])
    for ck in c[-2::-1]:
        result = poly_add(poly_mul(result, inner), Poly([ck]))
    return result


def poly_eval(a: Poly, x):
    c = a.coeffs
    x = np.asarray(x, dtype=float)
    acc = np.full_like(x, c[-1])
    for ck in c[-2::-1]:
        acc = acc * x + ck
    return acc if acc.ndim else float(acc)


@dataclass(frozen=True, eq=False)
class AffinePoly:
    """Polynomial whose coefficients are affine in ``n_vars`` decision variables.

    Row ``k`` of ``coeff_forms`` is the form for the ``x**k`` coefficient:
    column 0 is the constant, column ``v`` the weight on variable ``v``.
    """

    coeff_forms: np.ndarray

    def __post_init__(self):
        f = np.atleast_2d(np.asarray(self.coeff_forms, dtype=float)).copy()
        f.setflags(write=False)
        object.__setattr__(self, "coeff_forms", f)

    @property
    def n_vars(self) -> int:
        return self.coeff_forms.shape[1] - 1

    @property
    def max_degree(self) -> int:
        return self.coeff_forms.shape[0] - 1

    @classmethod
    def from_terms(cls, const: Poly, terms: list[Poly]) -> "AffinePoly":
        """Build ``const + sum_v z_v * terms[v]``."""
        deg = max([const.degree] + [t.degree for t in terms])
        forms = np.zeros((deg + 1, len(terms) + 1))
        forms[: len(const.coeffs), 0] = const.coeffs
        for v, t in enumerate(terms, start=1):
            forms[: len(t.coeffs), v] = t.coeffs
        return cls(forms)

    def term(self, v: int) -> Poly:
        return Poly(self.coeff_forms[:, v])

    def eval_bilinear(self, z, x) -> float:
        z1 = np.concatenate([[1.0], np.asarray(z, dtype=float)])
        powers = float(x) ** np.arange(self.max_degree + 1)
        return float(powers @ self.coeff_forms @ z1)


def affine_substitute(a: AffinePoly, z) -> Poly:
    z = np.asarray(z, dtype=float)
    if z.shape != (a.n_vars,):
        raise ValueError(f"expected {a.n_vars} variable values, got shape {z.shape}")
    return normalize(Poly(a.coeff_forms[:, 0] + a.coeff_forms[:, 1:] @ z))
