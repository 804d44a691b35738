"""Nonnegativity on [0, 1] via an even lifted polynomial and a Gram certificate.

The substitution ``x = u**2 / (1 + u**2)`` maps the real line onto [0, 1), and
``Pi(u) = (1 + u**2)**q * p(x)`` is an even polynomial of degree ``2q``.
``p >= 0`` on [0, 1] exactly when ``Pi`` is a sum of squares, i.e. when a
positive semidefinite ``B`` of order ``q + 1`` has anti-diagonal sums equal to
the coefficients of ``Pi``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import comb

from .poly import AffinePoly, Poly

RESIDUAL_RTOL = 1e-6
PSD_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class SosLift:
    q: int
    pi_coeffs: np.ndarray  # (2q+1,) or (2q+1, n_vars+1)

    @property
    def gram_dim(self) -> int:
        return self.q + 1

    @property
    def is_affine(self) -> bool:
        return self.pi_coeffs.ndim == 2

    def substitute(self, z) -> np.ndarray:
        if not self.is_affine:
            return self.pi_coeffs
        z1 = np.concatenate([[1.0], np.asarray(z, dtype=float)])
        return self.pi_coeffs @ z1

    def evaluate(self, u, z=None):
        c = self.substitute(z) if self.is_affine else self.pi_coeffs
        return np.polynomial.polynomial.polyval(u, c)


def lift(p: Poly | AffinePoly, q: int) -> SosLift:
    if isinstance(p, AffinePoly):
        coeffs, deg = p.coeff_forms, p.max_degree
    else:
        coeffs, deg = p.coeffs[:, None], p.degree
    if q < 1 or q < deg:
        raise ValueError(f"lift order q={q} must be >= max(1, degree {deg})")
    out = np.zeros((2 * q + 1, coeffs.shape[1]))
    for j in range(q + 1):
        i = np.arange(min(j, deg) + 1)
        out[2 * j] = comb(q - i, j - i) @ coeffs[i]
    if not isinstance(p, AffinePoly):
        out = out[:, 0]
    return SosLift(q, out)


def lift_bernstein(beta) -> SosLift:
    """Lift from Bernstein coefficients of degree ``q``: ``Pi_2j = C(q, j) beta_j``."""
    beta = np.asarray(beta, dtype=float)
    q = beta.shape[0] - 1
    out = np.zeros((2 * q + 1,) + beta.shape[1:])
    cq = comb(q, np.arange(q + 1))
    out[0::2] = beta * cq.reshape((-1,) + (1,) * (beta.ndim - 1))
    return SosLift(q, out)


@dataclass(frozen=True)
class GramEquation:
    """``sum(w * B[i, j] for (i, j), w in entries) == rhs`` over the upper triangle."""

    order: int
    entries: tuple[tuple[tuple[int, int], float], ...]
    rhs: float | np.ndarray


def gram_constraints(lift_: SosLift) -> list[GramEquation]:
    n = lift_.gram_dim
    eqs = []
    for l in range(2 * lift_.q + 1):
        entries = []
        for i in range(max(0, l - n + 1), l // 2 + 1):
            j = l - i
            entries.append(((i, j), 1.0 if i == j else 2.0))
        eqs.append(GramEquation(l, tuple(entries), lift_.pi_coeffs[l]))
    return eqs


def antidiagonal_sums(B) -> np.ndarray:
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    flipped = np.fliplr(B)
    return np.array([np.trace(flipped, offset=n - 1 - l) for l in range(2 * n - 1)])


def _max_weight(q: int) -> np.ndarray:
    # max over real u of |u|**l / (1 + u**2)**q for l = 0..2q
    l = np.arange(2 * q + 1, dtype=float)
    out = np.ones_like(l)
    mid = (l > 0) & (l < 2 * q)
    lm = l[mid]
    s = lm / (2 * q - lm)
    out[mid] = np.exp(0.5 * lm * np.log(s) - q * np.log1p(s))
    return out


@dataclass
class GramCertificate:
    q: int
    B: np.ndarray
    reconstruction_residual: float
    min_eigenvalue: float
    valid: bool
    soundness_bound: float = float("nan")
    pi_scale: float = 1.0
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "B": np.asarray(self.B).tolist(),
            "residual": self.reconstruction_residual,
            "min_eig": self.min_eigenvalue,
            "valid": self.valid,
            "soundness_bound": self.soundness_bound,
            "pi_scale": self.pi_scale,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GramCertificate":
        return cls(
            q=int(obj["q"]),
            B=np.asarray(obj["B"], dtype=float),
            reconstruction_residual=float(obj["residual"]),
            min_eigenvalue=float(obj["min_eig"]),
            valid=bool(obj.get("valid", False)),
            soundness_bound=float(obj.get("soundness_bound", float("nan"))),
            pi_scale=float(obj.get("pi_scale", 1.0)),
        )


def verify_certificate(p: Poly | SosLift, q: int, B) -> GramCertificate:
    """Check ``B`` against the lift of ``p``.

    Accepted certificates bound ``p(x) >= -soundness_bound`` on [0, 1].
    """
    B = np.asarray(B, dtype=float)
    if B.shape != (q + 1, q + 1):
        raise ValueError(f"Gram matrix must be {(q + 1, q + 1)}, got {B.shape}")
    if isinstance(p, SosLift):
        if p.q != q or p.is_affine:
            raise ValueError("lift must be concrete and of matching order")
        pi = p.pi_coeffs
    else:
        pi = lift(p, q).pi_coeffs
    Bs = 0.5 * (B + B.T)
    r = pi - antidiagonal_sums(Bs)
    residual = float(np.max(np.abs(r)))
    min_eig = float(np.linalg.eigvalsh(Bs)[0])
    scale = max(1.0, float(np.max(np.abs(pi))))
    valid = residual <= RESIDUAL_RTOL * scale and min_eig >= -PSD_RTOL * (np.trace(Bs) + 1.0)
    # |D z|**2 == (1 + u**2)**q for z = (1, u, ..., u**q), D = diag(sqrt(C(q, k)))
    d = np.sqrt(comb(q, np.arange(q + 1)))
    min_eig_scaled = float(np.linalg.eigvalsh(Bs / np.outer(d, d))[0])
    bound = float(np.abs(r) @ _max_weight(q) + max(0.0, -min_eig_scaled))
    return GramCertificate(q, Bs, residual, min_eig, bool(valid), bound, scale)
