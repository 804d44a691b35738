"""Bernstein-basis coefficient helpers on [0, 1].

A degree-``n`` polynomial is ``sum_k beta[k] * C(n, k) x**k (1-x)**(n-k)``.
Products of polynomials with nonnegative Bernstein coefficients involve only
positive weights, so the high-degree constraint polynomials built here keep
full relative accuracy where their monomial expansions would not.

Functions accept 1-D coefficient vectors or 2-D arrays whose columns are
independent coefficient vectors (affine forms).
"""
from __future__ import annotations

import numpy as np
from scipy.special import comb


def binom_row(n: int) -> np.ndarray:
    return comb(n, np.arange(n + 1), exact=False)


def from_monomial(a, n: int | None = None) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    d = a.shape[0] - 1
    n = d if n is None else n
    if n < d:
        raise ValueError("target degree below polynomial degree")
    out = np.zeros((n + 1,) + a.shape[1:])
    cn = binom_row(n)
    for k in range(n + 1):
        i = np.arange(min(k, d) + 1)
        w = comb(k, i) / cn[i]
        out[k] = np.tensordot(w, a[i], axes=(0, 0))
    return out


def to_monomial(beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    n = beta.shape[0] - 1
    out = np.zeros_like(beta)
    cn = binom_row(n)
    for i in range(n + 1):
        k = np.arange(i + 1)
        w = cn[i] * comb(i, k) * (-1.0) ** (i - k)
        out[i] = np.tensordot(w, beta[k], axes=(0, 0))
    return out


def multiply(f, g) -> np.ndarray:
    """Product of a Bernstein vector/form ``f`` with a Bernstein vector ``g``."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    m, n = f.shape[0] - 1, g.shape[0] - 1
    fs = f * binom_row(m).reshape((-1,) + (1,) * (f.ndim - 1))
    gs = g * binom_row(n)
    if f.ndim == 1:
        prod = np.convolve(fs, gs)
    else:
        prod = np.stack([np.convolve(fs[:, j], gs) for j in range(f.shape[1])], axis=1)
    return prod / binom_row(m + n).reshape((-1,) + (1,) * (f.ndim - 1))


def power(f, e: int) -> np.ndarray:
    out = np.ones(1)
    for _ in range(e):
        out = multiply(out, f)
    return out


def elevate(beta, n_target: int) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    n = beta.shape[0] - 1
    if n_target < n:
        raise ValueError("cannot lower degree by elevation")
    if n_target == n:
        return beta.copy()
    return multiply(beta, np.ones(n_target - n + 1))


def divide_by_x(beta) -> np.ndarray:
    """Bernstein coefficients of ``p(x)/x`` given ``p(0) == 0`` (``beta[0]`` ignored)."""
    beta = np.asarray(beta, dtype=float)
    n = beta.shape[0] - 1
    k = np.arange(1, n + 1, dtype=float)
    return beta[1:] * (n / k).reshape((-1,) + (1,) * (beta.ndim - 1))


def evaluate(beta, x):
    """De Casteljau evaluation of a 1-D Bernstein vector."""
    x = np.asarray(x, dtype=float)
    b = np.asarray(beta, dtype=float)
    pts = np.broadcast_to(b[:, None], (b.size, x.size)).copy()
    xr = x.reshape(-1)
    for r in range(1, b.size):
        pts[: b.size - r] = (1 - xr) * pts[: b.size - r] + xr * pts[1 : b.size - r + 1]
    out = pts[0].reshape(x.shape)
    return out if out.ndim else float(out)
