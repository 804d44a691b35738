import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldpcsdp.de import (
    MonotonicityError,
    analytic_threshold,
    de_converges,
    de_step,
    de_trajectory,
    grid_check,
    threshold_bisect,
)
from ldpcsdp.ensemble import DegreeDistribution, Ensemble, dd_to_poly, rate
from ldpcsdp.poly import Poly, X

LAM3 = Poly([0, 0, 1.0])
RHO6 = Poly.monomial(5)
EX3_LAMBDA = DegreeDistribution({2: 0.4021, 3: 0.2137, 7: 0.3902}).renormalized()


def test_de_step_examples():
    assert de_step(0.0, 0.4, LAM3, RHO6) == 0.0
    assert de_step(1.0, 0.4, LAM3, RHO6) == pytest.approx(0.4)


def test_regular_36_below_threshold_converges():
    rep = de_converges(0.42, LAM3, RHO6)
    assert rep.converged and rep.final_erasure <= 1e-10 and rep.iterations_used <= 10_000
    # the design constraint holds at this epsilon
    q = lambda x: x / 0.42 - (1 - (1 - x) ** 5) ** 2
    assert grid_check(q, 100_000) >= 0


def test_de_converges_examples():
    rep = de_converges(0.0, LAM3, RHO6)
    assert rep.converged and rep.iterations_used == 1
    above = de_converges(0.5, LAM3, RHO6)
    assert not above.converged and above.final_erasure > 1e-3
    assert de_converges(0.485, dd_to_poly(EX3_LAMBDA), RHO6).converged


def test_threshold_examples():
    # linear recursion x <- eps*x; the iteration cap stops just short of 1
    assert threshold_bisect(X, X) >= 0.997
    assert analytic_threshold(X, X) == 1.0
    assert threshold_bisect(LAM3, RHO6) == pytest.approx(0.4294, abs=1e-3)


def test_analytic_threshold_matches_bisection():
    assert analytic_threshold(LAM3, RHO6) == pytest.approx(threshold_bisect(LAM3, RHO6, 1e-6), abs=1e-4)
    ex3 = dd_to_poly(EX3_LAMBDA)
    assert analytic_threshold(ex3, RHO6) == pytest.approx(threshold_bisect(ex3, RHO6), abs=2e-4)


def test_grid_check_examples():
    assert grid_check(Poly([0, 1, -1]), 10) == 0.0
    m = grid_check(Poly([0.09, -0.6, 1]), 100_000)
    assert -1e-15 <= m <= 1e-12
    assert grid_check(lambda x: np.cos(x), 4) == pytest.approx(np.cos(1.0))
    with pytest.raises(ValueError):
        grid_check(X, 1)


def test_increase_raises():
    with pytest.raises(MonotonicityError):
        de_trajectory(0.9, Poly([0, 2.0]), RHO6)


def test_report_serializes():
    d = de_converges(0.3, LAM3, RHO6).to_json()
    assert {"epsilon_tested", "converged", "final_erasure", "iterations_used",
            "threshold_estimate", "grid_min"} <= set(d)


@st.composite
def ensembles(draw):
    def dd(lo, hi, side):
        degs = draw(st.lists(st.integers(lo, hi), min_size=1, max_size=4, unique=True))
        w = np.array(draw(st.lists(st.floats(0.05, 1), min_size=len(degs), max_size=len(degs))))
        return DegreeDistribution(dict(zip(degs, w / w.sum())), side)

    return dd(2, 12, "lambda"), dd(3, 10, "rho")


@settings(max_examples=40, deadline=None)
@given(ensembles(), st.floats(0, 1), st.floats(0, 1), st.floats(0.01, 0.99))
def test_de_step_monotone_in_x(ens, a, b, eps):
    lam, rho = map(dd_to_poly, ens)
    lo, hi = sorted((a, b))
    assert de_step(lo, eps, lam, rho) <= de_step(hi, eps, lam, rho) + 1e-15
    v = de_step(hi, eps, lam, rho)
    assert -1e-15 <= v <= eps + 1e-15


@settings(max_examples=25, deadline=None)
@given(ensembles(), st.floats(0.05, 0.95))
def test_trajectory_is_non_increasing(ens, eps):
    lam, rho = map(dd_to_poly, ens)
    traj = de_trajectory(eps, lam, rho, max_iter=2000)
    assert np.all(np.diff(traj) <= 0)
    rep = de_converges(eps, lam, rho, max_iter=2000)
    assert (not rep.converged) or rep.final_erasure <= 1e-10


@settings(max_examples=15, deadline=None)
@given(ensembles())
def test_threshold_respects_capacity(ens):
    lam_d, rho_d = ens
    lam, rho = dd_to_poly(lam_d), dd_to_poly(rho_d)
    thr = threshold_bisect(lam, rho)
    assert 0 <= thr <= 1
    assert thr <= 1 - rate(Ensemble(lam_d, rho_d)) + 5e-3
