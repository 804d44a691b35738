import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldpcsdp.ensemble import (
    DegreeDistribution,
    Ensemble,
    InvalidChannelError,
    capacity_gap,
    dd_to_poly,
    inv_avg,
    rate,
    validate,
)
from ldpcsdp.poly import Poly, X

EX3_LAMBDA = {2: 0.4021, 3: 0.2137, 7: 0.3902}
EX4_RHO = {6: 0.48555, 7: 0.51445}


def test_dd_to_poly_examples():
    assert dd_to_poly(DegreeDistribution({5: 1.0}, "rho")) == Poly.monomial(4)
    assert dd_to_poly(DegreeDistribution({2: 1.0})) == X
    p = dd_to_poly(DegreeDistribution(EX4_RHO, "rho"))
    assert p == Poly([0, 0, 0, 0, 0, 0.48555, 0.51445])
    assert p.coeffs[0] == 0.0


def test_inv_avg_examples():
    assert inv_avg(DegreeDistribution({5: 1.0})) == pytest.approx(0.2)
    assert inv_avg(DegreeDistribution({2: 1.0})) == pytest.approx(0.5)
    expected = 0.4021 / 2 + 0.2137 / 3 + 0.3902 / 7
    assert inv_avg(DegreeDistribution(EX3_LAMBDA)) == pytest.approx(expected, abs=1e-12)
    assert inv_avg(DegreeDistribution(EX3_LAMBDA)) == pytest.approx(0.328026, abs=1e-6)


def test_rate_examples():
    e = Ensemble(DegreeDistribution({3: 1.0}), DegreeDistribution({6: 1.0}, "rho"))
    assert rate(e) == pytest.approx(0.5)
    e3 = Ensemble(DegreeDistribution(EX3_LAMBDA), DegreeDistribution({6: 1.0}, "rho"))
    assert rate(e3) == pytest.approx(0.4919, abs=1e-4)
    same = DegreeDistribution({3: 0.5, 4: 0.5})
    assert rate(Ensemble(same, DegreeDistribution(same.coeffs, "rho"))) == pytest.approx(0.0)


def test_capacity_gap_examples():
    assert capacity_gap(0.4922, 0.49) == pytest.approx(0.0349, abs=1e-4)
    assert capacity_gap(0.6, 0.4) == pytest.approx(0.0)
    assert capacity_gap(0.5, 0.4741) == pytest.approx(0.0493, abs=1e-4)
    for bad in (0.0, 1.0, 1.5, -0.1):
        with pytest.raises(InvalidChannelError):
            capacity_gap(0.3, bad)


def test_validate_examples():
    assert validate(DegreeDistribution({2: 0.5, 3: 0.5})).ok
    rep = validate(DegreeDistribution({2: 0.6, 3: 0.6}))
    assert not rep.ok and any("sum" in v for v in rep.violations)
    printed = DegreeDistribution(EX3_LAMBDA)
    assert printed.total == pytest.approx(1.006)
    assert not validate(printed).ok
    assert validate(printed.renormalized()).ok


def test_validate_degree_and_sign():
    assert not validate(DegreeDistribution({1: 1.0})).ok
    assert not validate(DegreeDistribution({2: 1.2, 3: -0.2})).ok
    assert not validate(DegreeDistribution({})).ok


def test_prune_and_json_round_trip():
    d = DegreeDistribution({2: 0.5, 3: 5e-9, 4: 0.5 - 5e-9})
    p = d.pruned()
    assert 3 not in p.coeffs and validate(p).ok
    blob = json.dumps(p.to_json())
    assert DegreeDistribution.from_json(blob) == p
    assert set(json.loads(blob)) == {"side", "coeffs"}


def test_side_must_be_known():
    with pytest.raises(ValueError):
        DegreeDistribution({2: 1.0}, "beta")


def test_derivative_at_one():
    assert DegreeDistribution({6: 1.0}, "rho").derivative_at_one() == 5.0


@st.composite
def distributions(draw):
    degs = draw(st.lists(st.integers(2, 30), min_size=1, max_size=8, unique=True))
    w = np.array(draw(st.lists(st.floats(0.01, 1), min_size=len(degs), max_size=len(degs))))
    w = w / w.sum()
    return DegreeDistribution(dict(zip(degs, w)))


@settings(max_examples=80, deadline=None)
@given(distributions())
def test_inv_avg_bounds(d):
    v = inv_avg(d)
    assert 1 / d.max_degree - 1e-12 <= v <= 0.5 + 1e-12


@settings(max_examples=40, deadline=None)
@given(distributions(), distributions())
def test_rate_ignores_map_ordering(a, b):
    rho = DegreeDistribution(b.coeffs, "rho")
    rev = DegreeDistribution(dict(reversed(list(a.coeffs.items()))))
    assert rate(Ensemble(a, rho)) == rate(Ensemble(rev, rho))
