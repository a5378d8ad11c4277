from fractions import Fraction

import pytest

from sgweyl import weyl
from sgweyl.errors import OutsideSetError


def test_base_intervals_first():
    a, ap = weyl.base_intervals(1)
    assert a.lo == pytest.approx(279.4291372709729, rel=1e-13)
    assert a.hi == ap.lo == pytest.approx(677.8606349789432, rel=1e-13)
    assert ap.hi == pytest.approx(861.8226027673225, rel=1e-13)
    assert (a.g_coefficient, ap.g_coefficient) == (18, 27)
    assert (a.g1_value, ap.g1_value) == (Fraction(0), Fraction(3, 2))


@pytest.mark.parametrize("ell", [1, 2, 3, 8, 32])
def test_base_intervals_constant(ell):
    a, ap = weyl.base_intervals(ell)
    assert ap.g_coefficient - a.g_coefficient == 9


def test_locate_examples():
    assert weyl.locate(700.0).membership == "A'[l=1,n=0]"
    assert weyl.locate(300.0).membership == "A[l=1,n=0]"
    assert weyl.locate(300.0 * 125).membership == "A[l=1,n=3]"
    assert weyl.locate(300.0 / 25).membership == "A[l=1,n=-2]"


def test_locate_endpoint_unlocated():
    a, _ = weyl.base_intervals(1)
    loc = weyl.locate(a.hi)
    assert not loc.located and loc.reason == "endpoint"
    with pytest.raises(OutsideSetError):
        weyl.G(a.hi)


@pytest.mark.parametrize("ell", [1, 2, 5, 13, 32])
@pytest.mark.parametrize("n", [-3, -1, 0, 2, 3])
def test_locate_recovers(ell, n):
    for base in weyl.base_intervals(ell):
        iv = base.scaled(n)
        for t in iv.probes():
            found = weyl.locate(t).interval
            assert (found.kind, found.ell, found.scale_n) == (base.kind, ell, n)


@pytest.mark.parametrize("ell", [1, 4, 21])
@pytest.mark.parametrize("n", [-3, 0, 3])
def test_theorem(ell, n):
    for base in weyl.base_intervals(ell):
        t = base.scaled(n).probes()[1]
        rep = weyl.verify_theorem(t, 6)
        assert rep.passed
        assert rep.m0 == max(-n, 0)
        assert all(c.g1 in (Fraction(0), Fraction(3, 2)) for c in rep.checks)


def test_expected_tilde_below_m0():
    a, _ = weyl.base_intervals(1)
    with pytest.raises(ValueError):
        a.scaled(-2).expected_tilde(1)


def test_g_periodic():
    t = 700.0
    assert weyl.G(t * 5) == pytest.approx(weyl.G(t), rel=1e-12)
    assert weyl.G1(t * 25) == Fraction(3, 2)


def test_g_range_frozen():
    lo, hi = weyl.g_range(64)
    assert lo == pytest.approx(0.10512076804410175, rel=1e-12)
    assert hi == pytest.approx(0.1924873974133261, rel=1e-12)


def test_scan():
    samples = weyl.weyl_ratio_scan(1.0, 5.0 ** 6, 200)
    assert len(samples) == 200
    for s in samples:
        assert 0.14 <= s.weyl_ratio <= 1.0
        assert s.weyl_ratio == pytest.approx(s.ratio_N + s.ratio_D)
    located = [s for s in samples if s.membership != "unlocated" and "n=-" not in s.membership]
    assert located
    for s in located:
        assert s.weyl_ratio == pytest.approx(2 * s.g_value, rel=1e-9)


def test_scan_args():
    with pytest.raises(ValueError):
        weyl.weyl_ratio_scan(5.0, 1.0, 10)
