import numpy as np
import pytest

from sgweyl import decimation as dec
from sgweyl import oracle as orc
from sgweyl.catalog import default_catalog
from sgweyl.errors import GraphLevelError


@pytest.mark.parametrize("m", range(1, 6))
def test_vertex_counts(m):
    g = orc.build_gamma(m, orc.DOUBLE)
    assert g.n_vertices == 3 ** (m + 1)
    assert np.all(g.degrees() == 4)
    assert g.is_connected() and g.boundary == ()
    sg = orc.build_gamma(m, orc.SG)
    assert sg.n_vertices == (3 ** (m + 1) + 3) // 2
    deg = sg.degrees()
    assert sorted(deg[list(sg.boundary)]) == [2, 2, 2]
    assert np.sum(deg == 4) == sg.n_vertices - 3


def test_level_cap():
    with pytest.raises(GraphLevelError):
        orc.build_gamma(7)
    with pytest.raises(GraphLevelError):
        orc.decimation_closure_report(7)


def test_level1_spectrum():
    spec = orc.graph_spectrum(orc.build_gamma(1))
    assert [m for _, m in spec.groups] == [1, 1, 2, 2, 3]
    assert [v for v, _ in spec.groups] == pytest.approx([0, 2, 3, 5, 6], abs=1e-10)


@pytest.mark.parametrize("cond", ["free", "neumann", "neumann-plain"])
def test_zero_simple(cond):
    space = orc.DOUBLE if cond == "free" else orc.SG
    spec = orc.graph_spectrum(orc.build_gamma(3, space), cond)
    assert spec.groups[0] == (0.0, 1)
    assert np.all(spec.eigenvalues >= 0)


def test_dirichlet_size():
    sg = orc.build_gamma(3, orc.SG)
    assert orc.graph_spectrum(sg, "dirichlet").eigenvalues.size == sg.n_vertices - 3


@pytest.fixture(scope="module")
def report():
    return orc.decimation_closure_report(5)


def test_closure(report):
    assert report.passed
    for lv in report.levels:
        assert not lv.closure_failures
        assert lv.n_eigenvalues == lv.n_vertices
        assert 0 <= lv.min_nd_gap <= lv.max_nd_gap <= 3


def test_union_weighted_not_plain(report):
    # even/odd split holds exactly for the weighted Neumann matrix only
    assert all(lv.union_matches for lv in report.levels)
    assert not any(lv.plain_union_matches for lv in report.levels)
    assert all(0 <= lv.plain_nd_gaps[0] <= lv.plain_nd_gaps[1] <= 3 for lv in report.levels)


@pytest.mark.parametrize("m", range(1, 6))
def test_catalog_agreement(m):
    cat = default_catalog()
    sg = orc.build_gamma(m, orc.SG)
    for spec in (orc.graph_spectrum(orc.build_gamma(m)), orc.graph_spectrum(sg, "neumann"),
                 orc.graph_spectrum(sg, "dirichlet")):
        assert orc.compare_with_catalog(spec, cat) == []
    got, want = orc.counting_agreement(m, cat)
    assert got == want == 3 ** (m + 1)


@pytest.mark.parametrize("m", [3, 4, 5])
def test_lowest_limits(m, report):
    cat = default_catalog()
    spec = report.levels[m - 1].spectrum
    mus = [v for v, _ in spec.groups if v > 1e-8][:2]
    for mu, target in zip(mus, (cat.value(1, 1), cat.value(1, 2))):
        assert orc.fractal_limit_estimate([mu], m) == pytest.approx(target, rel=1e-5)


def test_fractal_limit_sequence():
    mus = [3.0]
    for _ in range(4):
        mus.append(float(dec.phi_minus(mus[-1])))
    est = orc.fractal_limit_estimate(mus, 1)
    assert est == pytest.approx(5 * dec.psi(3.0), rel=1e-13)
    with pytest.raises(orc.DecimationError):
        orc.fractal_limit_estimate([3.0, 1.0], 1)
    with pytest.raises(orc.DecimationError):
        orc.fractal_limit_estimate([6.0, 3.0], 1)


def test_fractal_limit_six():
    assert orc.fractal_limit(6.0, 2) == pytest.approx(125 * dec.psi(3.0))


def test_closure_status():
    prev = orc.graph_spectrum(orc.build_gamma(1))
    assert orc.closure_status(0.0, prev) == "zero"
    assert orc.closure_status(5.0, prev) == "birth-5"
    assert orc.closure_status(float(dec.phi_minus(3.0)), prev) == "decimated"
    assert orc.closure_status(1.0, prev) == "FAIL"


def test_compare_level0_rejected():
    with pytest.raises(GraphLevelError):
        orc.compare_with_catalog(orc.graph_spectrum(orc.build_gamma(0)))


def test_spectrum_rows():
    rows = orc.spectrum_rows(2)
    assert sum(r[4] for r in rows) == 27
    assert all(r[5] != "FAIL" for r in rows)
