import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sgweyl import decimation as dec
from sgweyl.errors import ConvergenceError, DomainError

PSI_2 = 3.363199777869676
PSI_3 = 5.422885079831545
PSI_5 = 11.177165490838917

domain = st.floats(min_value=0.0, max_value=6.25, allow_nan=False)
unit = st.floats(min_value=0.0, max_value=5.0, allow_nan=False)


def test_phi_values():
    assert dec.phi_plus(0.0) == 5.0
    assert dec.phi_minus(0.0) == 0.0
    assert dec.phi_minus(6.0) == pytest.approx(2.0, rel=1e-15)
    assert dec.phi_plus(6.0) == pytest.approx(3.0, rel=1e-15)
    assert dec.phi_plus(6.25) == dec.phi_minus(6.25) == 2.5


def test_phi_sign_spellings():
    for s in ("+", 1):
        assert dec.phi(s, 2.0) == dec.phi_plus(2.0)
    for s in ("-", -1):
        assert dec.phi(s, 2.0) == dec.phi_minus(2.0)
    with pytest.raises(ValueError):
        dec.phi("x", 1.0)


def test_phi_domain():
    with pytest.raises(DomainError):
        dec.phi_plus(6.3)
    with pytest.raises(DomainError):
        dec.phi_minus(np.array([1.0, 7.0]))


def test_phi_minus_small_t_is_accurate():
    t = 1e-12
    assert dec.phi_minus(t) == pytest.approx(t / 5, rel=1e-9)


@given(domain)
def test_phi_conjugacy(t):
    for s in "+-":
        x = dec.phi(s, t)
        assert x * (5 - x) == pytest.approx(t, rel=1e-12, abs=1e-14)


@given(domain)
def test_phi_branches_sum_to_five(t):
    assert dec.phi_plus(t) + dec.phi_minus(t) == pytest.approx(5.0, rel=1e-15)


def test_psi_frozen():
    assert dec.psi(2.0) == pytest.approx(PSI_2, rel=1e-13)
    assert dec.psi(3.0) == pytest.approx(PSI_3, rel=1e-13)
    assert dec.psi(5.0) == pytest.approx(PSI_5, rel=1e-13)
    assert dec.psi(0.0) == 0.0


def test_psi_small_t_slope():
    assert dec.psi(1e-9) == pytest.approx(1.5e-9, rel=1e-8)


@settings(max_examples=200)
@given(unit)
def test_psi_scaling(x):
    assert 5 * dec.psi(dec.phi_minus(x)) == pytest.approx(dec.psi(x), rel=1e-10, abs=1e-300)


def test_psi_monotone():
    v = dec.psi_array(np.linspace(0, 5, 501))
    assert np.all(np.diff(v) > 0)


def test_psi_iteration_cap():
    with pytest.raises(ConvergenceError):
        dec.psi(3.0, max_iter=2)


def test_signword_roundtrip():
    w = dec.SignWord.parse("+-+")
    assert str(w) == "+-+"
    assert len(w) == 3
    assert dec.SignWord.from_code(w.code(), 3) == w
    assert str(dec.SignWord.from_code(0, 0)) == ""


def test_phi_word_order():
    # last sign applied first
    assert dec.phi_word("+-", 3.0) == dec.phi_plus(dec.phi_minus(3.0))
    assert dec.phi_word("", 3.0) == 3.0


def test_family_frozen():
    assert dec.family_values(2, 4) == pytest.approx(
        [16.81599888934838, 240.16859632126173, 920.6196979340441, 1354.2972616653412], rel=1e-13)
    assert dec.family_values(5, 2) == pytest.approx([55.88582745419458, 172.3645205534645], rel=1e-13)
    assert dec.primitive_value(3, 1) == pytest.approx(5 * PSI_3, rel=1e-13)


def test_primitive_words():
    lst = dec.primitive_list(3, 4)
    assert [str(e.word) for e in lst] == ["", "+", "++", "+-"]
    for e in lst:
        assert dec.primitive_value_from_word(3, e.word) == pytest.approx(e.value, rel=1e-13)


@pytest.mark.parametrize("p", dec.GENERATORS)
def test_family_increasing_and_level_bounds(p):
    vals, codes, lens = dec.family_arrays(p, 1 << 10)
    assert np.all(np.diff(vals) > 0)
    for m in range(11):
        lo, hi = dec.level_bounds(m)
        block = vals[lens == m]
        assert block.min() >= lo * (1 - 1e-14)
        assert block.max() <= hi * (1 + 1e-14)
        if m >= 1:
            assert block.max() < hi


def test_level_zero_exception():
    # level 0 reaches below psi(3)*5 for p=2 and up to psi(5)*5 for p=5
    assert dec.primitive_value(2, 1) < 5 * PSI_3
    assert dec.primitive_value(5, 1) == pytest.approx(5 * PSI_5, rel=1e-14)


def test_level_of_rank():
    assert [dec.level_of_rank(n) for n in (1, 2, 3, 4, 5, 8, 9)] == [0, 1, 2, 2, 3, 3, 4]
    with pytest.raises(ValueError):
        dec.level_of_rank(0)


def test_bad_generator():
    with pytest.raises(ValueError):
        dec.primitive_value(4, 1)


def test_max_abs_derivative():
    assert dec.max_abs_derivative(0.0) == pytest.approx(0.2)
    assert dec.max_abs_derivative(5.0) == pytest.approx(1 / math.sqrt(5))
