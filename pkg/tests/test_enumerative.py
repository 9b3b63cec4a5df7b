"""enumerative: CoHA characters, plethystic calculus and BPS invariants."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cohaq.enumerative import (
    QSeries,
    bps_invariants,
    coha_character,
    plethystic_exp,
    plethystic_log,
)
from cohaq.quiver import DimVector, QuiverError, a_n, dims_up_to, jordan, loop_quiver, triple

from conftest import STANDARD


# --- characters --------------------------------------------------------------------------


def test_character_examples():
    # q^chi(d,d) * prod_{k<=d} (1 - q^2k)^-1 (normalisation: see README)
    s = coha_character(loop_quiver(0), (1,), 7)
    assert s.coeffs == {1: 1, 3: 1, 5: 1, 7: 1}
    s = coha_character(jordan(), (1,), 6)
    assert s.coeffs == {0: 1, 2: 1, 4: 1, 6: 1}
    assert coha_character(loop_quiver(2), (0,), 5).coeffs == {0: 1}


def test_character_partition_counts():
    # 1/((1-q^2)(1-q^4)) counts partitions into parts 1 and 2
    s = coha_character(jordan(), (2,), 20)
    assert [s[2 * n] for n in range(11)] == [n // 2 + 1 for n in range(11)]


def test_character_rejects_bad_order():
    with pytest.raises(ValueError):
        coha_character(jordan(), (1,), 0)


# --- q-series arithmetic ----------------------------------------------------------------------


small_series = st.builds(
    lambda cs, v: QSeries({v + i: c for i, c in enumerate(cs)}, v + len(cs)),
    st.lists(st.integers(-3, 3), min_size=1, max_size=6),
    st.integers(-2, 2),
)


@given(small_series, small_series)
def test_qseries_product_commutes(a, b):
    assert (a * b).agrees(b * a)


@given(small_series)
def test_qseries_inverse(a):
    if a.val >= a.prec:
        return
    prod = a * a.inverse()
    assert prod.agrees(QSeries.one(prod.prec))


def test_qseries_precision_guard():
    s = QSeries({0: 1}, 3)
    with pytest.raises(IndexError):
        s[3]
    assert str(QSeries({-1: 1, 2: Fraction(1, 2)}, 4)) == "1*q^-1 + (1/2)*q^2 + O(q^4)"


def test_plethystic_exp_log_roundtrip():
    q = a_n(2)
    bound, prec = 3, 10
    f = {DimVector((1, 0)): QSeries({0: 1, 2: 3}, prec), DimVector((1, 1)): QSeries({1: -2}, prec)}
    z = plethystic_exp(f, q.n, bound, prec)
    back = plethystic_log(z, bound, prec)
    for d in dims_up_to(q, bound):
        expect = f.get(d, QSeries({}, prec))
        assert back.get(d, QSeries({}, prec)).agrees(expect)


def test_plethystic_exp_of_single_generator():
    # Exp(x) = 1/(1-x): every power appears with coefficient one
    z = plethystic_exp({DimVector((1,)): QSeries({0: 1}, 5)}, 1, 4, 5)
    for n in range(5):
        assert z[DimVector((n,))].coeffs == {0: 1}


# --- BPS invariants --------------------------------------------------------------------------------


def test_bps_point_quiver_single_tower():
    res = bps_invariants(loop_quiver(0), 4, 20)
    table = dict(res.table())
    assert table[DimVector((1,))].coeffs == {1: 1}
    for n in (2, 3, 4):
        assert table[DimVector((n,))].coeffs == {}
    assert res.integral and res.reconstructs


def test_bps_jordan_nonnegative():
    res = bps_invariants(jordan(), 4, 20)
    assert res.integral and res.reconstructs
    for _, s in res.table():
        assert all(c >= 0 for c in s.coeffs.values())


@pytest.mark.parametrize("name", ["loop0", "loop1", "loop2", "loop3", "triple_a1", "triple_a2"])
def test_bps_integral_and_reconstructs(name):
    res = bps_invariants(STANDARD[name], 4 if STANDARD[name].n == 1 else 3, 20)
    assert res.integral
    assert res.reconstructs
    assert DimVector((0,) * STANDARD[name].n) not in res.omega


def test_bps_known_values():
    # the 2-loop quiver: Omega_1 = q^-1, Omega_2 = q^-4 (in the q^chi normalisation)
    table = dict(bps_invariants(loop_quiver(2), 2, 10).table())
    assert table[DimVector((1,))].coeffs == {-1: 1}
    assert table[DimVector((2,))].coeffs == {-4: 1}


def test_bps_rejects_non_symmetric():
    with pytest.raises(QuiverError):
        bps_invariants(a_n(2), 2, 5)
    with pytest.raises(ValueError):
        bps_invariants(jordan(), 2, 0)
