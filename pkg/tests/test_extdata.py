"""extdata: Euler classes, Psi-series and R-matrices of the Ext complex."""

from __future__ import annotations

import pytest

from cohaq.cohomology import act_pullback, taut_specialize
from cohaq.extdata import (
    euler_classes,
    ext_data,
    psi_dual_series,
    psi_series,
    r_matrix,
    r_taut_generic,
)
from cohaq.poly import Poly, Z, parse_poly
from cohaq.quiver import a_n, dims_up_to, euler_form, jordan, loop_quiver, splits, triple
from cohaq.spectral import SpectralFraction, expand_at_infinity, fraction_eq

from conftest import STANDARD

P = parse_poly
W = ("w",)


def _frac(num: str, den: str = "1") -> SpectralFraction:
    return SpectralFraction.ratio(P(num), P(den))


# --- Euler classes -----------------------------------------------------------------


def test_euler_classes_jordan_weighted():
    # a loop of weight t contributes t*h/2; take t = 2 so the shift is h
    e0, e1, e1op = euler_classes(jordan(2), (1,), (1,))
    assert e0 == P("x[2,1,1] - x[1,1,1]")
    assert e1 == P("x[2,1,1] - x[1,1,1] + h")
    assert e1op == P("x[2,1,1] - x[1,1,1] - h")


def test_euler_classes_a2():
    e0, e1, _ = euler_classes(a_n(2), (1, 0), (0, 1))
    assert e0 == Poly.const(1)
    assert e1 == P("x[2,2,1] - x[1,1,1]")


@pytest.mark.parametrize("name", sorted(STANDARD))
def test_euler_classes_trivial_second_factor(name):
    q = STANDARD[name]
    for d in dims_up_to(q, 2):
        assert euler_classes(q, d, q.zero()) == (Poly.const(1),) * 3


# --- Psi series ------------------------------------------------------------------------


def test_psi_examples():
    assert fraction_eq(psi_series(jordan(), (1,), (1,)), SpectralFraction(1))
    assert fraction_eq(psi_series(loop_quiver(0), (1,), (1,)), _frac("z + x[2,1,1] - x[1,1,1]"))
    for g in range(4):
        base = P("z + x[2,1,1] - x[1,1,1]")
        expected = SpectralFraction(1, {base: 1 - g}) if g != 1 else SpectralFraction(1)
        assert fraction_eq(psi_series(loop_quiver(g), (1,), (1,)), expected)


@pytest.mark.parametrize("name", ["loop0", "loop2", "a2", "triple_a1", "triple_a2"])
def test_psi_leading_power_is_rank(name):
    q = STANDARD[name]
    for d in dims_up_to(q, 3):
        for d1, d2 in splits(d):
            ser = expand_at_infinity(psi_series(q, d1, d2), Z, 6)
            lead = max(k for k, c in ser.coeffs.items() if not c.is_zero())
            assert lead == euler_form(q, d1, d2)
            assert ser.coeff(lead) == Poly.const(1)


def test_psi_sign_and_dual():
    q = triple(a_n(2))
    for d1, d2 in [((1, 0), (1, 1)), ((1, 1), (0, 1))]:
        data = ext_data(q, d1, d2)
        minus = psi_series(q, d1, d2).subs({Z: -Poly.var(Z)})
        assert fraction_eq(data.psi_minus, minus)
        # dual series: (-1)^rk Psi(Ext of the swapped pair, -z) with legs swapped
        swapped = psi_series(q, d2, d1, -1, legs=(2, 1))
        sign = -1 if euler_form(q, d2, d1) % 2 else 1
        assert fraction_eq(psi_dual_series(q, d1, d2), swapped * sign)


@pytest.mark.parametrize("name", ["loop0", "loop2", "a2", "triple_a1"])
def test_psi_translation(name):
    q = STANDARD[name]
    for d in dims_up_to(q, 3):
        for d1, d2 in splits(d):
            psi = psi_series(q, d1, d2)
            w = Poly.var(W)
            on1 = psi.subs({k: Poly.var(k) + w for k in psi.variables() if k[0] == "x" and k[1] == 1})
            on2 = psi.subs({k: Poly.var(k) + w for k in psi.variables() if k[0] == "x" and k[1] == 2})
            assert fraction_eq(on1, psi.subs({Z: Poly.var(Z) - w}))
            assert fraction_eq(on2, psi.subs({Z: Poly.var(Z) + w}))


# --- R-matrices ---------------------------------------------------------------------------


def test_r_matrix_examples():
    for d1, d2 in [((1,), (1,)), ((2,), (1,)), ((0,), (3,))]:
        assert fraction_eq(r_matrix(loop_quiver(0), d1, d2), SpectralFraction(1))
    r = r_matrix(jordan(2), (1,), (1,))
    assert fraction_eq(r, _frac("x[2,1,1] - x[1,1,1] + z + h", "x[2,1,1] - x[1,1,1] + z - h"))
    assert fraction_eq(r_matrix(jordan(), (1,), (1,)), SpectralFraction(1))


@pytest.mark.parametrize("name", sorted(STANDARD))
def test_localised_r_matrix_translates_to_full(name):
    q = STANDARD[name]
    for d in dims_up_to(q, 3):
        for d1, d2 in splits(d):
            loc = r_matrix(q, d1, d2, "localised")
            moved = loc.subs({k: Poly.var(k) + Poly.var(Z) for k in loc.variables() if k[0] == "x" and k[1] == 2})
            assert fraction_eq(moved, r_matrix(q, d1, d2))


@pytest.mark.parametrize("name", ["loop1", "loop2", "triple_a1", "triple_a2"])
def test_taut_r_matrix_leading_term(name):
    q = STANDARD[name]
    for d in dims_up_to(q, 3):
        for d1, d2 in splits(d):
            ser = expand_at_infinity(r_matrix(q, d1, d2, "taut"), Z, 2)
            assert ser.coeff(0) == Poly.const(1)
            assert all(ser.coeff(k).is_zero() for k in range(1, 4))


def test_generic_r_taut_specialises_to_componentwise():
    q = triple(a_n(1))
    order = 5
    generic = r_taut_generic(q, order)
    assert generic.coeff(0) == Poly.const(1)
    for d1, d2 in [((1,), (1,)), ((2,), (1,)), ((1,), (2,))]:
        spec = generic.map(lambda c: taut_specialize(taut_specialize(c, d1, 1), d2, 2))
        direct = expand_at_infinity(r_matrix(q, d1, d2, "taut"), Z, order)
        assert spec == direct


def test_generic_r_taut_at_zero_h():
    q = triple(a_n(1))
    series = r_taut_generic(q, 6)
    for k in range(7):
        c = series.coeff(-k).subs({("h", 1): Poly()})
        assert c == (Poly.const(1) if k == 0 else Poly())


def test_r_taut_rejects_bad_order():
    with pytest.raises(ValueError):
        r_taut_generic(triple(a_n(1)), 0)


def test_unknown_mode():
    with pytest.raises(ValueError):
        r_matrix(jordan(), (1,), (1,), "bogus")
