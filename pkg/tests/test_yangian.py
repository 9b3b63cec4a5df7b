"""yangian: Phi-series, the Cartan-spherical sector, R1-R3 and the two coproducts."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from cohaq.cohomology import hbar, taut_coproduct, taut_specialize, taut_translate
from cohaq.poly import Poly, U, Z, gkey, parse_poly, xkey
from cohaq.quiver import QuiverError, a_n, cartan_matrix, dims_up_to, triple
from cohaq.spectral import SpectralFraction, fraction_eq
from cohaq.yangian import (
    ExtendedElement,
    check_r2,
    check_r3,
    commutator,
    compare_coproducts,
    drinfeld_coproduct_x,
    extended_jl_coproduct,
    extended_product,
    phi_component,
    phi_component_coeffs,
    phi_first_order,
    phi_generic,
)

P = parse_poly
T1, T2, T3 = triple(a_n(1)), triple(a_n(2)), triple(a_n(3))
H = hbar()


def _on_leg(p: Poly, leg: int) -> Poly:
    return p.rename({g: ("g", leg) + g[2:] for g in p.variables() if g[0] == "g"})


# --- Phi series ---------------------------------------------------------------------


def test_phi_component_examples():
    expected = SpectralFraction.ratio(P("u - x[1,1] + h"), P("u - x[1,1] - h"))
    assert fraction_eq(phi_component(T1, 0, (1,)), expected)
    assert phi_component_coeffs(T1, 0, (1,), 2) == [Poly.const(2), P("2*x[1,1] + 2*h")]
    assert fraction_eq(phi_component(T2, 0, (0, 0)), SpectralFraction(1))
    assert all(c.is_zero() for c in phi_component_coeffs(T2, 1, (0, 0), 4))


def test_phi_requires_tripled_quiver():
    with pytest.raises(QuiverError):
        phi_component(a_n(2), 0, (1, 0))
    with pytest.raises(QuiverError):
        phi_generic(a_n(2), 0, 2)


@pytest.mark.parametrize("q", [T1, T2, T3], ids=["A1", "A2", "A3"])
def test_phi_generic_first_order(q):
    for i in range(q.n):
        phis = phi_generic(q, i, 6)
        for r, p in enumerate(phis):
            assert p.subs({("h", 1): Poly()}) == phi_first_order(q, i, r)


@pytest.mark.parametrize("q", [T1, T2], ids=["A1", "A2"])
def test_phi_generic_specialises_to_components(q):
    order = 6
    for i in range(q.n):
        generic = phi_generic(q, i, order)
        for d in dims_up_to(q, 3, include_zero=True):
            comp = phi_component_coeffs(q, i, d, order)
            assert [taut_specialize(p, d) for p in generic] == comp


def test_phi_zero_specialisations():
    for n in range(4):
        assert taut_specialize(phi_generic(T1, 0, 1)[0], (n,)) == Poly.const(2 * n)
    for q in (T2, T3):
        c = cartan_matrix(q.base)
        for i in range(q.n):
            phi0 = phi_generic(q, i, 1)[0]
            for j in range(q.n):
                assert taut_specialize(phi0, q.delta(j)) == Poly.const(c[i][j])


@pytest.mark.parametrize("q", [T1, T2], ids=["A1", "A2"])
def test_phi_coproduct_and_translation(q):
    for i in range(q.n):
        phis = phi_generic(q, i, 6)
        for r, p in enumerate(phis):
            expected = _on_leg(p, 1) + _on_leg(p, 2)
            for r1 in range(r):
                expected = expected + H * _on_leg(phis[r1], 1) * _on_leg(phis[r - 1 - r1], 2)
            assert taut_coproduct(p) == expected
            shifted = sum((phis[r1] * Poly.var(Z) ** (r - r1) * math.comb(r, r1) for r1 in range(r + 1)), Poly())
            assert taut_translate(p) == shifted


# --- extended algebra and relations -----------------------------------------------------


@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
def test_r1_cartan_commutativity(r1, r2, s):
    phis = phi_generic(T2, 0, 4) + phi_generic(T2, 1, 4)
    a = ExtendedElement.unit(phis[r1])
    b = ExtendedElement.unit(phis[4 + r2])
    assert commutator(T2, a, b).is_zero()
    # unit acts trivially on a spherical element
    x = ExtendedElement.spherical(1, s)
    assert extended_product(T2, ExtendedElement.unit(1), x) == x


def test_spherical_times_spherical_is_rejected():
    x = ExtendedElement.spherical(0, 1)
    with pytest.raises(ValueError):
        extended_product(T1, x, x)


@pytest.mark.parametrize("q", [T1, T2, T3], ids=["A1", "A2", "A3"])
def test_r2(q):
    for i in range(q.n):
        for j in range(q.n):
            for s in range(5):
                ok, lhs, rhs = check_r2(q, i, j, s)
                assert ok, f"R2 fails at i={i} j={j} s={s}: {lhs} != {rhs}"


@pytest.mark.parametrize("q", [T1, T2, T3], ids=["A1", "A2", "A3"])
def test_r3(q):
    for i in range(q.n):
        phis = phi_generic(q, i, 6)
        for j in range(q.n):
            for r in range(5):
                for s in range(5):
                    ok, lhs, rhs = check_r3(q, i, j, r, s, phis)
                    assert ok, f"R3 fails at i={i} j={j} r={r} s={s}: {lhs} != {rhs}"


def test_r2_example_commutator():
    phi0 = phi_generic(T2, 0, 1)[0]
    lhs = commutator(T2, ExtendedElement.unit(phi0), ExtendedElement.spherical(1, 2))
    assert lhs == ExtendedElement.spherical(1, 2).scale(-1)


# --- coproducts -----------------------------------------------------------------------------


def test_drinfeld_first_correction():
    phis = [_on_leg(p, 1) for p in phi_generic(T1, 0, 4)]
    for n in range(4):
        ser = drinfeld_coproduct_x(T1, 0, n, 4, phis).normalised()
        assert ser[-1][(None, (0, n))] == -H * phis[0]
        # leading part: translation on the first leg, x_n on the second
        assert ser[0][((0, n), None)] == Poly.const(1)
        assert ser[0][(None, (0, n))] == Poly.const(1)
        for k in range(1, n + 1):
            assert ser[k][((0, n - k), None)] == Poly.const(math.comb(n, k))


def test_drinfeld_at_zero_h_is_primitive_plus_translation():
    ser = drinfeld_coproduct_x(T2, 1, 2, 5)
    for k, slot in ser.normalised().items():
        for kinds, v in slot.items():
            if v.subs({("h", 1): Poly()}).is_zero():
                continue
            assert k >= 0


def test_extended_vertex_coproduct_shape():
    for n in range(3):
        ser = extended_jl_coproduct(T1, ExtendedElement.spherical(0, n), 3).normalised()
        phi0 = _on_leg(phi_generic(T1, 0, 1)[0], 1)
        assert ser[-1][(None, (0, n))] == -H * phi0
        assert ser[n][((0, 0), None)] == Poly.const(1)


def test_coproduct_order_validation():
    with pytest.raises(ValueError):
        drinfeld_coproduct_x(T1, 0, 0, 0)
    with pytest.raises(ValueError):
        extended_jl_coproduct(T1, ExtendedElement.spherical(0, 0), 0)


def test_compare_coproducts_a1():
    res = compare_coproducts(T1, max_exp=3, order=6)
    assert res.passed, res.failure
    assert res.checked == 6 + 4


def test_compare_coproducts_a2():
    res = compare_coproducts(T2, max_exp=2, order=5)
    assert res.passed, res.failure
