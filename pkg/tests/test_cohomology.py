"""cohomology: symmetric classes, direct-sum and translation pullbacks, tautological ring."""

from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given, strategies as st

from cohaq.cohomology import (
    split_renaming,
    CohClass,
    act_class,
    act_pullback,
    chern_character,
    direct_sum_pullback,
    elementary,
    gamma,
    is_symmetric_in_roots,
    power_sum,
    root,
    symmetrize,
    taut_coproduct,
    taut_specialize,
    taut_translate,
)
from cohaq.poly import Poly, Z, gkey, parse_poly
from cohaq.quiver import QuiverError, a_n, dims_up_to, loop_quiver, splits

from conftest import sympy_name, to_sympy

sympy = pytest.importorskip("sympy")

P = parse_poly
ONE_VERTEX = loop_quiver(0)
W = ("w",)


def _pairs(tc):
    return {(str(a), str(b)) for a, b in tc.pure_tensors()}


# --- classes ----------------------------------------------------------------


def test_class_validation():
    with pytest.raises(ValueError):
        CohClass(ONE_VERTEX, (1,), P("x[1,2]"))
    with pytest.raises(ValueError):
        CohClass(ONE_VERTEX, (1,), P("x[2,1,1]"))
    assert CohClass(ONE_VERTEX, (2,), P("x[1,1] + x[1,2] + h")).is_symmetric()
    assert not CohClass(ONE_VERTEX, (2,), P("x[1,1]")).is_symmetric()


def test_elementary_matches_sympy():
    xs = [sympy.Symbol(sympy_name(("x", 0, 1, a))) for a in (1, 2, 3)]
    for k in range(4):
        expected = sum(sympy.Mul(*c) for c in itertools.combinations(xs, k)) if k else 1
        assert to_sympy(elementary(0, k, 3)) == sympy.expand(expected)


@given(st.lists(st.integers(0, 3), min_size=3, max_size=3), st.integers(-3, 3))
def test_symmetrize_is_symmetric(exps, c):
    mono = Poly.monomial({("x", 0, 1, a + 1): e for a, e in enumerate(exps)}, c)
    s = symmetrize(mono, (3,))
    assert is_symmetric_in_roots(s, (3,))
    assert s.constant_term() == (6 * c if not any(exps) else 0)


def test_cohomological_parity():
    assert CohClass(ONE_VERTEX, (1,), Poly.const(1)).coh_degree_parity() == 1
    assert CohClass(loop_quiver(1), (2,), Poly.const(1)).coh_degree_parity() == 0


# --- direct-sum pullback ------------------------------------------------------


def test_direct_sum_examples():
    p1 = CohClass(ONE_VERTEX, (2,), power_sum(0, 1, 2))
    assert _pairs(direct_sum_pullback(p1, (1,), (1,))) == {("x[1,1,1]", "1"), ("1", "x[2,1,1]")}
    e2 = CohClass(ONE_VERTEX, (2,), elementary(0, 2, 2))
    assert _pairs(direct_sum_pullback(e2, (1,), (1,))) == {("x[1,1,1]", "x[2,1,1]")}
    a = CohClass(ONE_VERTEX, (2,), P("x[1,1]^2 + x[1,2]^2 + h"))
    tc = direct_sum_pullback(a, (2,), (0,))
    assert tc.poly == a.with_leg(1).poly


def test_direct_sum_dimension_mismatch():
    with pytest.raises(QuiverError):
        direct_sum_pullback(CohClass(ONE_VERTEX, (2,), Poly.const(1)), (1,), (2,))


def _random_symmetric(q, d, seed):
    """Product of power sums and h, deterministic in ``seed``."""
    import random

    rng = random.Random(seed)
    out = Poly.const(rng.randint(1, 3))
    for v in range(q.n):
        if d[v]:
            out = out * (power_sum(v, rng.randint(1, 3), d[v]) + Poly.const(rng.randint(-2, 2)))
    return out + P("h") * rng.randint(0, 2)


@pytest.mark.parametrize("q", [loop_quiver(1), a_n(2)], ids=["one-vertex", "two-vertex"])
def test_direct_sum_coassociative_and_cocommutative(q):
    for d in dims_up_to(q, 4):
        a = CohClass(q, d, _random_symmetric(q, d, sum(d)))
        for d1, d2, d3 in splits(d, 3):
            left = direct_sum_pullback(a, d1 + d2, d3, 4, 3).poly.rename(split_renaming(d1, d2, 4, 1, 2))
            right = direct_sum_pullback(a, d1, d2 + d3, 1, 4).poly.rename(split_renaming(d2, d3, 4, 2, 3))
            assert left == right
        for d1, d2 in splits(d):
            assert direct_sum_pullback(a, d1, d2, 1, 2).poly == direct_sum_pullback(a, d2, d1, 2, 1).poly


# --- translation ----------------------------------------------------------------


def test_act_examples():
    assert act_pullback(root(0, 1), (1,)) == P("x[1,1] + z")
    p1, p2 = power_sum(0, 1, 2), power_sum(0, 2, 2)
    assert act_pullback(p1, (2,)) == p1 + P("2*z")
    assert act_pullback(p2, (2,)) == p2 + P("2*z") * p1 + P("2*z^2")


def test_act_matches_sympy_substitution():
    a = CohClass(ONE_VERTEX, (2,), P("x[1,1]^3*x[1,2] + x[1,1]*x[1,2]^3 + h*x[1,1]*x[1,2]"))
    x1, x2, z = (sympy.Symbol(sympy_name(k)) for k in (("x", 0, 1, 1), ("x", 0, 1, 2), Z))
    expected = to_sympy(a.poly).subs({x1: x1 + z, x2: x2 + z}, simultaneous=True)
    assert to_sympy(act_class(a)) == sympy.expand(expected)
    assert act_class(a).degree_in(Z) <= a.degree()


@given(st.integers(0, 10_000))
def test_act_composition(seed):
    q = a_n(2)
    d = q.dim((2, 1))
    p = _random_symmetric(q, d, seed)
    zw = act_pullback(act_pullback(p, d, W), d, Z)
    assert zw == act_pullback(p, d, Poly.var(Z) + Poly.var(W))


# --- tautological ring -------------------------------------------------------------


def test_taut_specialize_examples():
    assert taut_specialize(gamma(0, 1), (2,)) == P("x[1,1] + x[1,2]")
    assert taut_specialize(gamma(0, 2), (2,)) == P("(1/2)*x[1,1]^2 + (1/2)*x[1,2]^2")
    for r in range(1, 4):
        assert taut_specialize(gamma(0, r), (0,)).is_zero()
    assert taut_specialize(gamma(0, 0), (3,)) == Poly.const(3)


def test_taut_coproduct_translate_examples():
    g = gamma(0, 3)
    assert taut_coproduct(g) == Poly.var(gkey(1, 3, 1)) + Poly.var(gkey(1, 3, 2))
    assert taut_translate(gamma(0, 2)) == P("g[1,2] + z*g[1,1] + (1/2)*z^2*g[1,0]")
    assert taut_coproduct(Poly.const(1)) == Poly.const(1)
    assert taut_translate(Poly.const(1)) == Poly.const(1)


@pytest.mark.parametrize("r", range(1, 6))
def test_specialisation_intertwines_translation(r):
    for n in range(4):
        h = gamma(0, r)
        lhs = taut_specialize(taut_translate(h), (n,))
        rhs = act_pullback(taut_specialize(h, (n,)), (n,))
        assert lhs == rhs


@pytest.mark.parametrize("r", range(1, 6))
def test_specialisation_intertwines_coproduct(r):
    for n in range(4):
        h = gamma(0, r) * gamma(0, 1) + gamma(0, r)
        a = CohClass(ONE_VERTEX, (n,), taut_specialize(h, (n,)))
        for d1, d2 in splits(a.dim):
            lhs = taut_specialize(taut_specialize(taut_coproduct(h), d1, 1), d2, 2)
            assert lhs == direct_sum_pullback(a, d1, d2).poly


def test_chern_character_definition():
    for r in range(1, 5):
        assert chern_character(0, r, 3) * math.factorial(r) == power_sum(0, r, 3)
