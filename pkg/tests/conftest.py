"""Shared fixtures, hypothesis strategies and oracles for the test-suite."""

from __future__ import annotations

import re

import pytest
from hypothesis import settings, strategies as st

from cohaq.poly import Poly, gkey, hkey, var_name, xkey
from cohaq.quiver import a_n, jordan, loop_quiver, triple

settings.register_profile("cohaq", max_examples=40, deadline=None)
settings.load_profile("cohaq")


# ---------------------------------------------------------------------------
# quivers
# ---------------------------------------------------------------------------

STANDARD = {
    "loop0": loop_quiver(0),
    "loop1": loop_quiver(1),
    "loop2": loop_quiver(2),
    "loop3": loop_quiver(3),
    "a2": a_n(2),
    "a3": a_n(3),
    "triple_a1": triple(a_n(1)),
    "triple_a2": triple(a_n(2)),
    "triple_a3": triple(a_n(3)),
}


@pytest.fixture(params=sorted(STANDARD))
def standard_quiver(request):
    return STANDARD[request.param]


@pytest.fixture
def jordan_weighted():
    return jordan(2)


# ---------------------------------------------------------------------------
# polynomial strategies
# ---------------------------------------------------------------------------

VAR_POOL = [hkey(1), hkey(2), xkey(1, 1), xkey(1, 2), xkey(2, 1, 1), xkey(1, 1, 2), gkey(1, 2), ("z",), ("w",)]

coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def polys(draw, variables=tuple(VAR_POOL), max_terms=5, max_exp=3):
    out = Poly()
    for _ in range(draw(st.integers(0, max_terms))):
        exps = {v: draw(st.integers(0, max_exp)) for v in draw(st.lists(st.sampled_from(variables), max_size=3))}
        out = out + Poly.monomial(exps, draw(coefficients))
    return out


# ---------------------------------------------------------------------------
# sympy oracle
# ---------------------------------------------------------------------------


def sympy_name(key) -> str:
    return re.sub(r"[\[\],]", "_", var_name(key))


def to_sympy(p: Poly):
    sympy = pytest.importorskip("sympy")
    acc = sympy.Integer(0)
    for mono, c in p.iter_terms():
        term = sympy.Rational(int(c.numerator), int(c.denominator))
        for key, e in mono:
            term *= sympy.Symbol(sympy_name(key)) ** e
        acc += term
    return sympy.expand(acc)


# ---------------------------------------------------------------------------
# acceptance report: one line per criterion in the terminal summary
# ---------------------------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str, float]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, seconds = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({seconds:.1f} s)")
