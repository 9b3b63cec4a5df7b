"""quiver-core: Euler form, sign twists, Cartan matrix, tripling, config files."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from cohaq.quiver import (
    DimVector,
    Edge,
    Quiver,
    QuiverError,
    a_n,
    cartan_matrix,
    dims_up_to,
    euler_form,
    euler_form_antisym,
    jordan,
    loop_quiver,
    sign_twists,
    splits,
    triple,
)

from conftest import STANDARD


# --- spec examples ---------------------------------------------------------


def test_euler_form_examples():
    assert euler_form(jordan(), (1,), (1,)) == 0
    a2 = a_n(2)
    assert euler_form(a2, (1, 0), (0, 1)) == -1
    assert euler_form(a2, (0, 1), (1, 0)) == 0
    assert euler_form_antisym(a2, (1, 0), (0, 1)) == -1
    for q in STANDARD.values():
        assert euler_form(q, (1,) * q.n, (0,) * q.n) == 0


def test_euler_form_dimension_mismatch():
    with pytest.raises(QuiverError):
        euler_form(a_n(2), (1,), (1, 0))


def test_sign_twist_examples():
    assert sign_twists(jordan(), (1,), (1,)) == (0, 0)
    assert sign_twists(loop_quiver(0), (1,), (1,)) == (0, 1)
    assert sign_twists(loop_quiver(0), (1,), (0,)) == (0, 0)
    with pytest.raises(QuiverError):
        sign_twists(a_n(2), (1,), (1, 0))


def test_cartan_matrix_examples():
    assert cartan_matrix(a_n(2)) == [[2, -1], [-1, 2]]
    assert cartan_matrix(loop_quiver(0)) == [[2]]
    assert cartan_matrix(jordan()) == [[0]]


def test_triple_examples():
    t = triple(loop_quiver(0))
    assert t.vertices == ("1",) and t.torus_rank == 1
    assert [(e.src, e.tgt, e.weight) for e in t.edges] == [("1", "1", (-2,))]
    t2 = triple(a_n(2))
    assert sorted((e.src, e.tgt, e.kind) for e in t2.edges) == [
        ("1", "1", "omega"), ("1", "2", "e"), ("2", "1", "e*"), ("2", "2", "omega")]
    weights = {e.kind: e.weight for e in t2.edges}
    assert weights["e"] == (1,) and weights["omega"] == (-2,)
    assert t2.is_symmetric and t2.is_tripled and t2.base == a_n(2)
    empty = triple(Quiver(()))
    assert empty.vertices == () and empty.edges == ()


# --- properties --------------------------------------------------------------

small_vec = st.lists(st.integers(0, 3), min_size=3, max_size=3)


@given(small_vec, small_vec, small_vec)
def test_euler_form_bilinear(d, d2, e):
    q = a_n(3)
    dd = [a + b for a, b in zip(d, d2)]
    assert euler_form(q, dd, e) == euler_form(q, d, e) + euler_form(q, d2, e)
    assert euler_form(q, e, dd) == euler_form(q, e, d) + euler_form(q, e, d2)


@pytest.mark.parametrize("name", sorted(STANDARD))
def test_symmetric_forms_and_twists(name):
    q = STANDARD[name]
    dims = list(dims_up_to(q, 4, include_zero=True))
    for d in dims:
        for e in dims:
            tau, psi = sign_twists(q, d, e)
            _, psi_op = sign_twists(q, e, d)
            if q.is_symmetric:
                assert euler_form_antisym(q, d, e) == 0
                assert (psi + psi_op) % 2 == tau


@pytest.mark.parametrize("base", [a_n(1), a_n(2), a_n(3), jordan(), loop_quiver(2)])
def test_triple_is_symmetric(base):
    t = triple(base)
    assert t.is_symmetric
    for d in dims_up_to(t, 3):
        for e in dims_up_to(t, 3):
            assert euler_form(t, d, e) == euler_form(t, e, d)


def test_psi_agrees_with_chi_below_diagonal():
    # chi alone does not solve psi + psi^op = tau on tripled A2 (chi_12 + chi_21 is even,
    # tau(delta_1, delta_2) is odd); psi keeps chi on and below the diagonal and corrects above
    t = triple(a_n(2))
    d1, d2 = t.delta(0), t.delta(1)
    assert (euler_form(t, d1, d2) + euler_form(t, d2, d1)) % 2 != sign_twists(t, d1, d2)[0]
    for i in range(t.n):
        for j in range(i + 1):
            assert sign_twists(t, t.delta(i), t.delta(j))[1] == euler_form(t, t.delta(i), t.delta(j)) % 2


def test_splits_enumeration():
    d = DimVector((2, 1))
    two = list(splits(d))
    assert len(two) == 6 and all(a + b == d for a, b in two)
    three = list(splits(d, 3))
    assert len(three) == 18 and all(a + b + c == d for a, b, c in three)


# --- construction and config files -------------------------------------------


def test_invariants_enforced():
    with pytest.raises(QuiverError, match="endpoint"):
        Quiver(("1",), (Edge("1", "2"),))
    with pytest.raises(QuiverError, match="torus_rank"):
        Quiver(("1",), (Edge("1", "1", (1,)),), 0)
    assert not a_n(2).is_symmetric and loop_quiver(3).is_symmetric


def test_json_roundtrip(tmp_path):
    q = jordan(2)
    path = tmp_path / "q.json"
    path.write_text(json.dumps(q.to_dict()))
    assert Quiver.load(path) == q
    spec_example = {"vertices": ["1", "2"], "edges": [{"src": "1", "tgt": "2", "weight": [0]}], "torus_rank": 1}
    q2 = Quiver.from_dict(spec_example)
    assert q2.n == 2 and q2.edges[0].weight == (0,)


@pytest.mark.parametrize(
    "data, message",
    [
        ({"edges": []}, "missing field 'vertices'"),
        ({"vertices": ["1"], "edges": [{"src": "1"}]}, r"edges\[0\]"),
        ({"vertices": ["1"], "edges": [{"src": "1", "tgt": "1", "weight": [1, 2]}], "torus_rank": 1}, r"edges\[0\].weight"),
        ({"vertices": ["1"], "edges": [], "colour": 3}, "unknown fields"),
        ({"vertices": [1], "edges": []}, "vertices"),
    ],
)
def test_json_field_diagnostics(data, message):
    with pytest.raises(QuiverError, match=message):
        Quiver.from_dict(data)


def test_json_syntax_diagnostic(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"vertices": ["1"],\n "edges": [}')
    with pytest.raises(QuiverError, match="line 2, column"):
        Quiver.load(path)
