"""Quivers, dimension vectors, the Euler form and its sign twists.

Vertex ids are user-facing strings; internally a vertex is addressed by its
position in :attr:`Quiver.vertices`, and polynomial variables use the
1-based position (``x[v,a]`` is the ``a``-th chern root at vertex ``v``).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from cohaq.poly import Poly, hkey


class QuiverError(ValueError):
    """Malformed quiver data or mismatched dimension vectors."""


@dataclass(frozen=True)
class Edge:
    """A weighted arrow ``src -> tgt``; ``kind`` tags tripled-quiver arrows."""

    src: str
    tgt: str
    weight: tuple[int, ...] = ()
    kind: str = "e"


class DimVector(tuple):
    """Dimension vector, ordered like the vertices of its quiver."""

    def __new__(cls, comps: Sequence[int]):
        comps = tuple(int(c) for c in comps)
        if any(c < 0 for c in comps):
            raise QuiverError(f"dimension vector {comps} has a negative entry")
        return super().__new__(cls, comps)

    def __add__(self, other) -> "DimVector":
        if len(other) != len(self):
            raise QuiverError("dimension vectors over different vertex sets")
        return DimVector(a + b for a, b in zip(self, other))

    def __sub__(self, other) -> "DimVector":
        if len(other) != len(self):
            raise QuiverError("dimension vectors over different vertex sets")
        return DimVector(a - b for a, b in zip(self, other))

    @property
    def size(self) -> int:
        return sum(self)

    def is_zero(self) -> bool:
        return not any(self)

    def __repr__(self) -> str:
        return "DimVector(" + ",".join(map(str, self)) + ")"

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self)) + ")"


@dataclass(frozen=True)
class Quiver:
    """A finite quiver with torus weights on its arrows.

    Parameters
    ----------
    vertices : tuple of str
        Vertex ids, in declaration order.
    edges : tuple of Edge
        Arrows; each weight vector has length ``torus_rank``.
    torus_rank : int
        Rank of the torus acting on the arrows.
    base : Quiver or None
        For a tripled quiver, the quiver it was built from.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...] = ()
    torus_rank: int = 0
    base: "Quiver | None" = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError("duplicate vertex ids")
        if self.torus_rank < 0:
            raise QuiverError("torus_rank must be nonnegative")
        names = set(self.vertices)
        for k, e in enumerate(self.edges):
            if e.src not in names or e.tgt not in names:
                raise QuiverError(f"edge {k}: endpoint not among the declared vertices")
            if len(e.weight) != self.torus_rank:
                raise QuiverError(
                    f"edge {k}: weight has length {len(e.weight)}, expected torus_rank={self.torus_rank}"
                )

    # basic data -------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, v: str) -> int:
        try:
            return self.vertices.index(v)
        except ValueError:
            raise QuiverError(f"unknown vertex {v!r}") from None

    def edge_indices(self) -> list[tuple[int, int, Edge]]:
        return [(self.index(e.src), self.index(e.tgt), e) for e in self.edges]

    def arrow_matrix(self) -> list[list[int]]:
        """``a[i][j]`` = number of arrows ``i -> j``."""
        a = [[0] * self.n for _ in range(self.n)]
        for i, j, _ in self.edge_indices():
            a[i][j] += 1
        return a

    def dim(self, d) -> DimVector:
        """Coerce ``d`` (sequence, mapping by vertex id, or int for one vertex)."""
        if isinstance(d, DimVector):
            comps = tuple(d)
        elif isinstance(d, int):
            comps = (d,)
        elif isinstance(d, Mapping):
            unknown = set(d) - set(self.vertices)
            if unknown:
                raise QuiverError(f"unknown vertices {sorted(unknown)}")
            comps = tuple(int(d.get(v, 0)) for v in self.vertices)
        else:
            comps = tuple(d)
        if len(comps) != self.n:
            raise QuiverError(f"dimension vector {comps} does not match {self.n} vertices")
        return DimVector(comps)

    def delta(self, i: int) -> DimVector:
        return DimVector(1 if k == i else 0 for k in range(self.n))

    def zero(self) -> DimVector:
        return DimVector((0,) * self.n)

    def edge_weight(self, e: Edge) -> Poly:
        """Equivariant weight of an arrow: ``sum_k w_k * h_k / 2``."""
        out = Poly()
        for k, w in enumerate(e.weight):
            if w:
                out = out + Poly.var(hkey(k + 1)) * w / 2
        return out

    # predicates -------------------------------------------------------------
    @property
    def is_symmetric(self) -> bool:
        a = self.arrow_matrix()
        return all(a[i][j] == a[j][i] for i in range(self.n) for j in range(self.n))

    @property
    def is_weight_symmetric(self) -> bool:
        """Arrow multiset invariant under reversing arrows and negating weights."""
        fwd = sorted((e.src, e.tgt, e.weight) for e in self.edges)
        rev = sorted((e.tgt, e.src, tuple(-w for w in e.weight)) for e in self.edges)
        return fwd == rev

    @property
    def is_tripled(self) -> bool:
        return self.base is not None

    def opposite(self) -> "Quiver":
        """Reverse every arrow and negate its weight."""
        return Quiver(
            self.vertices,
            tuple(Edge(e.tgt, e.src, tuple(-w for w in e.weight), e.kind) for e in self.edges),
            self.torus_rank,
        )

    # serialization ------------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"src": e.src, "tgt": e.tgt, "weight": list(e.weight)} for e in self.edges],
            "torus_rank": self.torus_rank,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Quiver":
        if not isinstance(data, Mapping):
            raise QuiverError("quiver description must be a JSON object")
        for key in ("vertices", "edges"):
            if key not in data:
                raise QuiverError(f"missing field {key!r}")
        extra = set(data) - {"vertices", "edges", "torus_rank"}
        if extra:
            raise QuiverError(f"unknown fields {sorted(extra)}")
        verts = data["vertices"]
        if not isinstance(verts, list) or not all(isinstance(v, str) for v in verts):
            raise QuiverError("field 'vertices' must be a list of strings")
        rank = data.get("torus_rank", 0)
        if not isinstance(rank, int) or isinstance(rank, bool) or rank < 0:
            raise QuiverError("field 'torus_rank' must be a nonnegative integer")
        if not isinstance(data["edges"], list):
            raise QuiverError("field 'edges' must be a list")
        edges = []
        for k, e in enumerate(data["edges"]):
            if not isinstance(e, Mapping) or "src" not in e or "tgt" not in e:
                raise QuiverError(f"edges[{k}]: expected an object with 'src' and 'tgt'")
            w = e.get("weight", [0] * rank)
            if not isinstance(w, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in w):
                raise QuiverError(f"edges[{k}].weight: expected a list of integers")
            if len(w) != rank:
                raise QuiverError(f"edges[{k}].weight: length {len(w)} does not match torus_rank={rank}")
            edges.append(Edge(str(e["src"]), str(e["tgt"]), tuple(w)))
        try:
            return cls(tuple(verts), tuple(edges), rank)
        except QuiverError as exc:
            raise QuiverError(str(exc)) from None

    @classmethod
    def load(cls, path: str | Path) -> "Quiver":
        text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise QuiverError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        try:
            return cls.from_dict(data)
        except QuiverError as exc:
            raise QuiverError(f"{path}: {exc}") from None

    def __str__(self) -> str:
        arrows = ", ".join(f"{e.src}->{e.tgt}{list(e.weight) if e.weight else ''}" for e in self.edges)
        return f"Quiver([{', '.join(self.vertices)}]; {arrows})"


# ---------------------------------------------------------------------------
# standard quivers
# ---------------------------------------------------------------------------


def loop_quiver(g: int, weights: Sequence[int] | None = None) -> Quiver:
    """One vertex with ``g`` loops; ``weights`` (rank-one) makes the torus rank 1."""
    if weights is None:
        return Quiver(("1",), tuple(Edge("1", "1") for _ in range(g)), 0)
    if len(weights) != g:
        raise QuiverError("need one weight per loop")
    return Quiver(("1",), tuple(Edge("1", "1", (w,)) for w in weights), 1)


def jordan(weight: int | None = None) -> Quiver:
    return loop_quiver(1, None if weight is None else [weight])


def a_n(n: int) -> Quiver:
    """Linearly oriented ``A_n``: ``1 -> 2 -> ... -> n``."""
    verts = tuple(str(k) for k in range(1, n + 1))
    return Quiver(verts, tuple(Edge(str(k), str(k + 1)) for k in range(1, n)), 0)


def triple(q: Quiver, star_weight: int = 1) -> Quiver:
    """The tripled quiver: arrows ``e``, reversed arrows ``e*`` and a loop per vertex.

    Input weights are discarded.  The output has torus rank one with
    weights ``e: +1``, ``e*: star_weight`` and loops ``-2`` (in units of
    ``h/2``).
    """
    edges = [Edge(e.src, e.tgt, (1,), "e") for e in q.edges]
    edges += [Edge(e.tgt, e.src, (star_weight,), "e*") for e in q.edges]
    edges += [Edge(v, v, (-2,), "omega") for v in q.vertices]
    return Quiver(q.vertices, tuple(edges), 1, base=Quiver(q.vertices, tuple(Edge(e.src, e.tgt) for e in q.edges)))


# ---------------------------------------------------------------------------
# bilinear forms
# ---------------------------------------------------------------------------


def _check(q: Quiver, *dims) -> None:
    for d in dims:
        if len(d) != q.n:
            raise QuiverError(f"dimension vector {tuple(d)} does not match {q.n} vertices")


def euler_form(q: Quiver, d, e) -> int:
    """``chi(d, e) = sum_i d_i e_i - sum_{a: i -> j} d_i e_j``."""
    _check(q, d, e)
    val = sum(a * b for a, b in zip(d, e))
    for i, j, _ in q.edge_indices():
        val -= d[i] * e[j]
    return val


def euler_form_antisym(q: Quiver, d, e) -> int:
    """``chi~(d, e) = chi(d, e) - chi(e, d)``."""
    return euler_form(q, d, e) - euler_form(q, e, d)


def _psi_matrix(q: Quiver) -> list[list[int]]:
    n = q.n
    chi = [[euler_form(q, q.delta(i), q.delta(j)) for j in range(n)] for i in range(n)]
    if not q.is_symmetric:
        return [[c % 2 for c in row] for row in chi]
    par = [chi[i][i] % 2 for i in range(n)]
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i >= j:
                out[i][j] = chi[i][j] % 2
            else:
                out[i][j] = (par[i] * par[j] + chi[i][j] - chi[j][i]) % 2
    return out


def sign_twists(q: Quiver, d, e) -> tuple[int, int]:
    """Return ``(tau, psi)`` modulo 2.

    ``tau(d, e) = chi(d, d) chi(e, e) + chi(d, e)``.  ``psi`` is a bilinear
    form with ``psi(d, e) + psi(e, d) = tau(d, e)``; it agrees with ``chi``
    whenever ``chi`` itself has this property.  For non-symmetric quivers no
    bilinear solution exists and ``chi`` is returned.
    """
    _check(q, d, e)
    tau = (euler_form(q, d, d) * euler_form(q, e, e) + euler_form(q, d, e)) % 2
    m = _psi_matrix(q)
    psi = sum(d[i] * e[j] * m[i][j] for i in range(q.n) for j in range(q.n)) % 2
    return tau, psi


def cartan_matrix(q: Quiver) -> list[list[int]]:
    """``c_ij = 2 delta_ij - a_ij - a_ji``."""
    a = q.arrow_matrix()
    return [[2 * (i == j) - a[i][j] - a[j][i] for j in range(q.n)] for i in range(q.n)]


# ---------------------------------------------------------------------------
# enumeration helpers
# ---------------------------------------------------------------------------


def dims_of_size(q: Quiver, total: int) -> Iterator[DimVector]:
    for comps in itertools.product(range(total + 1), repeat=q.n):
        if sum(comps) == total:
            yield DimVector(comps)


def dims_up_to(q: Quiver, max_total: int, include_zero: bool = False) -> Iterator[DimVector]:
    for t in range(0 if include_zero else 1, max_total + 1):
        yield from dims_of_size(q, t)


def splits(d: DimVector, parts: int = 2, proper: bool = False) -> Iterator[tuple[DimVector, ...]]:
    """All ways of writing ``d`` as an ordered sum of ``parts`` dimension vectors."""
    if parts == 1:
        yield (DimVector(d),)
        return
    for first in itertools.product(*(range(c + 1) for c in d)):
        first = DimVector(first)
        rest = DimVector(d) - first
        for tail in splits(rest, parts - 1):
            out = (first,) + tail
            if proper and any(p.is_zero() for p in out):
                continue
            yield out
