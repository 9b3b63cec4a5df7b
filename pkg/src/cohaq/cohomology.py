"""Equivariant cohomology of quiver moduli and the tautological ring.

A class on the component of dimension ``d`` is a polynomial in the chern
roots ``x[v,a]`` (``a <= d_v``) and the equivariant parameters ``h``,
symmetric in the roots of each vertex.  Tensor products of such classes are
polynomials in roots carrying a leg index, ``x[L,v,a]``; the ``h``'s are
shared between legs.

The tautological ring is the free polynomial ring on symbols ``g[v,r]``
(``r >= 1``), which specialise to chern characters ``ch_r = p_r / r!``;
``g[v,0]`` is a formal rank symbol that specialises to ``d_v``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from cohaq.poly import ONE, Poly, VarKey, Z, gkey, hkey, poly_sum, var_name, xkey
from cohaq.quiver import DimVector, Quiver, QuiverError, euler_form


# ---------------------------------------------------------------------------
# classes
# ---------------------------------------------------------------------------


def root(vertex: int, alpha: int, leg: int = 0) -> Poly:
    """Chern root ``x_{vertex,alpha}`` (0-based vertex index, 1-based alpha)."""
    return Poly.var(xkey(vertex + 1, alpha, leg))


def gamma(vertex: int, r: int, leg: int = 0) -> Poly:
    """Tautological generator ``gamma_{vertex,r}`` (0-based vertex index)."""
    return Poly.var(gkey(vertex + 1, r, leg))


def hbar(k: int = 1) -> Poly:
    return Poly.var(hkey(k))


def power_sum(vertex: int, k: int, n: int, leg: int = 0) -> Poly:
    if k == 0:
        return Poly.const(n)
    return poly_sum(root(vertex, a, leg) ** k for a in range(1, n + 1))


def elementary(vertex: int, k: int, n: int, leg: int = 0) -> Poly:
    """``e_k`` of the ``n`` roots at ``vertex`` (via Newton's identities)."""
    e = [Poly.const(1)]
    p = [None] + [power_sum(vertex, j, n, leg) for j in range(1, k + 1)]
    for m in range(1, k + 1):
        acc = Poly()
        for j in range(1, m + 1):
            term = e[m - j] * p[j]
            acc = acc + term if j % 2 else acc - term
        e.append(acc * (ONE / m))
    return e[k]


def chern_character(vertex: int, r: int, n: int, leg: int = 0) -> Poly:
    if r == 0:
        return Poly.const(n)
    return power_sum(vertex, r, n, leg) * (ONE / math.factorial(r))


@dataclass(frozen=True, eq=False)
class CohClass:
    """An element of ``H*(M_{Q,d})``: a vertex-wise symmetric polynomial.

    Parameters
    ----------
    quiver : Quiver
    dim : DimVector
    poly : Poly
        Polynomial in ``x[leg,v,a]`` (``a <= d_v``) and the ``h``'s.
    leg : int
        Leg index used by the variables (0 for a standalone class).
    """

    quiver: Quiver
    dim: DimVector
    poly: Poly
    leg: int = 0

    def __post_init__(self):
        object.__setattr__(self, "dim", self.quiver.dim(self.dim))
        for key in self.poly.variables():
            if key[0] == "h":
                continue
            if key[0] != "x" or key[1] != self.leg:
                raise ValueError(f"variable {var_name(key)} does not belong to leg {self.leg}")
            v, a = key[2], key[3]
            if not (1 <= v <= self.quiver.n and 1 <= a <= self.dim[v - 1]):
                raise ValueError(f"variable {var_name(key)} is out of range for dimension {self.dim}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, CohClass):
            return NotImplemented
        return self.quiver == other.quiver and self.dim == other.dim and self.poly == other.poly and self.leg == other.leg

    def __hash__(self):
        return hash((self.dim, self.poly, self.leg))

    def is_symmetric(self) -> bool:
        return is_symmetric_in_roots(self.poly, self.dim, self.leg)

    def degree(self) -> int:
        return self.poly.degree()

    def coh_degree_parity(self) -> int:
        """Parity of the cohomological degree: ``chi(d, d)`` mod 2."""
        return euler_form(self.quiver, self.dim, self.dim) % 2

    def with_leg(self, leg: int) -> "CohClass":
        return CohClass(self.quiver, self.dim, relabel_leg(self.poly, self.dim, self.leg, leg), leg)

    def __add__(self, other: "CohClass") -> "CohClass":
        self._compatible(other)
        return CohClass(self.quiver, self.dim, self.poly + other.poly, self.leg)

    def __sub__(self, other: "CohClass") -> "CohClass":
        self._compatible(other)
        return CohClass(self.quiver, self.dim, self.poly - other.poly, self.leg)

    def __mul__(self, other) -> "CohClass":
        if isinstance(other, CohClass):
            self._compatible(other)
            other = other.poly
        return CohClass(self.quiver, self.dim, self.poly * other, self.leg)

    __rmul__ = __mul__

    def _compatible(self, other: "CohClass") -> None:
        if other.dim != self.dim or other.leg != self.leg or other.quiver != self.quiver:
            raise QuiverError("classes live on different components")

    def __str__(self) -> str:
        return str(self.poly)


def is_symmetric_in_roots(p: Poly, dim: Sequence[int], leg: int = 0) -> bool:
    """Invariance under every adjacent transposition of the roots at each vertex."""
    for v, n in enumerate(dim):
        for a in range(1, n):
            swapped = p.rename({xkey(v + 1, a, leg): xkey(v + 1, a + 1, leg), xkey(v + 1, a + 1, leg): xkey(v + 1, a, leg)})
            if swapped != p:
                return False
    return True


def symmetrize(p: Poly, dim: Sequence[int], leg: int = 0) -> Poly:
    """Sum of ``p`` over all root permutations (per vertex)."""
    import itertools

    out = p
    for v, n in enumerate(dim):
        acc = Poly()
        for perm in itertools.permutations(range(1, n + 1)):
            acc = acc + out.rename({xkey(v + 1, a, leg): xkey(v + 1, b, leg) for a, b in zip(range(1, n + 1), perm)})
        out = acc
    return out


def relabel_leg(p: Poly, dim: Sequence[int], src: int, dst: int) -> Poly:
    if src == dst:
        return p
    mapping = {xkey(v + 1, a, src): xkey(v + 1, a, dst) for v, n in enumerate(dim) for a in range(1, n + 1)}
    return p.rename(mapping)


def leg_roots(dim: Sequence[int], leg: int) -> list[VarKey]:
    return [xkey(v + 1, a, leg) for v, n in enumerate(dim) for a in range(1, n + 1)]


# ---------------------------------------------------------------------------
# structure maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TensorClass:
    """A class on a product of components; leg ``k`` has dimension ``dims[k-1]``.

    Notes
    -----
    The cohomological shift ``chi(d1,d2) - chi(d2,d1)`` of the twisted
    tensor product is exposed as :meth:`shift`.
    """

    quiver: Quiver
    dims: tuple[DimVector, ...]
    poly: Poly

    def pure_tensors(self):
        from cohaq.poly import split_by_legs

        if len(self.dims) != 2:
            raise ValueError("pure-tensor splitting is implemented for two legs")
        return split_by_legs(self.poly, 1, 2)

    def shift(self) -> int:
        d1, d2 = self.dims[0], self.dims[1]
        return euler_form(self.quiver, d1, d2) - euler_form(self.quiver, d2, d1)

    def __str__(self) -> str:
        return str(self.poly)


def split_renaming(dim1: Sequence[int], dim2: Sequence[int], src: int, leg1: int, leg2: int) -> dict:
    """Renaming realising the direct-sum pullback on chern roots.

    The roots ``x[src,v,1..d1+d2]`` become ``x[leg1,v,1..d1]`` followed by
    ``x[leg2,v,1..d2]``.
    """
    mapping = {}
    for v, (n1, n2) in enumerate(zip(dim1, dim2)):
        for a in range(1, n1 + 1):
            mapping[xkey(v + 1, a, src)] = xkey(v + 1, a, leg1)
        for b in range(1, n2 + 1):
            mapping[xkey(v + 1, n1 + b, src)] = xkey(v + 1, b, leg2)
    return mapping


def direct_sum_pullback(a: CohClass, d1, d2, leg1: int = 1, leg2: int = 2) -> TensorClass:
    """Pull ``a`` back along the direct-sum map ``M_{d1} x M_{d2} -> M_{d1+d2}``."""
    q = a.quiver
    d1, d2 = q.dim(d1), q.dim(d2)
    if d1 + d2 != a.dim:
        raise QuiverError(f"dimension mismatch: {d1} + {d2} != {a.dim}")
    poly = a.poly.rename(split_renaming(d1, d2, a.leg, leg1, leg2))
    return TensorClass(q, (d1, d2), poly)


def act_pullback(p: Poly, dim: Sequence[int], slot: VarKey | Poly = Z, leg: int = 0) -> Poly:
    """Translate every root of ``leg``: ``x -> x + slot``."""
    shift = slot if isinstance(slot, Poly) else Poly.var(slot)
    mapping = {k: Poly.var(k) + shift for k in leg_roots(dim, leg)}
    return p.subs(mapping)


def act_class(a: CohClass, slot: VarKey | Poly = Z) -> Poly:
    return act_pullback(a.poly, a.dim, slot, a.leg)


# ---------------------------------------------------------------------------
# tautological ring
# ---------------------------------------------------------------------------


def gamma_keys(p: Poly, leg: int | None = None) -> list[VarKey]:
    return [k for k in p.variables() if k[0] == "g" and (leg is None or k[1] == leg)]


def taut_specialize(h: Poly, dim: Sequence[int], leg: int = 0, target_leg: int | None = None) -> Poly:
    """Specialise ``g[leg,v,r] -> ch_r`` of the roots at dimension ``dim``.

    ``g[leg,v,0]`` becomes ``d_v``.  Roots are written on ``target_leg``
    (default: the same leg index).
    """
    target = leg if target_leg is None else target_leg
    mapping = {}
    for key in gamma_keys(h, leg):
        v, r = key[2], key[3]
        if v > len(dim):
            raise QuiverError(f"generator {var_name(key)} refers to a missing vertex")
        mapping[key] = chern_character(v - 1, r, dim[v - 1], target)
    return h.subs(mapping)


def taut_coproduct(h: Poly, leg: int = 0, leg1: int = 1, leg2: int = 2) -> Poly:
    """Algebra map with every ``g[v,r]`` primitive (the rank symbol too)."""
    mapping = {}
    for key in gamma_keys(h, leg):
        v, r = key[2], key[3]
        mapping[key] = Poly.var(gkey(v, r, leg1)) + Poly.var(gkey(v, r, leg2))
    return h.subs(mapping)


def taut_translate(h: Poly, slot: VarKey | Poly = Z, leg: int = 0) -> Poly:
    """Algebra map ``g[v,r] -> sum_{k<=r} slot^k / k! * g[v,r-k]``."""
    s = slot if isinstance(slot, Poly) else Poly.var(slot)
    mapping = {}
    for key in gamma_keys(h, leg):
        _, lg, v, r = key
        acc = Poly()
        for k in range(r + 1):
            acc = acc + Poly.var(gkey(v, r - k, lg)) * (s ** k) * (ONE / math.factorial(k))
        mapping[key] = acc
    return h.subs(mapping)


def coh_degree(q: Quiver, d, poly_degree: int) -> int:
    """Cohomological degree ``2 * poly_degree - chi(d, d)``."""
    return 2 * poly_degree - euler_form(q, d, d)
