"""Tripled quivers: Phi-series, the Cartan-spherical extended algebra and Yangians.

The extended algebra is spanned by ``b (x) h`` with ``b`` either the unit
or a spherical class ``x^(n)_i`` (the class ``x^n`` on the component
``delta_i``) and ``h`` a tautological class.  An :class:`ExtendedElement`
stores ``{kind: h}`` with ``kind`` ``None`` (unit) or ``(i, n)``; tensor
squares store ``{(kind1, kind2): h}`` with ``h`` in the generators of legs 1
and 2.

Two coproducts are compared: the Drinfeld-type coproduct written down from
its closed formula, and the extended vertex coproduct computed from the
bosonisation formula with the generic tautological R-matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from cohaq.cohomology import gamma, hbar, root, taut_coproduct, taut_specialize, taut_translate
from cohaq.coproducts import delta_z_leg
from cohaq.extdata import r_taut_generic
from cohaq.poly import ONE, Poly, VarKey, Z, U, gkey, xkey
from cohaq.quiver import Quiver, QuiverError, cartan_matrix, splits
from cohaq.spectral import SpectralFraction, ZSeries, exp_series, expand_at_infinity

Kind = "tuple[int, int] | None"


def require_tripled(q: Quiver) -> Quiver:
    if not q.is_tripled:
        raise QuiverError("this operation needs a tripled quiver (see cohaq.quiver.triple)")
    return q.base


def _neighbours(base: Quiver, i: int) -> list[int]:
    """Vertices joined to ``i`` by base arrows, with multiplicity (loops twice)."""
    out = []
    for a, b, _ in base.edge_indices():
        if a == i:
            out.append(b)
        if b == i:
            out.append(a)
    return out


# ---------------------------------------------------------------------------
# Phi series
# ---------------------------------------------------------------------------


def phi_component(q: Quiver, i: int, d, var: VarKey = U, leg: int = 0) -> SpectralFraction:
    """``Phi_{i,d}(u)`` as an exact fraction in ``u``.

    Loop factors ``(u - x_{i,n} + h)/(u - x_{i,n} - h)`` times, for every
    base arrow touching ``i`` with other end ``j``,
    ``(u - x_{j,m} - h/2)/(u - x_{j,m} + h/2)``.
    """
    base = require_tripled(q)
    d = q.dim(d)
    u = Poly.var(var)
    h = hbar()
    up, down = [], []
    for n in range(1, d[i] + 1):
        x = root(i, n, leg)
        up.append(u - x + h)
        down.append(u - x - h)
    for j in _neighbours(base, i):
        for m in range(1, d[j] + 1):
            x = root(j, m, leg)
            up.append(u - x - h / 2)
            down.append(u - x + h / 2)
    return SpectralFraction.linear_product(up, down)


def phi_component_coeffs(q: Quiver, i: int, d, order: int, leg: int = 0) -> list[Poly]:
    """``[Phi_{i,0,d}, ..., Phi_{i,order-1,d}]`` from the expansion in ``u^-1``."""
    ser = expand_at_infinity(phi_component(q, i, d, U, leg), U, order)
    out = []
    for r in range(order):
        c = ser.coeff(-r - 1)
        out.append(c.divexact(hbar()) if not c.is_zero() else Poly())
    return out


def _shifted_sum(vertex: int, k: int, c: Poly, leg: int) -> Poly:
    """``sum_n (x_{vertex,n} + c)^k`` in terms of ``g[vertex, a]`` (rank symbol at ``a=0``)."""
    acc = Poly()
    cp = Poly.const(1)
    for a in range(k, -1, -1):
        term = gamma(vertex, a, leg) * (math.comb(k, a) * math.factorial(a))
        acc = acc + term * cp
        cp = cp * c
    return acc


def phi_log(q: Quiver, i: int, order: int, leg: int = 0) -> dict[int, Poly]:
    """``L_k`` with ``log Phi_i(u) = sum_k L_k u^-k`` in tautological generators."""
    base = require_tripled(q)
    h = hbar()
    logs = {}
    for k in range(1, order + 1):
        acc = _shifted_sum(i, k, -h, leg) - _shifted_sum(i, k, h, leg)
        for j in _neighbours(base, i):
            acc = acc + _shifted_sum(j, k, h / 2, leg) - _shifted_sum(j, k, -h / 2, leg)
        logs[k] = acc * (-ONE / k)
    return logs


def phi_generic(q: Quiver, i: int, order: int, leg: int = 0) -> list[Poly]:
    """Tautological ``[Phi_{i,0}, ..., Phi_{i,order-1}]``.

    ``Phi_i(u) = 1 + h * sum_r Phi_{i,r} u^(-r-1)`` is the exponential of
    :func:`phi_log`.
    """
    coeffs = exp_series(phi_log(q, i, order, leg), order)
    return [coeffs[r + 1].divexact(hbar()) for r in range(order)]


def phi_first_order(q: Quiver, i: int, r: int, leg: int = 0) -> Poly:
    """``h^0`` part of ``Phi_{i,r}``: ``r! (2 g[i,r] - sum_j g[j,r])``."""
    base = require_tripled(q)
    acc = gamma(i, r, leg) * 2
    for j in _neighbours(base, i):
        acc = acc - gamma(j, r, leg)
    return acc * math.factorial(r)


# ---------------------------------------------------------------------------
# extended algebra
# ---------------------------------------------------------------------------


@dataclass
class ExtendedElement:
    """Finite sum ``sum_kind kind (x) h_kind`` of the Cartan-spherical sector."""

    terms: dict = field(default_factory=dict)

    @classmethod
    def unit(cls, h: Poly | int = 1) -> "ExtendedElement":
        return cls({None: Poly.coerce(h)}).clean()

    @classmethod
    def spherical(cls, i: int, n: int, h: Poly | int = 1) -> "ExtendedElement":
        return cls({(i, n): Poly.coerce(h)}).clean()

    def clean(self) -> "ExtendedElement":
        self.terms = {k: v for k, v in self.terms.items() if not v.is_zero()}
        return self

    def __add__(self, other: "ExtendedElement") -> "ExtendedElement":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return ExtendedElement(out).clean()

    def __neg__(self) -> "ExtendedElement":
        return ExtendedElement({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "ExtendedElement") -> "ExtendedElement":
        return self + (-other)

    def scale(self, c) -> "ExtendedElement":
        return ExtendedElement({k: v * c for k, v in self.terms.items()}).clean()

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExtendedElement):
            return NotImplemented
        return (self - other).is_zero()

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.terms.values())

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        return " + ".join(f"{kind_name(k)} (x) ({v})" for k, v in sorted(self.terms.items(), key=_kind_order))


def kind_name(kind) -> str:
    if kind is None:
        return "1"
    i, n = kind
    return f"x[{i + 1}]^({n})"


def _kind_order(item):
    k = item[0]
    return (-1, 0) if k is None else k


def extended_product(q: Quiver, a: ExtendedElement, b: ExtendedElement) -> ExtendedElement:
    """Bosonised product in the Cartan-spherical sector.

    ``(1 (x) h)(x^(s)_j (x) h') = sum h_(1)|_{delta_j} . x^(s)_j (x) h_(2) h'``
    where ``h_(1)`` specialised at ``delta_j`` is a polynomial in ``x_{j,1}``
    acting by raising the exponent; ``(b (x) h)(1 (x) h') = b (x) h h'``.
    Products of two spherical terms leave the sector and are rejected.
    """
    out: dict = {}

    def add(kind, val):
        out[kind] = out[kind] + val if kind in out else val

    for ka, ha in a.terms.items():
        for kb, hb in b.terms.items():
            if ka is not None and kb is not None:
                raise ValueError("product of two spherical elements is outside the representable sector")
            if kb is None:
                add(ka, ha * hb)
                continue
            j, s = kb
            cop = taut_coproduct(ha, 0, 1, 2)
            spec = taut_specialize(cop, q.delta(j), 1, 1)
            for m, coeff in spec.coeffs_in(xkey(j + 1, 1, 1)).items():
                h2 = coeff.rename({k: ("g", 0) + k[2:] for k in coeff.variables() if k[0] == "g"})
                add((j, s + m), h2 * hb)
    return ExtendedElement(out).clean()


def commutator(q: Quiver, a: ExtendedElement, b: ExtendedElement) -> ExtendedElement:
    return extended_product(q, a, b) - extended_product(q, b, a)


def anticommutator(q: Quiver, a: ExtendedElement, b: ExtendedElement) -> ExtendedElement:
    return extended_product(q, a, b) + extended_product(q, b, a)


def check_r2(q: Quiver, i: int, j: int, s: int) -> tuple[bool, ExtendedElement, ExtendedElement]:
    """``[Phi_{i,0}, x^(s)_j] = c_ij x^(s)_j``; returns ``(ok, lhs, rhs)``."""
    c = cartan_matrix(q.base)[i][j]
    phi0 = phi_generic(q, i, 1)[0]
    lhs = commutator(q, ExtendedElement.unit(phi0), ExtendedElement.spherical(j, s))
    rhs = ExtendedElement.spherical(j, s).scale(c)
    return lhs == rhs, lhs, rhs


def check_r3(q: Quiver, i: int, j: int, r: int, s: int, phis: list[Poly] | None = None):
    """``[Phi_{r+1}, x_s] - [Phi_r, x_{s+1}] = (c_ij h / 2) {Phi_r, x_s}``."""
    c = cartan_matrix(q.base)[i][j]
    if phis is None:
        phis = phi_generic(q, i, r + 2)
    unit = ExtendedElement.unit
    xs = ExtendedElement.spherical(j, s)
    xs1 = ExtendedElement.spherical(j, s + 1)
    lhs = commutator(q, unit(phis[r + 1]), xs) - commutator(q, unit(phis[r]), xs1)
    rhs = anticommutator(q, unit(phis[r]), xs).scale(hbar() * c / 2)
    return lhs == rhs, lhs, rhs


# ---------------------------------------------------------------------------
# coproducts on the sector
# ---------------------------------------------------------------------------


@dataclass
class TensorSeries:
    """``{z-exponent: {(kind1, kind2): h}}`` with ``h`` in legs 1 and 2."""

    order: int
    coeffs: dict = field(default_factory=dict)

    def add(self, k: int, kinds, val: Poly) -> None:
        if k < -self.order or val.is_zero():
            return
        slot = self.coeffs.setdefault(k, {})
        slot[kinds] = slot[kinds] + val if kinds in slot else val

    def normalised(self) -> dict:
        out = {}
        for k, slot in self.coeffs.items():
            clean = {kk: v for kk, v in slot.items() if not v.is_zero()}
            if clean:
                out[k] = clean
        return out

    def first_difference(self, other: "TensorSeries"):
        """``None`` if equal up to the common order, else ``(k, kinds, lhs, rhs)``."""
        order = min(self.order, other.order)
        a, b = self.normalised(), other.normalised()
        for k in sorted(set(a) | set(b), reverse=True):
            if k < -order:
                continue
            sa, sb = a.get(k, {}), b.get(k, {})
            for kinds in sorted(set(sa) | set(sb), key=lambda t: tuple((-1, 0) if x is None else x for x in t)):
                va, vb = sa.get(kinds, Poly()), sb.get(kinds, Poly())
                if va != vb:
                    return k, kinds, va, vb
        return None


def _binom_shift(n: int, var: VarKey = Z) -> list[tuple[int, int, int]]:
    """``tau_z x^(n) = sum_k C(n,k) z^k x^(n-k)`` as ``(z-power, coefficient, new n)``."""
    return [(k, math.comb(n, k), n - k) for k in range(n + 1)]


def drinfeld_coproduct_x(q: Quiver, i: int, n: int, order: int, phis: list[Poly] | None = None) -> TensorSeries:
    """Closed-form deformed Drinfeld coproduct of ``x+_{i,n}``.

    ``tau_z(x_n) (x) 1 + 1 (x) x_n
    + h sum_N sum_{p<=N} (-1)^(p+1) C(N,p) xi_{i,p} (x) x_{i,n+N-p} z^(-N-1)``
    with ``xi_{i,p} -> Phi_{i,p}`` (generators on leg 1).
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    if phis is None:
        phis = phi_generic(q, i, order, leg=1)
    out = TensorSeries(order)
    for k, c, m in _binom_shift(n):
        out.add(k, ((i, m), None), Poly.const(c))
    out.add(0, (None, (i, n)), Poly.const(1))
    h = hbar()
    for big_n in range(order):
        for p in range(big_n + 1):
            coeff = math.comb(big_n, p) * (1 if p % 2 else -1)
            out.add(-big_n - 1, (None, (i, n + big_n - p)), phis[p] * h * coeff)
    return out


def drinfeld_coproduct_phi(q: Quiver, i: int, r: int, phis1: list[Poly], phis2: list[Poly]) -> TensorSeries:
    """Coefficient of ``u^(-r-1)`` in ``(xi_i(u - z) (x) xi_i(u) - 1) / h``.

    ``phis1``/``phis2`` are the generic ``Phi_{i,*}`` on legs 1 and 2.  The
    result is a polynomial in ``z``.
    """
    h = hbar()
    out = TensorSeries(0)
    # xi(u - z) (x) 1: (u-z)^(-r1-1) = sum_k C(r1+k, k) z^k u^(-r1-k-1)
    for r1 in range(r + 1):
        k = r - r1
        out.add(k, (None, None), phis1[r1] * math.comb(r, k))
    out.add(0, (None, None), phis2[r])
    # cross terms: u^(-r1-k-1) u^(-r2-1) with r1 + k + r2 + 2 = r + 1
    for r1 in range(r):
        for k in range(r - r1):
            r2 = r - 1 - r1 - k
            out.add(k, (None, None), phis1[r1] * phis2[r2] * h * math.comb(r1 + k, k))
    return out


def _kind_of_leg(poly_part: Poly, dim, leg: int):
    """Split a leg-``leg`` root polynomial at ``dim`` (0 or ``delta_i``) into kinds."""
    if not any(dim):
        return [(None, poly_part)]
    i = next(k for k, c in enumerate(dim) if c)
    return [((i, m), c) for m, c in poly_part.coeffs_in(xkey(i + 1, 1, leg)).items()]


def extended_jl_coproduct(q: Quiver, element: ExtendedElement, order: int, var: VarKey = Z) -> TensorSeries:
    """Extended vertex coproduct computed from the bosonisation formula.

    For each term ``b (x) h`` and each split ``(d1, d2)`` of the dimension of
    ``b``: ``R_taut(z)_(32) . (Delta_{d1,d2}(b, z)_(13) (x) (act_{z,1} oplus* h)_(24))``.
    Legs 1/3 carry roots of the CoHA factors, legs 2/4 tautological
    generators; the result is re-expressed with spherical symbols and the
    tautological legs renamed to 1 and 2.
    """
    require_tripled(q)
    if order < 1:
        raise ValueError("order must be at least 1")
    out = TensorSeries(order)
    for kind, h in element.terms.items():
        if kind is None:
            dim = q.zero()
            bpoly = Poly.const(1)
        else:
            i, n = kind
            dim = q.delta(i)
            bpoly = root(i, 1, 0) ** n
        hh = taut_translate(taut_coproduct(h, 0, 2, 4), var, 2)
        for d1, d2 in splits(dim):
            delta = delta_z_leg(q, bpoly, d1, d2, var, 0, (1, 3)).as_poly()
            body = delta * hh
            top = body.degree_in(var) if var in body.variables() else 0
            rser = r_taut_generic(q, order + top, var, legs=(3, 2), dims=(d2, None))
            bser = ZSeries.from_poly(body, var, 1 << 20)
            total = (bser * rser).truncate(order)
            for k, coeff in total.coeffs.items():
                for kind1, c1 in _kind_of_leg(coeff, d1, 1):
                    for kind2, c2 in _kind_of_leg(c1, d2, 3):
                        c2 = c2.rename({g: ("g", 1 if g[1] == 2 else 2) + g[2:] for g in c2.variables() if g[0] == "g"})
                        out.add(k, (kind1, kind2), c2)
    return out


def jl_coproduct_phi(q: Quiver, i: int, r: int, phi_r: Poly) -> TensorSeries:
    """Extended vertex coproduct of ``1 (x) Phi_{i,r}`` (a polynomial in ``z``)."""
    ser = extended_jl_coproduct(q, ExtendedElement.unit(phi_r), 1)
    # the unit has a single split with trivial R-matrix, so the series is exact
    out = TensorSeries(0)
    for k, slot in ser.coeffs.items():
        for kinds, v in slot.items():
            out.add(k, kinds, v)
    return out


@dataclass
class ComparisonResult:
    passed: bool
    checked: int
    failure: str | None = None


def compare_coproducts(q: Quiver, vertices: Iterable[int] | None = None, max_exp: int = 4, order: int = 8) -> ComparisonResult:
    """Compare the Drinfeld and extended vertex coproducts coefficientwise.

    Checks ``x+_{i,n} -> x^(n)_i`` for ``n <= max_exp`` and ``xi_{i,r} ->
    Phi_{i,r}`` for ``r < order``, down to ``z^-order``.
    """
    require_tripled(q)
    verts = range(q.n) if vertices is None else vertices
    checked = 0
    for i in verts:
        phis0 = phi_generic(q, i, order, 0)
        phis1 = [p.rename({g: ("g", 1) + g[2:] for g in p.variables() if g[0] == "g"}) for p in phis0]
        phis2 = [p.rename({g: ("g", 2) + g[2:] for g in p.variables() if g[0] == "g"}) for p in phis0]
        for r in range(order):
            lhs = drinfeld_coproduct_phi(q, i, r, phis1, phis2)
            rhs = jl_coproduct_phi(q, i, r, phis0[r])
            diff = lhs.first_difference(rhs)
            checked += 1
            if diff is not None:
                return ComparisonResult(False, checked, _describe(f"xi[{i + 1},{r}]", diff))
        for n in range(max_exp + 1):
            lhs = drinfeld_coproduct_x(q, i, n, order, phis1)
            rhs = extended_jl_coproduct(q, ExtendedElement.spherical(i, n), order)
            diff = lhs.first_difference(rhs)
            checked += 1
            if diff is not None:
                return ComparisonResult(False, checked, _describe(f"x+[{i + 1},{n}]", diff))
    return ComparisonResult(True, checked)


def _describe(gen: str, diff) -> str:
    k, kinds, a, b = diff
    return (
        f"{gen}: coefficient of z^{k} on {kind_name(kinds[0])} (x) {kind_name(kinds[1])}: "
        f"drinfeld={a} vs vertex={b}"
    )
