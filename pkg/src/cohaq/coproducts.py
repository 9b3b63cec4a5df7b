"""Coproducts, the shuffle product and the bosonised extended algebra.

Conventions (all legs are explicit integers):

* ``delta_loc`` is ``e(Q0)/e(Q1) * (direct-sum pullback)``;
* ``delta_z`` is ``Psi(Ext, -z) * act_{z, first leg}(direct-sum pullback)``;
* the shuffle product symmetrises ``f(X') g(X'') e(Q1)(X',X'') / e(Q0)(X',X'')``
  over the ``(d1, d2)``-shuffles of each vertex's alphabet.

The symmetrisation is done with the Vandermonde trick: multiplying by
``V(X') V(X'')`` turns the kernel denominator into ``V(X)`` up to sign, so
the sum is an antisymmetrisation followed by one exact division.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from cohaq.cohomology import (
    CohClass,
    act_pullback,
    leg_roots,
    root,
    split_renaming,
    taut_coproduct,
    taut_specialize,
    taut_translate,
)
from cohaq.extdata import edge_factors, euler_classes, euler_fraction, psi_series, r_taut_generic
from cohaq.poly import Poly, VarKey, Z, gkey, split_by_legs, xkey
from cohaq.quiver import DimVector, Quiver, QuiverError, euler_form, sign_twists
from cohaq.spectral import SpectralFraction, ZSeries, expand_at_infinity

Frac = SpectralFraction

#: exponent bound for series that are exact Laurent polynomials
EXACT_ORDER = 1 << 20


def _as_frac(x) -> SpectralFraction:
    return SpectralFraction.coerce(x)


def _spectral(var) -> Poly:
    return var if isinstance(var, Poly) else Poly.var(var)


# ---------------------------------------------------------------------------
# coproducts on arbitrary legs
# ---------------------------------------------------------------------------


def pullback_leg(f, d1, d2, src: int, leg1: int, leg2: int):
    """Direct-sum pullback applied to leg ``src`` of a polynomial or fraction."""
    mapping = split_renaming(d1, d2, src, leg1, leg2)
    return f.rename(mapping)


def act_leg(f, dim, spectral, leg: int):
    """Translate the roots of ``leg`` (dimension ``dim``) by ``spectral``."""
    s = _spectral(spectral)
    mapping = {k: Poly.var(k) + s for k in leg_roots(dim, leg)}
    return f.subs(mapping)


def delta_loc_leg(q: Quiver, f, d1, d2, src: int = 0, legs=(1, 2)) -> SpectralFraction:
    """Localised coproduct of leg ``src`` of ``f`` into ``legs``."""
    d1, d2 = q.dim(d1), q.dim(d2)
    split = pullback_leg(_as_frac(f), d1, d2, src, *legs)
    return euler_fraction(q, d1, d2, legs) * split


def delta_z_leg(q: Quiver, f, d1, d2, spectral=Z, src: int = 0, legs=(1, 2)) -> SpectralFraction:
    """Vertex coproduct ``Delta_{d1,d2}(z)`` of leg ``src`` of ``f`` into ``legs``."""
    d1, d2 = q.dim(d1), q.dim(d2)
    s = _spectral(spectral)
    split = pullback_leg(_as_frac(f), d1, d2, src, *legs)
    shifted = act_leg(split, d1, s, legs[0])
    return psi_series(q, d1, d2, -1, s, legs) * shifted


def delta_loc(a: CohClass, d1, d2) -> SpectralFraction:
    """Davison's localised coproduct, valued in fractions over legs 1 and 2.

    Examples
    --------
    >>> from cohaq.quiver import loop_quiver
    >>> q = loop_quiver(0)
    >>> str(delta_loc(CohClass(q, (2,), Poly.const(1)), (1,), (1,)))
    '-x[1,1,1] + x[2,1,1]'
    """
    q = a.quiver
    d1, d2 = q.dim(d1), q.dim(d2)
    if d1 + d2 != a.dim:
        raise QuiverError(f"dimension mismatch: {d1} + {d2} != {a.dim}")
    return delta_loc_leg(q, a.poly, d1, d2, a.leg)


def delta_loc_expanded(a: CohClass, d1, d2) -> SpectralFraction:
    """Same as :func:`delta_loc`, built from the expanded Euler classes."""
    q = a.quiver
    d1, d2 = q.dim(d1), q.dim(d2)
    e0, e1, _ = euler_classes(q, d1, d2)
    num = e0 * a.poly.rename(split_renaming(d1, d2, a.leg, 1, 2))
    return SpectralFraction.ratio(num, e1)


def delta_z(a: CohClass, d1, d2, spectral=Z) -> SpectralFraction:
    """Joyce-Liu vertex coproduct ``Delta_{d1,d2}(a, z)`` as a fraction."""
    q = a.quiver
    d1, d2 = q.dim(d1), q.dim(d2)
    if d1 + d2 != a.dim:
        raise QuiverError(f"dimension mismatch: {d1} + {d2} != {a.dim}")
    return delta_z_leg(q, a.poly, d1, d2, spectral, a.leg)


def delta_z_series(a: CohClass, d1, d2, order: int, var: VarKey = Z) -> ZSeries:
    return expand_at_infinity(delta_z(a, d1, d2, var), var, order)


def counit(a: CohClass) -> Poly:
    """Projection to the ``d = 0`` component."""
    return a.poly if a.dim.is_zero() else Poly()


# ---------------------------------------------------------------------------
# shuffle product
# ---------------------------------------------------------------------------


def _vandermonde(vertex: int, n: int, leg: int) -> Poly:
    out = Poly.const(1)
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            out = out * (root(vertex, a, leg) - root(vertex, b, leg))
    return out


def _vandermonde_factors(vertex: int, n: int, leg: int) -> list[Poly]:
    return [root(vertex, a, leg) - root(vertex, b, leg) for a in range(1, n + 1) for b in range(a + 1, n + 1)]


def _perm_sign(seq: Sequence[int]) -> int:
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def _shuffles(d1: Sequence[int], d2: Sequence[int]):
    """Yield ``(sign, mapping_leg1, mapping_leg2)`` index data per shuffle."""
    per_vertex = []
    for n1, n2 in zip(d1, d2):
        options = []
        for first in itertools.combinations(range(1, n1 + n2 + 1), n1):
            second = [k for k in range(1, n1 + n2 + 1) if k not in first]
            options.append((_perm_sign(list(first) + second), first, tuple(second)))
        per_vertex.append(options)
    for choice in itertools.product(*per_vertex):
        sign = 1
        for s, _, _ in choice:
            sign *= s
        yield sign, [c[1] for c in choice], [c[2] for c in choice]


def shuffle_legs(q: Quiver, f, d1, d2, legs=(1, 2), out_leg: int = 0):
    """Shuffle-multiply legs ``legs`` of ``f`` into ``out_leg``.

    ``f`` may be a polynomial or a fraction; the result has the same type
    (a polynomial input gives a polynomial, the division by the Vandermonde
    being exact).  Other legs and variables of ``f`` are parameters.
    """
    d1, d2 = q.dim(d1), q.dim(d2)
    l1, l2 = legs
    kernel = Poly.const(1)
    for g in edge_factors(q, d1, d2, Poly(), legs):
        kernel = kernel * g
    for v in range(q.n):
        kernel = kernel * _vandermonde(v, d1[v], l1) * _vandermonde(v, d2[v], l2)
    is_poly = isinstance(f, Poly)
    body = f * kernel
    total = Poly() if is_poly else SpectralFraction(0)
    for sign, firsts, seconds in _shuffles(d1, d2):
        mapping = {}
        for v in range(q.n):
            for a, pos in enumerate(firsts[v], start=1):
                mapping[xkey(v + 1, a, l1)] = xkey(v + 1, pos, out_leg)
            for b, pos in enumerate(seconds[v], start=1):
                mapping[xkey(v + 1, b, l2)] = xkey(v + 1, pos, out_leg)
        term = body.rename(mapping)
        total = total + term if sign > 0 else total - term
    prefactor = -1 if sum(a * b for a, b in zip(d1, d2)) % 2 else 1
    d = d1 + d2
    vander = [fac for v in range(q.n) for fac in _vandermonde_factors(v, d[v], out_leg)]
    if is_poly:
        for fac in vander:
            q_, r_ = total.divmod_linear(fac)
            if r_:
                raise ArithmeticError("shuffle sum is not divisible by the Vandermonde determinant")
            total = q_
        return total * prefactor
    return SpectralFraction.linear_product([], vander) * total * prefactor


def shuffle_product(f: CohClass, g: CohClass, twist: str | None = None) -> CohClass:
    """The W=0 CoHA product ``f * g`` at dimension ``f.dim + g.dim``.

    Parameters
    ----------
    twist : {None, "psi"}
        ``"psi"`` multiplies by ``(-1)^psi(d1, d2)``.

    Examples
    --------
    >>> from cohaq.quiver import loop_quiver
    >>> q = loop_quiver(0)
    >>> x = CohClass(q, (1,), Poly.var(xkey(1, 1)))
    >>> one = CohClass(q, (1,), Poly.const(1))
    >>> str(shuffle_product(x, one).poly), str(shuffle_product(one, one).poly)
    ('-1', '0')
    """
    q = f.quiver
    if g.quiver != q:
        raise QuiverError("factors live on different quivers")
    d1, d2 = f.dim, g.dim
    body = f.poly.rename({k: ("x", 1) + k[2:] for k in leg_roots(d1, f.leg)}) * g.poly.rename(
        {k: ("x", 2) + k[2:] for k in leg_roots(d2, g.leg)}
    )
    out = shuffle_legs(q, body, d1, d2, (1, 2), 0)
    if twist == "psi":
        if sign_twists(q, d1, d2)[1]:
            out = -out
    elif twist is not None:
        raise ValueError(f"unknown twist {twist!r}")
    return CohClass(q, d1 + d2, out)


def shuffle_product_naive(f: CohClass, g: CohClass) -> CohClass:
    """Reference implementation: sum of fractions over all shuffles."""
    q = f.quiver
    d1, d2 = f.dim, g.dim
    e0, e1, _ = euler_classes(q, d1, d2)
    body = f.poly.rename({k: ("x", 1) + k[2:] for k in leg_roots(d1, f.leg)}) * g.poly.rename(
        {k: ("x", 2) + k[2:] for k in leg_roots(d2, g.leg)}
    ) * e1
    total = SpectralFraction(0)
    for _, firsts, seconds in _shuffles(d1, d2):
        mapping = {}
        for v in range(q.n):
            for a, pos in enumerate(firsts[v], start=1):
                mapping[xkey(v + 1, a, 1)] = xkey(v + 1, pos, 0)
            for b, pos in enumerate(seconds[v], start=1):
                mapping[xkey(v + 1, b, 2)] = xkey(v + 1, pos, 0)
        total = total + SpectralFraction.ratio(body.rename(mapping), e0.rename(mapping))
    return CohClass(q, d1 + d2, total.as_poly())


# ---------------------------------------------------------------------------
# bosonisation of the W=0 CoHA by the tautological ring
# ---------------------------------------------------------------------------

BosonTerm = tuple  # (CohClass, Poly in g[0,v,r] and h)


def _require_symmetric(q: Quiver) -> None:
    if not q.is_symmetric:
        raise QuiverError("the bosonised structures require a symmetric quiver")


def cup_taut(h: Poly, b: CohClass) -> CohClass:
    """Action of a tautological class on a CoHA class (specialise, multiply)."""
    return CohClass(b.quiver, b.dim, taut_specialize(h, b.dim, 0, b.leg) * b.poly, b.leg)


def bosonised_product(x: Iterable[BosonTerm], y: Iterable[BosonTerm]) -> list[BosonTerm]:
    """``(b (x) h)(b' (x) h') = b * (h_(1) . b') (x) h_(2) h'`` summed over terms."""
    out: dict = {}
    y = list(y)
    for b, h in x:
        _require_symmetric(b.quiver)
        cop = taut_coproduct(h, 0, 1, 2)
        for h1, h2 in split_by_legs(cop, 1, 2):
            h1 = h1.rename({k: ("g", 0) + k[2:] for k in h1.variables() if k[0] == "g"})
            h2 = h2.rename({k: ("g", 0) + k[2:] for k in h2.variables() if k[0] == "g"})
            for b2, hh in y:
                acted = cup_taut(h1, b2)
                prod = shuffle_product(b, acted)
                key = prod.dim
                tensor = out.setdefault(key, {})
                _accumulate(tensor, prod.poly, h2 * hh)
    result = []
    for dim in sorted(out):
        for bpoly, hpoly in _regroup(out[dim]):
            result.append((CohClass(x_quiver(x, y), dim, bpoly), hpoly))
    return result


def x_quiver(x, y):
    for b, _ in list(x) + list(y):
        return b.quiver
    raise ValueError("empty product")


def _accumulate(tensor: dict, bpoly: Poly, hpoly: Poly) -> None:
    # key the tensor by the h-part monomials to combine like terms
    for mono, c in hpoly.terms.items():
        tensor[mono] = tensor.get(mono, Poly()) + bpoly * c


def _regroup(tensor: dict) -> list[tuple[Poly, Poly]]:
    out = []
    for mono in sorted(tensor):
        b = tensor[mono]
        if not b.is_zero():
            out.append((b, Poly({mono: 1})))
    return out


def bosonised_coproduct(b: CohClass, h: Poly, d1, d2, order: int, var: VarKey = Z) -> ZSeries:
    """Extended vertex coproduct of ``b (x) h`` on the ``(d1, d2)`` component.

    Output legs: 1 = first CoHA factor (roots), 2 = first tautological
    factor (``g[2,v,r]``), 3 = second CoHA factor, 4 = second tautological
    factor.  The formula is ``R_taut(z)_(32) . (Delta(b,z)_(13) (x)
    (act_{z,1} oplus* h)_(24))``, truncated after ``z^-order``.
    """
    q = b.quiver
    _require_symmetric(q)
    if order < 1:
        raise ValueError("order must be at least 1")
    d1, d2 = q.dim(d1), q.dim(d2)
    hh = taut_translate(taut_coproduct(h, 0, 2, 4), var, 2)
    t_h = hh.degree_in(var) if var in hh.variables() else 0
    delta = delta_z_leg(q, b.poly, d1, d2, var, b.leg, (1, 3))
    big = order + t_h
    dser = expand_at_infinity(delta, var, big)
    t_d = max(dser.coeffs, default=0)
    rser = r_taut_generic(q, order + t_h + max(t_d, 0), var, legs=(3, 2), dims=(d2, None))
    total = dser * ZSeries.from_poly(hh, var, EXACT_ORDER)
    total = total * rser
    return total.truncate(order)
