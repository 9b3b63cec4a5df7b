"""Characteristic-class data of the Ext complex and the spectral R-matrices.

For dimension vectors ``d1`` (leg ``L1``, roots ``x'``) and ``d2`` (leg
``L2``, roots ``x''``) the Ext complex has

* degree 0 roots ``x''_{i,m} - x'_{i,n}`` for every vertex ``i``;
* degree 1 roots ``x''_{j,m} - x'_{i,n} + wt(e)`` for every arrow ``e: i -> j``.

All series in the spectral variable are kept as factored fractions; the
generic tautological R-matrix is the one object produced directly as a
series, from chern characters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from cohaq.cohomology import chern_character, gamma, root
from cohaq.poly import ONE, Poly, VarKey, Z
from cohaq.quiver import DimVector, Quiver, euler_form
from cohaq.spectral import SpectralFraction, ZSeries, exp_series


def _spec(var: VarKey | Poly | None, sign: int = 1) -> Poly:
    if var is None:
        return Poly()
    s = var if isinstance(var, Poly) else Poly.var(var)
    return s * sign


def vertex_factors(q: Quiver, d1, d2, shift: Poly, legs=(1, 2)) -> list[Poly]:
    l1, l2 = legs
    out = []
    for i in range(q.n):
        for n in range(1, d1[i] + 1):
            for m in range(1, d2[i] + 1):
                out.append(shift + root(i, m, l2) - root(i, n, l1))
    return out


def edge_factors(q: Quiver, d1, d2, shift: Poly, legs=(1, 2)) -> list[Poly]:
    """Roots ``shift + x''_j - x'_i + wt`` of the degree-1 term, arrows ``i -> j``."""
    l1, l2 = legs
    out = []
    for i, j, e in q.edge_indices():
        wt = q.edge_weight(e)
        for n in range(1, d1[i] + 1):
            for m in range(1, d2[j] + 1):
                out.append(shift + root(j, m, l2) - root(i, n, l1) + wt)
    return out


def dual_edge_factors(q: Quiver, d1, d2, shift: Poly, legs=(1, 2)) -> list[Poly]:
    """Roots ``shift + x''_i - x'_j - wt`` over arrows ``i -> j`` (opposite quiver)."""
    l1, l2 = legs
    out = []
    for i, j, e in q.edge_indices():
        wt = q.edge_weight(e)
        for n in range(1, d1[j] + 1):
            for m in range(1, d2[i] + 1):
                out.append(shift + root(i, m, l2) - root(j, n, l1) - wt)
    return out


def _product(factors: Sequence[Poly]) -> Poly:
    out = Poly.const(1)
    for f in factors:
        out = out * f
    return out


def euler_classes(q: Quiver, d1, d2, legs=(1, 2)) -> tuple[Poly, Poly, Poly]:
    """``(e(Q0), e(Q1), e(Q1^op))`` as expanded polynomials over two legs."""
    d1, d2 = q.dim(d1), q.dim(d2)
    zero = Poly()
    return (
        _product(vertex_factors(q, d1, d2, zero, legs)),
        _product(edge_factors(q, d1, d2, zero, legs)),
        _product(dual_edge_factors(q, d1, d2, zero, legs)),
    )


def euler_fraction(q: Quiver, d1, d2, legs=(1, 2)) -> SpectralFraction:
    """``e(Ext) = e(Q0) / e(Q1)`` in factored form."""
    zero = Poly()
    return SpectralFraction.linear_product(vertex_factors(q, d1, d2, zero, legs), edge_factors(q, d1, d2, zero, legs))


def psi_series(q: Quiver, d1, d2, sign: int = 1, var: VarKey | Poly = Z, legs=(1, 2)) -> SpectralFraction:
    """``Psi(Ext, sign * z)``: vertex roots over edge roots, shifted by ``sign * z``."""
    d1, d2 = q.dim(d1), q.dim(d2)
    s = _spec(var, sign)
    return SpectralFraction.linear_product(vertex_factors(q, d1, d2, s, legs), edge_factors(q, d1, d2, s, legs))


def psi_dual_series(q: Quiver, d1, d2, var: VarKey | Poly = Z, legs=(1, 2)) -> SpectralFraction:
    """``Psi(sigma* Ext^dual, z)``: the Ext complex of the swapped pair, dualised."""
    d1, d2 = q.dim(d1), q.dim(d2)
    s = _spec(var)
    return SpectralFraction.linear_product(vertex_factors(q, d1, d2, s, legs), dual_edge_factors(q, d1, d2, s, legs))


def r_matrix(q: Quiver, d1, d2, mode: str = "full", var: VarKey | Poly = Z, legs=(1, 2)) -> SpectralFraction:
    """The R-matrix of the pair ``(d1, d2)``.

    Parameters
    ----------
    mode : {"full", "localised", "taut"}
        ``full``: ``Psi(sigma* Ext^dual, z) / Psi(Ext, z)``, a ratio of arrow
        factors.  ``localised``: ``e(Q1) / e(Q1^op)`` (no spectral variable).
        ``taut``: ``z^(chi(d1,d2) - chi(d2,d1))`` times the full R-matrix,
        whose expansion at infinity starts with ``1``.
    """
    d1, d2 = q.dim(d1), q.dim(d2)
    if mode == "localised":
        zero = Poly()
        return SpectralFraction.linear_product(edge_factors(q, d1, d2, zero, legs), dual_edge_factors(q, d1, d2, zero, legs))
    s = _spec(var)
    full = SpectralFraction.linear_product(edge_factors(q, d1, d2, s, legs), dual_edge_factors(q, d1, d2, s, legs))
    if mode == "full":
        return full
    if mode == "taut":
        k = euler_form(q, d1, d2) - euler_form(q, d2, d1)
        return full * SpectralFraction(1, {s: k})
    raise ValueError(f"unknown R-matrix mode {mode!r}")


@dataclass(frozen=True)
class ExtData:
    """Bundle of the Ext-complex data for a pair of dimension vectors."""

    quiver: Quiver
    d1: DimVector
    d2: DimVector
    rank: int
    e0: Poly
    e1: Poly
    e1op: Poly
    psi_plus: SpectralFraction
    psi_minus: SpectralFraction
    psi_dual: SpectralFraction


def ext_data(q: Quiver, d1, d2, var: VarKey = Z, legs=(1, 2)) -> ExtData:
    d1, d2 = q.dim(d1), q.dim(d2)
    e0, e1, e1op = euler_classes(q, d1, d2, legs)
    return ExtData(
        q, d1, d2, euler_form(q, d1, d2), e0, e1, e1op,
        psi_series(q, d1, d2, 1, var, legs),
        psi_series(q, d1, d2, -1, var, legs),
        psi_dual_series(q, d1, d2, var, legs),
    )


# ---------------------------------------------------------------------------
# generic tautological R-matrix
# ---------------------------------------------------------------------------


def _power_sums(q: Quiver, leg: int, dim: Sequence[int] | None, kmax: int) -> list[list[Poly]]:
    """``p[v][a]`` for ``a <= kmax``: generic (``a! g[v,a]``, rank ``g[v,0]``) or at ``dim``."""
    out = []
    for v in range(q.n):
        row = []
        for a in range(kmax + 1):
            if dim is None:
                row.append(gamma(v, a, leg) * math.factorial(a))
            else:
                row.append(chern_character(v, a, dim[v], leg) * math.factorial(a))
        out.append(row)
    return out


def _shifted_power_sum(py: list[Poly], px: list[Poly], c: Poly, k: int) -> Poly:
    """``sum_{m,n} (Y_m - X_n + c)^k`` from power sums of ``Y`` and ``X``."""
    acc = Poly()
    cpow = [Poly.const(1)]
    for _ in range(k):
        cpow.append(cpow[-1] * c)
    for a in range(k + 1):
        if py[a].is_zero():
            continue
        for b in range(k - a + 1):
            if px[b].is_zero():
                continue
            e = k - a - b
            if cpow[e].is_zero():
                continue
            coeff = math.factorial(k) // (math.factorial(a) * math.factorial(b) * math.factorial(e))
            if b % 2:
                coeff = -coeff
            acc = acc + py[a] * px[b] * cpow[e] * coeff
    return acc


def r_taut_log(q: Quiver, order: int, legs=(1, 2), dims=(None, None)) -> dict[int, Poly]:
    """Coefficients ``L_k`` of ``log R_taut(z) = sum_k L_k z^-k``.

    With ``log(z + a) = log z + sum_k (-1)^(k-1) a^k / (k z^k)`` summed over
    the arrow roots of both Ext complexes; the ``log z`` terms cancel
    against the ``z^chi~`` prefactor.
    """
    l1, l2 = legs
    px = _power_sums(q, l1, dims[0], order)
    py = _power_sums(q, l2, dims[1], order)
    logs: dict[int, Poly] = {}
    for k in range(1, order + 1):
        acc = Poly()
        for i, j, e in q.edge_indices():
            wt = q.edge_weight(e)
            acc = acc + _shifted_power_sum(py[j], px[i], wt, k)
            acc = acc - _shifted_power_sum(py[i], px[j], -wt, k)
        if not acc.is_zero():
            logs[k] = acc * (ONE / k) * (1 if k % 2 else -1)
    return logs


def r_taut_generic(q: Quiver, order: int, var: VarKey = Z, legs=(1, 2), dims=(None, None)) -> ZSeries:
    """``R_taut(z)`` as a series in ``z^-1`` with tautological coefficients.

    Parameters
    ----------
    order : int
        Last power ``z^-order`` kept.
    legs : pair of int
        Legs carrying the generators ``g[L,v,r]`` of the two tensor factors.
    dims : pair of (DimVector or None)
        Specialise a factor to a component (roots ``x[L,v,a]``) before
        exponentiating; ``None`` keeps it generic.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    logs = r_taut_log(q, order, legs, dims)
    coeffs = exp_series(logs, order)
    return ZSeries(var, order, {-k: c for k, c in enumerate(coeffs)})
