"""Rational functions in factored form and truncated Laurent series.

A :class:`SpectralFraction` is stored as ``num * prod(f ** e)`` where ``num``
is a polynomial and the ``f`` are normalised polynomials (leading coefficient
one) with nonzero integer exponents.  Every rational function met in this
package is a product of linear forms such as ``z + x[2,1,1] - x[1,1,1] + h/2``,
so keeping the factorisation costs nothing and makes products, quotients and
equality checks cheap: sums only bring factors to the minimum exponent, and
two fractions are equal iff the numerator of their difference vanishes.

A :class:`ZSeries` is a finite Laurent polynomial in one spectral variable
with polynomial coefficients, truncated below a fixed exponent.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from cohaq.poly import ONE, Poly, VarKey, format_poly, to_q, var_sort_key
from cohaq.poly import REGISTRY


def _normalise(p: Poly) -> tuple["object", Poly]:
    """Split ``p = c * q`` with ``q`` having leading coefficient one."""
    lead = p.terms[max(p.terms)]
    if lead == 1:
        return ONE, p
    return lead, p * (ONE / lead)


class SpectralFraction:
    """Exact rational function ``num * prod(factor ** exponent)``.

    Parameters
    ----------
    num : Poly
        Polynomial prefactor.
    factors : mapping of Poly to int, optional
        Factor exponents; factors need not be normalised on input.
    """

    __slots__ = ("num", "factors")

    def __init__(self, num: Poly | int = 1, factors: Mapping[Poly, int] | None = None):
        num = Poly.coerce(num)
        clean: dict[Poly, int] = {}
        if factors:
            for f, e in factors.items():
                if e == 0:
                    continue
                if f.is_zero():
                    if e < 0:
                        raise ZeroDivisionError("zero factor in a denominator")
                    num = Poly()
                    continue
                if f.is_constant():
                    num = num * (f.constant_term() ** e)
                    continue
                c, g = _normalise(f)
                if c != 1:
                    num = num * (c ** e)
                clean[g] = clean.get(g, 0) + e
            clean = {f: e for f, e in clean.items() if e}
        if num.is_zero():
            clean = {}
        self.num = num
        self.factors = clean

    # constructors -----------------------------------------------------------
    @classmethod
    def ratio(cls, num: Poly, den: Poly) -> "SpectralFraction":
        den = Poly.coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        return cls(num, {den: -1})

    @classmethod
    def linear_product(cls, up: Iterable[Poly], down: Iterable[Poly] = ()) -> "SpectralFraction":
        """``prod(up) / prod(down)`` kept in factored form."""
        factors: dict[Poly, int] = {}
        num = Poly.const(1)
        for f in up:
            factors_add(factors, f, 1)
        for f in down:
            factors_add(factors, f, -1)
        return cls(num, factors)

    @staticmethod
    def coerce(x) -> "SpectralFraction":
        if isinstance(x, SpectralFraction):
            return x
        return SpectralFraction(Poly.coerce(x))

    # arithmetic ---------------------------------------------------------------
    def __mul__(self, other) -> "SpectralFraction":
        other = SpectralFraction.coerce(other)
        factors = dict(self.factors)
        for f, e in other.factors.items():
            factors[f] = factors.get(f, 0) + e
        return SpectralFraction(self.num * other.num, factors)

    __rmul__ = __mul__

    def inverse(self) -> "SpectralFraction":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        factors = {f: -e for f, e in self.factors.items()}
        if self.num.is_constant():
            return SpectralFraction(Poly.const(ONE / self.num.constant_term()), factors)
        factors_add(factors, self.num, -1)
        return SpectralFraction(Poly.const(1), factors)

    def __truediv__(self, other) -> "SpectralFraction":
        return self * SpectralFraction.coerce(other).inverse()

    def __rtruediv__(self, other) -> "SpectralFraction":
        return SpectralFraction.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "SpectralFraction":
        if n < 0:
            return self.inverse() ** (-n)
        factors = {f: e * n for f, e in self.factors.items()}
        return SpectralFraction(self.num ** n, factors)

    def __neg__(self) -> "SpectralFraction":
        return SpectralFraction(-self.num, self.factors)

    def __add__(self, other) -> "SpectralFraction":
        other = SpectralFraction.coerce(other)
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        keys = set(self.factors) | set(other.factors)
        common = {f: min(self.factors.get(f, 0), other.factors.get(f, 0)) for f in keys}
        left = self.num
        right = other.num
        for f in sorted(keys, key=_factor_order):
            m = common[f]
            ea = self.factors.get(f, 0) - m
            eb = other.factors.get(f, 0) - m
            if ea:
                left = left * f ** ea
            if eb:
                right = right * f ** eb
        return SpectralFraction(left + right, common)

    __radd__ = __add__

    def __sub__(self, other) -> "SpectralFraction":
        return self + (-SpectralFraction.coerce(other))

    def __rsub__(self, other) -> "SpectralFraction":
        return SpectralFraction.coerce(other) - self

    def __eq__(self, other) -> bool:
        try:
            other = SpectralFraction.coerce(other)
        except TypeError:
            return NotImplemented
        return fraction_eq(self, other)

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return self.num.is_zero()

    # transformations ------------------------------------------------------------
    def subs(self, mapping: Mapping[VarKey, object]) -> "SpectralFraction":
        """Substitute polynomials for variables, factor by factor."""
        num = self.num.subs(mapping)
        factors: dict[Poly, int] = {}
        for f, e in self.factors.items():
            factors_add(factors, f.subs(mapping), e)
        return SpectralFraction(num, factors)

    def rename(self, mapping: Mapping[VarKey, VarKey]) -> "SpectralFraction":
        num = self.num.rename(mapping)
        factors: dict[Poly, int] = {}
        for f, e in self.factors.items():
            factors_add(factors, f.rename(mapping), e)
        return SpectralFraction(num, factors)

    def reduce(self) -> "SpectralFraction":
        """Cancel denominator factors that divide the numerator exactly."""
        num = self.num
        factors = dict(self.factors)
        for f in sorted(factors, key=_factor_order):
            while factors[f] < 0 and not num.is_zero():
                q, r = num.divmod_linear(f)
                if q is None or r:
                    break
                num = q
                factors[f] += 1
        return SpectralFraction(num, factors)

    def expand(self) -> tuple[Poly, Poly]:
        """Return ``(N, D)`` with ``self = N / D`` as expanded polynomials."""
        num = self.num
        den = Poly.const(1)
        for f in sorted(self.factors, key=_factor_order):
            e = self.factors[f]
            if e > 0:
                num = num * f ** e
            else:
                den = den * f ** (-e)
        return num, den

    def as_poly(self) -> Poly:
        """The fraction as a polynomial; raises ``ArithmeticError`` if it is not one."""
        red = self.reduce()
        if any(e < 0 for e in red.factors.values()):
            num, den = red.expand()
            return num.divexact(den)
        return red.expand()[0]

    def variables(self) -> set:
        out = set(self.num.variables())
        for f in self.factors:
            out |= f.variables()
        return out

    def expand_at_infinity(self, var: VarKey, order: int) -> "ZSeries":
        return expand_at_infinity(self, var, order)

    def __str__(self) -> str:
        return format_fraction(self)

    def __repr__(self) -> str:
        return f"SpectralFraction({format_fraction(self)!r})"


Frac = SpectralFraction


def factors_add(factors: dict, f: Poly, e: int) -> None:
    """Accumulate ``f ** e`` into an (unnormalised) factor dictionary."""
    factors[f] = factors.get(f, 0) + e


def _factor_order(f: Poly):
    return format_poly(f)


def fraction_eq(f, g) -> bool:
    """Exact equality of rational functions (cross-multiplication)."""
    f = SpectralFraction.coerce(f)
    g = SpectralFraction.coerce(g)
    return (f - g).num.is_zero()


def format_fraction(f: SpectralFraction) -> str:
    """Canonical text ``N`` or ``(N)/(D)`` with ``D`` having leading coefficient 1."""
    num, den = f.expand()
    if den.is_constant():
        return format_poly(num * (ONE / den.constant_term()))
    lead = _display_lead(den)
    num = num * (ONE / lead)
    den = den * (ONE / lead)
    return f"({format_poly(num)})/({format_poly(den)})"


def _display_lead(p: Poly):
    """Coefficient normalised to one when printing a denominator.

    Prefers the term of highest degree in the spectral variables, so that
    ``1/(z - a)`` is printed with ``+z`` rather than ``+a``.
    """
    spectral = ("z", "w", "u")

    def spectral_degree(item):
        mono, _ = item
        return sum(e for k, e in mono if k[0] in spectral)

    terms = p.sorted_terms()
    best = max(spectral_degree(t) for t in terms)
    return next(c for mono, c in terms if spectral_degree((mono, c)) == best)


# ---------------------------------------------------------------------------
# truncated Laurent series
# ---------------------------------------------------------------------------


class ZSeries:
    """Finite Laurent polynomial ``sum_k c_k * var**k`` truncated below ``-order``.

    Coefficients with exponent ``< -order`` are discarded by every operation.
    """

    __slots__ = ("var", "order", "coeffs")

    def __init__(self, var: VarKey, order: int, coeffs: Mapping[int, Poly] | None = None):
        self.var = var
        self.order = order
        self.coeffs: dict[int, Poly] = {}
        if coeffs:
            for k, c in coeffs.items():
                c = Poly.coerce(c)
                if k >= -order and not c.is_zero():
                    self.coeffs[k] = c

    @classmethod
    def from_poly(cls, p: Poly, var: VarKey, order: int) -> "ZSeries":
        return cls(var, order, p.coeffs_in(var))

    def coeff(self, k: int) -> Poly:
        return self.coeffs.get(k, Poly())

    def _check(self, other: "ZSeries") -> None:
        if other.var != self.var:
            raise ValueError("series in different spectral variables")

    def __add__(self, other) -> "ZSeries":
        if not isinstance(other, ZSeries):
            other = ZSeries(self.var, self.order, {0: Poly.coerce(other)})
        self._check(other)
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return ZSeries(self.var, order, out)

    __radd__ = __add__

    def __neg__(self) -> "ZSeries":
        return ZSeries(self.var, self.order, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other) -> "ZSeries":
        if not isinstance(other, ZSeries):
            other = ZSeries(self.var, self.order, {0: Poly.coerce(other)})
        return self + (-other)

    def __mul__(self, other) -> "ZSeries":
        if not isinstance(other, ZSeries):
            c = other if isinstance(other, Poly) else to_q(other)
            return ZSeries(self.var, self.order, {k: v * c for k, v in self.coeffs.items()})
        self._check(other)
        # a's unknown tail (exponents < -order) times b's top term bounds the
        # range in which the product is exact, and symmetrically
        top_a = max(self.coeffs, default=-self.order - 1)
        top_b = max(other.coeffs, default=-other.order - 1)
        order = min(self.order - top_b, other.order - top_a)
        out: dict[int, Poly] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                k = i + j
                if k < -order:
                    continue
                p = a * b
                out[k] = out[k] + p if k in out else p
        return ZSeries(self.var, order, out)

    __rmul__ = __mul__

    def truncate(self, order: int) -> "ZSeries":
        return ZSeries(self.var, min(order, self.order), self.coeffs)

    def map(self, fn) -> "ZSeries":
        return ZSeries(self.var, self.order, {k: fn(c) for k, c in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZSeries):
            other = ZSeries(getattr(self, "var"), self.order, {0: Poly.coerce(other)})
        order = min(self.order, other.order)
        keys = {k for k in set(self.coeffs) | set(other.coeffs) if k >= -order}
        return all(self.coeff(k) == other.coeff(k) for k in keys)

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __str__(self) -> str:
        return format_series(self)

    def __repr__(self) -> str:
        return f"ZSeries({format_series(self)!r})"


def format_series(s: ZSeries) -> str:
    """Canonical text: descending powers, ``var^k*(coeff)``, and an ``O(...)`` tail.

    The constant term is parenthesised unless it is a single positive term.
    """
    name = "".join(s.var[0])
    pieces = []
    for k in sorted(s.coeffs, reverse=True):
        c = format_poly(s.coeffs[k])
        if k == 0:
            simple = len(s.coeffs[k].terms) == 1 and not c.startswith("-")
            pieces.append(c if simple else f"({c})")
        else:
            power = name if k == 1 else f"{name}^{k}"
            pieces.append(f"{power}*({c})")
    pieces.append(f"O({name}^{-s.order - 1})")
    return " + ".join(pieces)


def _series_of_poly_inverse_linear(root: Poly, var: VarKey, order: int) -> list[Poly]:
    """Coefficients ``c_k`` of ``1/(1 + root * t) = sum_k c_k t^k`` for ``k <= order``."""
    out = [Poly.const(1)]
    for _ in range(order):
        out.append(out[-1] * (-root))
    return out


def _power_series_mul(a: list[Poly], b: list[Poly], n: int) -> list[Poly]:
    out = [Poly() for _ in range(n + 1)]
    for i, x in enumerate(a[: n + 1]):
        if x.is_zero():
            continue
        for j in range(0, n + 1 - i):
            y = b[j] if j < len(b) else None
            if y is None or y.is_zero():
                continue
            out[i + j] = out[i + j] + x * y
    return out


def _power_series_inverse(a: list[Poly], n: int) -> list[Poly]:
    """Inverse of ``a_0 + a_1 t + ...`` with constant nonzero ``a_0``."""
    a0 = a[0]
    if not a0.is_constant() or a0.is_zero():
        raise ArithmeticError("leading coefficient is not an invertible constant")
    inv0 = ONE / a0.constant_term()
    out = [Poly.const(inv0)]
    for k in range(1, n + 1):
        acc = Poly()
        for j in range(1, min(k, len(a) - 1) + 1):
            if not a[j].is_zero() and not out[k - j].is_zero():
                acc = acc + a[j] * out[k - j]
        out.append(acc * (-inv0))
    return out


def exp_series(logs: Mapping[int, Poly], n: int) -> list[Poly]:
    """Coefficients of ``exp(sum_k L_k t^k)`` up to ``t^n`` (``L_0`` must vanish).

    Uses ``F_k = (1/k) sum_{j=1..k} j L_j F_{k-j}``.
    """
    out = [Poly.const(1)]
    for k in range(1, n + 1):
        acc = Poly()
        for j in range(1, k + 1):
            lj = logs.get(j)
            if lj is None or lj.is_zero() or out[k - j].is_zero():
                continue
            acc = acc + lj * out[k - j] * j
        out.append(acc * (ONE / k))
    return out


def expand_at_infinity(f, var: VarKey, order: int) -> ZSeries:
    """Laurent expansion of ``f`` at ``var = infinity``, truncated after ``var^-order``.

    Every denominator factor whose degree in ``var`` is positive must have a
    nonzero constant as its top coefficient in ``var``; otherwise the expansion does
    not exist in ``(( var^-1 ))`` over the polynomial coefficient ring and
    ``ValueError`` is raised.  Linear factors are handled through logarithms
    and power sums; other factors by power-series inversion.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    f = SpectralFraction.coerce(f)
    if f.num.is_zero():
        return ZSeries(var, order)
    shift = 0
    logs: dict[int, Poly] = {}
    series_factors: list[tuple[list[Poly], int]] = []
    const = ONE
    # numerator as t-series: num = var^top * sum_k n_k t^k with t = 1/var
    pieces = [(f.num, 1)] + [(g, e) for g, e in sorted(f.factors.items(), key=lambda kv: _factor_order(kv[0]))]
    # first pass: total leading power (to know how many t-terms are needed)
    for g, e in pieces:
        deg = g.degree_in(var) if var in g.variables() else 0
        shift += deg * e
    n_terms = shift + order  # need t-exponents 0..n_terms
    if n_terms < 0:
        return ZSeries(var, order)
    num_series: list[Poly] | None = None
    for idx, (g, e) in enumerate(pieces):
        parts = g.coeffs_in(var)
        deg = max(parts)
        top = parts[deg]
        if idx == 0 or (e > 0 and deg > 0 and not top.is_constant()):
            # numerator-type factor: plain multiplication, no inversion needed
            ser = [parts.get(deg - k, Poly()) for k in range(0, min(deg, n_terms) + 1)]
            if idx == 0:
                num_series = ser
            else:
                series_factors.extend([(ser, 1)] * e)
            continue
        if deg > 0 and not top.is_constant():
            raise ValueError(
                f"cannot expand at {var[0]}=infinity: leading coefficient {format_poly(top)} "
                "is not an invertible constant"
            )
        if deg == 0:
            factor = g ** e if e > 0 else None
            if factor is None:
                raise ValueError(f"cannot expand: factor {format_poly(g)} free of {var[0]} in a denominator")
            num_series = [c * factor for c in num_series]
            continue
        c = top.constant_term()
        const *= c ** e
        if deg == 1:
            root = parts.get(0, Poly()) * (ONE / c)
            # log(1 + root t) = sum_k (-1)^{k-1} root^k t^k / k
            power = Poly.const(1)
            for k in range(1, n_terms + 1):
                power = power * root
                if power.is_zero():
                    break
                term = power * (to_q(e) * (1 if k % 2 else -1) / k)
                logs[k] = logs[k] + term if k in logs else term
        else:
            ser = [parts.get(deg - k, Poly()) * (ONE / c) for k in range(0, min(deg, n_terms) + 1)]
            if e < 0:
                ser = _power_series_inverse(ser, n_terms)
                e = -e
            for _ in range(e):
                series_factors.append((ser, 1))
    total = _power_series_mul(num_series, exp_series(logs, n_terms), n_terms)
    for ser, _ in series_factors:
        total = _power_series_mul(total, ser, n_terms)
    coeffs = {}
    for k, c in enumerate(total):
        if not c.is_zero():
            coeffs[shift - k] = c * const
    return ZSeries(var, order, coeffs)
