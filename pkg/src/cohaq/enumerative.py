"""Graded dimensions of the W=0 CoHA and BPS extraction by plethystic logarithm.

Characters are truncated Laurent series in ``q`` (:class:`QSeries`) that
record how far they are exact.  The generating function
``Z = sum_d (-1)^chi(d,d) ch(A_d) x^d`` is a series in the dimension
monomials ``x^d``; its plethystic logarithm, divided by the ``1/(1 - q^2)``
tower, gives the BPS series ``Omega_d(q)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from cohaq.quiver import DimVector, Quiver, QuiverError, dims_up_to, euler_form


# ---------------------------------------------------------------------------
# truncated Laurent series in q
# ---------------------------------------------------------------------------


class QSeries:
    """``sum_k c_k q^k``, exact for all exponents ``< prec``.

    Coefficients at exponents ``>= prec`` are unknown and never stored.
    """

    __slots__ = ("coeffs", "prec")

    def __init__(self, coeffs: Mapping[int, object] | None = None, prec: int = 0):
        self.prec = prec
        self.coeffs: dict[int, Fraction] = {}
        for k, c in (coeffs or {}).items():
            if k < prec and c:
                self.coeffs[k] = Fraction(c)

    @classmethod
    def one(cls, prec: int) -> "QSeries":
        return cls({0: 1}, prec)

    @property
    def val(self) -> int:
        """Lowest exponent with a nonzero coefficient (``prec`` for zero)."""
        return min(self.coeffs, default=self.prec)

    def __getitem__(self, k: int) -> Fraction:
        if k >= self.prec:
            raise IndexError(f"coefficient of q^{k} is beyond the precision q^{self.prec}")
        return self.coeffs.get(k, Fraction(0))

    def __add__(self, other: "QSeries") -> "QSeries":
        prec = min(self.prec, other.prec)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return QSeries(out, prec)

    def __neg__(self) -> "QSeries":
        return QSeries({k: -c for k, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self + (-other)

    def scale(self, c) -> "QSeries":
        return QSeries({k: v * c for k, v in self.coeffs.items()}, self.prec)

    def shift(self, k: int) -> "QSeries":
        return QSeries({e + k: c for e, c in self.coeffs.items()}, self.prec + k)

    def __mul__(self, other: "QSeries") -> "QSeries":
        prec = min(self.prec + other.val, other.prec + self.val)
        out: dict[int, Fraction] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                k = i + j
                if k < prec:
                    out[k] = out.get(k, 0) + a * b
        return QSeries(out, prec)

    def adams(self, n: int) -> "QSeries":
        """``q -> q^n``."""
        return _adams(self, n)

    def inverse(self) -> "QSeries":
        """Multiplicative inverse; needs a nonzero lowest coefficient."""
        v = self.val
        if v >= self.prec:
            raise ZeroDivisionError("series is zero to its precision")
        width = self.prec - v
        a0 = self.coeffs[v]
        inv = {0: 1 / a0}
        for k in range(1, width):
            acc = sum(self.coeffs.get(v + j, 0) * inv[k - j] for j in range(1, k + 1))
            inv[k] = -acc / a0
        return QSeries({k - v: c for k, c in inv.items()}, width - v)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs.values())

    def truncate(self, prec: int) -> "QSeries":
        return QSeries(self.coeffs, min(prec, self.prec))

    def agrees(self, other: "QSeries", prec: int | None = None) -> bool:
        p = min(self.prec, other.prec) if prec is None else prec
        if p > min(self.prec, other.prec):
            return False
        keys = {k for k in set(self.coeffs) | set(other.coeffs) if k < p}
        return all(self.coeffs.get(k, 0) == other.coeffs.get(k, 0) for k in keys)

    def __str__(self) -> str:
        parts = []
        for k in sorted(self.coeffs):
            c = self.coeffs[k]
            cs = str(c.numerator) if c.denominator == 1 else f"({c})"
            parts.append(f"{cs}*q^{k}" if k else cs)
        parts.append(f"O(q^{self.prec})")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"QSeries({self})"


def _adams(s: QSeries, n: int) -> QSeries:
    # exact below prec means exact below n * prec after q -> q^n when prec > 0;
    # for prec <= 0 the image is exact below n * prec as well (all known
    # exponents scale by n and the gaps are genuinely zero)
    return QSeries({k * n: c for k, c in s.coeffs.items()}, s.prec * n)


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------


def coha_character(q: Quiver, d, order: int) -> QSeries:
    """Poincare series ``q^chi(d,d) prod_i prod_{k<=d_i} (1 - q^{2k})^-1``.

    Exact for all exponents ``<= order``.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    d = q.dim(d)
    return _character(q, d, order + 1)


def _character(q: Quiver, d: DimVector, prec: int) -> QSeries:
    shift = euler_form(q, d, d)
    width = prec - shift
    if width <= 0:
        return QSeries({}, prec)
    # product of 1/(1 - q^{2k}) as an ordinary power series below ``width``
    coeffs = [0] * width
    coeffs[0] = 1
    for v in d:
        for k in range(1, v + 1):
            step = 2 * k
            for e in range(step, width):
                coeffs[e] += coeffs[e - step]
    return QSeries({e + shift: c for e, c in enumerate(coeffs) if c}, prec)


# ---------------------------------------------------------------------------
# series in dimension monomials with QSeries coefficients
# ---------------------------------------------------------------------------

DSeries = dict  # DimVector -> QSeries


def _dmul(a: DSeries, b: DSeries, bound: int, prec: int) -> DSeries:
    out: DSeries = {}
    for da, sa in a.items():
        for db, sb in b.items():
            d = DimVector(x + y for x, y in zip(da, db))
            if d.size > bound:
                continue
            term = sa * sb
            out[d] = out[d] + term if d in out else term
    return out


def _dlog(z: DSeries, bound: int, prec: int) -> DSeries:
    """``log(1 + F)`` where ``z = 1 + F`` and ``F`` has no ``d = 0`` term."""
    f = {d: s for d, s in z.items() if d.size > 0}
    out: DSeries = {}
    power = dict(f)
    k = 1
    while power:
        sign = 1 if k % 2 else -1
        for d, s in power.items():
            term = s.scale(Fraction(sign, k))
            out[d] = out[d] + term if d in out else term
        power = _dmul(power, f, bound, prec)
        k += 1
    return out


def _dexp(f: DSeries, n_vertices: int, bound: int, prec: int) -> DSeries:
    """``exp(F)`` for ``F`` without constant term."""
    zero = DimVector((0,) * n_vertices)
    out: DSeries = {zero: QSeries.one(prec)}
    term: DSeries = {zero: QSeries.one(prec)}
    k = 1
    while True:
        term = _dmul(term, f, bound, prec)
        term = {d: s.scale(Fraction(1, k)) for d, s in term.items()}
        if not term:
            break
        for d, s in term.items():
            out[d] = out[d] + s if d in out else s
        k += 1
    return out


def _dadams(f: DSeries, n: int, bound: int) -> DSeries:
    out = {}
    for d, s in f.items():
        dn = DimVector(c * n for c in d)
        if dn.size <= bound:
            out[dn] = _adams(s, n)
    return out


def _mobius(n: int) -> int:
    result = 1
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def plethystic_log(z: DSeries, bound: int, prec: int) -> DSeries:
    """``PLog(Z) = sum_n mu(n)/n psi_n(log Z)``."""
    log_z = _dlog(z, bound, prec)
    out: DSeries = {}
    for n in range(1, bound + 1):
        mu = _mobius(n)
        if not mu:
            continue
        for d, s in _dadams(log_z, n, bound).items():
            term = s.scale(Fraction(mu, n))
            out[d] = out[d] + term if d in out else term
    return out


def plethystic_exp(f: DSeries, n_vertices: int, bound: int, prec: int) -> DSeries:
    """``Exp(F) = exp(sum_n psi_n(F)/n)``."""
    acc: DSeries = {}
    for n in range(1, bound + 1):
        for d, s in _dadams(f, n, bound).items():
            term = s.scale(Fraction(1, n))
            acc[d] = acc[d] + term if d in acc else term
    return _dexp(acc, n_vertices, bound, prec)


# ---------------------------------------------------------------------------
# BPS invariants
# ---------------------------------------------------------------------------


@dataclass
class BPSResult:
    """BPS series per dimension vector plus diagnostics."""

    omega: dict
    order: int
    integral: bool
    reconstructs: bool

    def table(self) -> list[tuple[DimVector, QSeries]]:
        return sorted(self.omega.items(), key=lambda kv: (kv[0].size, tuple(kv[0])))


def _signed_generating_function(q: Quiver, max_dim: int, prec: int) -> DSeries:
    z: DSeries = {q.zero(): QSeries.one(prec)}
    for d in dims_up_to(q, max_dim):
        s = _character(q, d, prec)
        if euler_form(q, d, d) % 2:
            s = -s
        z[d] = s
    return z


def _tower() -> QSeries:
    # (1 - q^2), exact
    return QSeries({0: 1, 2: -1}, 1 << 30)


def bps_invariants(q: Quiver, max_dim: int, order: int) -> BPSResult:
    """Extract ``Omega_d(q)`` for ``1 <= |d| <= max_dim``, exact up to ``q^order``.

    ``Z = sum_d (-1)^chi(d,d) ch(A_d) x^d``; ``Omega_d = (-1)^chi(d,d) (1 - q^2)
    [x^d] PLog(Z)``.  The working precision is raised until every ``Omega_d``,
    and the reconstruction of every character from them, is exact through
    ``q^order``.
    """
    if not q.is_symmetric:
        raise QuiverError("BPS extraction needs a symmetric quiver")
    if order < 1 or max_dim < 0:
        raise ValueError("order must be >= 1 and max_dim >= 0")
    target = order + 1
    extra = 0
    while True:
        prec = target + extra
        omega = _extract(q, max_dim, prec)
        rebuilt = reconstruct(q, omega, max_dim, prec)
        worst = min([s.prec for s in omega.values()] + [s.prec for d, s in rebuilt.items() if d.size > 0] + [prec])
        if worst >= target:
            break
        extra += max(target - worst, 2)
    reconstructs = True
    for d in dims_up_to(q, max_dim):
        expect = _character(q, d, target)
        if euler_form(q, d, d) % 2:
            expect = -expect
        got = rebuilt.get(d, QSeries({}, prec))
        if not got.agrees(expect, target):
            reconstructs = False
    omega = {d: s.truncate(target) for d, s in omega.items()}
    integral = all(s.is_integral() for s in omega.values())
    return BPSResult(omega, order, integral, reconstructs)


def _extract(q: Quiver, max_dim: int, prec: int) -> dict:
    z = _signed_generating_function(q, max_dim, prec)
    plog = plethystic_log(z, max_dim, prec)
    omega = {}
    for d in dims_up_to(q, max_dim):
        s = plog.get(d, QSeries({}, prec)) * _tower()
        if euler_form(q, d, d) % 2:
            s = -s
        omega[d] = s
    return omega


def reconstruct(q: Quiver, omega: Mapping[DimVector, QSeries], max_dim: int, prec: int) -> DSeries:
    """Signed ``Exp(sum_d (-1)^chi(d,d) Omega_d / (1 - q^2) x^d)``."""
    f = {}
    for d, s in omega.items():
        width = max(s.prec - s.val, 0)
        inv_tower = QSeries({2 * k: 1 for k in range(width // 2 + 1)}, width + 1)
        t = s * inv_tower
        if euler_form(q, d, d) % 2:
            t = -t
        f[d] = t
    return plethystic_exp(f, q.n, max_dim, prec)
