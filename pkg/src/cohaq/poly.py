"""Exact sparse multivariate polynomials over the rationals.

Variables are identified by small tuples (``('h', 1)``, ``('x', leg, vertex,
alpha)``, ``('g', leg, vertex, r)``, ``('z',)`` ...).  A process-wide
registry assigns each key a slot in the packed monomial representation used
by :mod:`cohaq.kernels`.  Slots are an internal detail: serialization always
orders variables by their keys, so text output never depends on the order in
which variables were first used.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

import gmpy2

from cohaq import kernels as K

mpq = gmpy2.mpq
Coeff = Union[int, Fraction, "gmpy2.mpq"]
VarKey = tuple

_SAFE_DEGREE = 1 << (K.FIELD_BITS - 1)
ZERO = mpq(0)
ONE = mpq(1)


def to_q(c) -> "gmpy2.mpq":
    """Convert an int, Fraction, string ``"p/q"`` or mpq into an mpq."""
    if isinstance(c, type(ONE)):
        return c
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    if isinstance(c, (int, str)):
        return mpq(c)
    if isinstance(c, bool):
        return mpq(int(c))
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


# ---------------------------------------------------------------------------
# variable registry
# ---------------------------------------------------------------------------

_KIND_ORDER = {"h": 0, "x": 1, "g": 2, "z": 3, "w": 4, "u": 5, "t": 6}


class _Registry:
    """Thread-safe interning of variable keys into monomial bit offsets."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._keys: list[VarKey] = []
        self._index: dict[VarKey, int] = {}
        self._leg_masks: dict[int, int] = {}
        self._kind_masks: dict[str, int] = {}

    def index(self, key: VarKey) -> int:
        idx = self._index.get(key)
        if idx is not None:
            return idx
        with self._lock:
            idx = self._index.get(key)
            if idx is None:
                _validate_key(key)
                idx = len(self._keys)
                self._keys.append(key)
                field = K.FIELD_MASK << (K.FIELD_BITS * idx)
                leg = var_leg(key)
                if leg is not None:
                    self._leg_masks[leg] = self._leg_masks.get(leg, 0) | field
                self._kind_masks[key[0]] = self._kind_masks.get(key[0], 0) | field
                self._index[key] = idx
        return idx

    def key(self, idx: int) -> VarKey:
        return self._keys[idx]

    def shift(self, key: VarKey) -> int:
        return K.FIELD_BITS * self.index(key)

    def leg_mask(self, leg: int) -> int:
        return self._leg_masks.get(leg, 0)

    def kind_mask(self, kind: str) -> int:
        return self._kind_masks.get(kind, 0)

    def decode(self, mono: int) -> list[tuple[VarKey, int]]:
        out = []
        idx = 0
        while mono:
            e = mono & K.FIELD_MASK
            if e:
                out.append((self._keys[idx], e))
            mono >>= K.FIELD_BITS
            idx += 1
        return out


def _validate_key(key: VarKey) -> None:
    if not isinstance(key, tuple) or not key or key[0] not in _KIND_ORDER:
        raise ValueError(f"invalid variable key {key!r}")
    kind = key[0]
    expected = {"h": 2, "x": 4, "g": 4, "z": 1, "w": 1, "u": 1, "t": 2}[kind]
    if len(key) != expected or not all(isinstance(k, int) for k in key[1:]):
        raise ValueError(f"invalid variable key {key!r}")


REGISTRY = _Registry()


def var_leg(key: VarKey) -> int | None:
    """Tensor leg of a chern-root or tautological variable, else ``None``."""
    if key[0] in ("x", "g"):
        return key[1]
    return None


def var_sort_key(key: VarKey) -> tuple:
    return (_KIND_ORDER[key[0]],) + tuple(key[1:])


def var_name(key: VarKey) -> str:
    kind = key[0]
    if kind == "h":
        return "h" if key[1] == 1 else f"h{key[1]}"
    if kind in ("x", "g"):
        leg, v, a = key[1], key[2], key[3]
        inner = f"{v},{a}" if leg == 0 else f"{leg},{v},{a}"
        return f"{kind}[{inner}]"
    if kind == "t":
        return f"t{key[1]}"
    return kind


# convenient key constructors ------------------------------------------------

Z: VarKey = ("z",)
W: VarKey = ("w",)
U: VarKey = ("u",)


def hkey(k: int = 1) -> VarKey:
    return ("h", k)


def xkey(vertex: int, alpha: int, leg: int = 0) -> VarKey:
    """Chern root ``x_{vertex, alpha}`` on tensor leg ``leg`` (1-based indices)."""
    return ("x", leg, vertex, alpha)


def gkey(vertex: int, r: int, leg: int = 0) -> VarKey:
    """Tautological generator ``gamma_{vertex, r}``; ``r = 0`` is the rank symbol."""
    return ("g", leg, vertex, r)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class Poly:
    """A sparse polynomial with exact rational coefficients.

    Instances are treated as immutable values.

    Examples
    --------
    >>> x, y = Poly.var(xkey(1, 1)), Poly.var(xkey(1, 2))
    >>> str((x + y) ** 2)
    'x[1,1]^2 + 2*x[1,1]*x[1,2] + x[1,2]^2'
    """

    __slots__ = ("terms", "_maxdeg", "_hash")

    def __init__(self, terms: dict | None = None, *, _trusted: bool = False):
        if terms is None:
            terms = {}
        elif not _trusted:
            terms = {m: to_q(c) for m, c in terms.items() if c}
        self.terms: dict = terms
        self._maxdeg: int | None = None
        self._hash: int | None = None

    # constructors ---------------------------------------------------------
    @classmethod
    def const(cls, c: Coeff) -> "Poly":
        c = to_q(c)
        return cls({0: c} if c else {}, _trusted=True)

    @classmethod
    def var(cls, key: VarKey, power: int = 1) -> "Poly":
        return cls({power * (1 << REGISTRY.shift(key)): ONE}, _trusted=True)

    @classmethod
    def monomial(cls, exps: Mapping[VarKey, int], coeff: Coeff = 1) -> "Poly":
        m = 0
        for key, e in exps.items():
            if e < 0:
                raise ValueError("negative exponent in a polynomial monomial")
            m += e << REGISTRY.shift(key)
        c = to_q(coeff)
        return cls({m: c} if c else {}, _trusted=True)

    @staticmethod
    def coerce(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly.const(other)

    # basic predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_term(self) -> "gmpy2.mpq":
        return self.terms.get(0, ZERO)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def max_degree(self) -> int:
        if self._maxdeg is None:
            self._maxdeg = K.max_degree(self.terms)
        return self._maxdeg

    def degree(self) -> int:
        """Total degree (``-1`` for the zero polynomial)."""
        return self.max_degree() if self.terms else -1

    # arithmetic -------------------------------------------------------------
    def __add__(self, other) -> "Poly":
        other = Poly.coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        K.add_scaled(out, other.terms, ONE)
        return Poly(out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other) -> "Poly":
        other = Poly.coerce(other)
        out = dict(self.terms)
        K.add_scaled(out, other.terms, -ONE)
        return Poly(out, _trusted=True)

    def __rsub__(self, other) -> "Poly":
        return Poly.coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = to_q(other)
            if not c:
                return Poly()
            return Poly({m: v * c for m, v in self.terms.items()}, _trusted=True)
        if not self.terms or not other.terms:
            return Poly()
        if self.max_degree() + other.max_degree() >= _SAFE_DEGREE:
            raise OverflowError("polynomial degree exceeds the packed-exponent range")
        if len(other.terms) == 1:
            (m, c), = other.terms.items()
            return Poly(K.shift(self.terms, m, c), _trusted=True)
        if len(self.terms) == 1:
            (m, c), = self.terms.items()
            return Poly(K.shift(other.terms, m, c), _trusted=True)
        return Poly(K.mul(self.terms, other.terms), _trusted=True)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.is_constant() and other.terms:
                return self * (ONE / other.constant_term())
            return self.divexact(other)
        c = to_q(other)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self * (ONE / c)

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.terms == other.terms
        try:
            return self.terms == Poly.const(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # structure ----------------------------------------------------------------
    def variables(self) -> set:
        seen = 0
        for m in self.terms:
            seen |= m
        return {key for key, _ in REGISTRY.decode(_field_presence(seen))}

    def degree_in(self, key: VarKey) -> int:
        s = REGISTRY.shift(key)
        return max(((m >> s) & K.FIELD_MASK for m in self.terms), default=-1)

    def coeffs_in(self, key: VarKey) -> dict[int, "Poly"]:
        """Write ``self = sum_k c_k * key**k`` and return ``{k: c_k}``."""
        s = REGISTRY.shift(key)
        return {e: Poly(t, _trusted=True) for e, t in K.collect_field(self.terms, s).items()}

    def coeff_monomial(self, exps: Mapping[VarKey, int]) -> "gmpy2.mpq":
        m = 0
        for key, e in exps.items():
            m += e << REGISTRY.shift(key)
        return self.terms.get(m, ZERO)

    def split_mask(self, mask: int) -> dict[int, "Poly"]:
        return {k: Poly(t, _trusted=True) for k, t in K.split_by_mask(self.terms, mask).items()}

    def rename(self, mapping: Mapping[VarKey, VarKey]) -> "Poly":
        """Rename variables (simultaneously); targets absent from ``self`` stay free."""
        moves = []
        for src, dst in mapping.items():
            if src != dst:
                moves.append((REGISTRY.shift(src), REGISTRY.shift(dst)))
        if not moves or not self.terms:
            return self
        return Poly(K.rename(self.terms, moves), _trusted=True)

    def subs(self, mapping: Mapping[VarKey, object]) -> "Poly":
        """Simultaneously substitute polynomials (or scalars) for variables."""
        items = [(k, Poly.coerce(v)) for k, v in mapping.items()]
        items = [(k, v) for k, v in items if not (v.terms == Poly.var(k).terms)]
        if not items or not self.terms:
            return self
        targets = {k for k, _ in items}
        independent = all(not (v.variables() & targets) for _, v in items)
        if independent:
            out = self
            for k, v in items:
                out = out._subs_one(k, v)
            return out
        # simultaneous substitution through temporary variables
        temps = {k: ("t", i) for i, (k, _) in enumerate(items)}
        staged = self.rename(temps)
        out = staged
        for k, v in items:
            out = out._subs_one(temps[k], v)
        return out

    def _subs_one(self, key: VarKey, value: "Poly") -> "Poly":
        s = REGISTRY.shift(key)
        groups = K.collect_field(self.terms, s)
        if set(groups) == {0}:
            return self
        if value.is_constant():
            c = value.constant_term()
            out: dict = {}
            for e, t in groups.items():
                K.add_scaled(out, t, c ** e)
            return Poly(out, _trusted=True)
        top = max(groups)
        # Horner scheme in the substituted variable
        acc = Poly(groups.get(top, {}), _trusted=True)
        for e in range(top - 1, -1, -1):
            acc = acc * value
            t = groups.get(e)
            if t:
                acc = acc + Poly(t, _trusted=True)
        return acc

    def map_coeffs(self, fn) -> "Poly":
        return Poly({m: fn(c) for m, c in self.terms.items()})

    def iter_terms(self) -> Iterator[tuple[list[tuple[VarKey, int]], "gmpy2.mpq"]]:
        for m, c in self.terms.items():
            yield REGISTRY.decode(m), c

    # exact division ----------------------------------------------------------
    def divexact(self, divisor: "Poly") -> "Poly":
        """Exact quotient ``self / divisor``; raises ``ArithmeticError`` otherwise."""
        q, r = self.divmod_linear(divisor) if _is_linear_in_some_var(divisor) else (None, None)
        if q is None:
            q, r = _general_divide(self, divisor)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def divmod_linear(self, divisor: "Poly"):
        """Synthetic division by a divisor of degree one in a chosen variable.

        Returns ``(quotient, remainder)`` where the remainder is free of the
        chosen variable; the division is exact iff the remainder vanishes.
        """
        key = _linear_pivot(divisor)
        if key is None:
            return None, None
        parts = divisor.coeffs_in(key)
        lead = parts[1].constant_term()
        rest = parts.get(0, Poly())
        inv = ONE / lead
        num = self.coeffs_in(key)
        if not num:
            return Poly(), Poly()
        top = max(num)
        if top == 0:
            return Poly(), self
        xs = Poly.var(key)
        q_coeffs: dict[int, Poly] = {}
        carry = Poly()
        for e in range(top, 0, -1):
            cur = num.get(e, Poly()) - carry
            qe = cur * inv
            q_coeffs[e - 1] = qe
            carry = rest * qe
        remainder = num.get(0, Poly()) - carry
        quotient = Poly()
        for e, c in q_coeffs.items():
            if c:
                quotient = quotient + c * (xs ** e if e else Poly.const(1))
        return quotient, remainder

    # text ---------------------------------------------------------------------
    def sorted_terms(self) -> list[tuple[list[tuple[VarKey, int]], "gmpy2.mpq"]]:
        """Terms in canonical graded-lexicographic order (highest first)."""
        decoded = [(sorted(REGISTRY.decode(m), key=lambda kv: var_sort_key(kv[0])), c)
                   for m, c in self.terms.items()]
        allvars = sorted({k for mono, _ in decoded for k, _ in mono}, key=var_sort_key)
        pos = {k: i for i, k in enumerate(allvars)}

        def order(item):
            mono, _ = item
            vec = [0] * len(allvars)
            deg = 0
            for k, e in mono:
                vec[pos[k]] = e
                deg += e
            return (-deg, [-e for e in vec])

        decoded.sort(key=order)
        return decoded

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"


def _field_presence(mono: int) -> int:
    """Map a bitwise-or of monomials to a monomial with exponent 1 where present."""
    out = 0
    idx = 0
    while mono:
        if mono & K.FIELD_MASK:
            out |= 1 << (K.FIELD_BITS * idx)
        mono >>= K.FIELD_BITS
        idx += 1
    return out


def _linear_pivot(p: Poly) -> VarKey | None:
    """A variable in which ``p`` has degree one with a constant leading coefficient."""
    candidates = sorted(p.variables(), key=var_sort_key, reverse=True)
    for key in candidates:
        parts = p.coeffs_in(key)
        if max(parts) == 1 and parts[1].is_constant():
            return key
    return None


def _is_linear_in_some_var(p: Poly) -> bool:
    return not p.is_constant() and _linear_pivot(p) is not None


def _general_divide(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Multivariate division by leading terms in the packed (lex) order."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lead_b = max(b.terms)
    lead_c = b.terms[lead_b]
    lead_fields = REGISTRY.decode(lead_b)
    rem = dict(a.terms)
    quo: dict = {}
    out_rem: dict = {}
    while rem:
        m = max(rem)
        c = rem[m]
        ok = all(((m >> REGISTRY.shift(k)) & K.FIELD_MASK) >= e for k, e in lead_fields)
        if not ok:
            out_rem[m] = c
            del rem[m]
            continue
        qm = m - lead_b
        qc = c / lead_c
        quo[qm] = quo.get(qm, ZERO) + qc
        K.add_scaled(rem, K.shift(b.terms, qm, qc), -ONE)
    return Poly({m: c for m, c in quo.items() if c}, _trusted=True), Poly(out_rem, _trusted=True)


def format_coeff(c) -> str:
    c = to_q(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"({c.numerator}/{c.denominator})"


def format_monomial(mono: list[tuple[VarKey, int]]) -> str:
    return "*".join(var_name(k) if e == 1 else f"{var_name(k)}^{e}" for k, e in mono)


def format_poly(p: Poly) -> str:
    """Canonical text: graded-lex terms, coefficients as integers or ``(p/q)``.

    Non-integral coefficients keep their sign inside the parentheses, e.g.
    ``(-1/2)*h*x[1,1,2] + z``; integral ones are joined with ``-``.
    """
    if not p.terms:
        return "0"
    pieces = []
    for mono, c in p.sorted_terms():
        neg = c < 0 and c.denominator == 1
        a = -c if neg else c
        body = format_monomial(mono)
        if not body:
            text = format_coeff(a)
        elif a == 1:
            text = body
        else:
            text = f"{format_coeff(a)}*{body}"
        pieces.append((neg, text))
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for neg, text in pieces[1:]:
        out += (" - " if neg else " + ") + text
    return out


# ---------------------------------------------------------------------------
# parsing (inverse of format_poly; also accepts ordinary infix expressions)
# ---------------------------------------------------------------------------


class ParseError(ValueError):
    pass


def _tokenize(text: str) -> list[str]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "+-*/^()":
            tokens.append(ch)
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(text[i:j])
            i = j
        elif ch.isalpha():
            j = i
            while j < n and (text[j].isalnum()):
                j += 1
            if j < n and text[j] == "[":
                k = text.find("]", j)
                if k < 0:
                    raise ParseError(f"unterminated '[' at column {j + 1}")
                j = k + 1
            tokens.append(text[i:j])
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r} at column {i + 1}")
    return tokens


def parse_var(name: str) -> VarKey:
    if name in ("z", "w", "u"):
        return (name,)
    if name == "h":
        return ("h", 1)
    if name[0] == "h" and name[1:].isdigit():
        return ("h", int(name[1:]))
    if name[0] == "t" and name[1:].isdigit():
        return ("t", int(name[1:]))
    if name[0] in "xg" and name[1:2] == "[" and name.endswith("]"):
        try:
            idx = [int(s) for s in name[2:-1].split(",")]
        except ValueError as exc:
            raise ParseError(f"bad variable {name!r}") from exc
        if len(idx) == 2:
            return (name[0], 0, idx[0], idx[1])
        if len(idx) == 3:
            return (name[0], idx[0], idx[1], idx[2])
    raise ParseError(f"unknown variable {name!r}")


def parse_poly(text: str) -> Poly:
    """Parse a polynomial written in canonical (or ordinary infix) form."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(f"expected {expected or 'token'} at token {pos + 1}")
        pos += 1
        return tok

    def expr():
        sign = 1
        if peek() in ("+", "-"):
            sign = -1 if take() == "-" else 1
        val = term() * sign
        while peek() in ("+", "-"):
            op = take()
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term():
        val = power()
        while peek() in ("*", "/"):
            op = take()
            rhs = power()
            if op == "*":
                val = val * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise ParseError("division only by nonzero constants")
                val = val / rhs.constant_term()
        return val

    def power():
        base = atom()
        if peek() == "^":
            take()
            exp_tok = take()
            if not exp_tok.isdigit():
                raise ParseError(f"exponent must be a non-negative integer, got {exp_tok!r}")
            base = base ** int(exp_tok)
        return base

    def atom():
        tok = peek()
        if tok is None:
            raise ParseError("unexpected end of expression")
        if tok == "(":
            take()
            val = expr()
            take(")")
            return val
        if tok == "-":
            take()
            return -atom()
        take()
        if tok.isdigit():
            return Poly.const(int(tok))
        return Poly.var(parse_var(tok))

    if not tokens:
        raise ParseError("empty expression")
    result = expr()
    if pos != len(tokens):
        raise ParseError(f"trailing input at token {pos + 1}: {tokens[pos]!r}")
    return result


# ---------------------------------------------------------------------------
# tensor legs
# ---------------------------------------------------------------------------


def split_by_legs(p: Poly, first: int = 1, second: int = 2) -> list[tuple[Poly, Poly]]:
    """Write ``p`` as a sum of pure tensors ``a_k (x) b_k``.

    ``a_k`` collects the variables of leg ``first`` together with every
    variable that carries no leg (the ℏ's and spectral slots), ``b_k`` the
    variables of leg ``second``.  Variables of any other leg are rejected.
    """
    mask2 = REGISTRY.leg_mask(second)
    seen = 0
    for m in p.terms:
        seen |= m
    for key, _ in REGISTRY.decode(_field_presence(seen)):
        leg = var_leg(key)
        if leg is not None and leg not in (first, second):
            raise ValueError(f"variable {var_name(key)} is on leg {leg}, not {first} or {second}")
    out = []
    for part2, rest in sorted(p.split_mask(mask2).items()):
        out.append((rest, Poly({part2: ONE}, _trusted=True)))
    return out


def leg_part(p: Poly, leg: int) -> dict[int, Poly]:
    """Group ``p`` by its monomial restricted to ``leg``."""
    return p.split_mask(REGISTRY.leg_mask(leg))


def poly_sum(items: Iterable[Poly]) -> Poly:
    acc: dict = {}
    for p in items:
        K.add_scaled(acc, p.terms, ONE)
    return Poly(acc, _trusted=True)


def var(key: VarKey) -> Poly:
    return Poly.var(key)


def const(c: Coeff) -> Poly:
    return Poly.const(c)
