"""Pure-Python implementations of the sparse-polynomial hot loops.

A polynomial is a ``dict`` mapping a packed monomial (a non-negative Python
``int`` holding one 16-bit exponent field per variable) to a nonzero
coefficient.  Multiplying monomials is integer addition, which is exact as
long as no exponent field overflows; callers guard against that by checking
total degrees before multiplying.

The compiled module ``cohaq._kernels`` exposes the same functions with the
same semantics; :mod:`cohaq.kernels` picks one of the two at import time.
"""

from __future__ import annotations

FIELD_BITS = 16
FIELD_MASK = (1 << FIELD_BITS) - 1
DEGREE_MODULUS = FIELD_MASK  # 2**16 == 1 (mod 2**16 - 1)


def mul(a: dict, b: dict) -> dict:
    """Return the product of two term dictionaries."""
    if len(a) < len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    for mb, cb in b.items():
        for ma, ca in a.items():
            m = ma + mb
            c = get(m)
            if c is None:
                out[m] = ca * cb
            else:
                out[m] = c + ca * cb
    return {m: c for m, c in out.items() if c}


def addmul(acc: dict, a: dict, b: dict) -> None:
    """In place ``acc += a * b`` (zero coefficients are pruned)."""
    get = acc.get
    for mb, cb in b.items():
        for ma, ca in a.items():
            m = ma + mb
            c = get(m)
            if c is None:
                acc[m] = ca * cb
            else:
                acc[m] = c + ca * cb
    for m in [m for m, c in acc.items() if not c]:
        del acc[m]


def add_scaled(acc: dict, b: dict, scale) -> None:
    """In place ``acc += scale * b``."""
    get = acc.get
    for m, c in b.items():
        old = get(m)
        if old is None:
            new = scale * c
            if new:
                acc[m] = new
        else:
            new = old + scale * c
            if new:
                acc[m] = new
            else:
                del acc[m]


def shift(a: dict, mono: int, scale) -> dict:
    """Return ``scale * mono * a`` for a monomial ``mono``."""
    return {m + mono: c * scale for m, c in a.items()}


def max_degree(a: dict) -> int:
    """Largest total degree of a monomial of ``a`` (0 for the empty dict)."""
    best = 0
    for m in a:
        d = m % DEGREE_MODULUS
        if d > best:
            best = d
    return best


def split_by_mask(a: dict, mask: int) -> dict:
    """Group terms by ``m & mask``.

    Returns ``{masked_part: {rest: coeff}}`` where ``rest = m - masked_part``.
    """
    out: dict = {}
    for m, c in a.items():
        k = m & mask
        sub = out.get(k)
        if sub is None:
            out[k] = {m - k: c}
        else:
            sub[m - k] = c
    return out


def collect_field(a: dict, shift_bits: int) -> dict:
    """Group terms by the exponent stored at bit offset ``shift_bits``.

    Returns ``{exponent: {monomial_without_that_variable: coeff}}``.
    """
    out: dict = {}
    for m, c in a.items():
        e = (m >> shift_bits) & FIELD_MASK
        rest = m - (e << shift_bits)
        sub = out.get(e)
        if sub is None:
            out[e] = {rest: c}
        else:
            sub[rest] = c
    return out


def rename(a: dict, moves: list) -> dict:
    """Move exponent fields between variables.

    ``moves`` is a list of ``(src_shift, dst_shift)`` bit offsets; all sources
    are read before any destination is written, so permutations are safe.
    Destinations must be empty in every monomial unless they are also
    sources.
    """
    out: dict = {}
    get = out.get
    for m, c in a.items():
        fields = []
        for s, d in moves:
            e = (m >> s) & FIELD_MASK
            if e:
                m -= e << s
                fields.append((e, d))
        for e, d in fields:
            m += e << d
        old = get(m)
        if old is None:
            out[m] = c
        else:
            new = old + c
            if new:
                out[m] = new
            else:
                del out[m]
    return out
