# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the sparse-polynomial hot loops.

Semantics are identical to :mod:`cohaq._kernels_py`; see that module for
the data layout.  Monomials stay Python ints (they can be wider than a
machine word), so the gain comes from typed loops over the dictionaries and
avoiding attribute lookups, not from machine arithmetic on exponents.
"""

from cpython.dict cimport PyDict_GetItem, PyDict_SetItem, PyDict_Next
from cpython.object cimport PyObject

FIELD_BITS = 16
FIELD_MASK = (1 << 16) - 1
DEGREE_MODULUS = FIELD_MASK


cdef inline void _acc(dict out, object m, object v):
    cdef PyObject* old = PyDict_GetItem(out, m)
    if old is NULL:
        PyDict_SetItem(out, m, v)
    else:
        PyDict_SetItem(out, m, (<object>old) + v)


def mul(dict a, dict b):
    cdef dict out = {}
    cdef Py_ssize_t pa, pb
    cdef PyObject *ka
    cdef PyObject *va
    cdef PyObject *kb
    cdef PyObject *vb
    cdef object cb, mb
    if len(a) < len(b):
        a, b = b, a
    pb = 0
    while PyDict_Next(b, &pb, &kb, &vb):
        mb = <object>kb
        cb = <object>vb
        pa = 0
        while PyDict_Next(a, &pa, &ka, &va):
            _acc(out, (<object>ka) + mb, (<object>va) * cb)
    return {m: c for m, c in out.items() if c}


def addmul(dict acc, dict a, dict b):
    cdef Py_ssize_t pa, pb
    cdef PyObject *ka
    cdef PyObject *va
    cdef PyObject *kb
    cdef PyObject *vb
    cdef object cb, mb
    pb = 0
    while PyDict_Next(b, &pb, &kb, &vb):
        mb = <object>kb
        cb = <object>vb
        pa = 0
        while PyDict_Next(a, &pa, &ka, &va):
            _acc(acc, (<object>ka) + mb, (<object>va) * cb)
    for m in [m for m, c in acc.items() if not c]:
        del acc[m]


def add_scaled(dict acc, dict b, object scale):
    cdef Py_ssize_t p = 0
    cdef PyObject *k
    cdef PyObject *v
    cdef PyObject *old
    cdef object new
    while PyDict_Next(b, &p, &k, &v):
        old = PyDict_GetItem(acc, <object>k)
        if old is NULL:
            new = scale * (<object>v)
            if new:
                PyDict_SetItem(acc, <object>k, new)
        else:
            new = (<object>old) + scale * (<object>v)
            if new:
                PyDict_SetItem(acc, <object>k, new)
            else:
                del acc[<object>k]


def shift(dict a, object mono, object scale):
    cdef dict out = {}
    cdef Py_ssize_t p = 0
    cdef PyObject *k
    cdef PyObject *v
    while PyDict_Next(a, &p, &k, &v):
        PyDict_SetItem(out, (<object>k) + mono, (<object>v) * scale)
    return out


def max_degree(dict a):
    cdef long best = 0
    cdef long d
    for m in a:
        d = <long>(m % DEGREE_MODULUS)
        if d > best:
            best = d
    return best


def split_by_mask(dict a, object mask):
    cdef dict out = {}
    cdef dict sub
    cdef Py_ssize_t p = 0
    cdef PyObject *k
    cdef PyObject *v
    cdef PyObject *s
    cdef object m, key
    while PyDict_Next(a, &p, &k, &v):
        m = <object>k
        key = m & mask
        s = PyDict_GetItem(out, key)
        if s is NULL:
            PyDict_SetItem(out, key, {m - key: <object>v})
        else:
            PyDict_SetItem(<dict>s, m - key, <object>v)
    return out


def collect_field(dict a, int shift_bits):
    cdef dict out = {}
    cdef Py_ssize_t p = 0
    cdef PyObject *k
    cdef PyObject *v
    cdef PyObject *s
    cdef object m, rest, e
    while PyDict_Next(a, &p, &k, &v):
        m = <object>k
        e = (m >> shift_bits) & FIELD_MASK
        rest = m - (e << shift_bits)
        s = PyDict_GetItem(out, e)
        if s is NULL:
            PyDict_SetItem(out, e, {rest: <object>v})
        else:
            PyDict_SetItem(<dict>s, rest, <object>v)
    return out


def rename(dict a, list moves):
    cdef dict out = {}
    cdef Py_ssize_t p = 0
    cdef PyObject *k
    cdef PyObject *v
    cdef PyObject *old
    cdef object m, new, e, s, d
    cdef list fields
    while PyDict_Next(a, &p, &k, &v):
        m = <object>k
        fields = []
        for s, d in moves:
            e = (m >> s) & FIELD_MASK
            if e:
                m = m - (e << s)
                fields.append((e, d))
        for e, d in fields:
            m = m + (e << d)
        old = PyDict_GetItem(out, m)
        if old is NULL:
            PyDict_SetItem(out, m, <object>v)
        else:
            new = (<object>old) + (<object>v)
            if new:
                PyDict_SetItem(out, m, new)
            else:
                del out[m]
    return out
