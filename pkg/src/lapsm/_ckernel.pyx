# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot kernels; same contract as ``lapsm._pykernel``."""

from fractions import Fraction
from math import gcd


cdef object _demote(object c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


cpdef object odd_mask(tuple key, tuple odd):
    cdef Py_ssize_t bit, n = len(odd)
    cdef object m = 0
    cdef unsigned long long small = 0
    if n <= 63:
        for bit in range(n):
            if key[<Py_ssize_t>odd[bit]]:
                small |= (<unsigned long long>1) << bit
        return small
    for bit in range(n):
        if key[<Py_ssize_t>odd[bit]]:
            m |= 1 << bit
    return m


cdef inline int _popcount(unsigned long long x):
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


cdef int _swap_parity_small(unsigned long long ma, unsigned long long mb):
    cdef int p = 0
    cdef unsigned long long low
    cdef int j
    while mb:
        low = mb & (~mb + 1)
        j = 0
        while (low >> j) != 1:
            j += 1
        p += _popcount(ma >> (j + 1))
        mb ^= low
    return p & 1


cdef int _swap_parity_big(object ma, object mb):
    cdef int p = 0
    while mb:
        low = mb & -mb
        p += bin(ma >> low.bit_length()).count("1")
        mb ^= low
    return p & 1


cpdef dict mul_terms(dict ta, dict tb, tuple odd):
    if not ta or not tb:
        return {}
    cdef bint small = len(odd) <= 63
    cdef list la = [(k, c, odd_mask(k, odd)) for k, c in ta.items()]
    cdef list lb = [(k, c, odd_mask(k, odd)) for k, c in tb.items()]
    cdef dict out = {}
    cdef tuple ka, kb, ea, eb
    cdef Py_ssize_t i, n
    cdef object c, ca, cb, ma, mb, prev
    cdef list buf
    cdef int flip
    for ea in la:
        ka = <tuple>ea[0]
        ca = ea[1]
        ma = ea[2]
        n = len(ka)
        for eb in lb:
            mb = eb[2]
            if small:
                if (<unsigned long long>ma) & (<unsigned long long>mb):
                    continue
                flip = _swap_parity_small(<unsigned long long>ma, <unsigned long long>mb)
            else:
                if ma & mb:
                    continue
                flip = _swap_parity_big(ma, mb)
            kb = <tuple>eb[0]
            c = ca * eb[1]
            if flip:
                c = -c
            buf = [0] * n
            for i in range(n):
                buf[i] = <long>ka[i] + <long>kb[i]
            key = tuple(buf)
            prev = out.get(key)
            out[key] = c if prev is None else prev + c
    return {k: _demote(v) for k, v in out.items() if v}


cpdef dict deriv_terms(dict terms, Py_ssize_t pos, bint is_odd, bint right, tuple odd):
    cdef dict out = {}
    cdef tuple key, new
    cdef long e, n
    cdef Py_ssize_t q
    cdef object c, prev
    if is_odd:
        for key, c in terms.items():
            if not key[pos]:
                continue
            n = 0
            for q in odd:
                if right:
                    if q > pos:
                        n += <long>key[q]
                elif q < pos:
                    n += <long>key[q]
            new = key[:pos] + (0,) + key[pos + 1:]
            if n & 1:
                c = -c
            prev = out.get(new)
            out[new] = c if prev is None else prev + c
    else:
        for key, c in terms.items():
            e = key[pos]
            if not e:
                continue
            new = key[:pos] + (e - 1,) + key[pos + 1:]
            prev = out.get(new)
            c = e * c
            out[new] = c if prev is None else prev + c
    return {k: _demote(v) for k, v in out.items() if v}


cpdef dict add_scaled(dict acc, dict terms, object scale):
    cdef object v
    for k, c in terms.items():
        v = acc.get(k, 0) + scale * c
        if v:
            acc[k] = _demote(v)
        else:
            acc.pop(k, None)
    return acc


cpdef dict normalize_row(dict r):
    if not r:
        return r
    cdef object g = 0
    for v in r.values():
        g = gcd(g, v)
        if g == 1:
            break
    if r[min(r)] < 0:
        g = -g
    if g != 1:
        return {k: v // g for k, v in r.items()}
    return r


cpdef dict row_combine(dict r, dict p, object col):
    cdef object a = p[col]
    cdef object b = r[col]
    cdef dict out = {}
    cdef object w
    for k, v in r.items():
        out[k] = a * v
    for k, v in p.items():
        w = out.get(k, 0) - b * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return normalize_row(out)
