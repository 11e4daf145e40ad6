"""Pure-Python hot kernels.

Monomials are tuples of exponents indexed by generator position.  Odd
generators carry exponent 0 or 1.  Coefficients are ``int`` or
``Fraction``; integral fractions are demoted to ``int`` on the way out.

``odd`` is the ascending tuple of positions of odd generators.  The
compiled module ``_ckernel`` exports the same functions with the same
semantics; ``lapsm.kernel`` selects one at import time.
"""

from fractions import Fraction
from math import gcd


def _demote(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def odd_mask(key, odd):
    m = 0
    for bit, pos in enumerate(odd):
        if key[pos]:
            m |= 1 << bit
    return m


def _swap_parity(ma, mb):
    # number of (i in a, j in b) with i > j, mod 2
    p = 0
    while mb:
        low = mb & -mb
        p += (ma >> low.bit_length()).bit_count()
        mb ^= low
    return p & 1


def mul_terms(ta, tb, odd):
    """Koszul-signed product of two term maps."""
    if not ta or not tb:
        return {}
    la = [(k, c, odd_mask(k, odd)) for k, c in ta.items()]
    lb = [(k, c, odd_mask(k, odd)) for k, c in tb.items()]
    out = {}
    get = out.get
    for ka, ca, ma in la:
        for kb, cb, mb in lb:
            if ma & mb:
                continue
            c = ca * cb
            if mb and ma and _swap_parity(ma, mb):
                c = -c
            key = tuple([x + y for x, y in zip(ka, kb)])
            out[key] = get(key, 0) + c
    return {k: _demote(c) for k, c in out.items() if c}


def deriv_terms(terms, pos, is_odd, right, odd):
    """Left (``right=False``) or right derivative along generator ``pos``."""
    out = {}
    if is_odd:
        for key, c in terms.items():
            if not key[pos]:
                continue
            n = 0
            for q in odd:
                if (q > pos) if right else (q < pos):
                    n += key[q]
            new = key[:pos] + (0,) + key[pos + 1:]
            out[new] = out.get(new, 0) + (-c if n & 1 else c)
    else:
        for key, c in terms.items():
            e = key[pos]
            if not e:
                continue
            new = key[:pos] + (e - 1,) + key[pos + 1:]
            out[new] = out.get(new, 0) + e * c
    return {k: _demote(c) for k, c in out.items() if c}


def add_scaled(acc, terms, scale):
    """In place ``acc += scale * terms``; drops cancelled entries."""
    for k, c in terms.items():
        v = acc.get(k, 0) + scale * c
        if v:
            acc[k] = _demote(v)
        else:
            acc.pop(k, None)
    return acc


def row_combine(r, p, col):
    """Fraction-free elimination step: ``a*r - b*p`` with ``a = p[col]``,
    ``b = r[col]``, followed by removal of the integer content.

    Rows are ``dict[int, int]``; the result has a positive leading entry.
    """
    a = p[col]
    b = r[col]
    out = {}
    for k, v in r.items():
        out[k] = a * v
    for k, v in p.items():
        w = out.get(k, 0) - b * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return normalize_row(out)


def normalize_row(r):
    if not r:
        return r
    g = 0
    for v in r.values():
        g = gcd(g, v)
        if g == 1:
            break
    lead = r[min(r)]
    if lead < 0:
        g = -g
    if g != 1:
        return {k: v // g for k, v in r.items()}
    return r

