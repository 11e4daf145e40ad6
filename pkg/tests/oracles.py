"""Independent sympy computations used as oracles."""

from itertools import combinations_with_replacement

import sympy as sp


def levi_civita_so3():
    """Coadjoint so(3) data written directly in sympy: P^{ab} = eps_abc x_c
    and u_i = -eps_{a i c} x_c d_a."""
    x = sp.symbols("x1 x2 x3")
    P = sp.Matrix(3, 3, lambda a, b: sum(sp.LeviCivita(a, b, c) * x[c] for c in range(3)))
    u = [[-sum(sp.LeviCivita(a, i, c) * x[c] for c in range(3)) for a in range(3)] for i in range(3)]
    return x, P, u


def sigma_to_sympy(S):
    """P and u of a scenario as sympy expressions, read from their text."""
    x = sp.symbols(" ".join(S.x_coords), seq=True)
    loc = {str(s): s for s in x}

    def conv(p):
        return sp.sympify(str(p).replace("^", "**"), locals=loc)

    n = len(x)
    P = sp.zeros(n, n)
    for a in range(n):
        for b in range(n):
            P[a, b] = conv(S.P(S.x_coords[a], S.x_coords[b]))
    u = [[conv(S.u(i, a)) for a in S.x_coords] for i in S.algebroid.indices]
    return x, P, u


def degree0_cocycle_dimension(x, P, u, cap):
    """Brute force: invariant Casimirs with all monomials of degree <= cap."""
    monos = [sp.Integer(1)]
    for d in range(1, cap + 1):
        for combo in combinations_with_replacement(x, d):
            monos.append(sp.Mul(*combo))
    cs = sp.symbols(f"c0:{len(monos)}")
    phi = sum(c * m for c, m in zip(cs, monos))
    grad = [sp.diff(phi, xa) for xa in x]
    eqs = []
    for a in range(len(x)):
        eqs.append(sp.expand(sum(P[a, b] * grad[b] for b in range(len(x)))))
    for row in u:
        eqs.append(sp.expand(sum(row[a] * grad[a] for a in range(len(x)))))
    lin = []
    for e in eqs:
        if e != 0:
            lin.extend(sp.Poly(e, *x).coeffs())
    if not lin:
        return len(cs)
    A, _ = sp.linear_eq_to_matrix(lin, cs)
    return len(cs) - A.rank()
