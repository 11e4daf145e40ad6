"""Fibered Poisson manifolds with a Lie algebroid action and moment map."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Mapping

from .algebroid import (
    AlgebroidChart,
    HomologicalField,
    regularity_report,
    validate_algebroid,
)
from .galgebra import AlgebraError, Generator, GeneratorSet, GPoly, deriv, schouten
from .linalg import Echelon, rank
from .report import IdentityReport, sample_points


def eta_name(a: str) -> str:
    return f"eta_{a}"


def gamma_name(i: str) -> str:
    return f"gamma_{i}"


@dataclass(frozen=True, eq=False)
class SigmaData:
    """Algebroid ``L`` over ``M``, fibration ``J: X -> M``, action ``u``,
    Poisson bivector ``P`` and moment map ``mu`` (kernel indices only).

    ``poisson`` is stored once per unordered pair, keyed ``(a, b)`` with
    ``a`` before ``b`` in coordinate order.
    """

    algebroid: AlgebroidChart
    x_gens: GeneratorSet
    fibration: Mapping[str, GPoly] = field(default_factory=dict)
    action: Mapping[tuple[str, str], GPoly] = field(default_factory=dict)
    poisson: Mapping[tuple[str, str], GPoly] = field(default_factory=dict)
    moment: Mapping[str, GPoly] = field(default_factory=dict)

    def __post_init__(self):
        L = self.algebroid
        X = self.x_gens
        for g in X:
            if g.degree != 0:
                raise AlgebraError(f"coordinate {g.name!r} on X must have degree 0")
            if g.name in L.base:
                raise AlgebraError(f"coordinate {g.name!r} declared on both X and M")
        xs = X.names

        def check(p, what):
            if not isinstance(p, GPoly) or p.gens != X:
                raise AlgebraError(f"{what} must be a polynomial in the coordinates of X")
            if p.terms and p.degrees() != {0}:
                raise AlgebraError(f"{what} must be homogeneous of degree 0")

        fib = {}
        for r in L.coords:
            if r not in self.fibration:
                raise AlgebraError(f"fibration component {r!r} missing")
        for r, p in self.fibration.items():
            if r not in L.base:
                raise AlgebraError(f"fibration component {r!r} is not a base coordinate")
            check(p, f"J[{r}]")
            fib[r] = p
        act = {}
        for (i, a), p in self.action.items():
            if i not in L.indices or a not in X:
                raise AlgebraError(f"action entry ({i}, {a}) out of range")
            check(p, f"u[{i},{a}]")
            if p.terms:
                act[i, a] = p
        pois = {}
        order = {a: n for n, a in enumerate(xs)}
        for (a, b), p in self.poisson.items():
            if a not in X or b not in X:
                raise AlgebraError(f"poisson entry ({a}, {b}) out of range")
            check(p, f"P[{a},{b}]")
            if a == b:
                if p.terms:
                    raise AlgebraError(f"diagonal poisson entry ({a}, {a}) must vanish")
                continue
            if order[a] > order[b]:
                a, b, p = b, a, -p
            if (a, b) in pois and pois[a, b] != p:
                raise AlgebraError(f"poisson entries ({a}, {b}) and ({b}, {a}) are not antisymmetric")
            if p.terms:
                pois[a, b] = p
        mom = {}
        for al, p in self.moment.items():
            if al not in L.kernel:
                raise AlgebraError(f"moment map given on non-kernel index {al!r}")
            check(p, f"mu[{al}]")
            if p.terms:
                mom[al] = p
        object.__setattr__(self, "fibration", fib)
        object.__setattr__(self, "action", act)
        object.__setattr__(self, "poisson", pois)
        object.__setattr__(self, "moment", mom)
        mv = list(X) + [Generator(eta_name(a), 1, "momentum") for a in xs]
        object.__setattr__(self, "mv_gens", GeneratorSet(mv))

    # accessors -------------------------------------------------------------
    @property
    def x_coords(self) -> tuple[str, ...]:
        return self.x_gens.names

    def J(self, r: str) -> GPoly:
        return self.fibration[r]

    def u(self, i: str, a: str) -> GPoly:
        return self.action.get((i, a)) or self.x_gens.zero()

    def P(self, a: str, b: str) -> GPoly:
        p = self.poisson.get((a, b))
        if p is not None:
            return p
        p = self.poisson.get((b, a))
        if p is not None:
            return -p
        return self.x_gens.zero()

    def mu(self, al: str) -> GPoly:
        return self.moment.get(al) or self.x_gens.zero()

    def pullback(self, p: GPoly) -> GPoly:
        """``p o J`` for a polynomial on ``M``."""
        if not self.algebroid.coords:
            return p.embed(self.x_gens) if p.gens != self.x_gens else p
        return p.subs(dict(self.fibration), self.x_gens)

    def vector_apply(self, v: Mapping[str, GPoly], p: GPoly) -> GPoly:
        out = self.x_gens.zero()
        for a, va in v.items():
            if va.terms:
                d = deriv(p, a)
                if d.terms:
                    out = out + va * d
        return out

    def u_vector(self, i: str) -> dict[str, GPoly]:
        return {a: self.u(i, a) for a in self.x_coords}

    def lie_u(self, i: str, p: GPoly) -> GPoly:
        """``l_{u(e_i)} p`` for a function ``p`` on ``X``."""
        return self.vector_apply(self.u_vector(i), p)

    def poisson_bracket(self, f: GPoly, g: GPoly) -> GPoly:
        out = self.x_gens.zero()
        for (a, b), p in self.poisson.items():
            fa, gb = deriv(f, a), deriv(g, b)
            fb, ga = deriv(f, b), deriv(g, a)
            out = out + p * (fa * gb - fb * ga)
        return out

    # multivector encodings ------------------------------------------------
    def mv_var(self, name):
        return self.mv_gens.var(name)

    def bivector(self) -> GPoly:
        """``P = 1/2 P^{ab} eta_a eta_b``."""
        M = self.mv_gens
        out = M.zero()
        for (a, b), p in self.poisson.items():
            out = out + p.embed(M) * M.var(eta_name(a)) * M.var(eta_name(b))
        return out

    def vector(self, v: Mapping[str, GPoly]) -> GPoly:
        M = self.mv_gens
        out = M.zero()
        for a, va in v.items():
            out = out + va.embed(M) * M.var(eta_name(a))
        return out

    def mv_pairs(self):
        return [(a, eta_name(a)) for a in self.x_coords]

    def sharp_d(self, phi: GPoly) -> dict[str, GPoly]:
        return sharp(self.poisson, {a: deriv(phi, a) for a in self.x_coords}, self.x_coords)

    def __eq__(self, other):
        return (
            isinstance(other, SigmaData)
            and self.algebroid == other.algebroid
            and self.x_gens == other.x_gens
            and self.fibration == other.fibration
            and self.action == other.action
            and self.poisson == other.poisson
            and self.moment == other.moment
        )

    __hash__ = None


def sharp(P: Mapping[tuple[str, str], GPoly], alpha: Mapping[str, GPoly],
          coords) -> dict[str, GPoly]:
    """``(#_P alpha)^a = -P^{ab} alpha_b`` with ``P`` stored once per pair."""
    coords = tuple(coords)
    for (a, b) in P:
        if a not in coords or b not in coords:
            raise AlgebraError(f"bivector entry ({a}, {b}) outside the coordinate list")
    for a in alpha:
        if a not in coords:
            raise AlgebraError(f"covector component {a!r} outside the coordinate list")
    out = {}
    for a in coords:
        acc = None
        for b in coords:
            al = alpha.get(b)
            if al is None or not al.terms:
                continue
            if (a, b) in P:
                term = -(P[a, b] * al)
            elif (b, a) in P:
                term = P[b, a] * al
            else:
                continue
            acc = term if acc is None else acc + term
        if acc is not None:
            out[a] = acc
    if not out:
        return out
    zero = next(iter(out.values())).gens.zero()
    return {a: out.get(a, zero) for a in coords}


def bivector_components(B: GPoly, coords) -> dict[tuple[str, str], GPoly]:
    """Upper-triangular ``Q^{ab}`` of ``B = 1/2 Q^{ab} eta_a eta_b``; the
    coefficients stay over ``B``'s generator set."""
    out = {}
    for a, b in combinations(coords, 2):
        q = deriv(deriv(B, eta_name(a)), eta_name(b))
        if q.terms:
            out[a, b] = q
    return out


def lichnerowicz(S: SigmaData, U: GPoly, tangential: bool = False) -> GPoly:
    """``d_P U = -[P, U]``."""
    if U.gens != S.mv_gens:
        U = U.embed(S.mv_gens)
    if tangential:
        bad = {r: p for r, p in tangential_residual(S, U).items() if p.terms}
        if bad:
            raise AlgebraError(f"multivector is not tangential to the fibers: legs {sorted(bad)}")
    return -schouten(S.bivector(), U, S.mv_pairs())


def tangential_residual(S: SigmaData, U: GPoly) -> dict[str, GPoly]:
    """Contractions ``K^r U = d_a J^r dU/d eta_a`` for every base coordinate."""
    if U.gens != S.mv_gens:
        U = U.embed(S.mv_gens)
    M = S.mv_gens
    out = {}
    for r in S.algebroid.coords:
        acc = M.zero()
        for a in S.x_coords:
            dJ = deriv(S.J(r), a)
            if dJ.terms:
                dU = deriv(U, eta_name(a))
                if dU.terms:
                    acc = acc + dJ.embed(M) * dU
        out[r] = acc
    return out


def validate_sigma(S: SigmaData, points=None, sample_count: int = 5,
                   seed: int = 0) -> IdentityReport:
    L = S.algebroid
    rep = validate_algebroid(L, None, sample_count, seed)
    I = L.indices
    X = S.x_coords
    for i, j in combinations(I, 2):
        for a in X:
            res = S.lie_u(i, S.u(j, a)) - S.lie_u(j, S.u(i, a))
            for k in I:
                fk = L.structure.get((k, i, j))
                if fk is not None:
                    res = res - S.pullback(fk) * S.u(k, a)
            rep.add("action_closure", (i, j, a), res)
    for i in I:
        for r in L.coords:
            res = S.lie_u(i, S.J(r)) - S.pullback(L.rho(i, r))
            rep.add("projectability", (i, r), res)
    for a, b, c in combinations(X, 3):
        res = S.x_gens.zero()
        for p, q, s in ((a, b, c), (b, c, a), (c, a, b)):
            for d in X:
                Ppd = S.P(p, d)
                if Ppd.terms:
                    res = res + Ppd * deriv(S.P(q, s), d)
        rep.add("poisson", (a, b, c), res)
    for a in X:
        for r in L.coords:
            res = S.x_gens.zero()
            for b in X:
                Pab = S.P(a, b)
                if Pab.terms:
                    res = res + Pab * deriv(S.J(r), b)
            rep.add("tangentiality", (a, r), res)
    for i in I:
        for a, b in combinations(X, 2):
            res = S.lie_u(i, S.P(a, b))
            for c in X:
                res = res - deriv(S.u(i, a), c) * S.P(c, b)
                res = res - deriv(S.u(i, b), c) * S.P(a, c)
            rep.add("invariance", (i, a, b), res)
    for al in L.kernel:
        for a in X:
            res = S.u(al, a)
            for b in X:
                Pab = S.P(a, b)
                if Pab.terms:
                    res = res + Pab * deriv(S.mu(al), b)
            rep.add("moment_hamiltonian", (al, a), res)
    for i in I:
        for al in L.kernel:
            res = S.lie_u(i, S.mu(al))
            for be in L.kernel:
                fb = L.structure.get((be, i, al))
                if fb is not None:
                    res = res - S.pullback(fb) * S.mu(be)
            rep.add("moment_equivariance", (i, al), res)
    for al, be in combinations(L.kernel, 2):
        res = S.poisson_bracket(S.mu(al), S.mu(be))
        for ga in L.kernel:
            fg = L.structure.get((ga, al, be))
            if fg is not None:
                res = res - S.pullback(fg) * S.mu(ga)
        rep.add("moment_bracket", (al, be), res)
    rep.extend(submersion_report(S, points, sample_count, seed))
    return rep


def submersion_report(S: SigmaData, points=None, sample_count=5, seed=0):
    rep = IdentityReport()
    M = S.algebroid.coords
    if not M:
        rep.add("submersion", (), ok=True, detail="M is a point")
        return rep
    if points is None:
        points = sample_points(S.x_coords, sample_count, seed + 1)
    ranks = []
    for pt in points:
        rows = [
            [deriv(S.J(r), a).evaluate(pt).constant_term() for a in S.x_coords]
            for r in M
        ]
        ranks.append(rank(rows))
    ok = all(k == len(M) for k in ranks)
    rep.add("submersion", (), ok=ok, detail="Jacobian ranks of J at sample points: %s" % ranks)
    return rep


# ---------------------------------------------------------------------------
# double complex on J*L[1] + T*[1]X

@dataclass(frozen=True, eq=False)
class DoubleComplex:
    gens: GeneratorSet
    d_JL: HomologicalField
    d_P: HomologicalField
    K: Mapping[str, HomologicalField]
    sigma: SigmaData


def complex_generators(S: SigmaData) -> GeneratorSet:
    gens = list(S.x_gens)
    gens += [Generator(gamma_name(i), 1, "momentum") for i in S.algebroid.indices]
    gens += [Generator(eta_name(a), 1, "momentum") for a in S.x_coords]
    return GeneratorSet(gens)


def build_double_complex(S: SigmaData) -> DoubleComplex:
    G = complex_generators(S)
    L = S.algebroid
    X = S.x_coords
    gam = {i: G.var(gamma_name(i)) for i in L.indices}
    eta = {a: G.var(eta_name(a)) for a in X}
    dJL = {}
    for a in X:
        acc = G.zero()
        for i in L.indices:
            acc = acc + S.u(i, a).embed(G) * gam[i]
        dJL[a] = acc
    for b in X:
        acc = G.zero()
        for (i, a), p in S.action.items():
            d = deriv(p, b)
            if d.terms:
                acc = acc - d.embed(G) * gam[i] * eta[a]
        dJL[eta_name(b)] = acc
    for k in L.indices:
        acc = G.zero()
        for (kk, i, j), p in L.structure.items():
            if kk == k:
                acc = acc - (S.pullback(p).embed(G) * gam[i] * gam[j]) / 2
        dJL[gamma_name(k)] = acc
    dP = {}
    for b in X:
        acc = G.zero()
        for a in X:
            p = S.P(a, b)
            if p.terms:
                acc = acc - p.embed(G) * eta[a]
        dP[b] = acc
    for c in X:
        acc = G.zero()
        for a in X:
            for b in X:
                p = S.P(a, b)
                if p.terms:
                    d = deriv(p, c)
                    if d.terms:
                        acc = acc + (d.embed(G) * eta[a] * eta[b]) / 2
        dP[eta_name(c)] = acc
    K = {}
    for r in L.coords:
        K[r] = HomologicalField(
            G, {eta_name(a): deriv(S.J(r), a).embed(G) for a in X}, -1
        )
    return DoubleComplex(G, HomologicalField(G, dJL, 1), HomologicalField(G, dP, 1), K, S)


def _field_residual(rep, identity, lhs: HomologicalField, rhs: HomologicalField | None, extra=()):
    for g in lhs.gens:
        res = lhs.component(g.name)
        if rhs is not None:
            res = res - rhs.component(g.name)
        rep.add(identity, tuple(extra) + (g.name,), res)


def kernel_generators(C: DoubleComplex, cap: int = 3) -> list[GPoly]:
    """Basis of the common kernel of the ``K^r`` on functions whose
    coefficient polynomials have degree at most ``cap``, times every
    monomial in the ``gamma``."""
    S = C.sigma
    G = C.gens
    X = S.x_coords
    xmonos = [G.one()]
    frontier = [((), G.one())]
    for _ in range(cap):
        nxt = []
        for used, mono in frontier:
            start = X.index(used[-1]) if used else 0
            for a in X[start:]:
                m = mono * G.var(a)
                nxt.append((used + (a,), m))
                xmonos.append(m)
        frontier = nxt
    etas = [G.var(eta_name(a)) for a in X]
    out = []
    for q in range(len(X) + 1):
        basis = []
        for subset in combinations(range(len(X)), q):
            e = G.one()
            for s in subset:
                e = e * etas[s]
            for m in xmonos:
                basis.append(m * e)
        if not C.K or q == 0:
            kernel_elems = basis
        else:
            col_rows: dict = {}
            index: dict = {}
            images = []
            for col, b in enumerate(basis):
                img = {}
                for r, Kr in C.K.items():
                    for key, c in Kr(b).terms.items():
                        img[(r, key)] = c
                images.append(img)
            # transpose: rows are output coordinates
            for col, img in enumerate(images):
                for key, c in img.items():
                    row = index.setdefault(key, len(index))
                    col_rows.setdefault(row, {})[col] = c
            ech = Echelon()
            for row in sorted(col_rows):
                ech.add(col_rows[row])
            kernel_elems = []
            for vec in ech.nullspace(len(basis)):
                el = G.zero()
                for col, c in sorted(vec.items()):
                    el = el + basis[col].scale(c)
                kernel_elems.append(el)
        out.extend(kernel_elems)
    gms = []
    I = S.algebroid.indices
    for p in range(len(I) + 1):
        for subset in combinations(I, p):
            g = G.one()
            for i in subset:
                g = g * G.var(gamma_name(i))
            gms.append(g)
    return [g * k for g in gms for k in out]


def check_complex(C: DoubleComplex, cap: int = 3) -> IdentityReport:
    S = C.sigma
    L = S.algebroid
    G = C.gens
    rep = IdentityReport()
    if not C.K:
        for ident in ("comm_dJL_K", "comm_dP_K"):
            rep.add(ident, (), ok=True, detail="no base coordinates")
    for r, Kr in C.K.items():
        rhs = None
        for i in L.indices:
            for s in L.coords:
                d = deriv(L.rho(i, r), s)
                if d.terms:
                    term = C.K[s].times(S.pullback(d).embed(G) * G.var(gamma_name(i)))
                    rhs = term if rhs is None else rhs + term
        _field_residual(rep, "comm_dJL_K", C.d_JL.commutator(Kr), rhs, (r,))
        _field_residual(rep, "comm_dP_K", C.d_P.commutator(Kr), None, (r,))
    rhs = None
    for r in L.coords:
        coef = G.zero()
        for (k, i, j), p in L.structure.items():
            d = deriv(p, r)
            if not d.terms:
                continue
            dJ = S.pullback(d).embed(G)
            for a in S.x_coords:
                uk = S.u(k, a)
                if uk.terms:
                    coef = coef - dJ * uk.embed(G) * G.var(gamma_name(i)) \
                        * G.var(gamma_name(j)) * G.var(eta_name(a))
        if coef.terms:
            term = C.K[r].times(coef)
            rhs = term if rhs is None else rhs + term
    _field_residual(rep, "comm_dJL_dJL", C.d_JL.commutator(C.d_JL), rhs)
    _field_residual(rep, "comm_dJL_dP", C.d_JL.commutator(C.d_P), None)
    _field_residual(rep, "comm_dP_dP", C.d_P.commutator(C.d_P), None)
    gens = kernel_generators(C, cap)
    checks = {
        "kernel_nilpotent_dJL": lambda f: C.d_JL(C.d_JL(f)),
        "kernel_nilpotent_dP": lambda f: C.d_P(C.d_P(f)),
        "kernel_anticommute": lambda f: C.d_JL(C.d_P(f)) + C.d_P(C.d_JL(f)),
    }
    for name, op in checks.items():
        bad = None
        count = 0
        for f in gens:
            r = op(f)
            if r.terms:
                count += 1
                if bad is None:
                    bad = r
        rep.add(
            name,
            (),
            bad if bad is not None else G.zero(),
            detail=f"{len(gens)} kernel generators (cap {cap}), {count} failing",
        )
    return rep
