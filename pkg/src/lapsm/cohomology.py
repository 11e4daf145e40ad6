"""Mod-d BV cohomology on the restricted class of cochains.

A cochain of degree ``n`` is a sum over blocks ``(p, h, q)`` with
``p + 2h + q = n`` of

    1/(p! h! q!) Phi_{i_1..i_p al_1..al_h}^{a_1..a_q}(xi)
        gamma^{i_1}..gamma^{i_p} Gamma^{al_1}..Gamma^{al_h} eta_{a_1}..eta_{a_q}

with ``Phi`` antisymmetric in the ``i`` and ``a`` and symmetric in the
``al``.  Components are stored once per canonical index tuple: frame and
vector indices strictly increasing, kernel indices non-decreasing.  Every
vector leg must be tangent to the fibers of ``J``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from math import factorial, prod
from typing import Mapping

from .algebroid import HomologicalField
from .bv import GradedTarget, B_name, Gamma_name, beta_name, build_theta, bv_variations, graded_target
from .galgebra import AlgebraError, GPoly, deriv, format_poly, schouten
from .linalg import Echelon
from .paction import SigmaData, eta_name, gamma_name, sharp
from .report import IdentityReport

Block = tuple[int, int, int]
Index = tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]

MAX_COLUMNS = 20000


class CapTooLarge(AlgebraError):
    """The requested ansatz exceeds the configured column budget."""


@dataclass
class Cochain:
    degree: int
    components: dict[Block, dict[Index, GPoly]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for blk, comps in self.components.items():
            p, h, q = blk
            if p + 2 * h + q != self.degree:
                raise AlgebraError(f"block {blk} does not have degree {self.degree}")
            kept = {}
            for idx, poly in comps.items():
                if (len(idx[0]), len(idx[1]), len(idx[2])) != blk:
                    raise AlgebraError(f"index {idx} does not fit block {blk}")
                if poly.terms:
                    kept[idx] = poly
            if kept:
                clean[blk] = kept
        self.components = clean

    def get(self, block: Block, index: Index, zero: GPoly) -> GPoly:
        return self.components.get(block, {}).get(index, zero)

    def is_zero(self) -> bool:
        return not self.components

    def items(self):
        for blk in sorted(self.components):
            for idx in sorted(self.components[blk]):
                yield blk, idx, self.components[blk][idx]

    def __eq__(self, other):
        return (
            isinstance(other, Cochain)
            and self.degree == other.degree
            and self.components == other.components
        )

    def describe(self) -> list[dict]:
        return [
            {"block": list(blk), "index": [list(t) for t in idx], "value": format_poly(p)}
            for blk, idx, p in self.items()
        ]


@dataclass(frozen=True)
class Defect:
    """``delta-bar`` left the restricted class."""

    reason: str
    monomials: tuple[str, ...]


def blocks_of_degree(n: int, n_frame: int, n_kernel: int, n_x: int) -> list[Block]:
    out = []
    for h in range(n // 2 + 1 if n_kernel else 1):
        for p in range(min(n - 2 * h, n_frame) + 1):
            q = n - 2 * h - p
            if 0 <= q <= n_x:
                out.append((p, h, q))
    return sorted(out)


class CochainSpace:
    """Encoding, decoding and ``delta-bar`` for one set of sigma data."""

    def __init__(self, S: SigmaData):
        self.S = S
        self.G: GradedTarget = graded_target(S)
        self.theta = build_theta(S, self.G)
        self.Q: HomologicalField = bv_variations(self.theta, self.G)
        L = S.algebroid
        G = self.G.gens
        self.frame = L.indices
        self.kern = L.kernel
        self.xs = S.x_coords
        self._xpos = [G.index(a) for a in self.xs]
        self._xpos_set = set(self._xpos)
        # (position, label) in chart order
        self._gpos = [(G.index(gamma_name(i)), i) for i in self.frame]
        self._Gpos = [(G.index(Gamma_name(a)), a) for a in self.kern]
        self._epos = [(G.index(eta_name(a)), a) for a in self.xs]
        self._bad = {G.index(beta_name(i)) for i in self.frame} | {
            G.index(B_name(a)) for a in self.kern
        }
        self._order = {
            "i": {i: n for n, i in enumerate(self.frame)},
            "al": {a: n for n, a in enumerate(self.kern)},
            "a": {a: n for n, a in enumerate(self.xs)},
        }
        self._basis_cache: dict = {}
        self.K = {}
        for r in L.coords:
            comps = {eta_name(a): deriv(S.J(r), a).embed(G) for a in self.xs}
            self.K[r] = HomologicalField(G, comps, -1)

    # indices ----------------------------------------------------------
    def blocks(self, degree: int) -> list[Block]:
        return blocks_of_degree(degree, len(self.frame), len(self.kern), len(self.xs))

    def indices(self, block: Block) -> list[Index]:
        p, h, q = block
        return [
            (i, al, a)
            for i in combinations(self.frame, p)
            for al in combinations_with_replacement(self.kern, h)
            for a in combinations(self.xs, q)
        ]

    def canonical(self, i, al, a) -> tuple[Index, int]:
        """Sorted index and the sign of the sorting permutation on ``i`` and
        ``a`` (``0`` on a repeated antisymmetric index)."""
        sign = 1
        out = []
        for seq, key, anti in ((i, "i", True), (al, "al", False), (a, "a", True)):
            order = self._order[key]
            s = sorted(seq, key=order.__getitem__)
            if anti:
                if len(set(s)) < len(s):
                    return ((), (), ()), 0
                sign *= _perm_sign([order[x] for x in seq])
            out.append(tuple(s))
        return tuple(out), sign

    # encode / decode --------------------------------------------------
    def basis_monomial(self, idx: Index) -> GPoly:
        m = self._basis_cache.get(idx)
        if m is None:
            g = self.G
            m = g.gens.one()
            for i in idx[0]:
                m = m * g.gamma(i)
            for al in idx[1]:
                m = m * g.Gamma(al)
            for a in idx[2]:
                m = m * g.eta(a)
            self._basis_cache[idx] = m
        return m

    @staticmethod
    def multiplicity(idx: Index) -> int:
        al = idx[1]
        return prod(factorial(al.count(x)) for x in set(al))

    def check_index(self, idx: Index):
        can, sign = self.canonical(*idx)
        if sign != 1 or can != idx:
            raise AlgebraError(f"index {idx} is not canonical for this chart")

    def encode(self, c: Cochain, check: bool = True) -> GPoly:
        G = self.G
        out = G.gens.zero()
        for blk, idx, poly in c.items():
            if check:
                self.check_index(idx)
            term = G.lift(poly) * self.basis_monomial(idx)
            m = self.multiplicity(idx)
            out = out + (term if m == 1 else term / m)
        if check:
            bad = self.tangential_defect(out)
            if bad:
                raise AlgebraError("cochain has non-tangential vector legs: " + ", ".join(bad))
        return out

    def tangential_defect(self, F: GPoly) -> list[str]:
        bad = []
        for r, Kr in self.K.items():
            res = Kr(F)
            if res.terms:
                bad.append(f"K^{r}: {format_poly(res)}")
        return bad

    def decode(self, F: GPoly, degree: int | None = None) -> Cochain | Defect:
        G = self.G.gens
        X = self.S.x_gens
        bad = []
        acc: dict = {}
        for key, c in F.terms.items():
            if any(key[p] for p in self._bad):
                bad.append(key)
                continue
            i = tuple(v for p, v in self._gpos if key[p])
            al = []
            for p, v in self._Gpos:
                al.extend([v] * key[p])
            a = tuple(v for p, v in self._epos if key[p])
            idx = (i, tuple(al), a)
            bm = self.basis_monomial(idx)
            (bkey, bsign), = bm.terms.items()
            xkey = tuple(key[p] for p in self._xpos)
            ghost = tuple(0 if p in self._xpos_set else key[p] for p in range(len(key)))
            if ghost != bkey:
                raise AlgebraError("internal decode mismatch")
            val = c * bsign * self.multiplicity(idx)
            blk = (len(i), len(al), len(a))
            comp = acc.setdefault(blk, {}).setdefault(idx, {})
            comp[xkey] = comp.get(xkey, 0) + val
        if bad:
            return Defect(
                "dependence on beta or B",
                tuple(format_poly(GPoly(G, {k: F.terms[k]})) for k in sorted(bad)),
            )
        comps = {
            blk: {idx: GPoly(X, d) for idx, d in v.items()} for blk, v in acc.items()
        }
        if degree is None:
            degs = {p + 2 * h + q for (p, h, q) in comps}
            if len(degs) > 1:
                raise AlgebraError("polynomial is not homogeneous")
            degree = degs.pop() if degs else 0
        out = Cochain(degree, comps)
        nt = self.tangential_defect(F)
        if nt:
            return Defect("vector legs not tangential", tuple(nt))
        return out

    def delta_bar(self, c: Cochain) -> Cochain | Defect:
        return self.decode(self.Q(self.encode(c)), c.degree + 1)

    # named low-degree fields --------------------------------------------
    def from_fields(self, degree: int, phi=None, w=None, sigma=None, Q=None,
                    v=None, tau=None, nu=None) -> Cochain:
        comps: dict = {}

        def put(blk, idx, poly, sign=1):
            if poly is None or not poly.terms:
                return
            can, s = self.canonical(*idx)
            if s == 0:
                return
            d = comps.setdefault(blk, {})
            val = poly if s * sign == 1 else -poly
            d[can] = d[can] + val if can in d else val

        if degree == 0:
            put((0, 0, 0), ((), (), ()), phi)
        elif degree == 1:
            for a, p in (w or {}).items():
                put((0, 0, 1), ((), (), (a,)), p)
            for i, p in (sigma or {}).items():
                put((1, 0, 0), ((i,), (), ()), p)
        elif degree == 2:
            for (a, b), p in (Q or {}).items():
                put((0, 0, 2), ((), (), (a, b)), p)
            for (i, a), p in (v or {}).items():
                put((1, 0, 1), ((i,), (), (a,)), p, -1)
            for (i, j), p in (tau or {}).items():
                put((2, 0, 0), ((i, j), (), ()), p)
            for al, p in (nu or {}).items():
                put((0, 1, 0), ((), (al,), ()), p)
        else:
            raise AlgebraError("named fields exist only in degrees 0, 1 and 2")
        return Cochain(degree, comps)

    def fields(self, c: Cochain) -> dict:
        z = self.S.x_gens.zero()
        if c.degree == 0:
            return {"phi": c.get((0, 0, 0), ((), (), ()), z)}
        if c.degree == 1:
            return {
                "w": {a: c.get((0, 0, 1), ((), (), (a,)), z) for a in self.xs},
                "sigma": {i: c.get((1, 0, 0), ((i,), (), ()), z) for i in self.frame},
            }
        if c.degree == 2:
            return {
                "Q": {(a, b): c.get((0, 0, 2), ((), (), (a, b)), z)
                      for a, b in combinations(self.xs, 2)},
                "v": {(i, a): -c.get((1, 0, 1), ((i,), (), (a,)), z)
                      for i in self.frame for a in self.xs},
                "tau": {(i, j): c.get((2, 0, 0), ((i, j), (), ()), z)
                        for i, j in combinations(self.frame, 2)},
                "nu": {al: c.get((0, 1, 0), ((), (al,), ()), z) for al in self.kern},
            }
        raise AlgebraError("named fields exist only in degrees 0, 1 and 2")

    # ansatz spaces ----------------------------------------------------
    def monomials(self, cap: int) -> list[GPoly]:
        X = self.S.x_gens
        out = [X.one()]
        frontier = [(0, X.one())]
        for _ in range(cap):
            nxt = []
            for start, m in frontier:
                for n in range(start, len(self.xs)):
                    mm = m * X.var(self.xs[n])
                    nxt.append((n, mm))
                    out.append(mm)
            frontier = nxt
        return out

    def columns(self, degree: int, cap: int) -> list[tuple[Block, Index, GPoly]]:
        if degree < 0:
            return []
        monos = self.monomials(cap)
        cols = [
            (blk, idx, m)
            for blk in self.blocks(degree)
            for idx in self.indices(blk)
            for m in monos
        ]
        if len(cols) > MAX_COLUMNS:
            raise CapTooLarge(
                f"degree {degree} with cap {cap} needs {len(cols)} columns "
                f"(budget {MAX_COLUMNS})"
            )
        return cols

    def column_cochain(self, degree, col) -> Cochain:
        blk, idx, m = col
        return Cochain(degree, {blk: {idx: m}})

    def tangential_basis(self, degree: int, cap: int) -> list[Cochain]:
        """Basis of tangential cochains with coefficients of degree <= cap."""
        cols = self.columns(degree, cap)
        encoded = [self.encode(self.column_cochain(degree, c), check=False) for c in cols]
        if not self.K:
            vecs = [{n: 1} for n in range(len(cols))]
        else:
            images = []
            for F in encoded:
                img = {}
                for r, Kr in self.K.items():
                    for key, v in Kr(F).terms.items():
                        img[r, key] = v
                images.append(img)
            vecs = _nullspace_of_columns(images, len(cols))
        return [self._combine(degree, cols, v) for v in vecs]

    def _combine(self, degree, cols, vec) -> Cochain:
        comps: dict = {}
        for n, c in sorted(vec.items()):
            blk, idx, m = cols[n]
            d = comps.setdefault(blk, {})
            t = m.scale(c)
            d[idx] = d[idx] + t if idx in d else t
        return Cochain(degree, comps)


def _perm_sign(seq) -> int:
    sign = 1
    s = list(seq)
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


def _nullspace_of_columns(images: list[dict], ncols: int) -> list[dict]:
    """Null vectors of the matrix whose ``n``-th column is ``images[n]``."""
    rows: dict = {}
    for n, img in enumerate(images):
        for key, v in img.items():
            rows.setdefault(key, {})[n] = v
    ech = Echelon()
    for key in sorted(rows, key=repr):
        ech.add(rows[key])
    return ech.nullspace(ncols)


# ---------------------------------------------------------------------------
# public operations

def encode(c: Cochain, space: CochainSpace) -> GPoly:
    return space.encode(c)


def decode(F: GPoly, space: CochainSpace, degree: int | None = None) -> Cochain | Defect:
    return space.decode(F, degree)


def apply_delta_bar(c: Cochain, space: CochainSpace) -> Cochain | Defect:
    return space.delta_bar(c)


# Explicit equations and the block of delta-bar each one is read from,
# with the fixed sign relating the two.
EQUATION_BLOCKS = {
    0: {"casimir": (0, 0, 1), "invariance": (1, 0, 0)},
    1: {
        "poisson_vector": (0, 0, 2),
        "lie_derivative": (1, 0, 1),
        "sigma_cocycle": (2, 0, 0),
        "boundary_sigma": (0, 1, 0),
    },
    2: {
        "poisson_bivector": (0, 0, 3),
        "invariant_bivector": (1, 0, 2),
        "action_deformation": (2, 0, 1),
        "tau_cocycle": (3, 0, 0),
        "boundary_v": (0, 1, 1),
        "boundary_tau": (1, 1, 0),
    },
}


def closure_residual_explicit(c: Cochain, space: CochainSpace) -> IdentityReport:
    """Closed-form cocycle conditions in degrees 0, 1 and 2.

    Instances are labelled by the canonical index of the matching
    ``delta-bar`` component (frame indices, then kernel, then legs).
    """
    if c.degree not in (0, 1, 2):
        raise AlgebraError(f"explicit conditions exist only in degrees 0-2, not {c.degree}")
    S = space.S
    f = space.fields(c)
    fn = {0: _explicit_0, 1: _explicit_1, 2: _explicit_2}[c.degree]
    rep = IdentityReport()
    fn(S, space, f, rep)
    return rep


def _mv(S: SigmaData, comps: Mapping[tuple, GPoly]) -> GPoly:
    """Multivector from components keyed by increasing leg tuples."""
    M = S.mv_gens
    out = M.zero()
    for legs, p in comps.items():
        t = p.embed(M)
        for a in legs:
            t = t * M.var(eta_name(a))
        out = out + t
    return out


def _legs(S: SigmaData, U: GPoly, q: int) -> dict[tuple, GPoly]:
    out = {}
    for legs in combinations(S.x_coords, q):
        d = U
        for a in legs:
            d = deriv(d, eta_name(a))
        out[legs] = d.embed(S.x_gens) if d.terms else S.x_gens.zero()
    return out


def _bracket(S, U, V):
    return schouten(U, V, S.mv_pairs())


def _vec(S, v: Mapping[str, GPoly]) -> GPoly:
    return _mv(S, {(a,): p for a, p in v.items()})


def _explicit_0(S, sp, f, rep):
    phi = f["phi"]
    h = S.sharp_d(phi)
    for a in S.x_coords:
        rep.add("casimir", (a,), h.get(a, S.x_gens.zero()))
    for i in S.algebroid.indices:
        rep.add("invariance", (i,), S.lie_u(i, phi))


def _explicit_1(S, sp, f, rep):
    L = S.algebroid
    z = S.x_gens.zero()
    w, sigma = f["w"], f["sigma"]
    W = _vec(S, w)
    Pw = -_bracket(S, S.bivector(), W)
    for legs, p in _legs(S, Pw, 2).items():
        rep.add("poisson_vector", legs, p)
    for i in L.indices:
        lw = _legs(S, _bracket(S, S.vector(S.u_vector(i)), W), 1)
        sh = S.sharp_d(sigma[i])
        for a in S.x_coords:
            rep.add("lie_derivative", (i, a), lw[(a,)] - sh.get(a, z))
    for i, j in combinations(L.indices, 2):
        res = S.lie_u(i, sigma[j]) - S.lie_u(j, sigma[i])
        for k in L.indices:
            fk = L.structure.get((k, i, j))
            if fk is not None:
                res = res - S.pullback(fk) * sigma[k]
        rep.add("sigma_cocycle", (i, j), res)
    for al in L.kernel:
        rep.add("boundary_sigma", (al,), S.vector_apply(w, S.mu(al)) + sigma[al])


def _explicit_2(S, sp, f, rep):
    L = S.algebroid
    X = S.x_coords
    z = S.x_gens.zero()
    Q, v, tau, nu = f["Q"], f["v"], f["tau"], f["nu"]
    Qmv = _mv(S, Q)
    P = S.bivector()
    V = {i: _vec(S, {a: v[i, a] for a in X}) for i in L.indices}

    def T(i, j):
        if i == j:
            return z
        if (i, j) in tau:
            return tau[i, j]
        return -tau[j, i]

    for legs, p in _legs(S, -_bracket(S, P, Qmv), 3).items():
        rep.add("poisson_bivector", legs, p)
    for i in L.indices:
        U = S.vector(S.u_vector(i))
        res = _bracket(S, U, Qmv) - _bracket(S, P, V[i])
        for legs, p in _legs(S, res, 2).items():
            rep.add("invariant_bivector", (i,) + legs, p)
    for i, j in combinations(L.indices, 2):
        res = -_bracket(S, S.vector(S.u_vector(i)), V[j]) + _bracket(S, S.vector(S.u_vector(j)), V[i])
        for k in L.indices:
            fk = L.structure.get((k, i, j))
            if fk is not None:
                res = res + S.pullback(fk).embed(S.mv_gens) * V[k]
        comps = _legs(S, res, 1)
        sh = S.sharp_d(T(i, j))
        for a in X:
            rep.add("action_deformation", (i, j, a), comps[(a,)] + sh.get(a, z))
    for r, s, t in combinations(L.indices, 3):
        res = S.lie_u(r, T(s, t)) - S.lie_u(s, T(r, t)) + S.lie_u(t, T(r, s))
        for k in L.indices:
            for (x, y, sign, other) in ((r, s, -1, t), (r, t, 1, s), (s, t, -1, r)):
                fk = L.structure.get((k, x, y))
                if fk is not None:
                    res = res + S.pullback(fk) * T(k, other) * sign
        rep.add("tau_cocycle", (r, s, t), res)
    Qc = {k: p for k, p in Q.items() if p.terms}
    for al in L.kernel:
        dmu = {a: deriv(S.mu(al), a) for a in X}
        h1 = sharp(Qc, dmu, X) if Qc else {}
        h2 = S.sharp_d(nu[al])
        for a in X:
            rep.add("boundary_v", (al, a), h1.get(a, z) + h2.get(a, z) - v[al, a])
    for i in L.indices:
        vi = {a: v[i, a] for a in X}
        for al in L.kernel:
            res = S.lie_u(i, nu[al]) + S.vector_apply(vi, S.mu(al)) - T(i, al)
            for be in L.kernel:
                fb = L.structure.get((be, i, al))
                if fb is not None:
                    res = res - S.pullback(fb) * nu[be]
            rep.add("boundary_tau", (i, al), res)


def delta_bar_report(c: Cochain, space: CochainSpace) -> IdentityReport:
    """Components of ``delta-bar c`` labelled like the explicit equations."""
    d = space.delta_bar(c)
    rep = IdentityReport()
    if isinstance(d, Defect):
        rep.add("closure_defect", (), ok=False, detail=d.reason + ": " + "; ".join(d.monomials[:5]))
        return rep
    z = space.S.x_gens.zero()
    for ident, blk in EQUATION_BLOCKS[c.degree].items():
        for idx in space.indices(blk):
            inst = idx[0] + idx[1] + idx[2]
            rep.add(ident, inst, EQUATION_SIGNS[c.degree][ident] * d.get(blk, idx, z))
    return rep


EQUATION_SIGNS = {
    0: {"casimir": 1, "invariance": 1},
    1: {"poisson_vector": 1, "lie_derivative": 1, "sigma_cocycle": 1, "boundary_sigma": 1},
    2: {
        "poisson_bivector": 1,
        "invariant_bivector": 1,
        "action_deformation": 1,
        "tau_cocycle": 1,
        "boundary_v": 1,
        "boundary_tau": 1,
    },
}


# ---------------------------------------------------------------------------
# solver

@dataclass
class SolveResult:
    degree: int
    cap: int
    cocycles: list[Cochain]
    coboundaries: list[Cochain]
    columns: int

    @property
    def dimension(self) -> int:
        return len(self.cocycles) - len(self.coboundaries)

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "cap": self.cap,
            "columns": self.columns,
            "cocycle_dimension": len(self.cocycles),
            "coboundary_dimension": len(self.coboundaries),
            "quotient_dimension": self.dimension,
            "cocycles": [c.describe() for c in self.cocycles],
            "coboundaries": [c.describe() for c in self.coboundaries],
        }


def _vector(F: GPoly) -> dict:
    return dict(F.terms)


def solve_cohomology(S: SigmaData | CochainSpace, degree: int, poly_cap: int) -> SolveResult:
    """Exact cocycles and coboundaries with coefficients of degree <= cap."""
    if degree not in (0, 1, 2):
        raise AlgebraError(f"solver supports degrees 0, 1 and 2, not {degree}")
    if poly_cap < 0:
        raise AlgebraError("polynomial cap must be non-negative")
    sp = S if isinstance(S, CochainSpace) else CochainSpace(S)
    cols = sp.columns(degree, poly_cap)
    images = []
    for col in cols:
        F = sp.encode(sp.column_cochain(degree, col), check=False)
        img = {("Q", k): v for k, v in sp.Q(F).terms.items()}
        for r, Kr in sp.K.items():
            for k, v in Kr(F).terms.items():
                img[("K", r, k)] = v
        images.append(img)
    null = _nullspace_of_columns(images, len(cols))
    cocycles = [sp._combine(degree, cols, v) for v in null]
    # coboundaries: images of degree-1 cochains that land in the cap space
    lower = sp.tangential_basis(degree - 1, poly_cap) if degree > 0 else []
    coboundaries = []
    if lower and cocycles:
        enc_z = [_vector(sp.encode(z, check=False)) for z in cocycles]
        enc_b = [_vector(sp.Q(sp.encode(b, check=False))) for b in lower]
        comb = enc_b + [{k: -v for k, v in z.items()} for z in enc_z]
        nz = _nullspace_of_columns(comb, len(comb))
        nb = len(enc_b)
        ech = Echelon()
        for vec in nz:
            y = {n - nb: c for n, c in vec.items() if n >= nb}
            if y:
                ech.add(y)
        for n in sorted(ech.pivots):
            row = ech.pivots[n]
            el = Cochain(degree, {})
            comps: dict = {}
            for m, c in row.items():
                for blk, idx, p in cocycles[m].items():
                    d = comps.setdefault(blk, {})
                    t = p.scale(c)
                    d[idx] = d[idx] + t if idx in d else t
            coboundaries.append(Cochain(degree, comps))
    return SolveResult(degree, poly_cap, cocycles, coboundaries, len(cols))


def random_cochains(space: CochainSpace, degree: int, cap: int, count: int,
                    seed: int = 0, terms: int = 3) -> list[Cochain]:
    """Seeded combinations of a tangential basis with small integer weights."""
    basis = space.tangential_basis(degree, cap)
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        if not basis:
            out.append(Cochain(degree, {}))
            continue
        picks = rng.sample(range(len(basis)), min(terms, len(basis)))
        comps: dict = {}
        for n in picks:
            w = rng.choice([-3, -2, -1, 1, 2, 3])
            for blk, idx, p in basis[n].items():
                d = comps.setdefault(blk, {})
                t = p.scale(w)
                d[idx] = d[idx] + t if idx in d else t
        out.append(Cochain(degree, comps))
    return out


def compare_routes(c: Cochain, space: CochainSpace) -> IdentityReport:
    """Explicit equations against the decoded ``delta-bar`` blocks, one
    record per labelled instance, plus ``delta-bar`` squared."""
    rep = IdentityReport()
    d = space.delta_bar(c)
    if isinstance(d, Defect):
        rep.add("closure_defect", (), ok=False, detail=d.reason)
        return rep
    z = space.S.x_gens.zero()
    lhs = {(r.identity, r.instance): r.residual for r in closure_residual_explicit(c, space)}
    rhs = {(r.identity, r.instance): r.residual for r in delta_bar_report(c, space)}
    for key in sorted(set(lhs) | set(rhs)):
        rep.add("two_route", key[:1] + key[1], lhs.get(key, z) - rhs.get(key, z))
    dd = space.delta_bar(d)
    if isinstance(dd, Defect):
        rep.add("delta_bar_squared", (), ok=False, detail=dd.reason)
    else:
        rep.add("delta_bar_squared", (), ok=dd.is_zero(), detail="" if dd.is_zero() else "nonzero")
    return rep
