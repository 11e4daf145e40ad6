"""Lie algebroid charts, their identities and Chevalley-Eilenberg fields."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping

from .galgebra import AlgebraError, Generator, GeneratorSet, GPoly, deriv
from .linalg import rank
from .report import IdentityReport, sample_points


def _check_even_coefficient(p: GPoly, gens: GeneratorSet, what: str):
    if not isinstance(p, GPoly):
        raise AlgebraError(f"{what} must be a polynomial")
    if p.gens != gens:
        raise AlgebraError(f"{what} is not a polynomial in the declared coordinates")
    if p.terms and p.degrees() != {0}:
        raise AlgebraError(f"{what} must be homogeneous of degree 0")


@dataclass(frozen=True, eq=False)
class AlgebroidChart:
    """Anchor ``rho[i, r]`` and structure functions ``f[k, i, j]`` in an
    adapted frame.  Missing entries are zero."""

    base: GeneratorSet
    indices: tuple[str, ...]
    kernel: tuple[str, ...] = ()
    anchor: Mapping[tuple[str, str], GPoly] = field(default_factory=dict)
    structure: Mapping[tuple[str, str, str], GPoly] = field(default_factory=dict)

    def __post_init__(self):
        idx = set(self.indices)
        if len(idx) != len(self.indices):
            raise AlgebraError("duplicate frame index")
        for a in self.kernel:
            if a not in idx:
                raise AlgebraError(f"kernel index {a!r} is not a frame index")
        for g in self.base:
            if g.degree != 0:
                raise AlgebraError(f"base coordinate {g.name!r} must have degree 0")
        anchor = {}
        for (i, r), p in self.anchor.items():
            if i not in idx or r not in self.base:
                raise AlgebraError(f"anchor entry ({i}, {r}) out of range")
            _check_even_coefficient(p, self.base, f"anchor[{i},{r}]")
            if p.terms:
                anchor[i, r] = p
        structure = {}
        for (k, i, j), p in self.structure.items():
            if not {k, i, j} <= idx:
                raise AlgebraError(f"structure entry ({k}, {i}, {j}) out of range")
            _check_even_coefficient(p, self.base, f"structure[{k},{i},{j}]")
            if p.terms:
                structure[k, i, j] = p
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "structure", structure)

    @property
    def complement(self) -> tuple[str, ...]:
        return tuple(i for i in self.indices if i not in self.kernel)

    @property
    def coords(self) -> tuple[str, ...]:
        return self.base.names

    def rho(self, i: str, r: str) -> GPoly:
        return self.anchor.get((i, r)) or self.base.zero()

    def f(self, k: str, i: str, j: str) -> GPoly:
        return self.structure.get((k, i, j)) or self.base.zero()

    def anchor_derivative(self, i: str, p: GPoly) -> GPoly:
        """``rho_i^r d_r p`` for a polynomial over the base."""
        out = self.base.zero()
        for r in self.coords:
            a = self.anchor.get((i, r))
            if a is not None:
                d = deriv(p, r)
                if d.terms:
                    out = out + a * d
        return out

    def anchor_rank(self, point: Mapping) -> int:
        rows = [
            [self.rho(i, r).evaluate(point).constant_term() for r in self.coords]
            for i in self.indices
        ]
        return rank(rows) if rows and self.coords else 0

    def with_entries(self, anchor=None, structure=None) -> "AlgebroidChart":
        a = dict(self.anchor)
        a.update(anchor or {})
        s = dict(self.structure)
        s.update(structure or {})
        return AlgebroidChart(self.base, self.indices, self.kernel, a, s)

    def __eq__(self, other):
        return (
            isinstance(other, AlgebroidChart)
            and self.base == other.base
            and self.indices == other.indices
            and self.kernel == other.kernel
            and self.anchor == other.anchor
            and self.structure == other.structure
        )

    __hash__ = None


def validate_algebroid(L: AlgebroidChart, points=None, sample_count: int = 5,
                       seed: int = 0) -> IdentityReport:
    """Antisymmetry, Jacobi with anchor, anchor morphism, adapted frame."""
    rep = IdentityReport()
    I = L.indices
    for k in I:
        for i, j in combinations(I, 2):
            rep.add("antisymmetry", (k, i, j), L.f(k, i, j) + L.f(k, j, i))
        for i in I:
            rep.add("antisymmetry", (k, i, i), L.f(k, i, i).scale(2))
    for i in I:
        for j, k, l in combinations(I, 3):
            res = L.base.zero()
            for a, b, c in ((j, k, l), (k, l, j), (l, j, k)):
                for m in I:
                    fa = L.structure.get((i, a, m))
                    fb = L.structure.get((m, b, c))
                    if fa is not None and fb is not None:
                        res = res + fa * fb
                res = res + L.anchor_derivative(a, L.f(i, b, c))
            rep.add("jacobi", (i, j, k, l), res)
    for i, j in combinations(I, 2):
        for r in L.coords:
            res = (
                L.anchor_derivative(i, L.rho(j, r))
                - L.anchor_derivative(j, L.rho(i, r))
            )
            for k in I:
                fk = L.structure.get((k, i, j))
                if fk is not None:
                    res = res - fk * L.rho(k, r)
            rep.add("anchor_morphism", (i, j, r), res)
    for a in L.kernel:
        for r in L.coords:
            rep.add("kernel_anchor", (a, r), L.rho(a, r))
    for kap in L.complement:
        for i in I:
            for a in L.kernel:
                rep.add("kernel_ideal", (kap, i, a), L.f(kap, i, a))
    rep.extend(regularity_report(L, points, sample_count, seed))
    return rep


def regularity_report(L: AlgebroidChart, points=None, sample_count=5, seed=0):
    rep = IdentityReport()
    if points is None:
        points = sample_points(L.coords, sample_count, seed)
    ranks = [L.anchor_rank(p) for p in points] if L.coords else [0]
    rep.add(
        "regularity",
        (),
        ok=len(set(ranks)) <= 1,
        detail="anchor ranks at sample points: %s" % ranks,
    )
    return rep


# ---------------------------------------------------------------------------
# homological vector fields

@dataclass(frozen=True, eq=False)
class HomologicalField:
    """Vector field ``sum components[g] * d/dg`` acting from the left."""

    gens: GeneratorSet
    components: Mapping[str, GPoly]
    degree: int = 1

    def __post_init__(self):
        comps = {}
        for name, p in self.components.items():
            g = self.gens[name]
            if p.gens != self.gens:
                raise AlgebraError(f"component {name!r} over another generator set")
            if p.terms:
                if p.degrees() != {g.degree + self.degree}:
                    raise AlgebraError(
                        f"component {name!r} has degrees {sorted(p.degrees())}, "
                        f"expected {g.degree + self.degree}"
                    )
                comps[name] = p
        object.__setattr__(self, "components", comps)

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1

    def component(self, name: str) -> GPoly:
        return self.components.get(name) or self.gens.zero()

    def __call__(self, F: GPoly) -> GPoly:
        if F.gens != self.gens:
            F = F.embed(self.gens)
        out = self.gens.zero()
        for name, comp in self.components.items():
            d = deriv(F, name, "left")
            if d.terms:
                out = out + comp * d
        return out

    def commutator(self, other: "HomologicalField") -> "HomologicalField":
        """Graded commutator ``X Y - (-1)^{|X||Y|} Y X``."""
        if other.gens != self.gens:
            raise AlgebraError("fields over different generator sets")
        sign = -1 if (self.degree * other.degree) % 2 == 0 else 1
        comps = {}
        for g in self.gens:
            c = self(other.component(g.name))
            c2 = other(self.component(g.name))
            comps[g.name] = c - c2 if sign == -1 else c + c2
        return HomologicalField(self.gens, comps, self.degree + other.degree)

    def __add__(self, other):
        if other.gens != self.gens or other.degree != self.degree:
            raise AlgebraError("cannot add fields of different type")
        names = set(self.components) | set(other.components)
        return HomologicalField(
            self.gens,
            {n: self.component(n) + other.component(n) for n in names},
            self.degree,
        )

    def scale(self, c) -> "HomologicalField":
        return HomologicalField(
            self.gens, {n: p.scale(c) for n, p in self.components.items()}, self.degree
        )

    def times(self, p: GPoly) -> "HomologicalField":
        """Left multiplication ``p * X`` by a homogeneous polynomial."""
        deg = p.degree if p.terms else 0
        return HomologicalField(
            self.gens,
            {n: p * c for n, c in self.components.items()},
            self.degree + deg,
        )

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other):
        return (
            isinstance(other, HomologicalField)
            and self.gens == other.gens
            and self.degree == other.degree
            and self.components == other.components
        )

    __hash__ = None


def nilpotency_residual(Q: HomologicalField) -> dict[str, GPoly]:
    """Components of ``Q^2 = [Q, Q]/2`` on every coordinate."""
    if not Q.odd:
        raise AlgebraError("nilpotency is only defined for odd fields")
    return {g.name: Q(Q.component(g.name)) for g in Q.gens}


# ---------------------------------------------------------------------------
# Chevalley-Eilenberg field and representations

def ce_name(i: str) -> str:
    return f"c_{i}"


def rep_name(A: str) -> str:
    return f"eps_{A}"


@dataclass(frozen=True, eq=False)
class RepresentationData:
    """Matrices ``D[i, A, B]`` (GPoly over the base); ``D_{e_i}`` acts on
    sections by ``sigma^A -> rho_i(sigma^A) + D[i, A, B] sigma^B``."""

    labels: tuple[str, ...]
    matrices: Mapping[tuple[str, str, str], GPoly]

    @property
    def rank(self) -> int:
        return len(self.labels)

    def D(self, i, A, B, base: GeneratorSet) -> GPoly:
        return self.matrices.get((i, A, B)) or base.zero()


def trivial_representation(L: AlgebroidChart) -> RepresentationData:
    return RepresentationData(("1",), {})


def adjoint_representation(L: AlgebroidChart) -> RepresentationData:
    """Adjoint representation on the kernel of the anchor."""
    mats = {}
    for i in L.indices:
        for b in L.kernel:
            for a in L.kernel:
                p = L.f(b, i, a)
                if p.terms:
                    mats[i, b, a] = p
    return RepresentationData(tuple(L.kernel), mats)


def ce_generators(L: AlgebroidChart, D: RepresentationData | None = None) -> GeneratorSet:
    gens = list(L.base)
    gens += [Generator(ce_name(i), 1, "fiber") for i in L.indices]
    if D is not None:
        gens += [Generator(rep_name(A), 0, "momentum") for A in D.labels]
    return GeneratorSet(gens)


def ce_field(L: AlgebroidChart, D: RepresentationData | None = None) -> HomologicalField:
    """``c^i rho_i^r d_r - 1/2 f^k_ij c^i c^j d/dc^k`` (+ ``D`` on module
    coordinates)."""
    G = ce_generators(L, D)
    c = {i: G.var(ce_name(i)) for i in L.indices}
    comps = {}
    for r in L.coords:
        acc = G.zero()
        for i in L.indices:
            p = L.anchor.get((i, r))
            if p is not None:
                acc = acc + c[i] * p.embed(G)
        comps[r] = acc
    for k in L.indices:
        acc = G.zero()
        for (kk, i, j), p in L.structure.items():
            if kk == k:
                acc = acc - (c[i] * c[j] * p.embed(G)) / 2
        comps[ce_name(k)] = acc
    if D is not None:
        eps = {A: G.var(rep_name(A)) for A in D.labels}
        for B in D.labels:
            acc = G.zero()
            for i in L.indices:
                for A in D.labels:
                    p = D.matrices.get((i, A, B))
                    if p is not None:
                        acc = acc + c[i] * p.embed(G) * eps[A]
            comps[rep_name(B)] = acc
    return HomologicalField(G, comps, 1)


def validate_representation(L: AlgebroidChart, D: RepresentationData) -> IdentityReport:
    """Matrix form of ``[D_s, D_t] = D_[s,t]`` on frame sections."""
    rep = IdentityReport()
    base = L.base
    for i, j in combinations(L.indices, 2):
        for A in D.labels:
            for B in D.labels:
                res = (
                    L.anchor_derivative(i, D.D(j, A, B, base))
                    - L.anchor_derivative(j, D.D(i, A, B, base))
                )
                for C in D.labels:
                    res = res + D.D(i, A, C, base) * D.D(j, C, B, base)
                    res = res - D.D(j, A, C, base) * D.D(i, C, B, base)
                for k in L.indices:
                    fk = L.structure.get((k, i, j))
                    if fk is not None:
                        res = res - fk * D.D(k, A, B, base)
                rep.add("representation", (i, j, A, B), res)
    return rep


# ---------------------------------------------------------------------------
# action algebroid

def action_algebroid(L: AlgebroidChart, S) -> AlgebroidChart:
    """Chart of ``L x J`` over ``X``: anchor ``u``, structure ``f o J``."""
    if S.algebroid != L:
        raise AlgebraError("sigma data is built over a different algebroid")
    X = S.x_gens
    anchor = {}
    for (i, a), p in S.action.items():
        anchor[i, a] = p
    structure = {key: S.pullback(p) for key, p in L.structure.items()}
    kernel = tuple(
        i for i in L.indices if all(not S.u(i, a).terms for a in S.x_coords)
    )
    return AlgebroidChart(X, L.indices, kernel, anchor, structure)
