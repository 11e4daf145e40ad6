"""Preset target geometries and the scenario document model."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Mapping

from .algebroid import AlgebroidChart, validate_algebroid
from .covariance import ConnectionData, Trivialization
from .galgebra import AlgebraError, Generator, GeneratorSet, GPoly, PolyParseError, format_poly, parse_poly
from .linalg import rank, solve
from .paction import SigmaData, validate_sigma
from .report import IdentityReport, sample_points

FORMAT = "lapsm-scenario/1"


class ScenarioError(ValueError):
    """Malformed scenario document or inconsistent preset input."""


def even_gens(names) -> GeneratorSet:
    return GeneratorSet(Generator(n, 0, "base") for n in names)


@dataclass(eq=False)
class GlxTransitions:
    """Vector-bundle transitions (by trivialization name) whose gl(X) laws
    are checked pairwise, with an optional connection."""

    labels: tuple[str, ...]
    pairs: list[tuple[str, str]]
    connection: ConnectionData | None = None

    def __eq__(self, other):
        return (
            isinstance(other, GlxTransitions)
            and self.labels == other.labels
            and self.pairs == other.pairs
            and self.connection == other.connection
        )


@dataclass(eq=False)
class Scenario:
    name: str
    sigma: SigmaData
    description: str = ""
    trivializations: list[Trivialization] = field(default_factory=list)
    glx: GlxTransitions | None = None
    expect: dict[str, str] = field(default_factory=dict)

    def trivialization(self, name: str) -> Trivialization:
        for t in self.trivializations:
            if t.name == name:
                return t
        raise ScenarioError(f"no trivialization named {name!r}")

    def __eq__(self, other):
        return (
            isinstance(other, Scenario)
            and self.name == other.name
            and self.description == other.description
            and self.sigma == other.sigma
            and self.trivializations == other.trivializations
            and self.glx == other.glx
            and self.expect == other.expect
        )


# ---------------------------------------------------------------------------
# presets

def levi_civita(a: int, b: int, c: int) -> int:
    if len({a, b, c}) < 3:
        return 0
    inv = (a > b) + (a > c) + (b > c)
    return -1 if inv % 2 else 1


def _rotation_trivialization(S: SigmaData, R, name: str) -> Trivialization:
    """Constant change: ``xi' = R xi`` on X and ``T = R`` on the frame."""
    M = S.algebroid.base
    X = S.x_gens
    xs = S.x_coords
    I = S.algebroid.indices
    n = len(R)
    Rt = [[R[j][i] for j in range(n)] for i in range(n)]  # orthogonal: inverse = transpose
    x_map = {xs[a]: sum((X.var(xs[b]).scale(R[a][b]) for b in range(n) if R[a][b]), X.zero())
             for a in range(n)}
    x_inv = {xs[a]: sum((X.var(xs[b]).scale(Rt[a][b]) for b in range(n) if Rt[a][b]), X.zero())
             for a in range(n)}
    frame = {(I[i], I[j]): M.const(R[i][j]) for i in range(n) for j in range(n) if R[i][j]}
    frame_inv = {(I[i], I[j]): M.const(Rt[i][j]) for i in range(n) for j in range(n) if Rt[i][j]}
    return Trivialization(M, X, x_map, x_inv, {}, {}, frame, frame_inv, {}, name=name)


def preset_so3() -> Scenario:
    """Lie-Poisson structure on so(3)* with the coadjoint action."""
    M = GeneratorSet([])
    I = ("1", "2", "3")
    structure = {}
    for k in range(3):
        for i in range(3):
            for j in range(3):
                e = levi_civita(k, i, j)
                if e:
                    structure[I[k], I[i], I[j]] = M.const(e)
    L = AlgebroidChart(M, I, I, {}, structure)
    xs = ("x1", "x2", "x3")
    X = even_gens(xs)
    x = [X.var(n) for n in xs]
    poisson = {}
    for a, b in combinations(range(3), 2):
        c = 3 - a - b
        poisson[xs[a], xs[b]] = x[c].scale(levi_civita(a, b, c))
    action = {}
    for i in range(3):
        for a in range(3):
            acc = X.zero()
            for c in range(3):
                e = levi_civita(a, i, c)
                if e:
                    acc = acc - x[c].scale(e)
            if acc.terms:
                action[I[i], xs[a]] = acc
    moment = {I[k]: x[k] for k in range(3)}
    S = SigmaData(L, X, {}, action, poisson, moment)
    R = [[Fraction(3, 5), Fraction(-4, 5), 0], [Fraction(4, 5), Fraction(3, 5), 0], [0, 0, 1]]
    return Scenario(
        "so3",
        S,
        "Lie-Poisson bracket on so(3)* with coadjoint action and moment map x",
        [_rotation_trivialization(S, R, "rotation")],
    )


def preset_extremal_a(L: AlgebroidChart, x_names: Mapping[str, str] | None = None,
                      name: str = "extremal_a", description: str = "",
                      validate: bool = True) -> Scenario:
    """``X = M``, ``J = id``, ``u = rho``, ``P = 0``, ``mu = 0``.

    ``x_names`` renames the base coordinates for their copy on ``X``.  With
    ``validate=False`` invalid algebroid data is accepted, which is how
    broken fixtures are produced.
    """
    if validate:
        rep = validate_algebroid(L)
        if not rep.passed:
            raise ScenarioError("algebroid data does not validate: " + rep.summary())
    x_names = dict(x_names or {r: f"x_{r}" for r in L.coords})
    X = even_gens(x_names[r] for r in L.coords)
    to_x = {r: X.var(x_names[r]) for r in L.coords}
    J = {r: X.var(x_names[r]) for r in L.coords}
    action = {}
    for (i, r), p in L.anchor.items():
        action[i, x_names[r]] = p.subs(to_x, X)
    S = SigmaData(L, X, J, action, {}, {})
    return Scenario(name, S, description)


def tangent_algebroid_2d() -> AlgebroidChart:
    """Tangent algebroid of the plane in the frame ``e1 = d1``,
    ``e2 = m1 d1 + d2``, for which ``[e1, e2] = e1``."""
    M = even_gens(("m1", "m2"))
    m1 = M.var("m1")
    anchor = {("1", "m1"): M.one(), ("2", "m1"): m1, ("2", "m2"): M.one()}
    structure = {("1", "1", "2"): M.one(), ("1", "2", "1"): -M.one()}
    return AlgebroidChart(M, ("1", "2"), (), anchor, structure)


def preset_case_a() -> Scenario:
    L = tangent_algebroid_2d()
    sc = preset_extremal_a(
        L, {"m1": "x1", "m2": "x2"}, "case_a",
        "tangent algebroid of the plane in a non-holonomic frame, J = id",
    )
    sc.trivializations = case_a_trivializations(sc.sigma)
    return sc


def perturb_case_a(seed: int, require_invalid: bool = True) -> Scenario:
    """Case-a fixture with one coefficient of ``f`` or ``rho`` shifted.

    A structure function entry is shifted together with its antisymmetric
    partner; an anchor shift is carried into ``u = rho o J``.  Some shifts
    give another valid algebroid (``rho_2 = m1 d1 + 3 d2`` still closes);
    with ``require_invalid`` such draws are discarded and the seeded stream
    continues until the algebroid identities fail.
    """
    rng = random.Random(seed)
    L = tangent_algebroid_2d()
    M = L.base
    while True:
        mono = M.one()
        for _ in range(rng.randint(0, 2)):
            mono = mono * M.var(rng.choice(M.names))
        delta = mono.scale(rng.choice([-3, -2, -1, 1, 2, 3]))
        anchor = dict(L.anchor)
        structure = dict(L.structure)
        if rng.random() < 0.5:
            k = rng.choice(L.indices)
            key = (k, "1", "2")
            structure[key] = structure.get(key, M.zero()) + delta
            structure[k, "2", "1"] = -structure[key]
            what = f"f^{k}_12"
        else:
            i, r = rng.choice(L.indices), rng.choice(L.coords)
            anchor[i, r] = anchor.get((i, r), M.zero()) + delta
            what = f"rho_{i}^{r}"
        structure = {k: v for k, v in structure.items() if v.terms}
        anchor = {k: v for k, v in anchor.items() if v.terms}
        L2 = AlgebroidChart(M, L.indices, L.kernel, anchor, structure)
        if not require_invalid or not validate_algebroid(L2).passed:
            break
    return preset_extremal_a(
        L2, {"m1": "x1", "m2": "x2"}, f"case_a_perturbed_{seed}",
        f"case a with {what} shifted by {format_poly(delta)}", validate=False,
    )


def case_a_trivializations(S: SigmaData) -> list[Trivialization]:
    M = S.algebroid.base
    X = S.x_gens
    m1, m2 = M.var("m1"), M.var("m2")
    x1, x2 = X.var("x1"), X.var("x2")
    c, s = Fraction(3, 5), Fraction(4, 5)
    rot = Trivialization(
        M, X,
        x_map={"x1": x1, "x2": x2}, x_inv={"x1": x1, "x2": x2},
        base_map={"m1": m1, "m2": m2}, base_inv={"m1": m1, "m2": m2},
        frame={("1", "1"): M.const(c), ("1", "2"): M.const(-s),
               ("2", "1"): M.const(s), ("2", "2"): M.const(c)},
        frame_inv={("1", "1"): M.const(c), ("1", "2"): M.const(s),
                   ("2", "1"): M.const(-s), ("2", "2"): M.const(c)},
        fibration={"m1": x1, "m2": x2},
        name="frame_rotation",
    )
    # triangular change m1' = m1 + m2^2 with a base dependent frame
    tri = Trivialization(
        M, X,
        x_map={"x1": x1 + x2 * x2, "x2": x2}, x_inv={"x1": x1 - x2 * x2, "x2": x2},
        base_map={"m1": m1 + m2 * m2, "m2": m2}, base_inv={"m1": m1 - m2 * m2, "m2": m2},
        frame={("1", "1"): M.one(), ("1", "2"): m1, ("2", "2"): M.one()},
        # inverse as a function of the primed point, where m1 = m1' - m2'^2
        frame_inv={("1", "1"): M.one(), ("1", "2"): m2 * m2 - m1, ("2", "2"): M.one()},
        fibration={"m1": x1, "m2": x2},
        name="triangular",
    )
    return [rot, tri]


def preset_abelian_b() -> Scenario:
    """Abelian rank-2 algebra acting on R^3 with ``P = d1 ^ d2``."""
    M = GeneratorSet([])
    L = AlgebroidChart(M, ("1", "2"), ("1", "2"), {}, {})
    X = even_gens(("x1", "x2", "x3"))
    x1, x2, x3 = (X.var(n) for n in ("x1", "x2", "x3"))
    S = SigmaData(
        L, X, {},
        action={("1", "x1"): -x2, ("1", "x2"): x1},
        poisson={("x1", "x2"): X.one()},
        moment={"1": (x1 * x1 + x2 * x2) / 2, "2": x3},
    )
    c, sn = Fraction(3, 5), Fraction(4, 5)
    rot = Trivialization(
        M, X,
        x_map={"x1": x1.scale(c) - x2.scale(sn), "x2": x1.scale(sn) + x2.scale(c), "x3": x3},
        x_inv={"x1": x1.scale(c) + x2.scale(sn), "x2": x2.scale(c) - x1.scale(sn), "x3": x3},
        base_map={}, base_inv={},
        frame={("1", "1"): M.one(), ("2", "1"): M.one(), ("2", "2"): M.one()},
        frame_inv={("1", "1"): M.one(), ("2", "1"): -M.one(), ("2", "2"): M.one()},
        fibration={},
        name="rotation_shear",
    )
    return Scenario("abelian_b", S, "abelian Lie algebra acting by rotations, M a point", [rot])


# ---------------------------------------------------------------------------
# gl(X) and linear Poisson structures

@dataclass(eq=False)
class LinearPoissonData:
    """Fiberwise linear Poisson tensor ``P^{AB} = pi^{AB}_C(m) e^C`` on a
    trivial vector bundle, keyed ``(A, B, C)``."""

    base: GeneratorSet
    labels: tuple[str, ...]
    pi: Mapping[tuple[str, str, str], GPoly]

    def p(self, A, B, C) -> GPoly:
        return self.pi.get((A, B, C)) or self.base.zero()

    def jacobi_report(self) -> IdentityReport:
        rep = IdentityReport()
        lab = self.labels
        for A, B in combinations(lab, 2):
            for C in lab:
                rep.add("pi_antisymmetry", (A, B, C), self.p(A, B, C) + self.p(B, A, C))
        for A, B, C in combinations(lab, 3):
            for E in lab:
                res = self.base.zero()
                for x, y, z in ((A, B, C), (B, C, A), (C, A, B)):
                    for D in lab:
                        res = res + self.p(x, D, E) * self.p(y, z, D)
                rep.add("pi_jacobi", (A, B, C, E), res)
        return rep

    def invariance_residual(self, v: Mapping[str, GPoly], s: Mapping[tuple[str, str], GPoly]):
        """Algebraic condition for ``P`` to be invariant under ``u(v, s)``."""
        lab = self.labels
        z = self.base.zero()
        S = lambda A, B: s.get((A, B)) or z
        out = {}
        for A in lab:
            for B in lab:
                for C in lab:
                    res = z
                    for r, vr in v.items():
                        res = res + vr * self.p(A, B, C).deriv(r)
                    for D in lab:
                        res = res - S(A, D) * self.p(D, B, C)
                        res = res - S(B, D) * self.p(A, D, C)
                        res = res + S(D, C) * self.p(A, B, D)
                    if res.terms:
                        out[A, B, C] = res
        return out


@dataclass
class GlxSection:
    """Section ``(v^r(m), s^A_B(m))`` of gl(X)."""

    label: str
    v: dict[str, GPoly] = field(default_factory=dict)
    s: dict[tuple[str, str], GPoly] = field(default_factory=dict)


def glx_bracket(a: GlxSection, b: GlxSection, base: GeneratorSet, labels) -> GlxSection:
    z = base.zero()
    R = base.names
    v = {}
    for r in R:
        acc = z
        for q in R:
            acc = acc + a.v.get(q, z) * b.v.get(r, z).deriv(q) - b.v.get(q, z) * a.v.get(r, z).deriv(q)
        if acc.terms:
            v[r] = acc
    s = {}
    for A in labels:
        for B in labels:
            acc = z
            for q in R:
                acc = acc + a.v.get(q, z) * b.s.get((A, B), z).deriv(q)
                acc = acc - b.v.get(q, z) * a.s.get((A, B), z).deriv(q)
            for C in labels:
                acc = acc - a.s.get((A, C), z) * b.s.get((C, B), z)
                acc = acc + b.s.get((A, C), z) * a.s.get((C, B), z)
            if acc.terms:
                s[A, B] = acc
    return GlxSection("", v, s)


def _decompose(target: GlxSection, frame: list[GlxSection], base: GeneratorSet, labels):
    """Polynomial coefficients ``c_k(m)`` with ``target = sum c_k frame_k``."""
    comps = [("v", r) for r in base.names] + [("s", (A, B)) for A in labels for B in labels]

    def comp(sec, key):
        kind, k = key
        d = sec.v if kind == "v" else sec.s
        return d.get(k) or base.zero()

    tdeg = max([comp(target, k).poly_degree() for k in comps] + [0])
    for extra in range(3):
        deg = tdeg + extra
        monos = _monomials(base, deg)
        cols = [(n, m) for n in range(len(frame)) for m in monos]
        rows_by_key: dict = {}
        for ci, (n, m) in enumerate(cols):
            for key in comps:
                for mk, c in (comp(frame[n], key) * m).terms.items():
                    rows_by_key.setdefault((key, mk), {})[ci] = c
        for key in comps:
            for mk in comp(target, key).terms:
                rows_by_key.setdefault((key, mk), {})
        keys = sorted(rows_by_key, key=repr)
        rows = [rows_by_key[k] for k in keys]
        rhs = []
        for (key, mk) in keys:
            rhs.append(comp(target, key).terms.get(mk, 0))
        x = solve(rows, rhs, len(cols))
        if x is not None:
            coeffs = [base.zero() for _ in frame]
            for ci, val in x.items():
                n, m = cols[ci]
                coeffs[n] = coeffs[n] + m.scale(val)
            return coeffs
    return None


def _monomials(base: GeneratorSet, deg: int) -> list[GPoly]:
    out = [base.one()]
    frontier = [(0, base.one())]
    for _ in range(deg):
        nxt = []
        for start, m in frontier:
            for n in range(start, len(base.names)):
                mm = m * base.var(base.names[n])
                nxt.append((n, mm))
                out.append(mm)
        frontier = nxt
    return out


def build_glx_scenario(d: LinearPoissonData, frame: list[GlxSection],
                       kernel_t: Mapping[str, Mapping[str, GPoly]],
                       name: str = "glx", description: str = "",
                       x_base_names: Mapping[str, str] | None = None,
                       fiber_names: Mapping[str, str] | None = None,
                       sample_count: int = 5, seed: int = 0) -> Scenario:
    """Subalgebroid of gl(X) preserving a linear Poisson structure.

    ``frame`` lists the complement sections; ``kernel_t`` gives for each
    kernel label the section ``t`` with ``s^A_B = -pi^{AC}_B t_C``.
    """
    base, labels = d.base, d.labels
    jr = d.jacobi_report()
    if not jr.passed:
        raise ScenarioError("linear Poisson tensor fails: " + jr.summary())
    z = base.zero()
    sections = list(frame)
    for al, t in kernel_t.items():
        s = {}
        for A in labels:
            for B in labels:
                acc = z
                for C in labels:
                    tc = t.get(C)
                    if tc is not None:
                        acc = acc - d.p(A, C, B) * tc
                if acc.terms:
                    s[A, B] = acc
        sections.append(GlxSection(al, {}, s))
    for sec in sections:
        bad = d.invariance_residual(sec.v, sec.s)
        if bad:
            key = min(bad)
            raise ScenarioError(
                f"section {sec.label!r} does not preserve the Poisson tensor: "
                f"residual at {key} is {format_poly(bad[key])}"
            )
    idx = tuple(s.label for s in sections)
    if len(set(idx)) != len(idx):
        raise ScenarioError("duplicate section labels")
    # regularity: the sections stay independent and the anchor rank is constant
    pts = sample_points(base.names, sample_count, seed + 2)
    flat = lambda sec, pt: (
        [sec.v.get(r, z).evaluate(pt).constant_term() for r in base.names]
        + [sec.s.get((A, B), z).evaluate(pt).constant_term() for A in labels for B in labels]
    )
    ranks = [rank([flat(s, pt) for s in sections]) for pt in pts]
    if any(r != len(sections) for r in ranks):
        raise ScenarioError(f"frame sections are dependent at sample points (ranks {ranks})")
    structure = {}
    for (i, a), (j, b) in combinations(enumerate(sections), 2):
        br = glx_bracket(a, b, base, labels)
        coeffs = _decompose(br, sections, base, labels)
        if coeffs is None:
            raise ScenarioError(f"bracket of {a.label!r} and {b.label!r} leaves the frame span")
        for k, c in zip(idx, coeffs):
            if c.terms:
                structure[k, a.label, b.label] = c
                structure[k, b.label, a.label] = -c
    anchor = {(s.label, r): p for s in sections for r, p in s.v.items() if p.terms}
    kernel = tuple(kernel_t)
    L = AlgebroidChart(base, idx, kernel, anchor, structure)
    xb = dict(x_base_names or {r: f"x_{r}" for r in base.names})
    fn = dict(fiber_names or {A: f"e{A}" for A in labels})
    X = even_gens([xb[r] for r in base.names] + [fn[A] for A in labels])
    to_x = {r: X.var(xb[r]) for r in base.names}
    onx = lambda p: p.subs(to_x, X)
    e = {A: X.var(fn[A]) for A in labels}
    action = {}
    for sec in sections:
        for r, p in sec.v.items():
            action[sec.label, xb[r]] = onx(p)
        for A in labels:
            acc = X.zero()
            for B in labels:
                p = sec.s.get((A, B))
                if p is not None:
                    acc = acc + onx(p) * e[B]
            if acc.terms:
                action[sec.label, fn[A]] = acc
    poisson = {}
    for A, B in combinations(labels, 2):
        acc = X.zero()
        for C in labels:
            acc = acc + onx(d.p(A, B, C)) * e[C]
        if acc.terms:
            key = (fn[A], fn[B])
            if X.index(fn[A]) > X.index(fn[B]):
                key, acc = (fn[B], fn[A]), -acc
            poisson[key] = acc
    moment = {}
    for al, t in kernel_t.items():
        acc = X.zero()
        for A, p in t.items():
            acc = acc + onx(p) * e[A]
        moment[al] = acc
    J = {r: X.var(xb[r]) for r in base.names}
    S = SigmaData(L, X, J, action, poisson, moment)
    rep = validate_sigma(S)
    if not rep.passed:
        raise ScenarioError("constructed gl(X) data does not validate: " + rep.summary())
    return Scenario(name, S, description)


def preset_glx_so3() -> Scenario:
    """so(3) fibers over a line: ``pi^{AB}_C = eps_ABC``, complement
    section ``(d_m, m s_1)``, kernel sections from ``t = e^1, e^2, e^3``."""
    base = even_gens(("m",))
    labels = ("1", "2", "3")
    pi = {}
    for a, b, c in permutations(range(3)):
        pi[labels[a], labels[b], labels[c]] = base.const(levi_civita(a, b, c))
    d = LinearPoissonData(base, labels, pi)
    m = base.var("m")
    s1 = {}
    for A in range(3):
        for B in range(3):
            val = -levi_civita(A, 0, B)
            if val:
                s1[labels[A], labels[B]] = m.scale(val)
    frame = [GlxSection("0", {"m": base.one()}, s1)]
    kernel_t = {lab: {lab: base.one()} for lab in labels}
    sc = build_glx_scenario(
        d, frame, kernel_t, "glx_so3",
        "linear Poisson structure with so(3) fibers over a line, subalgebroid of gl(X)",
        x_base_names={"m": "x0"},
    )
    trs = glx_fiber_transitions(base, labels)
    sc.trivializations = trs
    sc.glx = GlxTransitions(labels, [(trs[0].name, trs[1].name)], ConnectionData(
        base, labels, {("m", "1", "2"): m, ("m", "2", "1"): -m}
    ))
    return sc


def glx_fiber_transitions(base: GeneratorSet, labels) -> list[Trivialization]:
    m = base.var("m")
    one = base.one()
    shift = Trivialization(
        base, None,
        base_map={"m": m + 1}, base_inv={"m": m - 1},
        fiber_labels=tuple(labels),
        fiber={("1", "1"): one, ("1", "2"): m, ("2", "2"): one, ("3", "3"): one},
        # inverse as a function of the primed point m' = m + 1
        fiber_inv={("1", "1"): one, ("1", "2"): -(m - 1), ("2", "2"): one, ("3", "3"): one},
        name="shear_shift",
    )
    scale = Trivialization(
        base, None,
        base_map={"m": m.scale(2)}, base_inv={"m": m.scale(Fraction(1, 2))},
        fiber_labels=tuple(labels),
        fiber={("1", "1"): one, ("2", "2"): one, ("3", "3"): one, ("3", "1"): m * m},
        fiber_inv={("1", "1"): one, ("2", "2"): one, ("3", "3"): one,
                   ("3", "1"): -(m * m).scale(Fraction(1, 4))},
        name="quadratic_shear",
    )
    return [shift, scale]


PRESETS = {
    "so3": preset_so3,
    "case_a": preset_case_a,
    "abelian_b": preset_abelian_b,
    "glx_so3": preset_glx_so3,
}


def preset(name: str) -> Scenario:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ScenarioError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}") from None


# ---------------------------------------------------------------------------
# documents

def _poly_text(p: GPoly) -> str:
    return format_poly(p)


def _matrix_out(M) -> list:
    return [[i, j, _poly_text(p)] for (i, j), p in sorted(M.items())]


def _map_out(M) -> dict:
    return {k: _poly_text(p) for k, p in sorted(M.items())}


def scenario_to_dict(sc: Scenario) -> dict:
    S = sc.sigma
    L = S.algebroid
    doc = {
        "format": FORMAT,
        "name": sc.name,
        "description": sc.description,
        "base": {"coords": list(L.coords)},
        "algebroid": {
            "indices": list(L.indices),
            "kernel": list(L.kernel),
            "anchor": [[i, r, _poly_text(p)] for (i, r), p in sorted(L.anchor.items())],
            "structure": [[k, i, j, _poly_text(p)] for (k, i, j), p in sorted(L.structure.items())],
        },
        "fibration": {"coords": list(S.x_coords), "J": _map_out(S.fibration)},
        "action": [[i, a, _poly_text(p)] for (i, a), p in sorted(S.action.items())],
        "poisson": [[a, b, _poly_text(p)] for (a, b), p in sorted(S.poisson.items())],
        "moment": _map_out(S.moment),
        "trivializations": [_triv_out(t) for t in sc.trivializations],
    }
    if sc.glx is not None:
        g = sc.glx
        doc["glx_transitions"] = {
            "labels": list(g.labels),
            "pairs": [list(p) for p in g.pairs],
            "connection": [] if g.connection is None else [
                [r, A, B, _poly_text(p)] for (r, A, B), p in sorted(g.connection.matrices.items())
            ],
        }
    doc["expect"] = dict(sorted(sc.expect.items()))
    return doc


def _triv_out(t: Trivialization) -> dict:
    out = {
        "name": t.name,
        "base_map": _map_out(t.base_map),
        "base_inv": _map_out(t.base_inv),
    }
    if t.x_gens is not None:
        out["x_map"] = _map_out(t.x_map)
        out["x_inv"] = _map_out(t.x_inv)
        out["frame"] = _matrix_out(t.frame)
        out["frame_inv"] = _matrix_out(t.frame_inv)
        out["fibration"] = _map_out(t.fibration)
    if t.fiber_labels:
        out["fiber_labels"] = list(t.fiber_labels)
        out["fiber"] = _matrix_out(t.fiber)
        out["fiber_inv"] = _matrix_out(t.fiber_inv)
    return out


def save_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2) + "\n"


class _Reader:
    def __init__(self, doc):
        self.doc = doc

    def need(self, obj, key, where, kind=None):
        if not isinstance(obj, dict) or key not in obj:
            raise ScenarioError(f"{where}: missing field {key!r}")
        val = obj[key]
        if kind is not None and not isinstance(val, kind):
            raise ScenarioError(f"{where}.{key}: expected {kind.__name__}")
        return val

    def names(self, obj, where) -> list[str]:
        if not isinstance(obj, list) or not all(isinstance(n, str) and n.isidentifier() for n in obj):
            raise ScenarioError(f"{where}: expected a list of identifier names")
        if len(set(obj)) != len(obj):
            raise ScenarioError(f"{where}: duplicate names")
        return obj

    def labels(self, obj, where) -> list[str]:
        if not isinstance(obj, list) or not all(isinstance(n, str) and n and n.isalnum() for n in obj):
            raise ScenarioError(f"{where}: expected a list of alphanumeric labels")
        if len(set(obj)) != len(obj):
            raise ScenarioError(f"{where}: duplicate labels")
        return obj

    def poly(self, text, gens, where) -> GPoly:
        if isinstance(text, (int,)) and not isinstance(text, bool):
            text = str(text)
        if not isinstance(text, str):
            raise ScenarioError(f"{where}: polynomial must be a string")
        try:
            return parse_poly(text, gens)
        except PolyParseError as exc:
            raise ScenarioError(f"{where}: {exc}") from None

    def entries(self, obj, arity, where) -> list:
        if not isinstance(obj, list):
            raise ScenarioError(f"{where}: expected a list of entries")
        for n, e in enumerate(obj):
            if not isinstance(e, list) or len(e) != arity + 1 or not all(isinstance(x, str) for x in e[:arity]):
                raise ScenarioError(f"{where}[{n}]: expected {arity} labels and a polynomial")
        return obj


def load_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(doc)


def scenario_from_dict(doc) -> Scenario:
    R = _Reader(doc)
    if not isinstance(doc, dict):
        raise ScenarioError("document must be an object")
    fmt = doc.get("format")
    if fmt != FORMAT:
        raise ScenarioError(f"format: expected {FORMAT!r}, found {fmt!r}")
    name = R.need(doc, "name", "document", str)
    base = R.names(R.need(R.need(doc, "base", "document", dict), "coords", "base"), "base.coords")
    M = even_gens(base)
    alg = R.need(doc, "algebroid", "document", dict)
    indices = R.labels(R.need(alg, "indices", "algebroid"), "algebroid.indices")
    kernel = R.labels(alg.get("kernel", []), "algebroid.kernel")
    anchor = {}
    for n, (i, r, p) in enumerate(R.entries(alg.get("anchor", []), 2, "algebroid.anchor")):
        where = f"algebroid.anchor[{n}]"
        if (i, r) in anchor:
            raise ScenarioError(f"{where}: duplicate entry ({i}, {r})")
        anchor[i, r] = R.poly(p, M, where)
    structure = {}
    for n, (k, i, j, p) in enumerate(R.entries(alg.get("structure", []), 3, "algebroid.structure")):
        where = f"algebroid.structure[{n}]"
        if (k, i, j) in structure:
            raise ScenarioError(f"{where}: duplicate entry ({k}, {i}, {j})")
        structure[k, i, j] = R.poly(p, M, where)
    try:
        L = AlgebroidChart(M, tuple(indices), tuple(kernel), anchor, structure)
    except AlgebraError as exc:
        raise ScenarioError(f"algebroid: {exc}") from None
    fib = R.need(doc, "fibration", "document", dict)
    xs = R.names(R.need(fib, "coords", "fibration"), "fibration.coords")
    clash = set(xs) & set(base)
    if clash:
        raise ScenarioError(f"fibration.coords: names shared with base: {sorted(clash)}")
    X = even_gens(xs)
    J = {}
    for r, p in (fib.get("J") or {}).items():
        J[r] = R.poly(p, X, f"fibration.J.{r}")
    action = {}
    for n, (i, a, p) in enumerate(R.entries(doc.get("action", []), 2, "action")):
        if (i, a) in action:
            raise ScenarioError(f"action[{n}]: duplicate entry ({i}, {a})")
        action[i, a] = R.poly(p, X, f"action[{n}]")
    order = {a: n for n, a in enumerate(X.names)}
    upper, lower = {}, {}
    for n, (a, b, p) in enumerate(R.entries(doc.get("poisson", []), 2, "poisson")):
        where = f"poisson[{n}]"
        if a not in order or b not in order:
            raise ScenarioError(f"{where}: undeclared coordinate in ({a}, {b})")
        if a == b:
            raise ScenarioError(f"{where}: diagonal entry")
        target = upper if order[a] < order[b] else lower
        key = (a, b) if order[a] < order[b] else (b, a)
        if key in target:
            raise ScenarioError(f"{where}: duplicate entry")
        target[key] = (R.poly(p, X, where), where)
    poisson = {k: v for k, (v, _) in upper.items()}
    for key, (p, where) in lower.items():
        if key not in upper or upper[key][0] != -p:
            raise ScenarioError(
                f"{where}: lower-triangular entry must repeat the negated upper entry ({key[0]}, {key[1]})"
            )
    moment = {}
    for al, p in (doc.get("moment") or {}).items():
        moment[al] = R.poly(p, X, f"moment.{al}")
    try:
        S = SigmaData(L, X, J, action, poisson, moment)
    except AlgebraError as exc:
        raise ScenarioError(str(exc)) from None
    trivs = []
    for n, t in enumerate(doc.get("trivializations", []) or []):
        trivs.append(_triv_in(R, t, M, X, f"trivializations[{n}]"))
    glx = None
    if "glx_transitions" in doc:
        g = doc["glx_transitions"]
        labels = tuple(R.labels(R.need(g, "labels", "glx_transitions"), "glx_transitions.labels"))
        pairs = []
        for n, pr in enumerate(R.need(g, "pairs", "glx_transitions", list)):
            if not (isinstance(pr, list) and len(pr) == 2 and all(isinstance(x, str) for x in pr)):
                raise ScenarioError(f"glx_transitions.pairs[{n}]: expected two names")
            pairs.append(tuple(pr))
        conn = {}
        for n, (r, A, B, p) in enumerate(R.entries(g.get("connection", []), 3, "glx_transitions.connection")):
            conn[r, A, B] = R.poly(p, M, f"glx_transitions.connection[{n}]")
        glx = GlxTransitions(labels, pairs, ConnectionData(M, labels, conn))
    expect = doc.get("expect") or {}
    if not isinstance(expect, dict) or not all(v in ("pass", "fail") for v in expect.values()):
        raise ScenarioError("expect: verdicts must be 'pass' or 'fail'")
    sc = Scenario(name, S, doc.get("description", ""), trivs, glx, dict(expect))
    if glx is not None:
        for a, b in glx.pairs:
            sc.trivialization(a), sc.trivialization(b)
    return sc


def _triv_in(R: _Reader, t, M, X, where) -> Trivialization:
    if not isinstance(t, dict):
        raise ScenarioError(f"{where}: expected an object")
    name = R.need(t, "name", where, str)

    def pmap(key, gens):
        return {k: R.poly(p, gens, f"{where}.{key}.{k}") for k, p in (t.get(key) or {}).items()}

    def pmat(key):
        return {(i, j): R.poly(p, M, f"{where}.{key}")
                for i, j, p in R.entries(t.get(key, []), 2, f"{where}.{key}")}

    has_x = "x_map" in t
    try:
        return Trivialization(
            M,
            X if has_x else None,
            pmap("x_map", X), pmap("x_inv", X),
            pmap("base_map", M), pmap("base_inv", M),
            pmat("frame"), pmat("frame_inv"),
            pmap("fibration", X),
            tuple(t.get("fiber_labels", ())),
            pmat("fiber"), pmat("fiber_inv"),
            name,
        )
    except AlgebraError as exc:
        raise ScenarioError(f"{where}: {exc}") from None
