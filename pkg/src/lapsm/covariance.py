"""Changes of trivialization for the BV target and for gl(X).

Primed objects reuse the generator and index names of the unprimed chart,
so a change of chart is a substitution ``primed name -> polynomial in the
unprimed coordinates``.

Matrix conventions: ``frame[i, j]`` is ``T^{i'}_j(m)`` and
``frame_inv[j, i]`` is ``T^{-1 j}_{i'}(m')`` as a function of the primed
base point, so that ``T(m) T^{-1}(Phi(m)) = 1``.  The same holds for the
fiber transition ``fiber`` / ``fiber_inv`` of a vector bundle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping

from .algebroid import AlgebroidChart
from .bv import B_name, Gamma_name, GradedTarget, beta_name, build_theta, graded_target
from .galgebra import AlgebraError, Generator, GeneratorSet, GPoly, deriv, odd_bracket, substitute
from .paction import SigmaData, eta_name, gamma_name
from .report import IdentityReport

Matrix = Mapping[tuple[str, str], GPoly]


def _subs(p: GPoly, mapping: Mapping[str, GPoly], target: GeneratorSet) -> GPoly:
    if not mapping:
        return p.embed(target) if p.gens != target else p
    return substitute(p, mapping, target, check=False)


def _entry(M: Matrix, i, j, zero: GPoly) -> GPoly:
    return M.get((i, j)) or zero


def mat_mul(A: Matrix, B: Matrix, labels, zero: GPoly) -> dict:
    out = {}
    for i in labels:
        for j in labels:
            acc = zero
            for k in labels:
                a = A.get((i, k))
                b = B.get((k, j))
                if a is not None and b is not None:
                    acc = acc + a * b
            if acc.terms:
                out[i, j] = acc
    return out


def mat_subs(A: Matrix, mapping, target: GeneratorSet) -> dict:
    return {k: _subs(p, mapping, target) for k, p in A.items()}


def identity_matrix(labels, gens: GeneratorSet) -> dict:
    return {(i, i): gens.one() for i in labels}


@dataclass(frozen=True, eq=False)
class Trivialization:
    """A change of chart on ``X`` and ``M`` with frame (and optionally
    fiber) transition matrices, all polynomial with polynomial inverses.

    ``fibration`` is ``J'`` in the primed chart; it is part of the input.
    """

    base: GeneratorSet
    x_gens: GeneratorSet | None = None
    x_map: Mapping[str, GPoly] = field(default_factory=dict)
    x_inv: Mapping[str, GPoly] = field(default_factory=dict)
    base_map: Mapping[str, GPoly] = field(default_factory=dict)
    base_inv: Mapping[str, GPoly] = field(default_factory=dict)
    frame: Matrix = field(default_factory=dict)
    frame_inv: Matrix = field(default_factory=dict)
    fibration: Mapping[str, GPoly] = field(default_factory=dict)
    fiber_labels: tuple[str, ...] = ()
    fiber: Matrix = field(default_factory=dict)
    fiber_inv: Matrix = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        M = self.base
        for r in M.names:
            for which in (self.base_map, self.base_inv):
                if r not in which:
                    raise AlgebraError(f"base change misses coordinate {r!r}")
        for part, gens in (
            (self.base_map, M), (self.base_inv, M), (self.frame, M),
            (self.frame_inv, M), (self.fiber, M), (self.fiber_inv, M),
        ):
            for k, p in part.items():
                if p.gens != gens:
                    raise AlgebraError(f"entry {k} is not a polynomial on the base")
        if self.x_gens is not None:
            for a in self.x_gens.names:
                if a not in self.x_map or a not in self.x_inv:
                    raise AlgebraError(f"change of X misses coordinate {a!r}")
            for part in (self.x_map, self.x_inv, self.fibration):
                for k, p in part.items():
                    if p.gens != self.x_gens:
                        raise AlgebraError(f"entry {k} is not a polynomial on X")

    # pieces -----------------------------------------------------------
    def T(self, i, j) -> GPoly:
        return _entry(self.frame, i, j, self.base.zero())

    def Tinv(self, i, j) -> GPoly:
        return _entry(self.frame_inv, i, j, self.base.zero())

    def phi(self, p: GPoly) -> GPoly:
        """``p o Phi`` for a polynomial in the primed base coordinates."""
        return _subs(p, dict(self.base_map), self.base)

    def phi_inv(self, p: GPoly) -> GPoly:
        return _subs(p, dict(self.base_inv), self.base)

    def F(self, p: GPoly) -> GPoly:
        """``p o F`` for a polynomial in the primed coordinates of X."""
        return _subs(p, dict(self.x_map), self.x_gens)

    def F_inv(self, p: GPoly) -> GPoly:
        return _subs(p, dict(self.x_inv), self.x_gens)

    def __eq__(self, other):
        return isinstance(other, Trivialization) and all(
            getattr(self, k) == getattr(other, k)
            for k in ("base", "x_gens", "x_map", "x_inv", "base_map", "base_inv",
                      "frame", "frame_inv", "fibration", "fiber_labels", "fiber",
                      "fiber_inv", "name")
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ConnectionData:
    """Local connection 1-form ``A_r^A_B(m)``, keyed ``(r, A, B)``."""

    base: GeneratorSet
    labels: tuple[str, ...]
    matrices: Mapping[tuple[str, str, str], GPoly] = field(default_factory=dict)

    def A(self, r) -> dict:
        return {(a, b): p for (rr, a, b), p in self.matrices.items() if rr == r}

    def __eq__(self, other):
        return (
            isinstance(other, ConnectionData)
            and self.labels == other.labels
            and {k: v for k, v in self.matrices.items() if v.terms}
            == {k: v for k, v in other.matrices.items() if v.terms}
        )

    __hash__ = None


def identity_trivialization(S: SigmaData, name: str = "identity") -> Trivialization:
    M = S.algebroid.base
    X = S.x_gens
    return Trivialization(
        base=M,
        x_gens=X,
        x_map={a: X.var(a) for a in X.names},
        x_inv={a: X.var(a) for a in X.names},
        base_map={r: M.var(r) for r in M.names},
        base_inv={r: M.var(r) for r in M.names},
        frame=identity_matrix(S.algebroid.indices, M),
        frame_inv=identity_matrix(S.algebroid.indices, M),
        fibration=dict(S.fibration),
        name=name,
    )


def compose(tr2: Trivialization, tr1: Trivialization, name: str = "") -> Trivialization:
    """``tr2 o tr1``: first ``tr1``, then ``tr2``."""
    if tr1.base != tr2.base or tr1.x_gens != tr2.x_gens:
        raise AlgebraError("trivializations are not composable")
    M = tr1.base
    z = M.zero()
    X = tr1.x_gens
    x_map = {a: tr1.F(p) for a, p in tr2.x_map.items()} if X is not None else {}
    x_inv = {a: tr2.F_inv(p) for a, p in tr1.x_inv.items()} if X is not None else {}
    base_map = {r: tr1.phi(p) for r, p in tr2.base_map.items()}
    base_inv = {r: tr2.phi_inv(p) for r, p in tr1.base_inv.items()}
    labels = sorted({k for key in tr1.frame for k in key} | {k for key in tr2.frame for k in key})
    frame = mat_mul(mat_subs(tr2.frame, dict(tr1.base_map), M), tr1.frame, labels, z)
    frame_inv = mat_mul(mat_subs(tr1.frame_inv, dict(tr2.base_inv), M), tr2.frame_inv, labels, z)
    if tr1.fiber_labels != tr2.fiber_labels:
        raise AlgebraError("fiber labels differ")
    fl = tr1.fiber_labels
    fiber = mat_mul(mat_subs(tr2.fiber, dict(tr1.base_map), M), tr1.fiber, fl, z)
    fiber_inv = mat_mul(mat_subs(tr1.fiber_inv, dict(tr2.base_inv), M), tr2.fiber_inv, fl, z)
    return Trivialization(M, X, x_map, x_inv, base_map, base_inv, frame, frame_inv,
                          dict(tr2.fibration), fl, fiber, fiber_inv,
                          name or f"{tr2.name}*{tr1.name}")


def validate_trivialization(tr: Trivialization, S: SigmaData | None = None) -> IdentityReport:
    rep = IdentityReport()
    M = tr.base
    for r in M.names:
        rep.add("base_inverse", (r, "left"), tr.phi(tr.base_inv[r]) - M.var(r))
        rep.add("base_inverse", (r, "right"), tr.phi_inv(tr.base_map[r]) - M.var(r))
    if tr.x_gens is not None:
        X = tr.x_gens
        for a in X.names:
            rep.add("x_inverse", (a, "left"), tr.F(tr.x_inv[a]) - X.var(a))
            rep.add("x_inverse", (a, "right"), tr.F_inv(tr.x_map[a]) - X.var(a))
    for mats, inv, labels, ident in (
        (tr.frame, tr.frame_inv, _frame_labels(tr, S), "frame_inverse"),
        (tr.fiber, tr.fiber_inv, tr.fiber_labels, "fiber_inverse"),
    ):
        if not labels:
            continue
        inv_at = mat_subs(inv, dict(tr.base_map), M)
        for order, prod_ in (("left", mat_mul(mats, inv_at, labels, M.zero())),
                             ("right", mat_mul(inv_at, mats, labels, M.zero()))):
            for i in labels:
                for j in labels:
                    want = M.one() if i == j else M.zero()
                    rep.add(ident, (i, j, order), prod_.get((i, j), M.zero()) - want)
    if S is not None:
        L = S.algebroid
        for k in L.complement:
            for al in L.kernel:
                rep.add("kernel_preserved", (k, al), tr.T(k, al))
        X = S.x_gens
        if tr.x_gens != X:
            rep.add("charts_match", (), ok=False, detail="trivialization built on other coordinates")
            return rep
        for r in L.coords:
            lhs = tr.F(tr.fibration[r]) if r in tr.fibration else X.zero()
            rhs = S.pullback(tr.base_map[r])
            rep.add("fibration_compatible", (r,), lhs - rhs)
    return rep


def _frame_labels(tr, S):
    if S is not None:
        return S.algebroid.indices
    return tuple(sorted({k for key in tr.frame for k in key}))


# ---------------------------------------------------------------------------
# coordinate-change laws on the BV target

def _on_x(S: SigmaData, tr: Trivialization, p: GPoly, primed: bool) -> GPoly:
    """A base function pulled back to X through ``J`` (unprimed argument) or
    through ``J' o F`` (primed argument)."""
    if not S.algebroid.coords:
        return p.embed(S.x_gens)
    if primed:
        return tr.F(_subs(p, dict(tr.fibration), S.x_gens))
    return S.pullback(p)


def transform_coords(G: GradedTarget, S: SigmaData, tr: Trivialization,
                     drop_eta_corrections: bool = False) -> dict[str, GPoly]:
    """Primed target coordinates as polynomials in the unprimed ones."""
    L = S.algebroid
    kern = L.kernel
    lift = G.lift
    X = S.x_coords
    out = {}
    for a in X:
        out[a] = lift(tr.x_map[a])
    Tinv = {(j, i): lift(_on_x(S, tr, p, True)) for (j, i), p in tr.frame_inv.items()}
    T = {(i, j): lift(_on_x(S, tr, p, False)) for (i, j), p in tr.frame.items()}
    z = G.gens.zero()
    for i in L.indices:
        acc = z
        for j in L.indices:
            t = Tinv.get((j, i))
            if t is not None:
                acc = acc + t * G.beta(j)
        out[beta_name(i)] = acc
    for al in kern:
        acc = z
        for be in kern:
            t = Tinv.get((be, al))
            if t is not None:
                acc = acc + t * G.B(be)
        out[B_name(al)] = acc
    for i in L.indices:
        acc = z
        for j in L.indices:
            t = T.get((i, j))
            if t is not None:
                acc = acc + t * G.gamma(j)
        out[gamma_name(i)] = acc
    for al in kern:
        acc = z
        for be in kern:
            t = T.get((al, be))
            if t is not None:
                acc = acc + t * G.Gamma(be)
        out[Gamma_name(al)] = acc
    # d_{a'} F^{-1 b} evaluated at F(xi)
    dFinv = {
        (a, b): lift(tr.F(deriv(tr.x_inv[b], a))) for a in X for b in X
    }
    corr = {}
    for b in X:
        acc = G.gens.var(eta_name(b))
        if not drop_eta_corrections:
            for r in L.coords:
                dJ = deriv(S.J(r), b)
                if not dJ.terms:
                    continue
                dT = {key: lift(_on_x(S, tr, deriv(p, r), False)) for key, p in tr.frame.items()}
                dJl = lift(dJ)
                for (k, j), dt in dT.items():
                    if not dt.terms:
                        continue
                    for i in L.indices:
                        t = Tinv.get((i, k))
                        if t is not None:
                            acc = acc + t * dJl * dt * G.beta(i) * G.gamma(j)
                    if k in kern and j in kern:
                        for al in kern:
                            t = Tinv.get((al, k))
                            if t is not None:
                                acc = acc + t * dJl * dt * G.B(al) * G.Gamma(j)
        corr[b] = acc
    for a in X:
        acc = z
        for b in X:
            c = dFinv[a, b]
            if c.terms:
                acc = acc + c * corr[b]
        out[eta_name(a)] = acc
    return out


def transform_structure(S: SigmaData, tr: Trivialization) -> SigmaData:
    """Anchor, structure functions, action, bivector and moment map in the
    primed chart."""
    L = S.algebroid
    M = L.base
    Xg = S.x_gens
    X = S.x_coords
    I = L.indices
    kern = L.kernel
    zM = M.zero()
    Tinv_m = {k: tr.phi(p) for k, p in tr.frame_inv.items()}  # T^-1(Phi(m))
    anchor = {}
    for i in I:
        for r in L.coords:
            acc = zM
            for s in L.coords:
                dphi = deriv(tr.base_map[r], s)
                if not dphi.terms:
                    continue
                for j in I:
                    t = Tinv_m.get((j, i))
                    if t is not None:
                        acc = acc + dphi * t * L.rho(j, s)
            if acc.terms:
                anchor[i, r] = tr.phi_inv(acc)
    # T^-1 rho(T) terms: rho_l^r d_r T^{h'}_m
    dT = {}
    for (h, m), p in tr.frame.items():
        acc = {}
        for l in I:
            v = zM
            for r in L.coords:
                rho = L.anchor.get((l, r))
                if rho is not None:
                    d = deriv(p, r)
                    if d.terms:
                        v = v + rho * d
            if v.terms:
                acc[l] = v
        dT[h, m] = acc
    structure = {}
    for k in I:
        for i in I:
            for j in I:
                acc = zM
                for n in I:
                    Tkn = tr.frame.get((k, n))
                    if Tkn is None:
                        continue
                    for l in I:
                        t1 = Tinv_m.get((l, i))
                        if t1 is None:
                            continue
                        for m in I:
                            t2 = Tinv_m.get((m, j))
                            if t2 is None:
                                continue
                            inner = L.f(n, l, m)
                            for h in I:
                                t3 = Tinv_m.get((n, h))
                                if t3 is None:
                                    continue
                                a = dT.get((h, m), {}).get(l)
                                if a is not None:
                                    inner = inner - t3 * a
                                b = dT.get((h, l), {}).get(m)
                                if b is not None:
                                    inner = inner + t3 * b
                            if inner.terms:
                                acc = acc + Tkn * t1 * t2 * inner
                if acc.terms:
                    structure[k, i, j] = tr.phi_inv(acc)
    L2 = AlgebroidChart(M, I, kern, anchor, structure)
    zX = Xg.zero()
    TinvX = {k: _on_x(S, tr, p, True) for k, p in tr.frame_inv.items()}
    action = {}
    for i in I:
        for a in X:
            acc = zX
            for b in X:
                dF = deriv(tr.x_map[a], b)
                if not dF.terms:
                    continue
                for j in I:
                    t = TinvX.get((j, i))
                    if t is not None:
                        acc = acc + dF * t * S.u(j, b)
            if acc.terms:
                action[i, a] = tr.F_inv(acc)
    poisson = {}
    for a, b in combinations(X, 2):
        acc = zX
        for (c, d), p in S.poisson.items():
            fac = (deriv(tr.x_map[a], c) * deriv(tr.x_map[b], d)
                   - deriv(tr.x_map[a], d) * deriv(tr.x_map[b], c))
            if fac.terms:
                acc = acc + fac * p
        if acc.terms:
            poisson[a, b] = tr.F_inv(acc)
    moment = {}
    for al in kern:
        acc = zX
        for be in kern:
            t = TinvX.get((be, al))
            if t is not None:
                acc = acc + t * S.mu(be)
        if acc.terms:
            moment[al] = tr.F_inv(acc)
    return SigmaData(L2, Xg, dict(tr.fibration), action, poisson, moment)


def theta_invariance_residual(S: SigmaData, tr: Trivialization,
                              drop_eta_corrections: bool = False) -> GPoly:
    """``Theta'`` written in the unprimed coordinates minus ``Theta``."""
    G = graded_target(S)
    S2 = transform_structure(S, tr)
    theta2 = build_theta(S2, G)
    sub = transform_coords(G, S, tr, drop_eta_corrections)
    return substitute(theta2, sub, G.gens) - build_theta(S, G)


def canonicality_report(G: GradedTarget, sub: Mapping[str, GPoly]) -> IdentityReport:
    """The substitution preserves the odd bracket on all coordinate pairs."""
    rep = IdentityReport()
    names = G.gens.names
    for n, a in enumerate(names):
        for b in names[n:]:
            lhs = odd_bracket(sub[a], sub[b], G.pairing)
            rhs = odd_bracket(G.var(a), G.var(b), G.pairing)
            rep.add("canonical", (a, b), lhs - rhs)
    return rep


def covariance_report(S: SigmaData, tr: Trivialization) -> IdentityReport:
    from .paction import validate_sigma

    rep = validate_trivialization(tr, S)
    if not rep.passed:
        return rep
    G = graded_target(S)
    rep.extend(canonicality_report(G, transform_coords(G, S, tr)))
    S2 = transform_structure(S, tr)
    v = validate_sigma(S2)
    rep.add("transformed_validates", (tr.name,), ok=v.passed, detail=v.summary())
    rep.add("theta_invariance", (tr.name,), theta_invariance_residual(S, tr))
    return rep


# ---------------------------------------------------------------------------
# gl(X)

def glx_name_mu(r: str) -> str:
    return f"mu_{r}"


def glx_name_alpha(A: str, B: str) -> str:
    return f"alpha_{A}_{B}"


def glx_generators(base: GeneratorSet, labels) -> GeneratorSet:
    gens = list(base)
    gens += [Generator(glx_name_mu(r), 0, "fiber") for r in base.names]
    gens += [Generator(glx_name_alpha(A, B), 0, "fiber") for A in labels for B in labels]
    return GeneratorSet(gens)


def glx_law(tr: Trivialization, gens: GeneratorSet | None = None) -> dict[str, GPoly]:
    """Primed gl(X) coordinates ``(m', mu', alpha')`` in terms of unprimed."""
    M = tr.base
    labels = tr.fiber_labels
    gens = glx_generators(M, labels) if gens is None else gens
    lift = lambda p: p.embed(gens)
    out = {}
    for r in M.names:
        out[r] = lift(tr.base_map[r])
    for r in M.names:
        acc = gens.zero()
        for s in M.names:
            d = deriv(tr.base_map[r], s)
            if d.terms:
                acc = acc + lift(d) * gens.var(glx_name_mu(s))
        out[glx_name_mu(r)] = acc
    inv_at = {k: lift(tr.phi(p)) for k, p in tr.fiber_inv.items()}
    Th = {k: lift(p) for k, p in tr.fiber.items()}
    for A in labels:
        for B in labels:
            acc = gens.zero()
            for C in labels:
                ti = inv_at.get((C, B))
                if ti is None:
                    continue
                for r in M.names:
                    d = deriv(tr.fiber.get((A, C)) or M.zero(), r)
                    if d.terms:
                        acc = acc + lift(d) * ti * gens.var(glx_name_mu(r))
                for D in labels:
                    t = Th.get((A, D))
                    if t is not None:
                        acc = acc + t * gens.var(glx_name_alpha(D, C)) * ti
            out[glx_name_alpha(A, B)] = acc
    return out


def connection_law(tr: Trivialization, conn: ConnectionData) -> ConnectionData:
    """Transformed connection as a function of the primed base point."""
    M = tr.base
    labels = tr.fiber_labels
    z = M.zero()
    inv_at = {k: tr.phi(p) for k, p in tr.fiber_inv.items()}
    out = {}
    for rp in M.names:
        for A in labels:
            for B in labels:
                acc = z
                for s in M.names:
                    c = tr.phi(deriv(tr.base_inv[s], rp))
                    if not c.terms:
                        continue
                    inner = z
                    for C in labels:
                        ti = inv_at.get((C, B))
                        if ti is None:
                            continue
                        d = deriv(tr.fiber.get((A, C)) or z, s)
                        if d.terms:
                            inner = inner - d * ti
                        for D in labels:
                            t = tr.fiber.get((A, D))
                            a = conn.matrices.get((s, D, C))
                            if t is not None and a is not None:
                                inner = inner + t * a * ti
                    if inner.terms:
                        acc = acc + c * inner
                if acc.terms:
                    out[rp, A, B] = tr.phi_inv(acc)
    return ConnectionData(M, labels, out)


def alpha_bar(conn: ConnectionData, gens: GeneratorSet) -> dict[tuple[str, str], GPoly]:
    """``A_r mu^r + alpha`` over the gl(X) generators."""
    out = {}
    for A in conn.labels:
        for B in conn.labels:
            acc = gens.var(glx_name_alpha(A, B))
            for r in conn.base.names:
                a = conn.matrices.get((r, A, B))
                if a is not None:
                    acc = acc + a.embed(gens) * gens.var(glx_name_mu(r))
            out[A, B] = acc
    return out


def glx_transition_check(tr1: Trivialization, tr2: Trivialization,
                         conn: ConnectionData | None = None) -> IdentityReport:
    """Cocycle property of the gl(X) and connection laws under
    ``tr2 o tr1`` and tensoriality of ``alpha-bar``."""
    if tr1.base != tr2.base or tr1.fiber_labels != tr2.fiber_labels:
        raise AlgebraError("trivializations are not composable")
    M = tr1.base
    labels = tr1.fiber_labels
    gens = glx_generators(M, labels)
    if conn is None:
        conn = ConnectionData(M, labels, {})
    rep = IdentityReport()
    for name, tr in (("first", tr1), ("second", tr2)):
        v = validate_trivialization(tr)
        rep.add("transition_valid", (name,), ok=v.passed, detail=v.summary())
    if not rep.passed:
        return rep
    comp = compose(tr2, tr1)
    l1, l2, l12 = glx_law(tr1, gens), glx_law(tr2, gens), glx_law(comp, gens)
    for n in gens.names:
        rep.add("glx_cocycle", (n,), substitute(l2[n], l1, gens, check=False) - l12[n])
    c1 = connection_law(tr1, conn)
    c12 = connection_law(tr2, c1)
    cc = connection_law(comp, conn)
    for r in M.names:
        for A in labels:
            for B in labels:
                lhs = c12.matrices.get((r, A, B)) or M.zero()
                rhs = cc.matrices.get((r, A, B)) or M.zero()
                rep.add("connection_cocycle", (r, A, B), lhs - rhs)
    for name, tr, c_in, c_out in (("first", tr1, conn, c1), ("second", tr2, c1, c12)):
        law = glx_law(tr, gens)
        # alpha-bar built from primed data, written in unprimed coordinates
        ab_primed = alpha_bar(c_out, gens)
        lhs = {k: substitute(p, law, gens, check=False) for k, p in ab_primed.items()}
        ab = alpha_bar(c_in, gens)
        Th = {k: p.embed(gens) for k, p in tr.fiber.items()}
        inv_at = {k: tr.phi(p).embed(gens) for k, p in tr.fiber_inv.items()}
        rhs = mat_mul(mat_mul(Th, ab, labels, gens.zero()), inv_at, labels, gens.zero())
        for A in labels:
            for B in labels:
                rep.add("alpha_bar_tensorial", (name, A, B),
                        lhs[A, B] - rhs.get((A, B), gens.zero()))
    return rep
