"""Target-space BV data: graded target, Hamiltonian, master equation and
the field variations it generates.

Coordinates and degrees on the target::

    xi^a   0   (the coordinates of X, under their own names)
    beta_i 0        eta_a   1
    B_al  -1        gamma^i 1
                    Gamma^al 2

with conjugate pairs (xi^a, eta_a), (beta_i, gamma^i), (B_al, Gamma^al).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .algebroid import HomologicalField
from .galgebra import AlgebraError, Generator, GeneratorSet, GPoly, OddPairing, deriv, odd_bracket
from .paction import SigmaData, eta_name, gamma_name
from .report import IdentityReport


def beta_name(i: str) -> str:
    return f"beta_{i}"


def B_name(al: str) -> str:
    return f"B_{al}"


def Gamma_name(al: str) -> str:
    return f"Gamma_{al}"


@dataclass(frozen=True, eq=False)
class GradedTarget:
    gens: GeneratorSet
    pairing: OddPairing
    x_coords: tuple[str, ...]
    indices: tuple[str, ...]
    kernel: tuple[str, ...]

    def var(self, name: str) -> GPoly:
        return self.gens.var(name)

    def xi(self, a):
        return self.gens.var(a)

    def eta(self, a):
        return self.gens.var(eta_name(a))

    def beta(self, i):
        return self.gens.var(beta_name(i))

    def gamma(self, i):
        return self.gens.var(gamma_name(i))

    def B(self, al):
        return self.gens.var(B_name(al))

    def Gamma(self, al):
        return self.gens.var(Gamma_name(al))

    def lift(self, p: GPoly) -> GPoly:
        return p.embed(self.gens)

    def positions(self) -> list[str]:
        return [q for q, _ in self.pairing.pairs]

    def momenta(self) -> list[str]:
        return [p for _, p in self.pairing.pairs]


def graded_target(S: SigmaData) -> GradedTarget:
    L = S.algebroid
    gens = list(S.x_gens)
    gens += [Generator(beta_name(i), 0, "fiber") for i in L.indices]
    gens += [Generator(B_name(al), -1, "fiber") for al in L.kernel]
    gens += [Generator(eta_name(a), 1, "momentum") for a in S.x_coords]
    gens += [Generator(gamma_name(i), 1, "momentum") for i in L.indices]
    gens += [Generator(Gamma_name(al), 2, "momentum") for al in L.kernel]
    names = [g.name for g in gens]
    if len(set(names)) != len(names):
        dup = sorted({n for n in names if names.count(n) > 1})
        raise AlgebraError(f"coordinate names clash with target generators: {dup}")
    pairs = [(a, eta_name(a)) for a in S.x_coords]
    pairs += [(beta_name(i), gamma_name(i)) for i in L.indices]
    pairs += [(B_name(al), Gamma_name(al)) for al in L.kernel]
    G = GeneratorSet(gens)
    pairing = OddPairing(tuple(pairs))
    pairing.validate(G)
    return GradedTarget(G, pairing, S.x_coords, L.indices, L.kernel)


def build_theta(S: SigmaData, G: GradedTarget | None = None) -> GPoly:
    """``u_i^a eta_a gamma^i + mu_al Gamma^al + 1/2 P^ab eta_a eta_b
    - 1/2 f^i_jk(J) beta_i gamma^j gamma^k + beta_al Gamma^al
    + f^al_{i be}(J) B_al gamma^i Gamma^be``."""
    G = graded_target(S) if G is None else G
    L = S.algebroid
    th = G.gens.zero()
    for (i, a), p in S.action.items():
        th = th + G.lift(p) * G.eta(a) * G.gamma(i)
    for al, p in S.moment.items():
        th = th + G.lift(p) * G.Gamma(al)
    for (a, b), p in S.poisson.items():
        th = th + G.lift(p) * G.eta(a) * G.eta(b)
    th = th + _structure_terms(S, G)
    for al in L.kernel:
        th = th + G.beta(al) * G.Gamma(al)
    if th.terms and th.degrees() != {2}:
        raise AlgebraError(f"Hamiltonian has degrees {sorted(th.degrees())}, expected 2")
    return th


def _structure_terms(S: SigmaData, G: GradedTarget) -> GPoly:
    L = S.algebroid
    kern = set(L.kernel)
    out = G.gens.zero()
    for (i, j, k), p in L.structure.items():
        fJ = G.lift(S.pullback(p))
        out = out - (fJ * G.beta(i) * G.gamma(j) * G.gamma(k)) / 2
        if i in kern and k in kern:
            out = out + fJ * G.B(i) * G.gamma(j) * G.Gamma(k)
    return out


def master_residual(theta: GPoly, G: GradedTarget) -> GPoly:
    """``{Theta, Theta}``."""
    return odd_bracket(theta, theta, G.pairing)


def bv_variations(theta: GPoly, G: GradedTarget) -> HomologicalField:
    """Hamiltonian field ``Q = {Theta, .}`` as a component map."""
    comps = {g.name: odd_bracket(theta, G.gens.var(g.name), G.pairing) for g in G.gens}
    return HomologicalField(G.gens, comps, 1)


def display_variations(S: SigmaData, G: GradedTarget | None = None) -> dict[str, GPoly]:
    """The variations written out in closed form, one entry per coordinate."""
    G = graded_target(S) if G is None else G
    L = S.algebroid
    X = S.x_coords
    kern = L.kernel
    lift = G.lift
    zero = G.gens.zero()
    out = {}
    for a in X:
        v = zero
        for i in L.indices:
            v = v + lift(S.u(i, a)) * G.gamma(i)
        for b in X:
            v = v + lift(S.P(a, b)) * G.eta(b)
        out[a] = v
    dJ = {(a, r): deriv(S.J(r), a) for a in X for r in L.coords}
    for a in X:
        v = zero
        for (i, b), p in S.action.items():
            v = v + lift(deriv(p, a)) * G.eta(b) * G.gamma(i)
        for al, p in S.moment.items():
            v = v + lift(deriv(p, a)) * G.Gamma(al)
        for (b, c), p in S.poisson.items():
            v = v + lift(deriv(p, a)) * G.eta(b) * G.eta(c)
        for r in L.coords:
            if not dJ[a, r].terms:
                continue
            for (i, j, k), p in L.structure.items():
                d = deriv(p, r)
                if not d.terms:
                    continue
                c = lift(dJ[a, r] * S.pullback(d))
                v = v - (c * G.beta(i) * G.gamma(j) * G.gamma(k)) / 2
                if i in kern and k in kern:
                    v = v - c * G.gamma(j) * G.B(i) * G.Gamma(k)
        out[eta_name(a)] = v
    for i in L.indices:
        v = zero
        for (k, j, l), p in L.structure.items():
            if k == i:
                v = v - (lift(S.pullback(p)) * G.gamma(j) * G.gamma(l)) / 2
        if i in kern:
            v = v + G.Gamma(i)
        out[gamma_name(i)] = v
    for i in L.indices:
        v = zero
        for (j, k, ii), p in L.structure.items():
            if ii != i:
                continue
            fJ = lift(S.pullback(p))
            v = v + fJ * G.beta(j) * G.gamma(k)
            if j in kern and k in kern:
                v = v + fJ * G.B(j) * G.Gamma(k)
        for a in X:
            v = v - lift(S.u(i, a)) * G.eta(a)
        out[beta_name(i)] = v
    for al in kern:
        v = zero
        for (k, i, be), p in L.structure.items():
            if k == al and be in kern:
                v = v - lift(S.pullback(p)) * G.gamma(i) * G.Gamma(be)
        out[Gamma_name(al)] = v
    for al in kern:
        v = zero
        for (be, i, k), p in L.structure.items():
            if k == al and be in kern:
                v = v + lift(S.pullback(p)) * G.gamma(i) * G.B(be)
        v = v - G.beta(al) - lift(S.mu(al))
        out[B_name(al)] = v
    return out


VARIATION_GROUPS = ("xi", "eta", "gamma", "beta", "Gamma", "B")


def compare_variations(S: SigmaData, theta: GPoly | None = None,
                       G: GradedTarget | None = None) -> IdentityReport:
    """Hamiltonian route against the closed forms, one record per
    coordinate, grouped by the six coordinate families."""
    G = graded_target(S) if G is None else G
    theta = build_theta(S, G) if theta is None else theta
    Q = bv_variations(theta, G)
    disp = display_variations(S, G)
    L = S.algebroid
    groups = (
        ("variation_xi", list(S.x_coords)),
        ("variation_eta", [eta_name(a) for a in S.x_coords]),
        ("variation_gamma", [gamma_name(i) for i in L.indices]),
        ("variation_beta", [beta_name(i) for i in L.indices]),
        ("variation_Gamma", [Gamma_name(al) for al in L.kernel]),
        ("variation_B", [B_name(al) for al in L.kernel]),
    )
    rep = IdentityReport()
    for ident, names in groups:
        if not names:
            rep.add(ident, (), ok=True, detail="no coordinates of this kind")
        for n in names:
            rep.add(ident, (n,), Q.component(n) - disp[n])
    return rep


# ---------------------------------------------------------------------------
# target 2-vector

@dataclass(frozen=True, eq=False)
class PiTensor:
    """Components ``Pi^{AB}`` over the positions ``(xi, beta, B)``, stored
    for ``A`` before ``B`` in position order; ``Pi^{BA} = -Pi^{AB}``."""

    target: GradedTarget
    components: Mapping[tuple[str, str], GPoly]

    def __getitem__(self, key) -> GPoly:
        A, B = key
        if (A, B) in self.components:
            return self.components[A, B]
        if (B, A) in self.components:
            return -self.components[B, A]
        return self.target.gens.zero()

    def hamiltonian(self) -> GPoly:
        """``1/2 p_A Pi^{AB} p_B`` with ``p`` the conjugate momenta."""
        G = self.target
        mom = dict(G.pairing.pairs)
        out = G.gens.zero()
        for (A, B), c in self.components.items():
            out = out + G.var(mom[A]) * c * G.var(mom[B])
        return out


def build_pi(S: SigmaData, G: GradedTarget | None = None) -> PiTensor:
    G = graded_target(S) if G is None else G
    L = S.algebroid
    kern = set(L.kernel)
    comps = {}
    for (a, b), p in S.poisson.items():
        comps[a, b] = G.lift(p)
    for (i, a), p in S.action.items():
        comps[a, beta_name(i)] = G.lift(p)
    order = {i: n for n, i in enumerate(L.indices)}
    acc: dict = {}
    for (k, i, j), p in L.structure.items():
        fJ = G.lift(S.pullback(p))
        if order[i] < order[j]:
            key = (beta_name(i), beta_name(j))
            acc[key] = acc.get(key, G.gens.zero()) - fJ * G.beta(k)
        if j in kern and k in kern:
            key = (beta_name(i), B_name(j))
            acc[key] = acc.get(key, G.gens.zero()) - fJ * G.B(k)
    for key, v in acc.items():
        if v.terms:
            comps[key] = v
    return PiTensor(G, comps)


def pi_poisson_residual(Pi: PiTensor) -> GPoly:
    """Self-bracket of the Hamiltonian built from ``Pi``."""
    h = Pi.hamiltonian()
    return odd_bracket(h, h, Pi.target.pairing)
