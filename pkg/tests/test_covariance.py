import pytest
import sympy as sp

from lapsm.bv import graded_target
from lapsm.covariance import (
    ConnectionData,
    Trivialization,
    canonicality_report,
    compose,
    covariance_report,
    glx_generators,
    glx_law,
    glx_name_alpha,
    glx_name_mu,
    glx_transition_check,
    identity_trivialization,
    theta_invariance_residual,
    transform_coords,
    transform_structure,
    validate_trivialization,
)
from lapsm.paction import validate_sigma

from conftest import cached_preset


def x_trivializations(sc):
    return [t for t in sc.trivializations if t.x_gens is not None]


def test_covariance_on_presets(scenario):
    for tr in x_trivializations(scenario):
        rep = covariance_report(scenario.sigma, tr)
        assert rep.passed, (tr.name, rep.summary())
        assert theta_invariance_residual(scenario.sigma, tr).is_zero()


def test_primed_data_is_again_valid(scenario):
    for tr in x_trivializations(scenario):
        assert validate_sigma(transform_structure(scenario.sigma, tr)).passed


def test_eta_corrections_are_needed_for_base_dependent_frames():
    sc = cached_preset("case_a")
    tri = sc.trivialization("triangular")
    assert not theta_invariance_residual(sc.sigma, tri, drop_eta_corrections=True).is_zero()
    rot = sc.trivialization("frame_rotation")
    # constant frames need no correction
    assert theta_invariance_residual(sc.sigma, rot, drop_eta_corrections=True).is_zero()


def test_coordinate_change_is_canonical():
    sc = cached_preset("case_a")
    S = sc.sigma
    G = graded_target(S)
    for tr in sc.trivializations:
        assert canonicality_report(G, transform_coords(G, S, tr)).passed
    broken = transform_coords(G, S, sc.trivialization("triangular"), drop_eta_corrections=True)
    assert not canonicality_report(G, broken).passed


def test_identity_and_composition():
    sc = cached_preset("case_a")
    S = sc.sigma
    assert transform_structure(S, identity_trivialization(S)) == S
    rot, tri = sc.trivializations
    both = compose(tri, rot)
    assert validate_trivialization(both, S).passed
    assert theta_invariance_residual(S, both).is_zero()
    stepwise = transform_structure(transform_structure(S, rot), tri)
    assert stepwise == transform_structure(S, both)


def test_wrong_inverse_is_reported():
    sc = cached_preset("case_a")
    tri = sc.trivialization("triangular")
    M = tri.base
    bad = Trivialization(tri.base, tri.x_gens, tri.x_map, tri.x_inv, tri.base_map, tri.base_inv,
                         tri.frame, {**tri.frame_inv, ("1", "2"): -M.var("m1")}, tri.fibration,
                         name="bad")
    rep = validate_trivialization(bad, sc.sigma)
    assert {r.identity for r in rep.failures()} == {"frame_inverse"}
    assert not covariance_report(sc.sigma, bad).passed


def test_action_law_against_sympy_pushforward():
    """u' is the pushforward of u along F with the frame rotated by T^-1."""
    sc = cached_preset("case_a")
    S = sc.sigma
    tri = sc.trivialization("triangular")
    S2 = transform_structure(S, tri)
    x1, x2 = sp.symbols("x1 x2")
    F = sp.Matrix([x1 + x2 ** 2, x2])
    Finv = {x1: x1 - x2 ** 2, x2: x2}
    u = {"1": sp.Matrix([1, 0]), "2": sp.Matrix([x1, 1])}
    Tinv = sp.Matrix([[1, -x1], [0, 1]])  # T(m)^-1 with m = J(x) = x
    jac = F.jacobian([x1, x2])
    for n, i in enumerate(("1", "2")):
        # e'_i = sum_j (T^-1)^j_i e_j, pushed forward and written at F(x)
        vec = sum((Tinv[j, n] * u[("1", "2")[j]] for j in range(2)), sp.zeros(2, 1))
        push = (jac * vec).subs(Finv, simultaneous=True)
        for a, name in enumerate(("x1", "x2")):
            mine = sp.sympify(str(S2.u(i, name)).replace("^", "**"))
            assert sp.expand(mine - push[a]) == 0


def test_glx_transitions_compose():
    sc = cached_preset("glx_so3")
    a, b = sc.glx.pairs[0]
    rep = glx_transition_check(sc.trivialization(a), sc.trivialization(b), sc.glx.connection)
    assert rep.passed, rep.summary()
    assert set(rep.identities()) >= {"glx_cocycle", "connection_cocycle", "alpha_bar_tensorial"}


def test_glx_law_against_sympy_pushforward():
    """The law for (mu, alpha) is the pushforward of the linear vector field
    mu^r d_r + alpha^A_B e^B d_A along (m, e) -> (Phi(m), Theta(m) e)."""
    sc = cached_preset("glx_so3")
    for tr in sc.trivializations:
        law = glx_law(tr)
        labels = tr.fiber_labels
        m, mu = sp.symbols("m mu_m")
        e = sp.symbols(" ".join(f"e{A}" for A in labels))
        al = sp.Matrix(3, 3, lambda i, j: sp.Symbol(glx_name_alpha(labels[i], labels[j])))
        conv = lambda p: sp.sympify(str(p).replace("^", "**"))
        Th = sp.Matrix(3, 3, lambda i, j: conv(tr.fiber.get((labels[i], labels[j])) or 0))
        phi = conv(tr.base_map["m"])
        ev = sp.Matrix(e)
        # velocity of e' = Theta(m) e along the flow
        de_prime = sp.diff(Th, m) * mu * ev + Th * al * ev
        Thinv = Th.inv()
        alpha_prime = sp.Matrix(3, 3, lambda i, j: conv(law[glx_name_alpha(labels[i], labels[j])]))
        # d e'/dt must equal alpha' e' with e' = Theta e
        assert sp.simplify(de_prime - alpha_prime * Th * ev) == sp.zeros(3, 1)
        assert sp.expand(conv(law[glx_name_mu("m")]) - sp.diff(phi, m) * mu) == 0
        assert Thinv.is_square


def test_broken_transition_fails_cocycle():
    sc = cached_preset("glx_so3")
    t1, t2 = sc.trivializations
    M = t1.base
    bad = Trivialization(M, None, base_map=t2.base_map, base_inv=t2.base_inv,
                         fiber_labels=t2.fiber_labels, fiber=t2.fiber,
                         fiber_inv={**t2.fiber_inv, ("3", "1"): M.zero()}, name="bad")
    rep = glx_transition_check(t1, bad, sc.glx.connection)
    assert not rep.passed
    assert {r.identity for r in rep.failures()} == {"transition_valid"}


def test_connection_without_matrices_is_allowed():
    sc = cached_preset("glx_so3")
    t1, t2 = sc.trivializations
    assert glx_transition_check(t1, t2, ConnectionData(t1.base, t1.fiber_labels, {})).passed
    assert glx_transition_check(t1, t2).passed
    assert len(glx_generators(t1.base, t1.fiber_labels)) == 1 + 1 + 9
