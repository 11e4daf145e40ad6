import pytest

from lapsm.algebroid import AlgebroidChart
from lapsm.bv import (
    build_pi,
    build_theta,
    bv_variations,
    compare_variations,
    graded_target,
    master_residual,
    pi_poisson_residual,
)
from lapsm.galgebra import AlgebraError
from lapsm.paction import SigmaData, validate_sigma
from lapsm.scenarios import even_gens, perturb_case_a, preset_extremal_a

from conftest import cached_preset


def test_theta_degree_and_master_equation(scenario):
    S = scenario.sigma
    G = graded_target(S)
    theta = build_theta(S, G)
    assert theta.degrees() == {2}
    assert master_residual(theta, G).is_zero()


def test_case_a_theta_shape():
    S = cached_preset("case_a").sigma
    G = graded_target(S)
    g1, g2, b1 = G.gamma("1"), G.gamma("2"), G.beta("1")
    e1, e2 = G.eta("x1"), G.eta("x2")
    x1 = G.var("x1")
    # u_1 = d1, u_2 = x1 d1 + d2, f^1_12 = -f^1_21 = 1
    expected = e1 * g1 + (x1 * e1 + e2) * g2 - b1 * g1 * g2
    assert build_theta(S, G) == expected


def test_abelian_extremal_case_leaves_only_the_auxiliary_term():
    M = even_gens(("m1", "m2"))
    L = AlgebroidChart(M, ("1", "2"), ("1", "2"), {}, {})
    S = preset_extremal_a(L).sigma
    G = graded_target(S)
    assert build_theta(S, G) == G.beta("1") * G.Gamma("1") + G.beta("2") * G.Gamma("2")
    assert validate_sigma(S).passed


def test_variations_match_closed_forms(scenario):
    rep = compare_variations(scenario.sigma)
    assert rep.passed, rep.summary()
    assert len(rep.identities()) == 6


def test_hamiltonian_field_is_nilpotent(scenario):
    S = scenario.sigma
    G = graded_target(S)
    Q = bv_variations(build_theta(S, G), G)
    assert Q.commutator(Q).is_zero()


def test_target_bivector(scenario):
    S = scenario.sigma
    G = graded_target(S)
    Pi = build_pi(S, G)
    assert pi_poisson_residual(Pi).is_zero()
    theta = build_theta(S, G)
    rest = theta
    for al in S.algebroid.kernel:
        rest = rest - G.lift(S.mu(al)) * G.Gamma(al) - G.beta(al) * G.Gamma(al)
    assert Pi.hamiltonian() == rest
    for (A, B) in Pi.components:
        assert Pi[B, A] == -Pi[A, B]


@pytest.mark.parametrize("seed", range(5))
def test_broken_data_breaks_master_equation(seed):
    S = perturb_case_a(seed).sigma
    G = graded_target(S)
    res = master_residual(build_theta(S, G), G)
    assert not res.is_zero()
    assert res.degrees() == {3}


def test_name_clash_is_reported():
    M = even_gens(())
    L = AlgebroidChart(M, ("1",), (), {}, {})
    X = even_gens(("beta_1",))
    S = SigmaData(L, X, {}, {}, {}, {})
    with pytest.raises(AlgebraError, match="clash"):
        graded_target(S)
