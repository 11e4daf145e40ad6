import pytest

from lapsm.cohomology import (
    CapTooLarge,
    Cochain,
    CochainSpace,
    Defect,
    EQUATION_BLOCKS,
    apply_delta_bar,
    closure_residual_explicit,
    compare_routes,
    decode,
    encode,
    random_cochains,
    solve_cohomology,
)
from lapsm.galgebra import AlgebraError

from conftest import cached_preset
from oracles import degree0_cocycle_dimension, levi_civita_so3, sigma_to_sympy


def space(name):
    return CochainSpace(cached_preset(name).sigma)


@pytest.mark.parametrize("degree", [0, 1, 2])
def test_encode_decode_round_trip(scenario, degree):
    sp_ = CochainSpace(scenario.sigma)
    for c in random_cochains(sp_, degree, 2, 10, seed=degree):
        assert decode(encode(c, sp_), sp_, degree) == c


def test_symmetric_kernel_indices_carry_the_multiplicity():
    sp_ = space("so3")
    X = sp_.S.x_gens
    c = Cochain(2, {(0, 1, 0): {((), ("1",), ()): X.one()}})
    F = encode(c, sp_)
    assert F == sp_.G.Gamma("1")
    c4 = Cochain(4, {(0, 2, 0): {((), ("1", "1"), ()): X.one()}})
    assert encode(c4, sp_) == (sp_.G.Gamma("1") * sp_.G.Gamma("1")) / 2
    assert decode(encode(c4, sp_), sp_) == c4


def test_decode_reports_defects():
    sp_ = space("glx_so3")
    G = sp_.G
    assert isinstance(sp_.decode(G.beta("1")), Defect)
    d = sp_.decode(G.eta("x0"))
    assert isinstance(d, Defect) and "tangential" in d.reason
    with pytest.raises(AlgebraError, match="tangential"):
        sp_.encode(Cochain(1, {(0, 0, 1): {((), (), ("x0",)): sp_.S.x_gens.one()}}))


def test_non_canonical_index_is_rejected():
    sp_ = space("so3")
    c = Cochain(2, {(2, 0, 0): {(("2", "1"), (), ()): sp_.S.x_gens.one()}})
    with pytest.raises(AlgebraError, match="canonical"):
        encode(c, sp_)


@pytest.mark.parametrize("degree", [0, 1, 2])
def test_two_routes_agree(scenario, degree):
    sp_ = CochainSpace(scenario.sigma)
    for c in random_cochains(sp_, degree, 2, 10, seed=7 + degree):
        rep = compare_routes(c, sp_)
        assert rep.passed, rep.summary()


def test_explicit_equations_cover_every_block():
    sp_ = space("so3")
    c = random_cochains(sp_, 2, 1, 1, seed=3)[0]
    ids = set(closure_residual_explicit(c, sp_).identities())
    assert ids <= set(EQUATION_BLOCKS[2])


def test_named_fields_round_trip():
    sp_ = space("abelian_b")
    X = sp_.S.x_gens
    x1, x3 = X.var("x1"), X.var("x3")
    c = sp_.from_fields(2, Q={("x2", "x1"): x3}, v={("1", "x3"): x1}, tau={("1", "2"): x1}, nu={"2": x3})
    f = sp_.fields(c)
    assert f["Q"]["x1", "x2"] == -x3
    assert f["v"]["1", "x3"] == x1
    assert f["tau"]["1", "2"] == x1
    assert f["nu"]["2"] == x3


def test_so3_degree0_against_sympy_oracle():
    x, P, u = levi_civita_so3()
    assert degree0_cocycle_dimension(x, P, u, 2) == 2
    res = solve_cohomology(space("so3"), 0, 2)
    assert res.dimension == 2


def test_degree0_dimension_against_oracle(scenario):
    x, P, u = sigma_to_sympy(scenario.sigma)
    res = solve_cohomology(CochainSpace(scenario.sigma), 0, 2)
    assert res.dimension == degree0_cocycle_dimension(x, P, u, 2)


@pytest.mark.parametrize("degree", [1, 2])
def test_solver_output_is_closed(scenario, degree):
    sp_ = CochainSpace(scenario.sigma)
    res = solve_cohomology(sp_, degree, 1)
    for c in res.cocycles + res.coboundaries:
        assert apply_delta_bar(c, sp_).is_zero()
    assert 0 <= res.dimension <= len(res.cocycles)


def test_so3_degree1_cocycles_are_coboundaries_or_casimir_flows():
    res = solve_cohomology(space("so3"), 1, 2)
    # every degree-1 cocycle at this cap is exact
    assert res.dimension == 0
    assert res.as_dict()["cocycle_dimension"] == len(res.cocycles)


def test_cap_budget():
    with pytest.raises(CapTooLarge):
        solve_cohomology(space("glx_so3"), 2, 12)


def test_solver_rejects_bad_arguments():
    with pytest.raises(AlgebraError):
        solve_cohomology(space("so3"), 3, 1)
    with pytest.raises(AlgebraError):
        solve_cohomology(space("so3"), 0, -1)
