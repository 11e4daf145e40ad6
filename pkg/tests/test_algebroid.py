import pytest

from lapsm.algebroid import (
    AlgebroidChart,
    action_algebroid,
    adjoint_representation,
    ce_field,
    nilpotency_residual,
    trivial_representation,
    validate_algebroid,
    validate_representation,
)
from lapsm.galgebra import AlgebraError
from lapsm.scenarios import even_gens, tangent_algebroid_2d

from conftest import cached_preset


def so3():
    return cached_preset("so3").sigma.algebroid


def test_so3_and_tangent_frame_validate():
    assert validate_algebroid(so3()).passed
    assert validate_algebroid(tangent_algebroid_2d()).passed


def test_broken_jacobi_is_named():
    L = so3()
    st = dict(L.structure)
    st["1", "1", "2"] = L.base.one()
    st["1", "2", "1"] = -L.base.one()
    rep = validate_algebroid(L.with_entries(structure=st))
    assert not rep.passed
    assert {r.identity for r in rep.failures()} == {"jacobi"}


def test_broken_antisymmetry_is_named():
    L = so3()
    st = dict(L.structure)
    st["1", "2", "3"] = L.base.const(2)
    rep = validate_algebroid(L.with_entries(structure=st))
    assert [r.label for r in rep.failures()] == ["antisymmetry[1,2,3]"]


def test_anchor_must_respect_bracket():
    L = tangent_algebroid_2d()
    st = {("2", "1", "2"): L.base.one(), ("2", "2", "1"): -L.base.one()}
    rep = validate_algebroid(L.with_entries(structure=st))
    assert {r.identity for r in rep.failures()} == {"anchor_morphism"}


@pytest.mark.parametrize("make", [so3, tangent_algebroid_2d])
def test_chevalley_eilenberg_field_squares_to_zero(make):
    L = make()
    assert all(v.is_zero() for v in nilpotency_residual(ce_field(L)).values())
    assert all(v.is_zero() for v in nilpotency_residual(ce_field(L, adjoint_representation(L))).values())


def test_representations_validate():
    L = so3()
    assert validate_representation(L, trivial_representation(L)).passed
    assert validate_representation(L, adjoint_representation(L)).passed


def test_kernel_index_with_anchor_is_reported():
    M = even_gens(("m",))
    L = AlgebroidChart(M, ("1",), ("1",), {("1", "m"): M.one()}, {})
    assert [r.label for r in validate_algebroid(L).failures()] == ["kernel_anchor[1,m]"]


def test_undeclared_index_is_rejected():
    M = even_gens(("m",))
    with pytest.raises(AlgebraError):
        AlgebroidChart(M, ("1",), (), {("2", "m"): M.one()}, {})


def test_rank_jump_is_reported():
    M = even_gens(("m",))
    L = AlgebroidChart(M, ("1",), (), {("1", "m"): M.var("m")}, {})
    rep = validate_algebroid(L, points=[{"m": 0}, {"m": 1}])
    assert [r.identity for r in rep.failures()] == ["regularity"]


def test_action_algebroid_is_a_lie_algebroid():
    S = cached_preset("glx_so3").sigma
    assert validate_algebroid(action_algebroid(S.algebroid, S)).passed
