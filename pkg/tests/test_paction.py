import random

import pytest
import sympy as sp

from lapsm.galgebra import AlgebraError
from lapsm.paction import (
    SigmaData,
    build_double_complex,
    check_complex,
    kernel_generators,
    lichnerowicz,
    sharp,
    tangential_residual,
    validate_sigma,
)

from conftest import cached_preset


def test_presets_validate(scenario):
    rep = validate_sigma(scenario.sigma)
    assert rep.passed, rep.summary()


def test_so3_poisson_jacobi_against_sympy():
    x = sp.symbols("x1 x2 x3")
    P = sp.Matrix(3, 3, lambda a, b: sum(sp.LeviCivita(a, b, c) * x[c] for c in range(3)))
    for a, b, c in [(0, 1, 2)]:
        jac = sum(
            P[i, l] * sp.diff(P[j, k], x[l]) for (i, j, k) in ((a, b, c), (b, c, a), (c, a, b)) for l in range(3)
        )
        assert sp.expand(jac) == 0
    S = cached_preset("so3").sigma
    for a in range(3):
        for b in range(3):
            mine = S.P(f"x{a + 1}", f"x{b + 1}")
            assert sp.expand(sp.sympify(str(mine).replace("^", "**")) - P[a, b]) == 0


def test_sharp_convention():
    S = cached_preset("abelian_b").sigma
    one = S.x_gens.one()
    # P^{12} = 1, so (#dx2)^1 = -P^{12} = -1 and (#dx1)^2 = -P^{21} = 1
    assert sharp(S.poisson, {"x2": one}, S.x_coords)["x1"] == -one
    assert sharp(S.poisson, {"x1": one}, S.x_coords)["x2"] == one
    with pytest.raises(AlgebraError):
        sharp(S.poisson, {"y": one}, S.x_coords)


def test_moment_generates_kernel_action():
    S = cached_preset("abelian_b").sigma
    v = S.sharp_d(S.mu("1"))
    for a in S.x_coords:
        assert v[a] == S.u("1", a)


def test_lichnerowicz_squares_to_zero_and_kills_casimirs():
    S = cached_preset("so3").sigma
    M = S.mv_gens
    x1, x2, x3 = (M.var(n) for n in S.x_coords)
    casimir = x1 * x1 + x2 * x2 + x3 * x3
    assert lichnerowicz(S, casimir).is_zero()
    rng = random.Random(1)
    for _ in range(5):
        U = M.zero()
        for a in S.x_coords:
            U = U + M.var(f"eta_{a}") * M.const(rng.randint(-3, 3)) * M.var(rng.choice(S.x_coords))
        assert lichnerowicz(S, lichnerowicz(S, U)).is_zero()


def test_tangential_lichnerowicz_rejects_transverse_legs():
    S = cached_preset("glx_so3").sigma
    M = S.mv_gens
    U = M.var("eta_x0")
    assert tangential_residual(S, U)["m"] == M.one()
    with pytest.raises(AlgebraError, match="tangential"):
        lichnerowicz(S, U, tangential=True)


def _sympy_jacobi_fails(P, n):
    x = sp.symbols(" ".join(f"x{i + 1}" for i in range(n)))
    M = sp.zeros(n, n)
    for (a, b), p in P.items():
        i, j = int(a[1:]) - 1, int(b[1:]) - 1
        M[i, j] = sp.sympify(str(p).replace("^", "**"), locals=dict(zip(map(str, x), x)))
        M[j, i] = -M[i, j]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                jac = sum(M[i, l] * sp.diff(M[j, k], x[l])
                          for (i, j, k) in ((a, b, c), (b, c, a), (c, a, b)) for l in range(n))
                if sp.expand(jac) != 0:
                    return True
    return False


def _broken(sc, **changes):
    S = sc.sigma
    data = dict(action=dict(S.action), poisson=dict(S.poisson), moment=dict(S.moment))
    for k, v in changes.items():
        data[k].update(v)
    return SigmaData(S.algebroid, S.x_gens, S.fibration, data["action"], data["poisson"], data["moment"])


def test_violations_are_named():
    sc = cached_preset("abelian_b")
    X = sc.sigma.x_gens
    bad_moment = _broken(sc, moment={"1": X.var("x1") * X.var("x1")})
    assert "moment_hamiltonian" in {r.identity for r in validate_sigma(bad_moment).failures()}
    P = {("x1", "x2"): X.var("x3"), ("x1", "x3"): X.var("x1") * X.var("x2")}
    assert _sympy_jacobi_fails(P, 3)
    bad_poisson = SigmaData(sc.sigma.algebroid, X, {}, sc.sigma.action, P, sc.sigma.moment)
    assert "poisson" in {r.identity for r in validate_sigma(bad_poisson).failures()}
    so3 = cached_preset("so3")
    bad_action = _broken(so3, action={("1", "x2"): so3.sigma.x_gens.zero()})
    assert "action_closure" in {r.identity for r in validate_sigma(bad_action).failures()}


def test_transverse_poisson_is_caught():
    sc = cached_preset("glx_so3")
    X = sc.sigma.x_gens
    bad = _broken(sc, poisson={("x0", "e1"): X.one()})
    assert "tangentiality" in {r.identity for r in validate_sigma(bad).failures()}


def test_double_complex_on_presets(scenario):
    rep = check_complex(build_double_complex(scenario.sigma), cap=3)
    assert rep.passed, rep.summary()
    assert set(rep.identities()) >= {
        "comm_dJL_K", "comm_dP_K", "comm_dJL_dJL", "comm_dJL_dP", "comm_dP_dP",
        "kernel_nilpotent_dJL", "kernel_nilpotent_dP", "kernel_anticommute",
    }


def test_nonzero_right_hand_sides_are_exercised():
    # rho_2 = m1 d1 + d2 on case a; f depends on m through the frame on glx_so3
    C = build_double_complex(cached_preset("case_a").sigma)
    assert not C.d_JL.commutator(C.K["m1"]).is_zero()
    C = build_double_complex(cached_preset("glx_so3").sigma)
    assert not C.d_JL.commutator(C.d_JL).is_zero()


def test_kernel_generators_are_annihilated_by_K():
    C = build_double_complex(cached_preset("case_a").sigma)
    gens = kernel_generators(C, cap=2)
    assert gens
    for g in gens:
        for Kr in C.K.values():
            assert Kr(g).is_zero()
