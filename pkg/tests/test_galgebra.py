import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from lapsm.galgebra import (
    AlgebraError,
    Generator,
    GeneratorSet,
    OddPairing,
    PolyParseError,
    deriv,
    format_poly,
    odd_bracket,
    parse_poly,
    schouten,
    substitute,
)

MIXED = GeneratorSet([
    Generator("x", 0, "base"),
    Generator("y", 0, "base"),
    Generator("d", -1, "fiber"),
    Generator("a", 1, "momentum"),
    Generator("b", 1, "momentum"),
    Generator("c", 2, "momentum"),
])
EVEN = GeneratorSet([Generator(n, 0, "base") for n in ("x", "y", "z")])
PAIRS = OddPairing((("x", "a"), ("y", "b"), ("d", "c")))


def random_poly(gens, rng, terms=4, maxexp=2, degree=None):
    p = gens.zero()
    for _ in range(terms * 4):
        if len(p.terms) >= terms:
            break
        mono = gens.const(Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
        for g in gens:
            e = rng.randint(0, 1 if g.odd else maxexp)
            for _ in range(e):
                mono = mono * gens.var(g.name)
        if degree is None or (mono.terms and mono.degrees() == {degree}):
            p = p + mono
    return p


seeds = st.integers(min_value=0, max_value=10**6)


def test_odd_generators_anticommute_and_square_to_zero():
    a, b = MIXED.var("a"), MIXED.var("b")
    assert a * b == -(b * a)
    assert (a * a).is_zero()
    c = MIXED.var("c")
    assert a * c == c * a


def test_left_and_right_derivatives_differ_by_sign_on_odd():
    a, b = MIXED.var("a"), MIXED.var("b")
    p = a * b
    assert deriv(p, "a", "left") == b
    assert deriv(p, "a", "right") == -b
    assert deriv(p, "b", "right") == a


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_even_arithmetic_matches_sympy(seed):
    rng = random.Random(seed)
    p, q = random_poly(EVEN, rng), random_poly(EVEN, rng)
    sym = sp.symbols("x y z")
    P, Q = sp.sympify(format_poly(p).replace("^", "**")), sp.sympify(format_poly(q).replace("^", "**"))
    assert sp.expand(P * Q - sp.sympify(format_poly(p * q).replace("^", "**"))) == 0
    for s in sym:
        assert sp.expand(sp.diff(P, s) - sp.sympify(format_poly(deriv(p, str(s))).replace("^", "**"))) == 0
    image = {"x": EVEN.var("y") + 1, "y": EVEN.var("z") * EVEN.var("x")}
    got = sp.sympify(format_poly(substitute(p, image)).replace("^", "**"))
    x, y, z = sym
    assert sp.expand(P.subs({x: y + 1, y: z * x}, simultaneous=True) - got) == 0


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_product_is_associative_and_graded_commutative(seed):
    rng = random.Random(seed)
    p, q, r = (random_poly(MIXED, rng, degree=rng.randint(0, 3)) for _ in range(3))
    assert (p * q) * r == p * (q * r)
    if p.terms and q.terms:
        sign = -1 if (p.degree * q.degree) % 2 else 1
        assert p * q == (q * p).scale(sign)


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_left_derivative_is_graded_leibniz(seed):
    rng = random.Random(seed)
    p = random_poly(MIXED, rng, degree=rng.randint(0, 3))
    q = random_poly(MIXED, rng, degree=rng.randint(0, 3))
    for g in MIXED:
        sign = -1 if (g.odd and p.terms and p.degree % 2) else 1
        lhs = deriv(p * q, g.name)
        rhs = deriv(p, g.name) * q + (p * deriv(q, g.name)).scale(sign)
        assert lhs == rhs


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_odd_bracket_antisymmetry_and_jacobi(seed):
    rng = random.Random(seed)
    F, G, H = (random_poly(MIXED, rng, terms=3, degree=rng.randint(0, 3)) for _ in range(3))
    if not (F.terms and G.terms and H.terms):
        return
    f, g, h = F.degree, G.degree, H.degree
    br = lambda u, v: odd_bracket(u, v, PAIRS)
    e = -1 if ((f - 1) * (g - 1)) % 2 else 1
    assert br(F, G) == br(G, F).scale(-e)
    # {F,{G,H}} = {{F,G},H} + (-1)^{(f-1)(g-1)} {G,{F,H}}
    assert br(F, br(G, H)) == br(br(F, G), H) + br(G, br(F, H)).scale(e)


def test_canonical_pairs():
    x, a = MIXED.var("x"), MIXED.var("a")
    assert odd_bracket(x, a, PAIRS) == MIXED.one()
    assert odd_bracket(a, x, PAIRS) == -MIXED.one()


def test_schouten_of_vector_fields_is_lie_bracket():
    gens = GeneratorSet([Generator("x", 0), Generator("y", 0), Generator("eta_x", 1), Generator("eta_y", 1)])
    x, y, ex, ey = (gens.var(n) for n in ("x", "y", "eta_x", "eta_y"))
    pairs = [("x", "eta_x"), ("y", "eta_y")]
    V = y * ex
    W = x * ey
    # [y d_x, x d_y] = y d_y - x d_x
    assert schouten(V, W, pairs) == y * ey - x * ex


def test_format_parse_round_trip():
    rng = random.Random(3)
    for _ in range(50):
        p = random_poly(MIXED, rng, degree=rng.randint(-1, 3))
        assert parse_poly(format_poly(p), MIXED) == p


@pytest.mark.parametrize("text, fragment", [
    ("x + w", "undeclared generator 'w'"),
    ("x**2", r"use '\^'"),
    ("x / y", "integer literals"),
    ("x^y", "exponent"),
    ("1/0", "zero denominator"),
    ("x +", "syntax"),
])
def test_parser_rejects_ambiguous_input(text, fragment):
    with pytest.raises(PolyParseError, match=fragment):
        parse_poly(text, MIXED)


def test_parser_accepts_signed_rationals():
    assert parse_poly("-4/5*x + 3/5", MIXED) == MIXED.var("x").scale(Fraction(-4, 5)) + Fraction(3, 5)


def test_substitution_checks_degrees():
    with pytest.raises(AlgebraError, match="degree"):
        substitute(MIXED.var("a"), {"a": MIXED.var("x")})


def test_mixing_generator_sets_is_an_error():
    with pytest.raises(AlgebraError):
        MIXED.var("x") + EVEN.var("x")
