import random
from fractions import Fraction

import sympy as sp
from hypothesis import given, settings, strategies as st

from lapsm.linalg import nullspace, rank, solve


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_nullspace_matches_sympy(seed):
    rng = random.Random(seed)
    m, n = rng.randint(1, 5), rng.randint(1, 6)
    dense = [[Fraction(rng.randint(-3, 3), rng.randint(1, 2)) if rng.random() < 0.6 else 0
              for _ in range(n)] for _ in range(m)]
    rows = [{j: v for j, v in enumerate(r) if v} for r in dense]
    ns = nullspace(rows, n)
    M = sp.Matrix(dense)
    assert len(ns) == len(M.nullspace())
    assert rank(dense) == M.rank()
    for v in ns:
        vec = [v.get(j, 0) for j in range(n)]
        assert all(sum(r[j] * vec[j] for j in range(n)) == 0 for r in dense)


def test_solve_consistent_and_inconsistent():
    rows = [{0: 1, 1: 1}, {0: 1, 1: -1}]
    x = solve(rows, [2, 0], 2)
    assert x == {0: 1, 1: 1}
    assert solve([{0: 1}, {0: 1}], [1, 2], 1) is None
