from __future__ import annotations

from fractions import Fraction

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from confhoch.linalg import apply, kernel, rank, solve

entries = st.one_of(st.integers(-4, 4), st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3)))
rows = st.integers(1, 5)


@st.composite
def matrices(draw):
    n_rows, n_cols = draw(rows), draw(st.integers(1, 6))
    return [[draw(entries) for _ in range(n_rows)] for _ in range(n_cols)]  # column-major


def sparse(col):
    return {i: c for i, c in enumerate(col) if c}


def to_sympy(cols):
    return sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction)
                          else c for c in col] for col in cols]).T


@settings(max_examples=80)
@given(matrices())
def test_rank_matches_sympy(cols):
    assert rank(sparse(c) for c in cols) == to_sympy(cols).rank()


@settings(max_examples=80)
@given(matrices())
def test_kernel_is_a_kernel_of_the_right_size(cols):
    vecs = [sparse(c) for c in cols]
    ker = kernel(vecs)
    assert len(ker) == len(cols) - to_sympy(cols).rank()
    for rel in ker:
        assert apply(vecs, rel) == {}
    assert rank(ker) == len(ker)


@settings(max_examples=80)
@given(matrices(), st.data())
def test_solve_finds_preimages_of_combinations(cols, data):
    vecs = [sparse(c) for c in cols]
    coeffs = {i: data.draw(entries) for i in range(len(cols))}
    target = apply(vecs, coeffs)
    sol = solve(vecs, target)
    assert sol is not None
    assert apply(vecs, sol) == target


def test_solve_reports_inconsistent_systems():
    assert solve([{0: 1, 1: 1}], {0: 1}) is None
    assert solve([{0: 2}], {}) == {}
    assert solve([{0: 2}], {0: 1}) == {0: Fraction(1, 2)}


def test_keys_need_not_be_integers():
    vecs = [{("a", 1): 1, ("b", 0): -1}, {("b", 0): 1}]
    assert rank(vecs) == 2
    ext = vecs + [{("a", 1): 1}]
    (rel,) = kernel(ext)
    assert apply(ext, rel) == {} and set(rel) == {0, 1, 2}
