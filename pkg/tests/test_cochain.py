from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confhoch import library
from confhoch.cochain import (
    Cochain,
    constant_cochain,
    d_squared_check,
    del_cochain,
    differential,
    evaluate,
    first_difference,
    graft,
    identity_cochain,
    random_cochain,
    zero_cochain,
)
from confhoch.confalg import vec
from confhoch.gerstenhaber import bracket, bullet, cup
from confhoch.polyring import ZERO, D, L, lam
from oracle import Oracle

ORACLE_ALGEBRAS = ["e1", "twisted_qxq", "cur_dual"]


@pytest.fixture(scope="module", params=ORACLE_ALGEBRAS)
def alg_oracle(request):
    alg = library.ALGEBRAS[request.param]()
    return alg, Oracle(alg)


# -- agreement with the independent evaluator -----------------------------------

@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_differential_matches_oracle(alg_oracle, n):
    alg, O = alg_oracle
    for seed in range(2):
        f = random_cochain(alg, None, n, (1, 1), seed=seed)
        assert O.equal(differential(f), O.differential(O.lift(f)))


@pytest.mark.parametrize("m,n", [(1, 0), (2, 0), (3, 0), (1, 1), (2, 1), (1, 2), (3, 1), (2, 2)])
def test_graft_matches_oracle_in_every_slot(alg_oracle, m, n):
    alg, O = alg_oracle
    f = random_cochain(alg, None, m, (1, 1), seed=f"f{m}{n}")
    g = random_cochain(alg, None, n, (1, 1), seed=f"g{m}{n}")
    for i in range(1, m + 1):
        assert O.equal(graft(f, g, i), O.graft(O.lift(f), O.lift(g), i)), i


@pytest.mark.parametrize("m,n", [(0, 0), (0, 1), (1, 0), (0, 2), (2, 0), (1, 1), (1, 2), (2, 2)])
def test_cup_matches_oracle(alg_oracle, m, n):
    alg, O = alg_oracle
    f = random_cochain(alg, None, m, (1, 1), seed=f"cf{m}{n}")
    g = random_cochain(alg, None, n, (1, 1), seed=f"cg{m}{n}")
    assert O.equal(cup(f, g), O.cup(O.lift(f), O.lift(g)))


@pytest.mark.parametrize("m,n", [(0, 1), (1, 0), (0, 2), (2, 0), (1, 1), (2, 1), (2, 2)])
def test_bullet_and_bracket_match_oracle(alg_oracle, m, n):
    alg, O = alg_oracle
    f = random_cochain(alg, None, m, (1, 1), seed=f"bf{m}{n}")
    g = random_cochain(alg, None, n, (1, 1), seed=f"bg{m}{n}")
    assert O.equal(bullet(f, g), O.bullet(O.lift(f), O.lift(g)))
    assert O.equal(bracket(f, g), O.bracket(O.lift(f), O.lift(g)))


def test_differential_matches_oracle_on_m2_and_column_module():
    alg = library.cur_m2()
    O = Oracle(alg)
    f = random_cochain(alg, None, 2, (1, 1), seed=3)
    assert O.equal(differential(f), O.differential(O.lift(f)))
    V = library.m2_column_module()
    OV = Oracle(alg, V)
    for n in (0, 1, 2):
        g = random_cochain(alg, V, n, (1, 1), seed=n)
        assert OV.equal(differential(g), OV.differential(OV.lift(g)))


def test_literal_last_slot_rule_disagrees_from_degree_three(twisted):
    """Putting only the last explicit lambda to -d is right for m = 2 and wrong for m = 3.

    Ours sets it to -(d + l1 + ... + l_{m-2}); the uniform evaluator agrees.
    """
    O = Oracle(twisted)
    b = constant_cochain(twisted, [1, 2])
    for m in (2, 3):
        f = random_cochain(twisted, None, m, (1, 1), seed=f"literal{m}")
        out = {}
        for idx in {k[:-1] for k in f.values}:
            acc = [ZERO, ZERO]
            for k, bk in enumerate(b.value(())):
                v = f.value(idx + (k,))
                acc = [a + bk * p.subs({lam(m - 1): -D}) for a, p in zip(acc, v)]
            out[idx] = tuple(acc)
        literal = Cochain(m - 1, twisted, out)
        oracle = O.graft(O.lift(f), O.lift(b), m)
        assert O.equal(graft(f, b, m), oracle)
        assert O.equal(literal, oracle) == (m == 2)


# -- differential: concrete values and d^2 = 0 ------------------------------

def test_e1_examples(e1):
    assert differential(del_cochain(e1)).is_zero
    did = differential(identity_cochain(e1))
    assert did.value((0, 0)) == vec(1)
    assert differential(constant_cochain(e1, [5])).is_zero


def test_inner_derivation_formula(dual):
    # d0(v)(a) = a_{-d} v - v_0 a; Q[x]/(x^2) is commutative, M_2 is not
    assert differential(constant_cochain(dual, [0, 1])).is_zero
    dv = differential(constant_cochain(library.cur_m2(), [0, 1, 0, 0]))
    assert dv.value((0,)) == vec(0, 1, 0, 0)  # e11 e12 - e12 e11
    assert dv.value((3,)) == vec(0, -1, 0, 0)  # e22 e12 - e12 e22


@pytest.mark.parametrize("name", sorted(library.ALGEBRAS))
@pytest.mark.parametrize("n", [0, 1, 2])
def test_d_squared_vanishes(name, n):
    alg = library.ALGEBRAS[name]()
    for seed in range(2):
        rep = d_squared_check(random_cochain(alg, None, n, (2, 1), seed=seed))
        assert rep.passed, rep.line()


def test_d_squared_with_non_regular_coefficients():
    alg, V = library.cur_m2(), library.m2_column_module()
    for n in (0, 1, 2):
        assert d_squared_check(random_cochain(alg, V, n, (1, 1), seed=n)).passed


def test_d_squared_flags_a_broken_algebra():
    alg = library.mutated_e1()
    rep = d_squared_check(random_cochain(alg, None, 1, (1, 0), seed=0))
    assert "precondition" in rep.details


# -- evaluation and sesquilinearity ---------------------------------------

@settings(max_examples=25)
@given(st.integers(0, 50), st.integers(0, 2))
def test_sesquilinearity_of_evaluation(seed, k):
    alg = library.twisted_qxq()
    f = random_cochain(alg, None, 3, (1, 1), seed=seed)
    basis = [vec(1, 0), vec(0, 1)]
    lams = [L(1), L(2)]
    args = [basis[(seed >> j) & 1] for j in range(3)]
    base = evaluate(f, args, lams)
    shifted = list(args)
    shifted[k] = tuple(D * p for p in args[k])
    got = evaluate(f, shifted, lams)
    factor = -lams[k] if k < 2 else D + L(1) + L(2)
    assert got == tuple(factor * p for p in base)


def test_evaluate_on_generators_reads_the_table(twisted):
    f = random_cochain(twisted, None, 2, (1, 1), seed=1)
    assert evaluate(f, [vec(1, 0), vec(0, 1)], [L(1)]) == f.value((0, 1))


# -- construction and validation ----------------------------------------------

def test_validation_errors(e1):
    with pytest.raises(ValueError):
        Cochain(1, e1, {(0,): (L(1),)})
    with pytest.raises(ValueError):
        Cochain(0, e1, {(): (D,)})
    with pytest.raises(ValueError):
        Cochain(2, e1, {(0,): vec(1)})
    with pytest.raises(ValueError):
        Cochain(1, e1, {(1,): vec(1)})
    with pytest.raises(ValueError):
        Cochain(1, e1, {(0,): vec(1, 2)})


def test_constant_cochain_reduces_mod_d(e1):
    assert constant_cochain(e1, [D + 3]) == constant_cochain(e1, [3])


def test_random_cochain_is_deterministic(m2):
    a = random_cochain(m2, None, 2, (1, 1), seed=9)
    b = random_cochain(m2, None, 2, (1, 1), seed=9)
    assert a == b
    assert a != random_cochain(m2, None, 2, (1, 1), seed=10)


def test_first_difference_reports_lexicographic_first(e1):
    x = Cochain(2, e1, {(0, 0): vec(L(1))})
    w = first_difference(x, zero_cochain(e1, 2))
    assert w.tuple == (0, 0) and w.difference == (L(1),)
    assert first_difference(x, x) is None


def test_linear_structure(twisted):
    f = random_cochain(twisted, None, 2, (1, 1), seed=1)
    g = random_cochain(twisted, None, 2, (1, 1), seed=2)
    assert differential(f + g) == differential(f) + differential(g)
    assert differential(f.scale(3)) == differential(f).scale(3)
    assert (f - f).is_zero
