from __future__ import annotations

import pytest
import sympy

from confhoch import cohomology, library
from confhoch.cochain import constant_cochain, del_cochain, differential, random_cochain
from confhoch.cohomology import (
    TruncationError,
    TruncationPolicy,
    basis,
    check_inner_in_der,
    coboundary_witness,
    cohomology_dims,
    derivations,
    differential_matrix,
    inner_derivations,
)

d, l1 = sympy.symbols("d l1")


# -- bases ---------------------------------------------------------------------

def test_basis_dimensions(e1, m2):
    assert basis(e1, None, 1, TruncationPolicy(2, 0)).dim == 3
    assert basis(e1, None, 0, TruncationPolicy(2, 2)).dim == 1
    assert basis(m2, None, 1, TruncationPolicy(1, 0)).dim == 32


def test_basis_counts_lambda_monomials(e1):
    # n = 2: d-exponent <= 2, l1-exponent <= 1
    assert basis(e1, None, 2, TruncationPolicy(2, 1)).dim == 6
    assert basis(e1, None, 3, TruncationPolicy(1, 1)).dim == 8


def test_basis_is_ordered_and_round_trips(twisted):
    b = basis(twisted, None, 2, TruncationPolicy(1, 1))
    assert b.elements == sorted(b.elements)
    assert len(set(b.elements)) == b.dim
    for k in (0, 5, b.dim - 1):
        assert b.coordinates(b.element(k)) == {k: 1}


def test_policy_rejects_negative_caps():
    with pytest.raises(ValueError):
        TruncationPolicy(-1, 0)


# -- the E1 derivation equation against an independent solve ---------------------

def functional_equation_matrix(cap):
    """Columns: coefficients of p(d + l1) - p(d) + p(-l1) for p = d^k, in the monomial order d^a l1^b."""
    monos = [(a, b) for a in range(cap + 1) for b in range(cap + 1)]
    cols = []
    for k in range(cap + 1):
        expr = sympy.Poly(sympy.expand((d + l1) ** k - d ** k + (-l1) ** k), d, l1)
        cols.append([expr.coeff_monomial(d ** a * l1 ** b) for a, b in monos])
    return sympy.Matrix(cols).T, monos


@pytest.mark.parametrize("cap", [2, 3, 4])
def test_e1_degree_one_matrix_matches_functional_equation(e1, cap):
    mat = differential_matrix(e1, None, 1, TruncationPolicy(cap, 0))
    oracle, monos = functional_equation_matrix(cap)
    dense = mat.dense()
    for j in range(cap + 1):
        ours = {}
        for i, row in enumerate(dense):
            if row[j]:
                (_, exps, _) = mat.codomain.elements[i]
                e = tuple(exps) + (0,) * (2 - len(exps))
                ours[e] = row[j]
        want = {m: oracle[r, j] for r, m in enumerate(monos) if oracle[r, j] != 0}
        assert ours == want, j
    assert mat.rank() == oracle.rank()
    (rel,) = mat.kernel()
    assert mat.domain.cochain(rel) == del_cochain(e1).scale(rel[1])


def test_derivations_and_inner_derivations_of_e1(e1):
    (der,) = derivations(e1, None, 2)
    c = dict(der.value((0,))[0].terms())[(1,)]
    assert der == del_cochain(e1).scale(c)
    assert coboundary_witness(der) is None
    assert inner_derivations(e1) == []


@pytest.mark.parametrize("name", sorted(library.ALGEBRAS))
def test_inner_in_der_for_bundled_algebras(name):
    rep = check_inner_in_der(library.ALGEBRAS[name]())
    assert rep.passed, rep.line()


def test_inner_in_der_with_column_module():
    rep = check_inner_in_der(library.cur_m2(), library.m2_column_module())
    assert rep.passed
    assert rep.details["inn"] == 2


def test_m2_inner_derivations_span_three_dimensions():
    # the centre of M_2 is the scalars, so four generators give three independent inner derivations
    assert len(inner_derivations(library.cur_m2())) == 3


# -- dimensions --------------------------------------------------------------------

def test_hh0_of_e1(e1):
    dims = cohomology_dims(e1, None, 0, TruncationPolicy(2, 2))
    assert (dims.Z, dims.B, dims.HH_upper) == (1, 0, 1)


@pytest.mark.parametrize("cap", [2, 3, 4])
def test_hh1_of_e1_is_stable_across_caps(e1, cap):
    dims = cohomology_dims(e1, None, 1, TruncationPolicy(cap, cap), slack=2)
    assert (dims.Z, dims.B, dims.HH_upper) == (1, 0, 1)


def test_hh2_upper_bound_is_monotone_in_slack(e1):
    dims = cohomology_dims(e1, None, 2, TruncationPolicy(2, 2), slack=2)
    assert dims.B_by_slack == sorted(dims.B_by_slack)
    assert dims.B <= dims.Z


def test_dims_monotone_in_caps(twisted):
    small = cohomology_dims(twisted, None, 1, TruncationPolicy(1, 1), slack=1)
    big = cohomology_dims(twisted, None, 1, TruncationPolicy(2, 2), slack=1)
    assert small.Z <= big.Z and small.B <= big.B


@pytest.mark.parametrize("name", sorted(library.ALGEBRAS))
@pytest.mark.parametrize("n", [0, 1, 2])
def test_matrix_composite_vanishes(name, n):
    alg = library.ALGEBRAS[name]()
    policy = TruncationPolicy(1, 1)
    first = differential_matrix(alg, None, n, policy)
    second = differential_matrix(alg, None, n + 1, first.codomain.policy)
    assert all(not col for col in second.compose(first))


def test_rank_nullity(twisted):
    for n in (0, 1, 2):
        mat = differential_matrix(twisted, None, n, TruncationPolicy(1, 1))
        assert len(mat.kernel()) + mat.rank() == mat.domain.dim


def test_codomain_caps_come_from_the_tables(twisted, m2):
    p = TruncationPolicy(1, 1)
    assert cohomology.codomain_policy(m2.regular, p) == TruncationPolicy(1, 2)
    assert cohomology.codomain_policy(twisted.regular, p) == TruncationPolicy(3, 4)


def test_undersized_codomain_raises(monkeypatch, twisted):
    monkeypatch.setattr(cohomology, "codomain_policy", lambda coeffs, policy: policy)
    with pytest.raises(TruncationError):
        differential_matrix(twisted, None, 1, TruncationPolicy(1, 1))


# -- coboundary witnesses -------------------------------------------------------

@pytest.mark.parametrize("seed", range(4))
def test_witness_for_constructed_coboundaries(twisted, seed):
    psi = random_cochain(twisted, None, 1, (1, 1), seed=seed)
    phi = differential(psi)
    got = coboundary_witness(phi, TruncationPolicy(1, 1))
    assert got is not None and differential(got) == phi


def test_der_is_not_a_coboundary_at_any_small_slack(e1):
    der = del_cochain(e1)
    for slack in range(5):
        assert coboundary_witness(der, TruncationPolicy(1, 0), slack) is None


def test_zero_has_zero_witness(e1):
    z = differential(constant_cochain(e1, [1]))
    assert z.is_zero
    w = coboundary_witness(z)
    assert w is not None and w.is_zero


def test_report_carries_dims_and_basis(e1):
    rep = cohomology.cohomology_report(e1, None, 1, TruncationPolicy(2, 2), 2)
    assert rep.details["Z"] == 1 and rep.details["HH_upper"] == 1
    assert rep.details["basis"] == ["[0] 1 -> e0", "[0] d -> e0", "[0] d^2 -> e0"]
