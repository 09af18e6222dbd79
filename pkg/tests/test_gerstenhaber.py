from __future__ import annotations

import pytest

from confhoch import library
from confhoch.cochain import constant_cochain, differential, random_cochain, zero_cochain
from confhoch.gerstenhaber import (
    bracket,
    bullet,
    center_constants,
    check_cocycle_identities,
    check_identities,
    check_pre_lie_system,
    circ_i,
    cocycle_pool,
    correction_H,
    cup,
    leibniz_defect,
    leibniz_predicted_sign,
    legal_pre_lie_pairs,
    maurer_cartan,
    rho_cochain,
)

EXPECTED_CHECKS = {
    "associativity", "maurer_cartan",
    "pre_lie.system", "pre_lie.right_symmetry", "pre_lie.associator",
    "bracket.antisymmetry", "bracket.jacobi", "bracket.differential",
    "differential.via_rho",
    "cup.associativity", "cup.leibniz", "cup.homotopy", "cup.via_insertion",
    "cup.via_insertion_reversed", "cup.bullet_distributivity",
    "pool.cocycle", "gerstenhaber.correction", "gerstenhaber.leibniz_up_to_coboundary",
    "gerstenhaber.leibniz_exact", "gerstenhaber.leibniz_degenerate",
}


@pytest.mark.parametrize("name,trials,degrees", [
    ("e1", 4, (1, 2, 3)),
    ("twisted_qxq", 3, (1, 2)),
    ("cur_dual", 3, (1, 2)),
])
def test_identity_suite_passes(name, trials, degrees):
    alg = library.ALGEBRAS[name]()
    reports = check_identities(alg, seed=1, trials=trials, degrees=degrees, pool_max_degree=3)
    assert {r.check for r in reports} == EXPECTED_CHECKS
    failed = [r.line() for r in reports if not r.passed]
    assert not failed, failed


def test_identity_suite_fails_on_mutated_algebra():
    reports = check_identities(library.mutated_e1(), seed=0, trials=1, degrees=(1,), pool={})
    by_name = {r.check: r for r in reports}
    assert not by_name["associativity"].passed
    assert not by_name["maurer_cartan"].passed


def test_maurer_cartan(m2):
    assert maurer_cartan(m2).passed
    rep = maurer_cartan(library.mutated_m2())
    assert not rep.passed and any(rep.witness.difference)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_bracket_with_degree_zero_sign(twisted, m):
    """[f, b] = (-1)^m [b, f]: the general antisymmetry rule at n = 0."""
    f = random_cochain(twisted, None, m, (1, 1), seed=m)
    b = constant_cochain(twisted, [2, -1])
    fb, bf = bracket(f, b), bracket(b, f)
    assert not fb.is_zero
    assert fb == bf.scale((-1) ** m)
    assert fb != bf.scale((-1) ** (m - 1))


def test_bullet_of_degree_zero_on_the_left_vanishes(twisted):
    b = constant_cochain(twisted, [1, 1])
    f = random_cochain(twisted, None, 2, (1, 1), seed=0)
    assert bullet(b, f).is_zero


def test_differential_is_bracket_with_rho(m2):
    rho = rho_cochain(m2)
    for m in (0, 1, 2):
        f = random_cochain(m2, None, m, (1, 1), seed=m)
        assert differential(f) == bracket(rho, f).scale((-1) ** (m + 1))


def test_cup_via_rho_insertions(twisted):
    rho = rho_cochain(twisted)
    f = random_cochain(twisted, None, 2, (1, 1), seed=4)
    g = random_cochain(twisted, None, 1, (1, 1), seed=5)
    assert cup(f, g) == circ_i(circ_i(rho, f, 1), g, 3)


def test_legal_pairs_cover_both_regimes():
    pairs = legal_pre_lie_pairs(3, 2)
    assert (2, 1) in pairs  # j < i
    assert (1, 1) in pairs and (1, 2) in pairs  # j inside the inserted block
    assert all(1 <= i <= 3 for i, _ in pairs)


def test_pre_lie_system_holds_pairwise(twisted):
    f = random_cochain(twisted, None, 3, (1, 0), seed=1)
    g = random_cochain(twisted, None, 2, (1, 0), seed=2)
    h = random_cochain(twisted, None, 1, (1, 0), seed=3)
    for i, j in legal_pre_lie_pairs(3, 2):
        assert check_pre_lie_system(f, g, h, i, j).passed, (i, j)


def test_center_constants():
    assert len(center_constants(library.e1())) == 1
    assert len(center_constants(library.cur_m2())) == 1
    assert len(center_constants(library.cur_qxq())) == 2
    assert len(center_constants(library.cur_dual())) == 2


def test_cocycle_pool_entries_are_cocycles(m2):
    for deg, items in cocycle_pool(m2).items():
        for label, c in items:
            assert differential(c).is_zero, label


def test_leibniz_sign_matches_prediction_and_correction_holds(m2):
    tally = check_cocycle_identities(m2, cocycle_pool(m2), seed=0, max_degree=3)
    reports = {r.check: r for r in tally.finish({})}
    for name in ("gerstenhaber.correction", "gerstenhaber.leibniz_up_to_coboundary",
                 "gerstenhaber.leibniz_exact", "gerstenhaber.leibniz_degenerate"):
        assert reports[name].passed, reports[name].line()
    for key, entry in reports["gerstenhaber.leibniz_up_to_coboundary"].details["signs"].items():
        assert set(entry["observed"]) <= {entry["predicted"], 0}, key


def test_degenerate_defects_are_certified_coboundaries(m2):
    tally = check_cocycle_identities(m2, cocycle_pool(m2), seed=0, max_degree=3)
    rep = tally.reports["gerstenhaber.leibniz_degenerate"]
    # with a coboundary mixed into a degree-2 pool entry the defect is nonzero but exact
    assert rep.details["outcomes"].get("coboundary", 0) > 0
    assert "not_found" not in rep.details["outcomes"]


def test_degenerate_defect_is_zero_for_pure_rho(m2):
    pool = cocycle_pool(m2)
    z = pool[0][0][1]
    rho = rho_cochain(m2)
    assert leibniz_defect(z, z, rho).is_zero
    assert leibniz_defect(rho, z, rho).is_zero


def test_correction_cochain_is_bounded_by_degrees(e1):
    pool = cocycle_pool(e1)
    f = pool[1][0][1]
    h = pool[2][0][1]
    H = correction_H(f, f, h)
    assert H.degree == 1 + 1 + 2 - 2
    defect = leibniz_defect(f, f, h)
    assert defect == differential(H).scale(leibniz_predicted_sign(1, 1, 2)) or defect.is_zero


def test_operations_reject_module_valued_cochains():
    V = library.m2_column_module()
    f = zero_cochain(V, 1)
    with pytest.raises(ValueError):
        cup(f, f)
