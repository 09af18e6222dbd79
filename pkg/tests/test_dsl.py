from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confhoch import library
from confhoch.cochain import random_cochain
from confhoch.dsl import (
    CochainDef,
    DefinitionFile,
    DSLError,
    cochain_block,
    load,
    parse,
    parse_poly,
    print_definition,
)
from confhoch.polyring import D, L

E1_TEXT = "[algebra]\nrank = 1\nprod 0 0 = [\"1\"]\n"


def test_minimal_algebra(e1):
    assert parse(E1_TEXT).algebra == e1


def test_structure_polynomial():
    defs = parse('[algebra]\nrank = 1\nprod 0 0 = ["d + 2*l1"]\n')
    assert defs.algebra.entry(0, 0) == (D + 2 * L(1),)


def test_second_lambda_in_a_product_table_is_an_error():
    with pytest.raises(DSLError) as exc:
        parse('[algebra]\nrank = 1\nprod 0 0 = ["l2"]\n')
    assert exc.value.line == 3 and exc.value.column > 0


def test_unquoted_polys_and_comments():
    text = "# comment\n[algebra]\nrank = 1  # one generator\nprod 0 0 = [1/2*d^2 - l1]\n"
    assert parse(text).algebra.entry(0, 0) == (Fraction(1, 2) * D ** 2 - L(1),)


def test_absent_entries_default_to_zero():
    defs = parse("[algebra]\nrank = 2\nprod 1 1 = [0, 1]\n")
    assert defs.algebra.entry(0, 0) == (0 * D, 0 * D)


@pytest.mark.parametrize("text,line,fragment", [
    ("[algebra]\nrank = 1\nprod 0 0 = [\"1 +\"]\n", 3, ""),
    ("[algebra]\nrank = 1\nprod 0 1 = [\"1\"]\n", 3, "outside"),
    ("[algebra]\nrank = 1\nprod 0 0 = [\"1\", \"2\"]\n", 3, ""),
    ("[algebra]\nrank = 1\nbogus 0 0 = [\"1\"]\n", 3, "bogus"),
    ("[algebra]\nrank = 1\n[cochain f]\ndegree = 1\nvalue 0 = [\"l1\"]\n", 5, ""),
    ("[algebra]\nrank = 1\n[cochain f]\ndegree = 0\nvalue = [\"d\"]\n", 5, "constant"),
    ("[algebra]\nrank = 1\n[cochain f]\ndegree = 1\ncoeffs = W\n", 5, "W"),
    ("[algebra]\nrank = 1\n[extension]\ncocycle = nope\n", 4, "nope"),
    ("[algebra]\nrank = 1\n[algebra]\nrank = 1\n", 3, "algebra"),
    ("[algebra]\nrank = 1\n[cochain f]\ndegree = 1\n[cochain f]\ndegree = 1\n", 5, "already"),
])
def test_errors_carry_positions(text, line, fragment):
    with pytest.raises(DSLError) as exc:
        parse(text, source="x.def")
    assert exc.value.line == line
    assert fragment in str(exc.value)
    assert str(exc.value).startswith(f"x.def:{line}")


def test_degree_two_cochain_may_use_one_lambda_only():
    base = "[algebra]\nrank = 1\n[cochain f]\ndegree = 2\n"
    assert parse(base + 'value 0 0 = ["l1*d"]\n').cochain("f").degree == 2
    with pytest.raises(DSLError):
        parse(base + 'value 0 0 = ["l2"]\n')


@pytest.mark.parametrize("name", library.bundled_files())
def test_bundled_files_round_trip(name):
    text = library.bundled_text(name)
    defs = parse(text, source=name)
    printed = print_definition(defs)
    assert parse(printed) == defs
    assert printed == text  # bundled files are stored canonically


def test_bundled_files_match_their_generator():
    built = library.build_definitions()
    assert sorted(f"{k}.def" for k in built) == library.bundled_files()
    for name, defs in built.items():
        assert library.load_bundled(name) == defs, name


def test_printing_is_idempotent():
    messy = "[algebra]\nrank=1\n  prod 0 0 = [ 1 + 0*d ]  # spacing\n"
    once = print_definition(parse(messy))
    assert print_definition(parse(once)) == once
    assert once == E1_TEXT


@settings(max_examples=25)
@given(st.sampled_from(["e1", "twisted_qxq", "cur_m2"]), st.integers(0, 3), st.integers(0, 10**6))
def test_random_cochains_round_trip(name, n, seed):
    alg = library.ALGEBRAS[name]()
    phi = random_cochain(alg, None, n, (2, 2), seed=seed)
    defs = DefinitionFile(alg, {}, {"f": CochainDef("regular", phi)})
    assert parse(print_definition(defs)) == defs


def test_cochain_block_text(e1):
    from confhoch.cochain import del_cochain

    want = '[cochain der]\ndegree = 1\ncoeffs = regular\nvalue 0 = ["d"]\n'
    assert cochain_block("der", del_cochain(e1)) == want


def test_lookup_errors(e1):
    defs = library.load_bundled("e1")
    assert defs.cochain("der").degree == 1
    with pytest.raises(KeyError):
        defs.cochain("missing")
    with pytest.raises(KeyError):
        defs.bimodule("missing")


def test_load_reads_from_disk(tmp_path):
    p = tmp_path / "a.def"
    p.write_text(E1_TEXT, encoding="utf-8")
    assert load(p).algebra == library.e1()
    bad = tmp_path / "b.def"
    bad.write_text("[algebra]\nrank = x\n", encoding="utf-8")
    with pytest.raises(DSLError) as exc:
        load(bad)
    assert str(exc.value).startswith("b.def:2")


def test_parse_poly_positions():
    with pytest.raises(DSLError) as exc:
        parse_poly("d + * l1", line=7, col=10)
    assert exc.value.line == 7 and exc.value.column >= 10
