"""Bundled example algebras, bimodules and definition files."""

from __future__ import annotations

from importlib import resources

from .cochain import Cochain, del_cochain
from .confalg import ConformalAlgebra, ConformalBimodule, cur, vec
from .polyring import D, L, Poly

LAMBDA = L(1)


def e1() -> ConformalAlgebra:
    """Cur(Q): one generator e with e_l e = e."""
    return cur([[[1]]])


def cur_qxq() -> ConformalAlgebra:
    return cur([[[1, 0], [0, 0]], [[0, 0], [0, 1]]])


def cur_dual() -> ConformalAlgebra:
    """Cur(Q[x]/(x^2)) on the basis 1, x."""
    return cur([[[1, 0], [0, 1]], [[0, 1], [0, 0]]])


def cur_m2() -> ConformalAlgebra:
    """Cur(M_2(Q)); generator 2*i + j is the matrix unit e_ij."""
    return cur([[[1 if (a == 2 * i + l and j == k) else 0 for a in range(4)]
                 for k in range(2) for l in range(2)]
                for i in range(2) for j in range(2)])


def twisted_qxq() -> ConformalAlgebra:
    """A non-current associative structure on two generators with d-dependent products."""
    return ConformalAlgebra(2, {
        (0, 0): vec(1, -(D + LAMBDA * D + LAMBDA * LAMBDA)),
        (0, 1): vec(0, -LAMBDA),
        (1, 0): vec(0, D + LAMBDA),
        (1, 1): vec(0, 1),
    })


def m2_column_module() -> ConformalBimodule:
    """Q^2 over Cur(M_2) by matrix multiplication on the left, zero on the right."""
    alg = cur_m2()
    left = {}
    for i in range(2):
        for j in range(2):
            left[(2 * i + j, j)] = vec(*[1 if k == i else 0 for k in range(2)])
    return ConformalBimodule(2, alg, left, {})


def mutated_e1() -> ConformalAlgebra:
    """e_l e = d e: one structure constant changed, no longer associative."""
    return ConformalAlgebra(1, {(0, 0): vec(D)})


def mutated_m2() -> ConformalAlgebra:
    """Cur(M_2) with e11 e11 = 2 e11."""
    alg = cur_m2()
    prod = dict(alg.prod)
    prod[(0, 0)] = vec(2, 0, 0, 0)
    return ConformalAlgebra(4, prod)


def rho(alg: ConformalAlgebra) -> Cochain:
    """The product as a 2-cochain."""
    return Cochain(2, alg, dict(alg.prod))


ALGEBRAS = {
    "e1": e1,
    "cur_qxq": cur_qxq,
    "cur_dual": cur_dual,
    "cur_m2": cur_m2,
    "twisted_qxq": twisted_qxq,
}

MUTATED = {
    "mutated_e1": mutated_e1,
    "mutated_m2": mutated_m2,
}


def bundled_files() -> list[str]:
    return sorted(p.name for p in resources.files("confhoch.data").iterdir() if p.name.endswith(".def"))


def bundled_text(name: str) -> str:
    if not name.endswith(".def"):
        name += ".def"
    return resources.files("confhoch.data").joinpath(name).read_text(encoding="utf-8")


def load_bundled(name: str):
    from .dsl import parse

    if not name.endswith(".def"):
        name += ".def"
    return parse(bundled_text(name), source=name)


def build_definitions() -> dict:
    """The bundled files as DefinitionFile objects (the source the data directory is written from)."""
    from .dsl import CochainDef, DefinitionFile, ExtensionDef

    out = {}
    for name, make in ALGEBRAS.items():
        alg = make()
        cochains = {"der": CochainDef("regular", del_cochain(alg)),
                    "rho": CochainDef("regular", rho(alg))}
        out[name] = DefinitionFile(alg, {}, cochains, {"trivial": ExtensionDef()})

    alg = cur_m2()
    V = m2_column_module()
    psi = Cochain(1, V, {(0,): vec(D, 0), (1,): vec(0, 1), (3,): vec(1, D)})
    out["m2_column"] = DefinitionFile(
        alg, {"V": V}, {"psi": CochainDef("V", psi)}, {"trivial": ExtensionDef("V")})

    for name, make in MUTATED.items():
        alg = make()
        out[name] = DefinitionFile(alg, {}, {"rho": CochainDef("regular", rho(alg))}, {})

    alg = e1()
    bad = Cochain(2, alg, {(0, 0): vec(D + 2 * LAMBDA)})  # not a cocycle: its differential is d + l2
    out["e1_extensions"] = DefinitionFile(
        alg, {},
        {"phi": CochainDef("regular", Cochain(2, alg, {(0, 0): vec(Poly.const(3))})),
         "bad": CochainDef("regular", bad)},
        {"trivial": ExtensionDef(),
         "ideal": ExtensionDef("regular", None, dict(alg.prod)),
         "from_cocycle": ExtensionDef("regular", "phi", {})},
    )
    out["bad_fiber"] = DefinitionFile(
        alg, {}, {}, {"garbage": ExtensionDef("regular", None, {(0, 0): vec(D)})})
    return out
