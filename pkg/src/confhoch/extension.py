"""Split extensions ``A (+) M``, the maps p, q, i, and the pullback of cochains along them.

Generators of the total algebra are those of A followed by those of M,
so p keeps the first ``rank(A)`` coordinates, q pads with zeros and i
prepends zeros.  Every assembled total algebra is checked for
associativity rather than assumed associative.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping

from .cochain import Cochain, del_cochain, differential, first_difference, random_cochain, zero_cochain
from .confalg import (
    ConformalAlgebra,
    ConformalBimodule,
    PolyVector,
    check_associativity,
    check_bimodule,
    lambda_product,
    vec_is_zero,
    zero_vec,
)
from .gerstenhaber import cup, rho_cochain
from .polyring import L, Poly
from .report import Report


class ExtensionConsistencyError(RuntimeError):
    """Associativity of the total algebra disagreed with the cocycle test on the 2-cochain."""


@dataclass
class SplitExtension:
    base: ConformalAlgebra
    fiber: ConformalBimodule
    fiber_product: dict
    total: ConformalAlgebra
    associativity: Report
    cocycle: Cochain | None = None
    verdict: dict = field(default_factory=dict)

    @property
    def rank_a(self) -> int:
        return self.base.rank

    @property
    def rank_m(self) -> int:
        return self.fiber.rank

    @property
    def is_associative(self) -> bool:
        return self.associativity.passed

    def p(self, x: PolyVector) -> PolyVector:
        return tuple(x[: self.rank_a])

    def q(self, a: PolyVector) -> PolyVector:
        return tuple(a) + zero_vec(self.rank_m)

    def i(self, u: PolyVector) -> PolyVector:
        return zero_vec(self.rank_a) + tuple(u)

    def pullback_phi(self, phi: Cochain) -> Cochain:
        return pullback_phi(self, phi)


def _check_table(table: Mapping, rank: int, what: str) -> dict:
    out = {}
    for (k, l), v in table.items():
        if not (0 <= k < rank and 0 <= l < rank):
            raise ValueError(f"{what} entry ({k}, {l}) outside a {rank}x{rank} table")
        v = tuple(e if isinstance(e, Poly) else Poly.const(e) for e in v)
        if len(v) != rank:
            raise ValueError(f"{what} entry ({k}, {l}) has length {len(v)}, expected {rank}")
        out[(k, l)] = v
    return out


def _assemble(A: ConformalAlgebra, M: ConformalBimodule, fiber_product: dict,
              cocycle: Cochain | None) -> ConformalAlgebra:
    ra, rm = A.rank, M.rank
    za, zm = zero_vec(ra), zero_vec(rm)
    prod = {}
    for i in range(ra):
        for j in range(ra):
            m_part = cocycle.value((i, j)) if cocycle is not None else zm
            prod[(i, j)] = A.entry(i, j) + m_part
    for (i, k), v in M.left.items():
        prod[(i, ra + k)] = za + v
    for (k, j), v in M.right.items():
        prod[(ra + k, j)] = za + v
    for (k, l), v in fiber_product.items():
        prod[(ra + k, ra + l)] = za + v
    return ConformalAlgebra(ra + rm, prod)


def split_extension(A: ConformalAlgebra, M: ConformalBimodule,
                    fiber_product: Mapping | None = None) -> SplitExtension:
    """Total algebra with product ``(a,u)(b,v) = (ab, a.v + u.b + uv)``; associativity is checked."""
    if M.over != A:
        raise ValueError("bimodule is over a different algebra")
    fp = _check_table(fiber_product or {}, M.rank, "fiber_product")
    fp = {k: v for k, v in fp.items() if not vec_is_zero(v)}
    total = _assemble(A, M, fp, None)
    return SplitExtension(A, M, fp, total, check_associativity(total))


def trivial_extension(A: ConformalAlgebra, M: ConformalBimodule | None = None) -> SplitExtension:
    return split_extension(A, M if M is not None else A.regular, {})


def pullback_phi(ext: SplitExtension, phi: Cochain) -> Cochain:
    """``p . phi . q^n``: restrict to base generator tuples and keep the base coordinates."""
    if not phi.is_algebra_valued or phi.algebra != ext.total:
        raise ValueError("pullback needs an algebra-valued cochain over the total algebra")
    ra = ext.rank_a
    values = {}
    for idx, v in phi.values.items():
        if all(a < ra for a in idx):
            pv = ext.p(v)
            if not vec_is_zero(pv):
                values[idx] = pv
    return Cochain(phi.degree, ext.base, values, check=False)


def _ext_trial_seed(seed, trial: int, tag: str):
    return f"{seed}:{trial}:{tag}"


def _compare(rep: Report, counts: dict, name: str, lhs: Cochain, rhs: Cochain, ctx: dict) -> None:
    counts[name] = counts.get(name, 0) + 1
    w = first_difference(lhs, rhs)
    if w is not None and rep.passed:
        rep.passed = False
        rep.witness = w
        rep.details["first_failure"] = dict(ctx, identity=name)


def check_pullback_commutes_with_d(ext: SplitExtension, seed=0, trials: int = 10,
                                   degrees=(0, 1, 2), caps=(1, 1)) -> Report:
    """Pullback commutes with the differentials: ``d(p phi q^n) = p (d phi) q^(n+1)``.

    Degree 0 is the statement for constant representatives modulo d.
    """
    rep = Report("extension.pullback_commutes_with_d", True, seed=seed,
                 inputs={"trials": trials, "degrees": list(degrees), "caps": list(caps)})
    counts: dict = {}
    _require_associative(ext, rep)
    for n in degrees:
        z = zero_cochain(ext.total, n)
        _compare(rep, counts, "zero", pullback_phi(ext, differential(z)),
                 differential(pullback_phi(ext, z)), {"degree": n})
    for trial in range(trials):
        for n in degrees:
            phi = random_cochain(ext.total, None, n, caps, seed=_ext_trial_seed(seed, trial, "pullback"))
            _compare(rep, counts, f"degree{n}", pullback_phi(ext, differential(phi)),
                     differential(pullback_phi(ext, phi)), {"trial": trial, "degree": n})
    rep.details["cases"] = counts
    return rep


def check_ring_morphism(ext: SplitExtension, seed=0, trials: int = 10, degrees=(0, 1, 2),
                        caps=(1, 1)) -> Report:
    """Pullback is multiplicative for the cup product at cochain level, all degree pairs."""
    rep = Report("extension.ring_morphism", True, seed=seed,
                 inputs={"trials": trials, "degrees": list(degrees), "caps": list(caps)})
    counts: dict = {}
    _require_associative(ext, rep)
    for trial in range(trials):
        for s in degrees:
            f = random_cochain(ext.total, None, s, caps, seed=_ext_trial_seed(seed, trial, "f"))
            pf = pullback_phi(ext, f)
            for t in degrees:
                g = random_cochain(ext.total, None, t, caps, seed=_ext_trial_seed(seed, trial, "g"))
                _compare(rep, counts, f"{s},{t}", pullback_phi(ext, cup(f, g)),
                         cup(pf, pullback_phi(ext, g)), {"trial": trial, "degrees": [s, t]})
    rep.details["cases"] = counts
    return rep


def _require_associative(ext: SplitExtension, rep: Report) -> None:
    if not ext.is_associative:
        rep.details["precondition"] = "total algebra is not associative"


def check_maps(ext: SplitExtension, seed=0, trials: int = 10) -> Report:
    """p and q multiplicative on random elements, p(q(a)) = a, and i(M) i(M) inside the fiber block."""
    rep = Report("extension.maps", True, seed=seed, inputs={"trials": trials})
    rng = random.Random(f"maps:{seed}")
    ra, rm = ext.rank_a, ext.rank_m
    nu = L(1)

    def elem(rank):
        return tuple(Poly({(rng.randint(0, 1),): rng.randint(-3, 3), (): rng.randint(-3, 3)})
                     for _ in range(rank))

    def fail(what, diff):
        if rep.passed:
            rep.passed = False
            rep.details["failed"] = what
            rep.details["difference"] = [str(p) for p in diff]

    q_morphism = ext.cocycle is None
    for _ in range(trials):
        x, y = elem(ra + rm), elem(ra + rm)
        a, b = elem(ra), elem(ra)
        u, v = elem(rm), elem(rm)
        lhs = ext.p(lambda_product(ext.total, x, y, nu))
        rhs = lambda_product(ext.base, ext.p(x), ext.p(y), nu)
        if lhs != rhs:
            fail("p multiplicative", tuple(l - r for l, r in zip(lhs, rhs)))
        if ext.p(ext.q(a)) != a:
            fail("p(q(a)) = a", a)
        if q_morphism:
            lhs = ext.q(lambda_product(ext.base, a, b, nu))
            rhs = lambda_product(ext.total, ext.q(a), ext.q(b), nu)
            if lhs != rhs:
                fail("q multiplicative", tuple(l - r for l, r in zip(lhs, rhs)))
        prod_i = lambda_product(ext.total, ext.i(u), ext.i(v), nu)
        if not vec_is_zero(ext.p(prod_i)):
            fail("i(M) i(M) in fiber block", prod_i)
    rep.details["q_checked"] = q_morphism
    return rep


def extension_from_2cocycle(A: ConformalAlgebra, M: ConformalBimodule, phi: Cochain) -> SplitExtension:
    """Total algebra with product ``(a,u)(b,v) = (ab, a.v + u.b + phi(a, b))``.

    Associativity of the total algebra and vanishing of ``d phi`` are
    computed independently; their disagreement raises.
    """
    if phi.degree != 2 or phi.coeffs != M:
        raise ValueError("need a 2-cochain with coefficients in the given bimodule")
    if M.over != A:
        raise ValueError("bimodule is over a different algebra")
    total = _assemble(A, M, {}, phi)
    assoc = check_associativity(total)
    dphi = differential(phi)
    cocycle = dphi.is_zero
    if assoc.passed != cocycle:
        raise ExtensionConsistencyError(
            f"associativity {assoc.status} but d(phi) {'= 0' if cocycle else '!= 0'}")
    verdict = {"associative": assoc.passed, "cocycle": cocycle,
               "bimodule": check_bimodule(M).passed}
    if not cocycle:
        w = first_difference(dphi, zero_cochain(M, 3))
        verdict["d_phi_witness"] = w.describe()
    return SplitExtension(A, M, {}, total, assoc, cocycle=phi, verdict=verdict)


def check_extension_verdicts(A: ConformalAlgebra, M: ConformalBimodule | None = None,
                             seed=0, trials: int = 100, caps=(1, 1)) -> Report:
    """extension_from_2cocycle on a mix of coboundaries, cocycle multiples and random 2-cochains."""
    M = M if M is not None else A.regular
    rep = Report("extension.cocycle_verdict", True, seed=seed,
                 inputs={"trials": trials, "caps": list(caps)})
    tally = {"associative": 0, "non_associative": 0}
    rho = rho_cochain(A) if M == A.regular else None
    for trial in range(trials):
        kind = trial % 3
        s = _ext_trial_seed(seed, trial, "verdict")
        if kind == 0:
            phi = differential(random_cochain(A, M, 1, caps, seed=s))
        elif kind == 1 and rho is not None:
            phi = rho.scale(trial % 5 - 2) + differential(random_cochain(A, M, 1, caps, seed=s))
        else:
            phi = random_cochain(A, M, 2, caps, seed=s)
        try:
            ext = extension_from_2cocycle(A, M, phi)
        except ExtensionConsistencyError as exc:
            rep.passed = False
            rep.details.setdefault("disagreements", []).append({"trial": trial, "error": str(exc)})
            continue
        tally["associative" if ext.is_associative else "non_associative"] += 1
    rep.details["outcomes"] = tally
    return rep


def pullback_derivation_check(ext: SplitExtension) -> Report:
    """The derivation ``x -> d x`` of the total algebra pulls back to the one of the base."""
    lhs = pullback_phi(ext, del_cochain(ext.total))
    rhs = del_cochain(ext.base)
    w = first_difference(lhs, rhs)
    return Report("extension.pullback_derivation", w is None, witness=w)


def pullback_rho_check(ext: SplitExtension) -> Report:
    lhs = pullback_phi(ext, rho_cochain(ext.total))
    w = first_difference(lhs, rho_cochain(ext.base))
    return Report("extension.pullback_rho", w is None, witness=w)


def run_extension_suite(ext: SplitExtension, seed=0, trials: int = 10, caps=(1, 1),
                        verdict_trials: int = 30) -> list[Report]:
    reports = [ext.associativity]
    reports[0] = Report("extension.associativity", ext.associativity.passed,
                        witness=ext.associativity.witness, inputs={"rank": ext.total.rank})
    reports.append(check_maps(ext, seed, trials))
    if ext.is_associative:
        reports.append(pullback_rho_check(ext))
        reports.append(pullback_derivation_check(ext))
        if ext.cocycle is None:
            reports.append(check_pullback_commutes_with_d(ext, seed, trials, caps=caps))
            reports.append(check_ring_morphism(ext, seed, trials, caps=caps))
    if verdict_trials:
        reports.append(check_extension_verdicts(ext.base, ext.fiber, seed, verdict_trials, caps))
    return reports
