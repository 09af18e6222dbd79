"""Insertion, bracket and cup product on algebra-valued cochains, with identity checkers.

Slots are numbered by cochain degree: a degree-m cochain has slots
1..m.  The classical pre-Lie composition on ``U_{m-1}`` uses slots
0..m-1; every formula below has been shifted by one, so slot i here is
slot i-1 there, and the degree shifts ``m - 1`` appear in all signs.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from .cochain import (
    Cochain,
    _finish,
    _mod_d,
    _new_acc,
    _require_algebra_valued,
    _slot_terms,
    constant_cochain,
    del_cochain,
    differential,
    first_difference,
    graft,
    random_cochain,
    tuples,
    zero_cochain,
)
from .confalg import NU, ConformalAlgebra, check_associativity, unit_vec
from .polyring import ZERO, D, lam_sum
from .report import Report


def sgn(k: int) -> int:
    return -1 if k % 2 else 1


def rho_cochain(alg: ConformalAlgebra) -> Cochain:
    """The multiplication ``rho_l(a, b) = a_l b`` as a 2-cochain."""
    return Cochain(2, alg, dict(alg.prod), check=False)


def circ_i(f: Cochain, g: Cochain, i: int) -> Cochain:
    if f.degree < 1 or g.degree < 1:
        raise ValueError("circ_i needs cochains of degree >= 1")
    return graft(f, g, i)


def bullet(f: Cochain, g: Cochain) -> Cochain:
    _require_algebra_valued(f, g)
    m, n = f.degree, g.degree
    out = zero_cochain(f.coeffs, m + n - 1)
    if m < 1 or n < 0:
        return out  # b . f = 0 for b of degree 0
    for i in range(1, m + 1):
        term = graft(f, g, i)
        out = out + term.scale(sgn((n - 1) * (i - 1)))
    return out


def bracket(f: Cochain, g: Cochain) -> Cochain:
    m, n = f.degree, g.degree
    return bullet(f, g) - bullet(g, f).scale(sgn((m - 1) * (n - 1)))


def cup(f: Cochain, g: Cochain) -> Cochain:
    """``(f u g)(a_1..a_{m+n}) = f(a_1..a_m) _{l_1+...+l_m} g(a_{m+1}..)``.

    Degree 0 operands follow the implicit-last-lambda rule: on the left the
    spectral parameter is 0, on the right it is ``-d``.
    """
    _require_algebra_valued(f, g)
    m, n = f.degree, g.degree
    A = f.algebra
    r = A.rank
    N = m + n
    if m < 0 or n < 0 or f.is_zero or g.is_zero:
        return zero_cochain(f.coeffs, N)
    if m >= 1 and n >= 1:
        nu = lam_sum(1, m)
    elif m == 0 and n >= 1:
        nu = ZERO
    else:
        nu = -D
    table = {key: tuple(e.subs({NU: nu}) for e in entry) for key, entry in A.prod.items()}
    fcache: dict = {}
    gcache: dict = {}
    fvals, gvals = f.values, g.values
    minus_nu, plus_nu = -nu, D + nu

    def fterms(idx):
        t = fcache.get(idx)
        if t is None:
            v = fvals.get(idx)
            t = () if v is None else _slot_terms(v, minus_nu)
            fcache[idx] = t
        return t

    def gterms(idx):
        t = gcache.get(idx)
        if t is None:
            v = gvals.get(idx)
            if v is None:
                t = ()
            else:
                t = _slot_terms(tuple(p.shift_lambdas(m) for p in v), plus_nu)
            gcache[idx] = t
        return t

    out = {}
    for a in tuples(r, N):
        ft = fterms(a[:m])
        if not ft:
            continue
        gt = gterms(a[m:])
        if not gt:
            continue
        acc = _new_acc(r)
        for j, p in ft:
            for k, q in gt:
                entry = table.get((j, k))
                if entry is None:
                    continue
                c = p * q
                for t, e in enumerate(entry):
                    if e:
                        acc[t].add(e, c)
        val = _finish(acc)
        if N == 0:
            val = _mod_d(val)
        if any(val):
            out[a] = val
    return Cochain(N, f.coeffs, out, check=False)


def correction_H(f: Cochain, g: Cochain, h: Cochain) -> Cochain:
    """Cochain whose differential measures the failure of the cup/bracket Leibniz rule.

    Sum over U-indices ``0 <= i <= p-2`` and ``m+i <= j <= m+p-2`` of
    ``(-1)^{(m-1)i + (n-1)j} (h o_i f) o_j g``, i.e. slots i+1 and j+1 here.
    """
    _require_algebra_valued(f, g, h)
    m, n, p = f.degree, g.degree, h.degree
    if p < 2:
        raise ValueError("the correction cochain needs deg h >= 2")
    out = zero_cochain(f.coeffs, m + n + p - 2)
    for i in range(p - 1):
        inner = graft(h, f, i + 1)
        for j in range(m + i, m + p - 1):
            term = graft(inner, g, j + 1)
            out = out + term.scale(sgn((m - 1) * i + (n - 1) * j))
    return out


def leibniz_defect(f: Cochain, g: Cochain, h: Cochain) -> Cochain:
    """``[f u g, h] - [f, h] u g - (-1)^{m(p-1)} f u [g, h]``."""
    m, p = f.degree, h.degree
    return (bracket(cup(f, g), h) - cup(bracket(f, h), g)
            - cup(f, bracket(g, h)).scale(sgn(m * (p - 1))))


def leibniz_predicted_sign(m: int, n: int, p: int) -> int:
    """Sign s with ``leibniz_defect = s * d(correction_H)`` for cocycles, p >= 2."""
    return -sgn((p - 1) * (m + n - 1) + (m - 1) * n)


# -- pre-Lie system ------------------------------------------------------------

def pre_lie_rhs(f: Cochain, g: Cochain, h: Cochain, i: int, j: int) -> Cochain:
    """Right-hand side of the pre-Lie system relation for ``(f o_i g) o_j h``."""
    n, p = g.degree, h.degree
    if 1 <= j < i:
        return graft(graft(f, h, j), g, i + p - 1)
    if i <= j <= i + n - 1:
        return graft(f, graft(g, h, j - i + 1), i)
    raise ValueError(f"slot pair ({i}, {j}) is outside both pre-Lie regimes")


def check_pre_lie_system(f: Cochain, g: Cochain, h: Cochain, i: int, j: int) -> Report:
    rhs = pre_lie_rhs(f, g, h, i, j)
    lhs = graft(graft(f, g, i), h, j)
    rep = _compare("pre_lie_system", lhs, rhs)
    rep.inputs.update(degrees=[f.degree, g.degree, h.degree], slots=[i, j])
    return rep


def legal_pre_lie_pairs(m: int, n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, m + 1) for j in range(1, m + n)
            if j < i or i <= j <= i + n - 1]


# -- identity suite ------------------------------------------------------------

def _compare(name: str, lhs: Cochain, rhs: Cochain) -> Report:
    w = first_difference(lhs, rhs)
    return Report(name, w is None, witness=w)


class _Tally:
    """Aggregates per-trial outcomes into one report per identity."""

    def __init__(self, seed: int) -> None:
        self.seed = seed
        self.reports: dict[str, Report] = {}
        self.counts: dict[str, int] = {}

    def add(self, name: str, lhs: Cochain, rhs: Cochain, context: dict) -> bool:
        w = first_difference(lhs, rhs)
        self.record(name, w is None, context, w)
        return w is None

    def record(self, name: str, ok: bool, context: dict, witness=None) -> None:
        rep = self.reports.get(name)
        if rep is None:
            rep = self.reports[name] = Report(name, True, seed=self.seed)
        self.counts[name] = self.counts.get(name, 0) + 1
        if not ok and rep.passed:
            rep.passed = False
            rep.witness = witness
            rep.details["first_failure"] = context

    def merge(self, other: "_Tally") -> None:
        for name, rep in other.reports.items():
            mine = self.reports.setdefault(name, Report(name, True, seed=self.seed))
            if mine.passed and not rep.passed:
                mine.passed, mine.witness = False, rep.witness
                mine.details["first_failure"] = rep.details.get("first_failure")
            for key, entry in rep.details.get("signs", {}).items():
                into = mine.details.setdefault("signs", {}).setdefault(
                    key, {"predicted": entry["predicted"], "observed": []})
                into["observed"] = sorted(set(into["observed"]) | set(entry["observed"]))
            for kind, k in rep.details.get("outcomes", {}).items():
                outcomes = mine.details.setdefault("outcomes", {})
                outcomes[kind] = outcomes.get(kind, 0) + k
            self.counts[name] = self.counts.get(name, 0) + other.counts.get(name, 0)

    def finish(self, inputs: dict) -> list[Report]:
        out = []
        for name in sorted(self.reports):
            rep = self.reports[name]
            rep.inputs.update(inputs)
            rep.details["cases"] = self.counts[name]
            rep.details.setdefault("summary", f"{self.counts[name]} cases")
            out.append(rep)
        return out


def _trial_rng(seed, trial: int) -> random.Random:
    return random.Random(f"identities:{seed}:{trial}")


def _rand(alg, n, caps, seed, trial, tag):
    return random_cochain(alg, None, n, caps, seed=f"{seed}:{trial}:{tag}")


def run_trial(alg: ConformalAlgebra, seed, trial: int, caps=(1, 1),
              degrees: Sequence[int] = (1, 2), zero_degree: bool = True) -> _Tally:
    """One trial of every random-input identity; degrees are drawn per identity."""
    rng = _trial_rng(seed, trial)
    tally = _Tally(seed)
    rho = rho_cochain(alg)
    pick = lambda: rng.choice(list(degrees))
    with_zero = list(degrees) + ([0] if zero_degree else [])
    pick0 = lambda: rng.choice(with_zero)
    R = lambda n, tag: _rand(alg, n, caps, seed, trial, tag)

    # pre-Lie system, every legal slot pair
    m, n, p = pick(), pick(), pick()
    f, g, h = R(m, "plf"), R(n, "plg"), R(p, "plh")
    ctx = {"trial": trial, "degrees": [m, n, p]}
    for i, j in legal_pre_lie_pairs(m, n):
        tally.add("pre_lie.system", graft(graft(f, g, i), h, j), pre_lie_rhs(f, g, h, i, j),
                  {**ctx, "slots": [i, j]})

    # graded pre-Lie identities of the signed sum
    fg, gh = bullet(f, g), bullet(g, h)
    assoc = bullet(fg, h) - bullet(f, gh)
    fh, hg = bullet(f, h), bullet(h, g)
    tally.add("pre_lie.right_symmetry", assoc,
              (bullet(fh, g) - bullet(f, hg)).scale(sgn((n - 1) * (p - 1))), ctx)
    rhs = zero_cochain(alg, m + n + p - 2)
    for i in range(1, m + 1):
        fig = graft(f, g, i)
        for j in range(1, m + n):
            if j < i or j >= i + n:
                rhs = rhs + graft(fig, h, j).scale(sgn((n - 1) * (i - 1) + (p - 1) * (j - 1)))
    tally.add("pre_lie.associator", assoc, rhs, ctx)

    # bracket: antisymmetry, Jacobi, derivation property of d
    m, n, p = pick0(), pick0(), pick0()
    f, g, h = R(m, "brf"), R(n, "brg"), R(p, "brh")
    ctx = {"trial": trial, "degrees": [m, n, p]}
    tally.add("bracket.antisymmetry", bracket(f, g),
              bracket(g, f).scale(-sgn((m - 1) * (n - 1))), ctx)
    tally.add("bracket.jacobi", bracket(f, bracket(g, h)),
              bracket(bracket(f, g), h) + bracket(g, bracket(f, h)).scale(sgn((m - 1) * (n - 1))),
              ctx)
    tally.add("bracket.differential", differential(bracket(f, g)),
              bracket(differential(f), g).scale(sgn(n + 1)) + bracket(f, differential(g)),
              ctx)

    # d = (-1)^{m+1} [rho, f]
    m = pick0()
    f = R(m, "drho")
    tally.add("differential.via_rho", differential(f), bracket(rho, f).scale(sgn(m + 1)),
              {"trial": trial, "degree": m})

    # cup product
    m, n, p = pick0(), pick0(), pick0()
    f, g, h = R(m, "cf"), R(n, "cg"), R(p, "ch")
    ctx = {"trial": trial, "degrees": [m, n, p]}
    tally.add("cup.associativity", cup(f, cup(g, h)), cup(cup(f, g), h), ctx)
    tally.add("cup.leibniz", differential(cup(f, g)),
              cup(differential(f), g) + cup(f, differential(g)).scale(sgn(m)), ctx)
    m, n = pick(), pick()
    f, g = R(m, "hf"), R(n, "hg")
    ctx = {"trial": trial, "degrees": [m, n]}
    tally.add("cup.via_insertion", cup(f, g), graft(graft(rho, f, 1), g, m + 1), ctx)
    tally.add("cup.via_insertion_reversed", cup(g, f), graft(graft(rho, f, 2), g, 1), ctx)
    tally.add("cup.homotopy",
              bullet(f, differential(g)) + bullet(differential(f), g).scale(sgn(n - 1))
              - differential(bullet(f, g)),
              (cup(g, f) - cup(f, g).scale(sgn(m * n))).scale(sgn(n - 1)), ctx)

    # bullet distributes over cup
    m, n, p = pick(), pick(), pick()
    f, g, h = R(m, "pf"), R(n, "pg"), R(p, "ph")
    tally.add("cup.bullet_distributivity", bullet(cup(f, g), h),
              cup(bullet(f, h), g) + cup(f, bullet(g, h)).scale(sgn(m * (p - 1))),
              {"trial": trial, "degrees": [m, n, p]})
    return tally


def _trial_job(args):
    return run_trial(*args)


def check_identities(alg: ConformalAlgebra, seed=0, trials: int = 10, caps=(1, 1),
                     degrees: Sequence[int] = (1, 2), zero_degree: bool = True,
                     pool: dict | None = None, pool_max_degree: int = 5,
                     workers: int = 0) -> list[Report]:
    """Run the whole identity suite; one aggregated report per identity.

    ``pool`` maps degree -> [(label, cocycle)] for the checks that need
    cocycle inputs; by default :func:`cocycle_pool` supplies it.
    """
    tally = _Tally(seed)
    assoc = check_associativity(alg)
    tally.reports["associativity"] = assoc
    tally.counts["associativity"] = 1
    mc = maurer_cartan(alg)
    tally.reports[mc.check] = mc
    tally.counts[mc.check] = 1
    jobs = [(alg, seed, t, caps, tuple(degrees), zero_degree) for t in range(trials)]
    if workers and workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_trial_job, jobs))
    else:
        results = [_trial_job(j) for j in jobs]
    for t in results:
        tally.merge(t)
    if pool is None:
        pool = cocycle_pool(alg)
    if pool:
        tally.merge(check_cocycle_identities(alg, pool, seed, max_degree=pool_max_degree))
    return tally.finish({"trials": trials, "caps": list(caps), "degrees": list(degrees)})


def maurer_cartan(alg: ConformalAlgebra) -> Report:
    """``[rho, rho] = 0``, equivalent to associativity."""
    rho = rho_cochain(alg)
    rep = _compare("maurer_cartan", bracket(rho, rho), zero_cochain(alg, 3))
    rep.inputs["rank"] = alg.rank
    return rep


# -- cocycle pools -------------------------------------------------------------

def center_constants(alg: ConformalAlgebra) -> list[Cochain]:
    """Basis of the degree-0 cocycles (constant b with d b = 0)."""
    from .linalg import kernel

    r = alg.rank
    columns = []
    for i in range(r):
        img = differential(constant_cochain(alg, unit_vec(r, i, 1)))
        col = {}
        for idx, v in img.values.items():
            for t, p in enumerate(v):
                for exps, c in p.terms():
                    col[(idx, exps, t)] = c
        columns.append(col)
    basis = []
    for combo in kernel(columns):
        vec = [combo.get(i, 0) for i in range(r)]
        basis.append(constant_cochain(alg, vec))
    return basis


def cocycle_pool(alg: ConformalAlgebra, seed=0) -> dict[int, list[tuple[str, Cochain]]]:
    """Cocycles built from rho, the derivation d, central constants and their cup products.

    A few coboundaries of small random cochains are mixed in so that the
    pool is not confined to classes with an obvious structure.
    """
    rho = rho_cochain(alg)
    der = del_cochain(alg)
    pool: dict[int, list[tuple[str, Cochain]]] = {0: [], 1: [], 2: [], 3: []}
    for k, b in enumerate(center_constants(alg)):
        pool[0].append((f"z{k}", b))
    pool[1].append(("der", der))
    pool[2].append(("rho", rho))
    pool[2].append(("der*der", cup(der, der)))
    pool[3].append(("rho*der", cup(rho, der)))
    pool[3].append(("der*rho", cup(der, rho)))
    psi0 = random_cochain(alg, None, 0, (0, 0), seed=f"pool:{seed}:0")
    pool[1].append(("d(psi0)+der", differential(psi0) + der))
    psi1 = random_cochain(alg, None, 1, (1, 0), seed=f"pool:{seed}:1")
    pool[2].append(("rho+d(psi1)", rho + differential(psi1)))
    return {k: v for k, v in pool.items() if v}


def check_cocycle_identities(alg: ConformalAlgebra, pool: dict, seed=0,
                             max_degree: int = 5) -> _Tally:
    """Correction-cochain identity and the cup/bracket Leibniz rule on cocycle triples.

    ``max_degree`` bounds m + n + p - 1, the degree of the compared cochains.
    """
    tally = _Tally(seed)
    for deg, items in pool.items():
        for label, c in items:
            tally.add("pool.cocycle", differential(c), zero_cochain(alg, deg + 1),
                      {"cocycle": label, "degree": deg})
    flat = [(d, label, c) for d, items in sorted(pool.items()) for label, c in items]
    for m, lf, f in flat:
        for n, lg, g in flat:
            for p, lh, h in flat:
                if m + n + p - 1 > max_degree:
                    continue
                ctx = {"f": lf, "g": lg, "h": lh, "degrees": [m, n, p]}
                defect = leibniz_defect(f, g, h)
                if min(m, n, p) >= 1 and p >= 2:
                    H = correction_H(f, g, h)
                    dH = differential(H)
                    stated = (bullet(h, cup(f, g)) - cup(bullet(h, f), g).scale(sgn(n * (p - 1)))
                              - cup(f, bullet(h, g))).scale(sgn((m - 1) * n))
                    tally.add("gerstenhaber.correction", dH, stated, ctx)
                    _record_sign(tally, defect, dH, m, n, p, ctx)
                elif p <= 1:
                    tally.add("gerstenhaber.leibniz_exact", defect,
                              zero_cochain(alg, m + n + p - 1), ctx)
                else:
                    _record_degenerate(tally, defect, ctx)
    return tally


def _record_degenerate(tally: _Tally, defect: Cochain, ctx) -> None:
    """m or n is zero and p >= 2: no correction cochain exists, so the defect must be a coboundary.

    Zero is the common case; otherwise an explicit preimage is searched
    for with caps raised by up to 2 and re-verified; none found is a failure.
    """
    from .cohomology import coboundary_witness

    name = "gerstenhaber.leibniz_degenerate"
    if defect.is_zero:
        tally.record(name, True, ctx, None)
        kind = "exact"
    else:
        psi = None
        for slack in range(3):
            psi = coboundary_witness(defect, slack=slack)
            if psi is not None:
                break
        w = None if psi is not None else first_difference(defect, zero_cochain(defect.coeffs, defect.degree))
        tally.record(name, psi is not None, ctx, w)
        kind = "coboundary" if psi is not None else "not_found"
    counts = tally.reports[name].details.setdefault("outcomes", {})
    counts[kind] = counts.get(kind, 0) + 1


def _record_sign(tally: _Tally, defect: Cochain, dH: Cochain, m, n, p, ctx) -> None:
    name = "gerstenhaber.leibniz_up_to_coboundary"
    key = f"{m},{n},{p}"
    if first_difference(defect, dH) is None:
        observed = 0 if dH.is_zero else 1
        ok, w = True, None
    else:
        w = first_difference(defect, dH.scale(-1))
        ok = w is None
        observed = -1 if ok else None
    tally.record(name, ok, ctx, w)
    rep = tally.reports[name]
    signs = rep.details.setdefault("signs", {})
    entry = signs.setdefault(key, {"predicted": leibniz_predicted_sign(m, n, p), "observed": []})
    if observed is not None and observed not in entry["observed"]:
        entry["observed"].append(observed)
        entry["observed"].sort()
