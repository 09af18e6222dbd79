"""Finite-rank free Q[d]-modules with polynomial structure constants.

A structure table maps a generator pair ``(i, j)`` to a ``PolyVector``
over ``{d, l1}``; ``l1`` plays the formal lambda.  Every other product is
obtained from the table by the sesquilinear extension rule, see
:func:`act`.  Tables are stored sparsely: missing pairs are zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Mapping, Sequence, Union

from .polyring import DEL, ONE, ZERO, D, L, Poly, Var, lam
from .report import Report, Witness

PolyVector = tuple  # tuple[Poly, ...]
Table = Mapping[tuple[int, int], PolyVector]

NU = lam(1)  # formal lambda of structure tables


def zero_vec(rank: int) -> PolyVector:
    return (ZERO,) * rank


def unit_vec(rank: int, i: int, coeff: Poly = ONE) -> PolyVector:
    return tuple(coeff if k == i else ZERO for k in range(rank))


def vec(*entries) -> PolyVector:
    return tuple(e if isinstance(e, Poly) else Poly.const(e) for e in entries)


def vec_add(x: PolyVector, y: PolyVector) -> PolyVector:
    return tuple(a + b for a, b in zip(x, y))


def vec_sub(x: PolyVector, y: PolyVector) -> PolyVector:
    return tuple(a - b for a, b in zip(x, y))


def vec_scale(x: PolyVector, c) -> PolyVector:
    return tuple(a * c for a in x)


def vec_is_zero(x: PolyVector) -> bool:
    return not any(x)


def vec_subs(x: PolyVector, mapping: Mapping[Var, Poly]) -> PolyVector:
    return tuple(a.subs(mapping) for a in x)


def _clean_table(table: Mapping, shape: tuple[int, int], out_rank: int, what: str) -> dict:
    cleaned = {}
    for (i, j), v in table.items():
        if not (0 <= i < shape[0] and 0 <= j < shape[1]):
            raise ValueError(f"{what} entry ({i}, {j}) outside a {shape[0]}x{shape[1]} table")
        v = tuple(e if isinstance(e, Poly) else Poly.const(e) for e in v)
        if len(v) != out_rank:
            raise ValueError(f"{what} entry ({i}, {j}) has length {len(v)}, expected {out_rank}")
        for e in v:
            if e.max_var_index() > 1:
                raise ValueError(f"{what} entry ({i}, {j}) uses a variable other than d, l1")
        if not vec_is_zero(v):
            cleaned[(i, j)] = v
    return cleaned


def _table_degree(table: Mapping) -> int:
    return max((p.total_degree() for v in table.values() for p in v), default=0)


@dataclass(frozen=True)
class ConformalAlgebra:
    rank: int
    prod: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError("rank must be positive")
        object.__setattr__(self, "prod", _clean_table(self.prod, (self.rank, self.rank), self.rank, "prod"))

    def entry(self, i: int, j: int) -> PolyVector:
        return self.prod.get((i, j)) or zero_vec(self.rank)

    @cached_property
    def regular(self) -> "ConformalBimodule":
        return ConformalBimodule(self.rank, self, dict(self.prod), dict(self.prod))

    def table_degree(self) -> int:
        return _table_degree(self.prod)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, ConformalAlgebra):
            return NotImplemented
        return self.rank == other.rank and self.prod == other.prod

    __hash__ = None


@dataclass(frozen=True)
class ConformalBimodule:
    rank: int
    over: ConformalAlgebra
    left: dict = field(default_factory=dict)
    right: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError("rank must be positive")
        r, a = self.rank, self.over.rank
        object.__setattr__(self, "left", _clean_table(self.left, (a, r), r, "left"))
        object.__setattr__(self, "right", _clean_table(self.right, (r, a), r, "right"))

    @cached_property
    def is_regular(self) -> bool:
        alg = self.over
        return self.rank == alg.rank and self.left == alg.prod and self.right == alg.prod

    def table_degree(self) -> int:
        return max(_table_degree(self.left), _table_degree(self.right), self.over.table_degree())

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, ConformalBimodule):
            return NotImplemented
        return (self.rank == other.rank and self.left == other.left
                and self.right == other.right and self.over == other.over)

    __hash__ = None


def _as_poly(nu: Union[Var, Poly]) -> Poly:
    return Poly.var(nu) if isinstance(nu, Var) else nu


def act(table: Mapping, out_rank: int, x: PolyVector, y: PolyVector, nu: Poly) -> PolyVector:
    """Sesquilinear extension of a generator table.

    With ``x = sum p_i e_i`` and ``y = sum q_j e_j``, returns
    ``sum p_i(d := -nu) * q_j(d := d + nu) * table[i, j](l1 := nu)``.
    Variables of ``x`` and ``y`` other than ``d`` pass through.
    """
    xs = [(i, p if p.is_constant else p.substitute(DEL, -nu)) for i, p in enumerate(x) if p]
    if not xs:
        return zero_vec(out_rank)
    shifted = D + nu
    ys = [(j, q if q.is_constant else q.substitute(DEL, shifted)) for j, q in enumerate(y) if q]
    acc = [ZERO] * out_rank
    sub = {NU: nu}
    for (i, p), (j, q) in product(xs, ys):
        entry = table.get((i, j))
        if entry is None:
            continue
        c = p * q
        for k, e in enumerate(entry):
            if e:
                acc[k] = acc[k] + c * e.subs(sub)
    return tuple(acc)


def _check_collision(nu, *args: PolyVector) -> None:
    if isinstance(nu, Var):
        for x in args:
            for p in x:
                if nu in p.variables():
                    raise ValueError(f"spectral variable {nu!r} collides with a spectator variable")


def _check_rank(x: PolyVector, rank: int, what: str) -> None:
    if len(x) != rank:
        raise ValueError(f"{what} has length {len(x)}, expected rank {rank}")


def lambda_product(alg: ConformalAlgebra, x: PolyVector, y: PolyVector, nu) -> PolyVector:
    _check_rank(x, alg.rank, "left operand")
    _check_rank(y, alg.rank, "right operand")
    _check_collision(nu, x, y)
    return act(alg.prod, alg.rank, x, y, _as_poly(nu))


def left_action(M: ConformalBimodule, a: PolyVector, v: PolyVector, nu) -> PolyVector:
    _check_rank(a, M.over.rank, "algebra element")
    _check_rank(v, M.rank, "module element")
    _check_collision(nu, a, v)
    return act(M.left, M.rank, a, v, _as_poly(nu))


def right_action(M: ConformalBimodule, v: PolyVector, a: PolyVector, nu) -> PolyVector:
    _check_rank(v, M.rank, "module element")
    _check_rank(a, M.over.rank, "algebra element")
    _check_collision(nu, v, a)
    return act(M.right, M.rank, v, a, _as_poly(nu))


_LAMBDA = L(1)
_MU = L(2)
_ASSOC_VARS = "lambda=l1, mu=l2"


def _triple_witness(check: str, triples, lhs, rhs, ranks) -> Report:
    for t in triples:
        diff = vec_sub(lhs(t), rhs(t))
        if not vec_is_zero(diff):
            return Report(check, False, witness=Witness(t, _ASSOC_VARS, diff))
    return Report(check, True)


def check_associativity(alg: ConformalAlgebra) -> Report:
    """``(a_l b)_{l+m} c == a_l (b_m c)`` on all generator triples."""
    r = alg.rank
    e = [unit_vec(r, i) for i in range(r)]
    t = alg.prod

    def lhs(ijk):
        i, j, k = ijk
        return act(t, r, act(t, r, e[i], e[j], _LAMBDA), e[k], _LAMBDA + _MU)

    def rhs(ijk):
        i, j, k = ijk
        return act(t, r, e[i], act(t, r, e[j], e[k], _MU), _LAMBDA)

    rep = _triple_witness("associativity", product(range(r), repeat=3), lhs, rhs, r)
    rep.inputs["rank"] = r
    return rep


def check_bimodule(M: ConformalBimodule) -> Report:
    """Left, right and two-sided bimodule axioms on generator triples."""
    ra, rm = M.over.rank, M.rank
    ea = [unit_vec(ra, i) for i in range(ra)]
    em = [unit_vec(rm, i) for i in range(rm)]
    P, Lt, Rt = M.over.prod, M.left, M.right
    lam_, mu, both = _LAMBDA, _MU, _LAMBDA + _MU

    checks = [
        ("bimodule.left",
         product(range(ra), range(ra), range(rm)),
         lambda t: act(Lt, rm, act(P, ra, ea[t[0]], ea[t[1]], lam_), em[t[2]], both),
         lambda t: act(Lt, rm, ea[t[0]], act(Lt, rm, ea[t[1]], em[t[2]], mu), lam_)),
        ("bimodule.right",
         product(range(rm), range(ra), range(ra)),
         lambda t: act(Rt, rm, act(Rt, rm, em[t[0]], ea[t[1]], lam_), ea[t[2]], both),
         lambda t: act(Rt, rm, em[t[0]], act(P, ra, ea[t[1]], ea[t[2]], mu), lam_)),
        ("bimodule.middle",
         product(range(ra), range(rm), range(ra)),
         lambda t: act(Rt, rm, act(Lt, rm, ea[t[0]], em[t[1]], lam_), ea[t[2]], both),
         lambda t: act(Lt, rm, ea[t[0]], act(Rt, rm, em[t[1]], ea[t[2]], mu), lam_)),
    ]
    for name, triples, lhs, rhs in checks:
        rep = _triple_witness(name, triples, lhs, rhs, rm)
        if not rep.passed:
            rep.check = "bimodule"
            rep.details["axiom"] = name
            return rep
    return Report("bimodule", True, inputs={"rank": rm})


def cur(structure: Sequence[Sequence[Sequence]]) -> ConformalAlgebra:
    """Current algebra ``Q[d] (x) A`` of a finite-dimensional algebra.

    ``structure[i][j]`` is the coordinate vector of ``a_i * a_j``.
    """
    r = len(structure)
    prod_table = {}
    for i, row in enumerate(structure):
        if len(row) != r:
            raise ValueError("structure constants must form an r x r x r array")
        for j, v in enumerate(row):
            if len(v) != r:
                raise ValueError("structure constants must form an r x r x r array")
            prod_table[(i, j)] = tuple(Poly.const(_rational(c)) for c in v)
    return ConformalAlgebra(r, prod_table)


def _rational(c):
    if isinstance(c, str):
        return Fraction(c)
    return c


def regular_bimodule(alg: ConformalAlgebra) -> ConformalBimodule:
    return alg.regular
