"""Conformal sesquilinear cochains and the Hochschild differential.

A degree-n cochain (n >= 1) is stored by its values on generator tuples;
each value is a ``PolyVector`` over ``d, l1, ..., l_{n-1}``.  Everything
else follows from sesquilinearity: a coefficient ``p(d)`` of the k-th
argument becomes ``p(-l_k)`` for k < n and ``p(d + l1 + ... + l_{n-1})``
in the last slot.

Degree 0 is ``M / dM``, represented by the unique constant coset
representative and stored under the empty tuple.  Negative degrees are
the zero space; they appear as the degree of ``[b, b']`` for b, b' in
degree 0.

The parameter of the last slot is never stored.  Whenever a formula asks
for it, it equals ``-d - (sum of the other parameters)``; this is what
the substitutions ``l := -d`` in the degree-0 formulas amount to.
"""

from __future__ import annotations

import random
from itertools import product
from typing import Iterable, Mapping, Sequence, Union

from .confalg import (
    NU,
    ConformalAlgebra,
    ConformalBimodule,
    PolyVector,
    check_associativity,
    check_bimodule,
    unit_vec,
    vec_add,
    vec_is_zero,
    vec_scale,
    vec_sub,
    zero_vec,
)
from .polyring import DEL, ONE, ZERO, D, L, Poly, TermSum, Var, lam, lam_sum
from .report import Report, Witness


class Cochain:
    """An n-cochain with values in a bimodule, immutable once built."""

    __slots__ = ("degree", "coeffs", "values")

    def __init__(self, degree: int, coeffs: Union[ConformalBimodule, ConformalAlgebra],
                 values: Mapping | None = None, *, check: bool = True) -> None:
        if isinstance(coeffs, ConformalAlgebra):
            coeffs = coeffs.regular
        self.degree = degree
        self.coeffs = coeffs
        vals = {}
        for idx, v in (values or {}).items():
            idx = tuple(idx)
            v = tuple(e if isinstance(e, Poly) else Poly.const(e) for e in v)
            if check:
                self._validate(idx, v)
            if not vec_is_zero(v):
                vals[idx] = v
        self.values = vals

    def _validate(self, idx: tuple, v: PolyVector) -> None:
        n, ra = self.degree, self.coeffs.over.rank
        if n < 0:
            raise ValueError("negative-degree cochains are zero")
        if len(idx) != n or any(not 0 <= i < ra for i in idx):
            raise ValueError(f"bad generator tuple {idx} for a degree-{n} cochain")
        if len(v) != self.coeffs.rank:
            raise ValueError(f"value at {idx} has length {len(v)}, expected {self.coeffs.rank}")
        top = 0 if n <= 1 else n - 1
        for p in v:
            if n == 0 and not p.is_constant:
                raise ValueError("degree-0 representatives must be constant")
            if p.max_var_index() > top:
                raise ValueError(f"value at {idx} uses a lambda outside l1..l{n - 1}")

    @property
    def algebra(self) -> ConformalAlgebra:
        return self.coeffs.over

    @property
    def is_algebra_valued(self) -> bool:
        return self.coeffs.is_regular

    def value(self, idx: Sequence[int]) -> PolyVector:
        return self.values.get(tuple(idx)) or zero_vec(self.coeffs.rank)

    @property
    def is_zero(self) -> bool:
        return not self.values

    def _same_space(self, other: "Cochain") -> None:
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        if self.coeffs is not other.coeffs and self.coeffs != other.coeffs:
            raise ValueError("cochains live in different coefficient modules")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._same_space(other)
        out = dict(self.values)
        for idx, v in other.values.items():
            out[idx] = vec_add(out[idx], v) if idx in out else v
        return Cochain(self.degree, self.coeffs, out, check=False)

    def __neg__(self) -> "Cochain":
        return self.scale(-1)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def scale(self, c) -> "Cochain":
        if c == 1:
            return self
        return Cochain(self.degree, self.coeffs,
                       {k: vec_scale(v, c) for k, v in self.values.items()}, check=False)

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return (self.degree == other.degree
                and (self.coeffs is other.coeffs or self.coeffs == other.coeffs)
                and self.values == other.values)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Cochain(degree={self.degree}, rank={self.coeffs.rank}, nonzero={len(self.values)})"


def zero_cochain(coeffs, degree: int) -> Cochain:
    return Cochain(degree, coeffs, {}, check=False)


def constant_cochain(coeffs, vector: Sequence) -> Cochain:
    """Degree-0 cochain; the vector is reduced modulo d."""
    v = tuple(e if isinstance(e, Poly) else Poly.const(e) for e in vector)
    return Cochain(0, coeffs, {(): _mod_d(v)})


def identity_cochain(alg: ConformalAlgebra) -> Cochain:
    r = alg.rank
    return Cochain(1, alg, {(i,): unit_vec(r, i) for i in range(r)}, check=False)


def del_cochain(alg: ConformalAlgebra) -> Cochain:
    """The derivation ``a -> d a``, a 1-cocycle of every conformal algebra."""
    r = alg.rank
    return Cochain(1, alg, {(i,): unit_vec(r, i, D) for i in range(r)}, check=False)


def _mod_d(v: PolyVector) -> PolyVector:
    return tuple(p if p.is_constant else p.substitute(DEL, ZERO) for p in v)


def tuples(rank: int, n: int) -> Iterable[tuple]:
    return product(range(rank), repeat=n)


# -- substitution caches ---------------------------------------------------

_MISSING = object()


class _Sub:
    """Cochain values with the lambda parameters replaced by fixed polynomials."""

    __slots__ = ("values", "transform", "cache")

    def __init__(self, phi: Cochain, lams: Sequence[Poly]) -> None:
        self.values = phi.values
        self.cache: dict = {}
        self.transform = _plan(lams)

    def __call__(self, idx: tuple):
        v = self.cache.get(idx, _MISSING)
        if v is _MISSING:
            raw = self.values.get(idx)
            t = self.transform
            v = raw if raw is None or t is None else tuple(t(p) for p in raw)
            self.cache[idx] = v
        return v


def _plan(lams: Sequence[Poly]):
    """Cheapest polynomial map realising ``l_j := lams[j-1]``; None for the identity."""
    j = 0
    while j < len(lams) and lams[j] == L(j + 1):
        j += 1
    if j == len(lams):
        return None
    # l_1..l_j fixed; is lams[j] a run l_i + ... + l_{i+w-1} followed by a relabelling?
    i = j + 1
    head = lams[j]
    width = len(head)
    if (head == lam_sum(i, i + width - 1)
            and all(p == L(i + width + t) for t, p in enumerate(lams[j + 1:]))):
        return lambda p: p.spread_lambda(i, width)
    if j == 0:
        for s in range(1, len(lams) + 1):
            if all(p == L(t + 1 + s) for t, p in enumerate(lams)):
                return lambda p: p.shift_lambdas(s)
    mapping = {lam(t + 1): p for t, p in enumerate(lams) if p != L(t + 1)}
    return lambda p: p.subs(mapping)


def _slot_terms(x: PolyVector, target: Poly) -> list:
    """Nonzero coefficients of ``x`` with ``d`` replaced by ``target``."""
    if target == D:
        return [(i, p) for i, p in enumerate(x) if p]
    return [(i, p if p.is_constant else p.substitute(DEL, target)) for i, p in enumerate(x) if p]


def _new_acc(rank: int) -> list:
    return [TermSum() for _ in range(rank)]


def _accumulate(acc: list, c: Poly, v: PolyVector, sign: int = 1) -> None:
    for k, e in enumerate(v):
        if e:
            acc[k].add(e, c, sign)


def _finish(acc: list) -> PolyVector:
    return tuple(t.value() for t in acc)


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, Var):
        return Poly.var(x)
    return Poly.const(x)


# -- evaluation and grafting -----------------------------------------------

def evaluate(phi: Cochain, args: Sequence[PolyVector], lams: Sequence = ()) -> PolyVector:
    """Value of ``phi_{lams}(args)`` for arbitrary arguments.

    Argument coefficients may contain variables other than ``d``; they are
    treated as scalars.  ``lams`` may be variables or polynomials.
    """
    n = phi.degree
    if n < 1:
        raise ValueError("evaluate needs a cochain of degree >= 1")
    if len(args) != n or len(lams) != n - 1:
        raise ValueError(f"degree-{n} cochain takes {n} arguments and {n - 1} lambdas")
    ra = phi.algebra.rank
    for x in args:
        if len(x) != ra:
            raise ValueError("argument rank mismatch")
    lams = [_as_poly(p) for p in lams]
    total = sum(lams, ZERO)
    slots = [_slot_terms(x, -lams[k]) for k, x in enumerate(args[:-1])]
    slots.append(_slot_terms(args[-1], D + total))
    return _expand(_Sub(phi, lams), slots, phi.coeffs.rank)


def _expand(sub: _Sub, slots: list, out_rank: int) -> PolyVector:
    acc = _new_acc(out_rank)
    for combo in product(*slots):
        v = sub(tuple(i for i, _ in combo))
        if v is None:
            continue
        c = ONE
        for _, p in combo:
            if p != ONE:
                c = c * p
        _accumulate(acc, c, v)
    return _finish(acc)


def _require_algebra_valued(*cochains: Cochain) -> None:
    alg = cochains[0].algebra
    for c in cochains:
        if not c.is_algebra_valued:
            raise ValueError("only algebra-valued cochains compose")
        if c.algebra is not alg and c.algebra != alg:
            raise ValueError("cochains over different algebras")


def graft(f: Cochain, g: Cochain, i: int) -> Cochain:
    """Insert ``g`` into slot ``i`` (1-based) of ``f``; result has degree m + n - 1."""
    _require_algebra_valued(f, g)
    m, n = f.degree, g.degree
    if m < 1 or not 1 <= i <= m:
        raise IndexError(f"slot {i} out of range for a degree-{m} cochain")
    N = m + n - 1
    M = f.coeffs
    if n < 0 or f.is_zero or g.is_zero:
        return zero_cochain(M, N)
    r = M.rank
    out = {}
    if n == 0:
        b = [(k, p) for k, p in enumerate(g.values[()]) if p]
        if i < m:
            f_lams = [L(k) for k in range(1, i)] + [ZERO] + [L(k) for k in range(i, N)]
        elif m >= 2:
            f_lams = [L(k) for k in range(1, m - 1)] + [-(D + lam_sum(1, m - 2))]
        else:
            f_lams = []
        fsub = _Sub(f, f_lams)
        for a in tuples(r, N):
            acc = _new_acc(r)
            pre, post = a[:i - 1], a[i - 1:]
            for k, c in b:
                v = fsub(pre + (k,) + post)
                if v is not None:
                    _accumulate(acc, c, v)
            val = _finish(acc)
            if N == 0:
                val = _mod_d(val)
            if any(val):
                out[a] = val
        return Cochain(N, M, out, check=False)

    if i < m:
        block = lam_sum(i, i + n - 1)
        f_lams = [L(k) for k in range(1, i)] + [block] + [L(k) for k in range(i + n, N)]
        target = -block
    else:
        f_lams = [L(k) for k in range(1, m)]
        target = D + lam_sum(1, m - 1)
    fsub = _Sub(f, f_lams)
    gvals = g.values
    gcache: dict = {}
    for a in tuples(r, N):
        gi = a[i - 1:i - 1 + n]
        terms = gcache.get(gi)
        if terms is None:
            raw = gvals.get(gi)
            if raw is None:
                terms = ()
            else:
                terms = _slot_terms(tuple(p.shift_lambdas(i - 1) for p in raw), target)
            gcache[gi] = terms
        if not terms:
            continue
        pre, post = a[:i - 1], a[i - 1 + n:]
        acc = _new_acc(r)
        hit = False
        for k, c in terms:
            v = fsub(pre + (k,) + post)
            if v is not None:
                _accumulate(acc, c, v)
                hit = True
        if hit:
            val = _finish(acc)
            if any(val):
                out[a] = val
    return Cochain(N, M, out, check=False)


# -- the differential --------------------------------------------------------

def differential(phi: Cochain) -> Cochain:
    n = phi.degree
    M = phi.coeffs
    A = M.over
    ra, rm = A.rank, M.rank
    if n < 0 or phi.is_zero:
        return zero_cochain(M, n + 1)
    out = {}
    if n == 0:
        v = [(j, p) for j, p in enumerate(phi.values[()]) if p]
        at_minus_d = {NU: -D}
        at_zero = {NU: ZERO}
        for a in range(ra):
            acc = _new_acc(rm)
            for j, c in v:
                left = M.left.get((a, j))
                if left is not None:
                    _accumulate(acc, c, tuple(e.subs(at_minus_d) for e in left))
                right = M.right.get((j, a))
                if right is not None:
                    _accumulate(acc, c, tuple(e.subs(at_zero) for e in right), -1)
            val = _finish(acc)
            if any(val):
                out[(a,)] = val
        return Cochain(1, M, out, check=False)

    # a1 |>_{l1} phi_{l2..ln}(a2, ..., a_{n+1})
    first = _Sub(phi, [L(k) for k in range(2, n + 1)])
    first_cache: dict = {}
    shifted = D + L(1)

    def first_terms(idx):
        t = first_cache.get(idx)
        if t is None:
            v = first(idx)
            t = () if v is None else _slot_terms(v, shifted)
            first_cache[idx] = t
        return t

    # phi_{..., l_i + l_{i+1}, ...}(..., a_i ._{l_i} a_{i+1}, ...)
    middles = []
    for i in range(1, n + 1):
        if i < n:
            lams = ([L(k) for k in range(1, i)] + [L(i) + L(i + 1)]
                    + [L(k) for k in range(i + 2, n + 1)])
            target = -(L(i) + L(i + 1))
        else:
            lams = [L(k) for k in range(1, n)]
            target = D + lam_sum(1, n - 1)
        sub = {DEL: target, NU: L(i)}
        prods = {}
        for (x, y), entry in A.prod.items():
            prods[(x, y)] = [(k, c.subs(sub)) for k, c in enumerate(entry) if c]
        middles.append((i, _Sub(phi, lams), prods))

    # phi_{l1..l_{n-1}}(a1..an) <|_{l1+...+ln} a_{n+1}
    nu = lam_sum(1, n)
    last_cache: dict = {}
    right_sub = {NU: nu}
    right = {key: tuple(e.subs(right_sub) for e in entry) for key, entry in M.right.items()}
    phivals = phi.values

    def last_terms(idx):
        t = last_cache.get(idx)
        if t is None:
            v = phivals.get(idx)
            t = () if v is None else _slot_terms(v, -nu)
            last_cache[idx] = t
        return t

    last_sign = -1 if n % 2 == 0 else 1  # (-1)^(n+1)
    for a in tuples(ra, n + 1):
        acc = _new_acc(rm)
        a1 = a[0]
        for j, c in first_terms(a[1:]):
            entry = M.left.get((a1, j))
            if entry is not None:
                _accumulate(acc, c, entry)
        for i, sub, prods in middles:
            terms = prods.get((a[i - 1], a[i]))
            if not terms:
                continue
            pre, post = a[:i - 1], a[i + 1:]
            sign = -1 if i % 2 else 1
            for k, c in terms:
                v = sub(pre + (k,) + post)
                if v is not None:
                    _accumulate(acc, c, v, sign)
        b = a[n]
        for j, c in last_terms(a[:n]):
            entry = right.get((j, b))
            if entry is not None:
                _accumulate(acc, c, entry, last_sign)
        val = _finish(acc)
        if any(val):
            out[a] = val
    return Cochain(n + 1, M, out, check=False)


# -- comparison and checks -----------------------------------------------------

def lambda_names(degree: int) -> str:
    if degree <= 1:
        return "no lambdas"
    return ",".join(f"l{k}" for k in range(1, degree))


def first_difference(x: Cochain, y: Cochain) -> Witness | None:
    """Witness for ``x != y`` at the lexicographically first differing tuple."""
    x._same_space(y)
    for idx in sorted(set(x.values) | set(y.values)):
        diff = vec_sub(x.value(idx), y.value(idx))
        if not vec_is_zero(diff):
            return Witness(idx, lambda_names(x.degree), diff)
    return None


def d_squared_check(phi: Cochain) -> Report:
    rep = Report("d_squared", True, inputs={"degree": phi.degree})
    pre = check_bimodule(phi.coeffs)
    assoc = check_associativity(phi.algebra)
    if not pre.passed or not assoc.passed:
        bad = pre if not pre.passed else assoc
        rep.details["precondition"] = f"{bad.check} failed: {bad.witness.describe()}"
    dd = differential(differential(phi))
    w = first_difference(dd, zero_cochain(phi.coeffs, dd.degree))
    if w is not None:
        rep.passed = False
        rep.witness = w
    return rep


def random_cochain(alg: ConformalAlgebra, coeffs: ConformalBimodule | None, n: int,
                   caps: tuple[int, int] = (1, 1), seed=0, density: float = 0.5,
                   coefficient_range: int = 3) -> Cochain:
    """Deterministic random cochain with d-degree <= caps[0] and each lambda-degree <= caps[1]."""
    if coeffs is None:
        coeffs = alg.regular
    if coeffs.over is not alg and coeffs.over != alg:
        raise ValueError("bimodule is over a different algebra")
    d_cap, l_cap = caps
    if d_cap < 0 or l_cap < 0:
        raise ValueError("caps must be non-negative")
    rng = random.Random(f"cochain:{seed}:{n}")
    rm = coeffs.rank
    if n < 0:
        return zero_cochain(coeffs, n)
    if n == 0:
        v = [rng.randint(-coefficient_range, coefficient_range) for _ in range(rm)]
        return constant_cochain(coeffs, v)
    monos = list(product(range(d_cap + 1), *[range(l_cap + 1)] * (n - 1)))
    values = {}
    for idx in tuples(alg.rank, n):
        entries = []
        for _ in range(rm):
            terms = {}
            for exps in monos:
                if rng.random() < density:
                    c = rng.randint(-coefficient_range, coefficient_range)
                    if c:
                        terms[exps] = c
            entries.append(Poly(terms))
        values[idx] = tuple(entries)
    return Cochain(n, coeffs, values)
