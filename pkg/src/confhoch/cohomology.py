"""Degree-truncated cohomology: monomial bases, differential matrices, Z/B/HH dimensions.

A capped cochain space has basis (generator tuple, monomial, target
generator) with ``d``-exponent <= d_cap and every lambda exponent <=
l_cap.  The differential is evaluated exactly and then expanded in a
larger codomain basis whose caps are derived from the structure tables;
an image that leaves that codomain raises instead of being truncated.

Kernels are exact within the cap.  Coboundaries are approximated from
below (preimages are searched among cochains with caps raised by
``slack``), so the reported cohomology dimensions are upper bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .cochain import Cochain, constant_cochain, differential, first_difference, tuples, zero_cochain
from .confalg import ConformalAlgebra, ConformalBimodule, unit_vec
from .linalg import Eliminator, kernel, rank, solve
from .polyring import Poly
from .report import Report


class TruncationError(RuntimeError):
    """An exact image fell outside the codomain caps; the enlargement bound is wrong."""


@dataclass(frozen=True)
class TruncationPolicy:
    d_cap: int
    l_cap: int

    def __post_init__(self) -> None:
        if self.d_cap < 0 or self.l_cap < 0:
            raise ValueError("caps must be non-negative")

    def enlarged(self, by: int) -> "TruncationPolicy":
        return TruncationPolicy(self.d_cap + by, self.l_cap + by)

    def admits(self, exps: tuple) -> bool:
        if exps and exps[0] > self.d_cap:
            return False
        return all(e <= self.l_cap for e in exps[1:])


def _bimodule(target) -> ConformalBimodule:
    return target.regular if isinstance(target, ConformalAlgebra) else target


def codomain_policy(coeffs: ConformalBimodule, policy: TruncationPolicy) -> TruncationPolicy:
    """Caps guaranteed to contain ``d`` of every cochain within ``policy``.

    With T the largest total degree of a structure-table entry: the
    d-exponent grows by at most T, and a lambda can absorb the d-exponent
    (from the substitution ``d := -(l_1 + ... + l_n)``) plus T.
    """
    t = coeffs.table_degree()
    return TruncationPolicy(policy.d_cap + t, policy.l_cap + policy.d_cap + t)


def _monomials(n: int, policy: TruncationPolicy) -> list[tuple]:
    if n == 0:
        return [()]
    ranges = [range(policy.d_cap + 1)] + [range(policy.l_cap + 1)] * (n - 1)
    return [_strip(e) for e in product(*ranges)]


def _strip(exps: tuple) -> tuple:
    e = list(exps)
    while e and e[-1] == 0:
        e.pop()
    return tuple(e)


@dataclass
class CochainBasis:
    degree: int
    policy: TruncationPolicy
    coeffs: ConformalBimodule
    elements: list  # (tuple, exponents, target)
    index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.index = {e: k for k, e in enumerate(self.elements)}

    @property
    def dim(self) -> int:
        return len(self.elements)

    def cochain(self, coords) -> Cochain:
        """Cochain with the given coordinates (dict position -> rational or a full sequence)."""
        items = coords.items() if isinstance(coords, dict) else enumerate(coords)
        rm = self.coeffs.rank
        values: dict = {}
        for k, c in items:
            if not c:
                continue
            idx, exps, t = self.elements[k]
            vec = values.setdefault(idx, [dict() for _ in range(rm)])
            vec[t][exps] = vec[t].get(exps, 0) + c
        return Cochain(self.degree, self.coeffs,
                       {idx: tuple(Poly(d) for d in v) for idx, v in values.items()})

    def element(self, k: int) -> Cochain:
        return self.cochain({k: 1})

    def coordinates(self, phi: Cochain) -> dict:
        """Sparse coordinates; raises TruncationError if phi leaves the capped space."""
        out = {}
        for key, c in cochain_vector(phi).items():
            pos = self.index.get(key)
            if pos is None:
                raise TruncationError(f"term {key} outside caps {self.policy}")
            out[pos] = c
        return out

    def describe(self) -> list[str]:
        return [f"{list(idx)} {_mono_text(exps)} -> e{t}" for idx, exps, t in self.elements]


def _mono_text(exps: tuple) -> str:
    names = ["d"] + [f"l{k}" for k in range(1, len(exps))]
    parts = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e]
    return "*".join(parts) or "1"


def cochain_vector(phi: Cochain) -> dict:
    """Sparse vector keyed by (tuple, exponents, target)."""
    out = {}
    for idx, v in phi.values.items():
        for t, p in enumerate(v):
            for exps, c in p.terms():
                out[(idx, exps, t)] = c
    return out


def basis(alg: ConformalAlgebra, coeffs, n: int, policy: TruncationPolicy) -> CochainBasis:
    M = _bimodule(coeffs if coeffs is not None else alg)
    if n < 0:
        raise ValueError("degree must be non-negative")
    elements = [(idx, exps, t)
                for idx in tuples(alg.rank, n)
                for exps in _monomials(n, policy)
                for t in range(M.rank)]
    return CochainBasis(n, policy, M, elements)


@dataclass
class LinearMapMatrix:
    domain: CochainBasis
    codomain: CochainBasis
    columns: list  # sparse column vectors over codomain positions

    @property
    def shape(self) -> tuple[int, int]:
        return (self.codomain.dim, self.domain.dim)

    def dense(self) -> list[list]:
        rows, cols = self.shape
        mat = [[0] * cols for _ in range(rows)]
        for j, col in enumerate(self.columns):
            for i, c in col.items():
                mat[i][j] = c
        return mat

    def rank(self) -> int:
        return rank(self.columns)

    def kernel(self) -> list[dict]:
        return kernel(self.columns)

    def compose(self, first: "LinearMapMatrix") -> list[dict]:
        """Columns of ``self @ first`` (self applied after first)."""
        out = []
        for col in first.columns:
            acc: dict = {}
            for i, c in col.items():
                for k, v in self.columns[i].items():
                    s = acc.get(k, 0) + c * v
                    if s:
                        acc[k] = s
                    else:
                        acc.pop(k, None)
            out.append(acc)
        return out


def differential_matrix(alg: ConformalAlgebra, coeffs, n: int,
                        policy: TruncationPolicy) -> LinearMapMatrix:
    M = _bimodule(coeffs if coeffs is not None else alg)
    dom = basis(alg, M, n, policy)
    cod = basis(alg, M, n + 1, codomain_policy(M, policy))
    columns = [cod.coordinates(differential(dom.element(k))) for k in range(dom.dim)]
    return LinearMapMatrix(dom, cod, columns)


@dataclass
class CohomologyDims:
    degree: int
    Z: int
    B: int
    HH_upper: int
    policy: TruncationPolicy
    slack: int
    B_by_slack: list
    basis_size: int

    def to_json(self) -> dict:
        return {"Z": self.Z, "B": self.B, "HH_upper": self.HH_upper,
                "degree": self.degree, "caps": [self.policy.d_cap, self.policy.l_cap],
                "slack": self.slack, "B_by_slack": self.B_by_slack,
                "basis_size": self.basis_size}


def cocycle_dimension(alg, coeffs, n: int, policy: TruncationPolicy) -> int:
    mat = differential_matrix(alg, coeffs, n, policy)
    return mat.domain.dim - mat.rank()


def coboundary_dimension(alg, coeffs, n: int, policy: TruncationPolicy, slack: int) -> int:
    """Lower bound for dim(B^n within caps) from preimages with caps raised by slack."""
    if n == 0:
        return 0
    M = _bimodule(coeffs if coeffs is not None else alg)
    target = basis(alg, M, n, policy)
    dom = basis(alg, M, n - 1, policy.enlarged(slack))
    images = []
    outside = []
    for k in range(dom.dim):
        vec = cochain_vector(differential(dom.element(k)))
        images.append(vec)
        outside.append({key: c for key, c in vec.items() if key not in target.index})
    # dim(span(images) within caps) = rank(images) - rank(part outside the caps)
    return rank(images) - rank(outside)


def cohomology_dims(alg, coeffs, n: int, policy: TruncationPolicy, slack: int = 0) -> CohomologyDims:
    M = _bimodule(coeffs if coeffs is not None else alg)
    z = cocycle_dimension(alg, M, n, policy)
    series = [coboundary_dimension(alg, M, n, policy, s) for s in range(slack + 1)]
    for a, b in zip(series, series[1:]):
        if b < a:
            raise AssertionError(f"coboundary bound decreased with slack: {series}")
    b = series[-1]
    if b > z:
        raise AssertionError(f"B ({b}) exceeds Z ({z}); differential is not a complex")
    size = len(basis(alg, M, n, policy).elements)
    return CohomologyDims(n, z, b, z - b, policy, slack, series, size)


def derivations(alg: ConformalAlgebra, coeffs=None, d_cap: int = 2) -> list[Cochain]:
    """Basis of the capped kernel of d_1."""
    mat = differential_matrix(alg, coeffs, 1, TruncationPolicy(d_cap, 0))
    return [mat.domain.cochain(rel) for rel in mat.kernel()]


def inner_derivations(alg: ConformalAlgebra, coeffs=None) -> list[Cochain]:
    """Independent images ``d_0(e_i)``."""
    M = _bimodule(coeffs if coeffs is not None else alg)
    e = Eliminator()
    out = []
    for i in range(M.rank):
        f = differential(constant_cochain(M, unit_vec(M.rank, i, 1)))
        if e.add(cochain_vector(f)):
            out.append(f)
    return out


def check_inner_in_der(alg: ConformalAlgebra, coeffs=None, d_cap: int = 2) -> Report:
    """Every inner derivation is a cocycle and lies in the capped span of derivations."""
    M = _bimodule(coeffs if coeffs is not None else alg)
    der = derivations(alg, M, d_cap)
    inn = inner_derivations(alg, M)
    rep = Report("inner_in_der", True, inputs={"d_cap": d_cap},
                 details={"der": len(der), "inn": len(inn)})
    span = Eliminator()
    for f in der:
        span.add(cochain_vector(f))
    for f in inn:
        w = first_difference(differential(f), zero_cochain(M, 2))
        if w is not None:
            rep.passed, rep.witness = False, w
            return rep
        res, _, _ = span.residual(cochain_vector(f))
        if res:
            rep.passed = False
            rep.details["outside_span"] = str(f.values)
            return rep
    return rep


def coboundary_witness(phi: Cochain, policy: TruncationPolicy | None = None,
                       slack: int = 0) -> Cochain | None:
    """Some psi with d(psi) = phi among cochains within ``policy`` raised by ``slack``.

    ``None`` means no preimage exists at these caps, not that phi is
    cohomologically nontrivial.  ``policy`` defaults to the caps of phi.
    """
    n = phi.degree
    M = phi.coeffs
    if phi.is_zero:
        return zero_cochain(M, n - 1)
    if n == 0:
        return None
    if policy is None:
        policy = caps_of(phi)
    dom = basis(phi.algebra, M, n - 1, policy.enlarged(slack))
    images = [cochain_vector(differential(dom.element(k))) for k in range(dom.dim)]
    sol = solve(images, cochain_vector(phi))
    if sol is None:
        return None
    psi = dom.cochain(sol)
    if first_difference(differential(psi), phi) is not None:
        raise RuntimeError("coboundary witness failed re-verification")
    return psi


def caps_of(phi: Cochain) -> TruncationPolicy:
    d = l = 0
    for v in phi.values.values():
        for p in v:
            for exps, _ in p.terms():
                if exps:
                    d = max(d, exps[0])
                    l = max([l] + list(exps[1:]))
    return TruncationPolicy(d, l)


def cohomology_report(alg, coeffs, n: int, policy: TruncationPolicy, slack: int) -> Report:
    dims = cohomology_dims(alg, coeffs, n, policy, slack)
    b = basis(alg, coeffs, n, policy)
    rep = Report("cohomology", True, inputs={"n": n, "caps": [policy.d_cap, policy.l_cap],
                                             "slack": slack})
    rep.details.update(dims.to_json())
    rep.details["basis"] = b.describe()
    return rep
