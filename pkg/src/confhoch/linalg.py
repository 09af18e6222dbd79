"""Exact sparse linear algebra over Q by fraction-free elimination.

Vectors are dicts ``key -> rational`` with mutually comparable keys.  Each
input vector is scaled to integers, then reduced against an echelon basis
whose pivot is the smallest key of each row.  Rows are kept primitive
(content divided out) so entries stay small.  Combination vectors record
how every reduced row is built from the inputs, which yields kernels and
solutions without a second pass.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Hashable, Iterable, Mapping, Sequence

SparseVector = Mapping[Hashable, "int | Fraction"]


def _integral(vec: SparseVector) -> tuple[dict, int]:
    """Scale to integer entries; returns (vector, scale factor)."""
    den = 1
    for c in vec.values():
        if isinstance(c, Fraction) and c.denominator != 1:
            den = den * c.denominator // gcd(den, c.denominator)
    out = {}
    for k, c in vec.items():
        if c:
            out[k] = int(c * den)
    return out, den


def _content(*dicts: dict) -> int:
    g = 0
    for d in dicts:
        for c in d.values():
            g = gcd(g, c)
            if g == 1:
                return 1
    return g


class Eliminator:
    """Incremental echelon basis with combination tracking."""

    def __init__(self) -> None:
        self.rows: dict = {}  # pivot -> (vector, combination)
        self.relations: list[dict] = []  # kernel vectors over input indices
        self.count = 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, vec: dict, combo: dict) -> tuple[dict, dict]:
        rows = self.rows
        while True:
            hits = [k for k in vec if k in rows]
            if not hits:
                return vec, combo
            k = min(hits)
            row, rcombo = rows[k]
            a, b = row[k], vec[k]
            g = gcd(a, b)
            sa, sb = a // g, b // g
            # vec := sa*vec - sb*row, so the pivot entry cancels
            nvec = {key: sa * c for key, c in vec.items()}
            for key, c in row.items():
                v = nvec.get(key, 0) - sb * c
                if v:
                    nvec[key] = v
                else:
                    nvec.pop(key, None)
            ncombo = {key: sa * c for key, c in combo.items()}
            for key, c in rcombo.items():
                v = ncombo.get(key, 0) - sb * c
                if v:
                    ncombo[key] = v
                else:
                    ncombo.pop(key, None)
            cont = _content(nvec, ncombo)
            if cont > 1:
                nvec = {key: c // cont for key, c in nvec.items()}
                ncombo = {key: c // cont for key, c in ncombo.items()}
            vec, combo = nvec, ncombo

    def add(self, vec: SparseVector) -> bool:
        """Insert the next input; True iff it was independent of the previous ones."""
        idx = self.count
        self.count += 1
        ivec, scale = _integral(vec)
        combo = {idx: scale}
        vec2, combo2 = self._reduce(ivec, combo)
        if vec2:
            self.rows[min(vec2)] = (vec2, combo2)
            return True
        self.relations.append(combo2)
        return False

    def residual(self, vec: SparseVector) -> tuple[dict, dict, int]:
        """Reduce a vector without inserting it: (residual, combination, scale)."""
        ivec, scale = _integral(vec)
        res, combo = self._reduce(ivec, {None: scale})
        return res, combo, scale


def rank(vectors: Iterable[SparseVector]) -> int:
    e = Eliminator()
    for v in vectors:
        e.add(v)
    return e.rank


def kernel(vectors: Sequence[SparseVector]) -> list[dict]:
    """Basis of ``{c : sum c_i v_i = 0}`` as sparse integer dicts over input indices."""
    e = Eliminator()
    for v in vectors:
        e.add(v)
    out = []
    for rel in e.relations:
        g = _content(rel)
        out.append({k: c // g for k, c in rel.items()})
    return out


def solve(vectors: Sequence[SparseVector], target: SparseVector) -> dict | None:
    """Coefficients c with ``sum c_i v_i = target``, or None when no solution exists."""
    e = Eliminator()
    for v in vectors:
        e.add(v)
    if not any(target.values()):
        return {}
    res, combo, _ = e.residual(target)
    if res:
        return None
    # invariant: 0 = residual = combo[None] * target + sum combo[i] * v_i
    t = combo.pop(None)
    factor = Fraction(-1, t)
    return {i: _norm(c * factor) for i, c in combo.items() if c}


def _norm(c: Fraction):
    return c.numerator if c.denominator == 1 else c


def apply(vectors: Sequence[SparseVector], coeffs: Mapping[int, "int | Fraction"]) -> dict:
    out: dict = {}
    for i, c in coeffs.items():
        for k, v in vectors[i].items():
            s = out.get(k, 0) + c * v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out
