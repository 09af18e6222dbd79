"""Exact arithmetic in Q[d, l1, l2, ...].

Monomials are packed into a single Python int, one 32-bit field per
variable (``d`` in the lowest field, ``l_k`` in field ``k``), so that
multiplying monomials is integer addition.  Coefficients are ``int`` when
integral and ``fractions.Fraction`` otherwise; both hash and compare
consistently, which keeps the term maps canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

_BITS = 32
_MASK = (1 << _BITS) - 1
# Exponents past this are refused at the API boundary so that packed
# fields can never carry into their neighbours.
MAX_EXPONENT = 1 << 24

Coefficient = Union[int, Fraction]


@dataclass(frozen=True, order=True)
class Var:
    """A ring variable: index 0 is ``d`` (the derivation), index k >= 1 is ``l_k``."""

    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("variable index must be non-negative")

    @property
    def is_del(self) -> bool:
        return self.index == 0

    def __repr__(self) -> str:
        return "d" if self.index == 0 else f"l{self.index}"


DEL = Var(0)


def lam(k: int) -> Var:
    if k < 1:
        raise ValueError(f"lambda indices start at 1, got {k}")
    return Var(k)


def _norm(c: Coefficient) -> Coefficient:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _coerce_coeff(c) -> Coefficient:
    if isinstance(c, bool):
        raise TypeError("bool is not a polynomial coefficient")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return _norm(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def _canon(terms: dict) -> dict:
    return {k: (v.numerator if type(v) is Fraction and v.denominator == 1 else v)
            for k, v in terms.items() if v}


def _unpack(key: int) -> tuple[int, ...]:
    exps = []
    while key:
        exps.append(key & _MASK)
        key >>= _BITS
    return tuple(exps)


def _pack(exps: Iterable[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e >= MAX_EXPONENT:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (_BITS * i)
    return key


class Poly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("_t", "_h")

    def __init__(self, terms: Mapping | None = None) -> None:
        # terms: {exponents: coefficient}; exponents is a tuple indexed by
        # variable index or a {Var: exponent} mapping.
        out: dict[int, Coefficient] = {}
        if terms:
            for exps, c in terms.items():
                if isinstance(exps, Mapping):
                    width = max((v.index for v in exps), default=-1) + 1
                    dense = [0] * width
                    for v, e in exps.items():
                        dense[v.index] += e
                    exps = dense
                k = _pack(exps)
                out[k] = out.get(k, 0) + _coerce_coeff(c)
        self._t = _canon(out)
        self._h = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = object.__new__(cls)
        p._t = terms
        p._h = None
        return p

    @classmethod
    def const(cls, c) -> "Poly":
        c = _coerce_coeff(c)
        return cls._raw({0: c} if c else {})

    @classmethod
    def var(cls, v: Var) -> "Poly":
        return cls._raw({1 << (_BITS * v.index): 1})

    @classmethod
    def monomial(cls, exps: Iterable[int], c=1) -> "Poly":
        c = _coerce_coeff(c)
        return cls._raw({_pack(exps): c} if c else {})

    # -- inspection ---------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self._t)

    @property
    def is_zero(self) -> bool:
        return not self._t

    @property
    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_term(self) -> Coefficient:
        return self._t.get(0, 0)

    def terms(self) -> Iterator[tuple[tuple[int, ...], Coefficient]]:
        """Yield ``(exponent tuple, coefficient)`` pairs; trailing zero exponents are stripped."""
        for k, c in self._t.items():
            yield _unpack(k), c

    def __len__(self) -> int:
        return len(self._t)

    def max_var_index(self) -> int:
        """Largest variable index occurring, or -1 for constants."""
        bl = 0
        for k in self._t:
            if k.bit_length() > bl:
                bl = k.bit_length()
        return (bl - 1) // _BITS if bl else -1

    def variables(self) -> set[Var]:
        seen: set[Var] = set()
        for k in self._t:
            i = 0
            while k:
                if k & _MASK:
                    seen.add(Var(i))
                k >>= _BITS
                i += 1
        return seen

    def max_degree(self, v: Var) -> int:
        s = _BITS * v.index
        return max(((k >> s) & _MASK for k in self._t), default=0)

    def total_degree(self) -> int:
        return max((sum(_unpack(k)) for k in self._t), default=0)

    # -- arithmetic ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self._t == other._t
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._t == ({0: _norm(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._h is None:
            self._h = hash(frozenset(self._t.items()))
        return self._h

    def __neg__(self) -> "Poly":
        return Poly._raw({k: -c for k, c in self._t.items()})

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        a, b = self._t, other._t
        if not b:
            return self
        if not a:
            return other
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        for k, c in b.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = _norm(s)
            else:
                out.pop(k, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return Poly.const(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        a, b = self._t, other._t
        if not a or not b:
            return ZERO
        if len(b) == 1:
            (kb, cb), = b.items()
            if kb == 0:
                return self.scale(cb)
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, Coefficient] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return Poly._raw(_canon(out))

    def __rmul__(self, other) -> "Poly":
        return self.scale(other)

    def scale(self, c) -> "Poly":
        c = _coerce_coeff(c)
        if not c:
            return ZERO
        if c == 1:
            return self
        return Poly._raw(_canon({k: v * c for k, v in self._t.items()}))

    def __truediv__(self, c) -> "Poly":
        c = _coerce_coeff(c)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self.scale(Fraction(1) / c)

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative power")
        result = ONE
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- substitution -------------------------------------------------------

    def substitute(self, v: Var, r: "Poly") -> "Poly":
        """Replace every occurrence of ``v`` by ``r`` and expand."""
        return self.subs({v: r})

    def subs(self, mapping: Mapping[Var, "Poly"]) -> "Poly":
        """Simultaneous substitution ``{var: poly}``."""
        items = [(v.index * _BITS, r if isinstance(r, Poly) else Poly.const(r))
                 for v, r in mapping.items()]
        if not items or not self._t:
            return self
        if all(_is_linear_form(r) for _, r in items):
            return self._subs_linear(items)
        groups: dict[tuple[int, ...], dict[int, Coefficient]] = {}
        for k, c in self._t.items():
            rest = k
            exps = []
            for s, _ in items:
                e = (k >> s) & _MASK
                exps.append(e)
                if e:
                    rest -= e << s
            g = groups.setdefault(tuple(exps), {})
            g[rest] = g.get(rest, 0) + c
        powers: list[dict[int, Poly]] = [{0: ONE, 1: r} for _, r in items]

        def power(i: int, e: int) -> Poly:
            cache = powers[i]
            p = cache.get(e)
            if p is None:
                p = power(i, e - 1) * items[i][1]
                cache[e] = p
            return p

        out: dict[int, Coefficient] = {}
        get = out.get
        for exps, rest_terms in groups.items():
            factor = ONE
            for i, e in enumerate(exps):
                if e:
                    factor = factor * power(i, e)
            for kf, cf in factor._t.items():
                for kr, cr in rest_terms.items():
                    k = kf + kr
                    out[k] = get(k, 0) + cf * cr
        return Poly._raw(_canon(out))

    def _subs_linear(self, items: list) -> "Poly":
        # Every image is a linear form without constant term, so each
        # monomial expands to a fixed list of key offsets that can be cached
        # per exponent pattern; no intermediate Poly objects are built.
        shifts = [s for s, _ in items]
        forms = [list(r._t.items()) for _, r in items]
        powers: list[dict[int, list]] = [{0: [(0, 1)]} for _ in items]

        def power(i: int, e: int) -> list:
            cache = powers[i]
            p = cache.get(e)
            if p is None:
                acc: dict[int, Coefficient] = {}
                for k1, c1 in power(i, e - 1):
                    for k2, c2 in forms[i]:
                        acc[k1 + k2] = acc.get(k1 + k2, 0) + c1 * c2
                p = [(k, c) for k, c in acc.items() if c]
                cache[e] = p
            return p

        factors: dict[tuple[int, ...], list] = {}
        out: dict[int, Coefficient] = {}
        get = out.get
        for k, c in self._t.items():
            exps = tuple((k >> s) & _MASK for s in shifts)
            fac = factors.get(exps)
            if fac is None:
                removal = 0
                fac = [(0, 1)]
                for i, e in enumerate(exps):
                    if e:
                        removal += e << shifts[i]
                        acc: dict[int, Coefficient] = {}
                        for k1, c1 in fac:
                            for k2, c2 in power(i, e):
                                acc[k1 + k2] = acc.get(k1 + k2, 0) + c1 * c2
                        fac = [(kk, cc) for kk, cc in acc.items() if cc]
                fac = [(kk - removal, cc) for kk, cc in fac]
                factors[exps] = fac
            for dk, dc in fac:
                kk = k + dk
                out[kk] = get(kk, 0) + c * dc
        return Poly._raw(_canon(out))

    def rename(self, mapping: Mapping[Var, Var]) -> "Poly":
        """Relabel variables; the mapping must be injective on occurring variables."""
        occurring = self.variables()
        image: dict[Var, Var] = {}
        for v in occurring:
            image[v] = mapping.get(v, v)
        if len(set(image.values())) != len(image):
            raise ValueError("rename mapping is not injective on the occurring variables")
        if all(a == b for a, b in image.items()):
            return self
        out: dict[int, Coefficient] = {}
        for k, c in self._t.items():
            nk = 0
            i = 0
            while k:
                e = k & _MASK
                if e:
                    nk += e << (_BITS * image[Var(i)].index)
                k >>= _BITS
                i += 1
            out[nk] = c
        return Poly._raw(out)

    def shift_lambdas(self, offset: int) -> "Poly":
        """Rename ``l_k`` to ``l_{k+offset}`` for every k; ``d`` is untouched."""
        if not offset or not self._t:
            return self
        sh = offset * _BITS
        out = {}
        for k, c in self._t.items():
            dpart = k & _MASK
            out[((k - dpart) << sh) + dpart] = c
        return Poly._raw(out)

    def spread_lambda(self, i: int, width: int) -> "Poly":
        """Substitute ``l_i := l_i + ... + l_{i+width-1}`` and ``l_k := l_{k+width-1}`` for k > i.

        This is the re-indexing performed when a block of ``width``
        consecutive arguments is merged into argument i (width 0 kills l_i).
        """
        if width == 1 or not self._t:
            return self
        if width == 0:
            return self.subs({lam(i): ZERO}).shift_lambdas_above(i, -1)
        s = _BITS * i
        low_mask = (1 << s) - 1
        offsets = _multinomial_offsets(i, width)
        out: dict[int, Coefficient] = {}
        get = out.get
        hs = (width - 1) * _BITS
        for k, c in self._t.items():
            e = (k >> s) & _MASK
            base = (k & low_mask) + (((k >> (s + _BITS)) << (s + _BITS)) << hs)
            if not e:
                out[base] = get(base, 0) + c
                continue
            for dk, dc in offsets(e):
                kk = base + dk
                out[kk] = get(kk, 0) + c * dc
        return Poly._raw(_canon(out))

    def shift_lambdas_above(self, i: int, offset: int) -> "Poly":
        """Rename ``l_k`` to ``l_{k+offset}`` for k > i; l_i must be absent if offset < 0."""
        if not offset or not self._t:
            return self
        s = _BITS * (i + 1)
        low_mask = (1 << s) - 1
        out = {}
        for k, c in self._t.items():
            high = k >> s
            if offset > 0:
                nk = (k & low_mask) + ((high << s) << (offset * _BITS))
            else:
                if (k >> (s - _BITS)) & _MASK:
                    raise ValueError(f"l{i} present when closing the gap above it")
                nk = (k & low_mask) + ((high << s) >> (-offset * _BITS))
            out[nk] = c
        return Poly._raw(out)

    # -- rendering ----------------------------------------------------------

    def sort_key(self):
        return sorted(self._t.items())

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"

    def __reduce__(self):
        return (Poly._raw, (self._t,))


ZERO = Poly._raw({})
ONE = Poly._raw({0: 1})
D = Poly.var(DEL)


class TermSum:
    """Mutable accumulator for sums of products; avoids copying on every addition."""

    __slots__ = ("_t",)

    def __init__(self) -> None:
        self._t: dict[int, Coefficient] = {}

    def add(self, p: Poly, factor: Poly | None = None, sign: int = 1) -> None:
        t = self._t
        get = t.get
        if factor is None or factor._t == ONE._t:
            if sign == 1:
                for k, c in p._t.items():
                    t[k] = get(k, 0) + c
            else:
                for k, c in p._t.items():
                    t[k] = get(k, 0) - c
            return
        for kf, cf in factor._t.items():
            if sign != 1:
                cf = -cf
            for k, c in p._t.items():
                kk = k + kf
                t[kk] = get(kk, 0) + c * cf

    def value(self) -> Poly:
        return Poly._raw(_canon(self._t))


def L(k: int) -> Poly:
    return Poly.var(lam(k))


def lam_sum(lo: int, hi: int) -> Poly:
    """``l_lo + ... + l_hi`` (zero when the range is empty)."""
    return Poly._raw({1 << (_BITS * k): 1 for k in range(lo, hi + 1)})


_MULTINOMIAL_CACHE: dict[tuple[int, int], dict[int, list]] = {}


def _multinomial_offsets(i: int, width: int):
    """Terms of ``(l_i + ... + l_{i+width-1})^e`` as (packed key, coefficient) lists."""
    cache = _MULTINOMIAL_CACHE.setdefault((i, width), {0: [(0, 1)]})
    step = [1 << (_BITS * (i + t)) for t in range(width)]

    def offsets(e: int) -> list:
        p = cache.get(e)
        if p is None:
            acc: dict[int, int] = {}
            for k1, c1 in offsets(e - 1):
                for k2 in step:
                    acc[k1 + k2] = acc.get(k1 + k2, 0) + c1
            p = list(acc.items())
            cache[e] = p
        return p

    return offsets


def _is_linear_form(r: Poly) -> bool:
    for k in r._t:
        if not k or k & (k - 1) or (k.bit_length() - 1) % _BITS:
            return False
    return True


def _monomial_text(exps: tuple[int, ...]) -> str:
    parts = []
    for i, e in enumerate(exps):
        if not e:
            continue
        name = "d" if i == 0 else f"l{i}"
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    """Render in the definition-file grammar, highest total degree first."""
    if not p._t:
        return "0"
    entries = sorted(((_unpack(k), c) for k, c in p._t.items()), key=lambda t: _order_key(t[0]))
    out = []
    for n, (exps, c) in enumerate(entries):
        mono = _monomial_text(exps)
        neg = c < 0
        mag = -c if neg else c
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if n == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def _order_key(exps: tuple[int, ...]):
    # total degree descending, then larger d first, then larger l1, ...
    return (-sum(exps), tuple(-e for e in exps) + (0,) * (64 - len(exps)))
