"""Definition files: algebras, bimodules, cochains and extensions as plain text.

Example::

    [algebra]
    rank = 1
    prod 0 0 = ["1"]

    [cochain der]
    degree = 1
    coeffs = regular
    value 0 = ["d"]

Generator indices are 0-based, ``d`` is the derivation and ``l<k>`` the
k-th lambda.  Absent table entries are zero.  ``print_definition`` emits
a canonical form, and ``parse(print_definition(x)) == x``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .cochain import Cochain
from .confalg import ConformalAlgebra, ConformalBimodule, vec_is_zero
from .polyring import Poly, format_poly

REGULAR = "regular"


class DSLError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = "") -> None:
        self.message, self.line, self.column, self.source = message, line, column, source
        where = f"{source}:" if source else ""
        if line:
            where += f"{line}:{column}: " if column else f"{line}: "
        super().__init__(f"{where}{message}")


@dataclass(eq=True)
class CochainDef:
    coeffs: str  # "regular" or a bimodule name
    cochain: Cochain


@dataclass(eq=True)
class ExtensionDef:
    bimodule: str = REGULAR
    cocycle: str | None = None
    fiber_product: dict = field(default_factory=dict)


@dataclass(eq=True)
class DefinitionFile:
    algebra: ConformalAlgebra
    bimodules: dict = field(default_factory=dict)
    cochains: dict = field(default_factory=dict)
    extensions: dict = field(default_factory=dict)

    def bimodule(self, name: str) -> ConformalBimodule:
        if name == REGULAR:
            return self.algebra.regular
        try:
            return self.bimodules[name]
        except KeyError:
            raise KeyError(f"no bimodule named {name!r}") from None

    def cochain(self, name: str) -> Cochain:
        try:
            return self.cochains[name].cochain
        except KeyError:
            known = ", ".join(self.cochains) or "none"
            raise KeyError(f"no cochain named {name!r} (defined: {known})") from None


# -- polynomials ---------------------------------------------------------------

class _Cursor:
    def __init__(self, text: str, line: int, col: int) -> None:
        self.text, self.pos, self.line, self.col0 = text, 0, line, col

    def error(self, msg: str) -> DSLError:
        return DSLError(msg, self.line, self.col0 + self.pos)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def nat(self) -> int:
        self.skip()
        m = re.compile(r"\d+").match(self.text, self.pos)
        if not m:
            raise self.error("expected a natural number")
        self.pos = m.end()
        return int(m.group())


def parse_poly(text: str, line: int = 0, col: int = 1, max_lambda: int | None = None) -> Poly:
    """Parse one polynomial; ``max_lambda`` bounds the lambda indices allowed."""
    cur = _Cursor(text, line, col)
    terms: dict = {}
    sign = -1 if cur.take("-") else 1
    if sign == 1:
        cur.take("+")
    while True:
        start = cur.pos
        coeff, exps = _term(cur, max_lambda)
        key = _trim(exps)
        terms[key] = terms.get(key, 0) + sign * coeff
        if cur.take("+"):
            sign = 1
        elif cur.take("-"):
            sign = -1
        elif cur.peek():
            raise cur.error(f"unexpected {cur.peek()!r}")
        else:
            break
        if cur.pos == start:
            raise cur.error("empty term")
    return Poly({k: c for k, c in terms.items() if c})


def _trim(exps: list) -> tuple:
    while exps and exps[-1] == 0:
        exps.pop()
    return tuple(exps)


def _term(cur: _Cursor, max_lambda):
    coeff = Fraction(1)
    exps: list = []
    ch = cur.peek()
    if ch.isdigit():
        num = cur.nat()
        if cur.take("/"):
            den = cur.nat()
            if den == 0:
                raise cur.error("zero denominator")
            coeff = Fraction(num, den)
        else:
            coeff = Fraction(num)
        if not cur.take("*"):
            return _norm(coeff), exps
    while True:
        _factor(cur, exps, max_lambda)
        if not cur.take("*"):
            return _norm(coeff), exps


def _factor(cur: _Cursor, exps: list, max_lambda) -> None:
    ch = cur.peek()
    if ch == "d":
        cur.pos += 1
        var = 0
    elif ch == "l":
        cur.pos += 1
        var = cur.nat()
        if var < 1:
            raise cur.error("lambda indices start at l1")
        if max_lambda is not None and var > max_lambda:
            allowed = f"l1..l{max_lambda}" if max_lambda else "no lambdas"
            raise cur.error(f"l{var} out of range here ({allowed})")
    else:
        raise cur.error(f"expected d or l<k>, found {ch!r}" if ch else "expected d or l<k>")
    power = cur.nat() if cur.take("^") else 1
    while len(exps) <= var:
        exps.append(0)
    exps[var] += power


def _norm(c: Fraction):
    return c.numerator if c.denominator == 1 else c


def parse_vec(text: str, line: int, col: int, max_lambda: int | None) -> tuple:
    body = text.strip()
    lead = col + (len(text) - len(text.lstrip()))
    if not (body.startswith("[") and body.endswith("]")):
        raise DSLError("vector must be written [p, q, ...]", line, lead)
    out = []
    offset = lead + 1
    for part in body[1:-1].split(","):
        pcol = offset + (len(part) - len(part.lstrip()))
        item = part.strip()
        if len(item) >= 2 and item[0] == item[-1] == '"':
            item, pcol = item[1:-1], pcol + 1
        if not item:
            raise DSLError("empty vector entry", line, pcol)
        out.append(parse_poly(item, line, pcol, max_lambda))
        offset += len(part) + 1
    return tuple(out)


def format_vec(v) -> str:
    return "[" + ", ".join(f'"{format_poly(p)}"' for p in v) + "]"


# -- blocks --------------------------------------------------------------------

_HEADER = re.compile(r"\[\s*([A-Za-z_][\w.-]*)(?:\s+([A-Za-z_][\w.-]*))?\s*\]$")
_ENTRY = re.compile(r"([A-Za-z_]\w*)((?:\s+\d+)*)\s*=(.*)$")


@dataclass
class _Block:
    kind: str
    name: str | None
    line: int
    keys: dict = field(default_factory=dict)  # key -> (value, line, col)
    entries: list = field(default_factory=list)  # (word, indices, vec text, line, col)


def _split_blocks(text: str, source: str) -> list[_Block]:
    blocks: list[_Block] = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        if stripped.startswith("["):
            m = _HEADER.match(stripped)
            if not m:
                raise DSLError("malformed block header", n, indent + 1, source)
            blocks.append(_Block(m.group(1), m.group(2), n))
            continue
        if not blocks:
            raise DSLError("entry before the first block header", n, indent + 1, source)
        m = _ENTRY.match(stripped)
        if not m:
            raise DSLError("expected 'key = value' or '<table> i j = [...]'", n, indent + 1, source)
        word, idx_text, value = m.group(1), m.group(2), m.group(3)
        vcol = indent + m.start(3) + 1
        block = blocks[-1]
        indices = tuple(int(t) for t in idx_text.split())
        if value.strip().startswith("[") or indices or word in ("prod", "left", "right", "value"):
            block.entries.append((word, indices, value, n, vcol))
        else:
            if word in block.keys:
                raise DSLError(f"duplicate key {word!r}", n, indent + 1, source)
            block.keys[word] = (value.strip(), n, vcol + len(value) - len(value.lstrip()))
    return blocks


def _int_key(block: _Block, key: str, source: str, required: bool = True) -> int | None:
    if key not in block.keys:
        if required:
            raise DSLError(f"[{block.kind}] block needs '{key} = ...'", block.line, 0, source)
        return None
    value, line, col = block.keys[key]
    if not value.isdigit():
        raise DSLError(f"{key} must be a non-negative integer", line, col, source)
    return int(value)


def _allowed(block: _Block, keys: set, words: set, source: str) -> None:
    for k, (_, line, col) in block.keys.items():
        if k not in keys:
            raise DSLError(f"unknown key {k!r} in [{block.kind}]", line, 1, source)
    for word, _, _, line, _ in block.entries:
        if word not in words:
            raise DSLError(f"unexpected {word!r} entry in [{block.kind}]", line, 1, source)


def _table(block: _Block, word: str, shape: tuple, out_rank: int, max_lambda, source: str) -> dict:
    table: dict = {}
    for w, idx, value, line, col in block.entries:
        if w != word:
            continue
        if len(idx) != 2:
            raise DSLError(f"'{word}' needs two indices", line, 1, source)
        if not (idx[0] < shape[0] and idx[1] < shape[1]):
            raise DSLError(f"index {idx} outside a {shape[0]}x{shape[1]} table", line, 1, source)
        if idx in table:
            raise DSLError(f"duplicate entry {word} {idx[0]} {idx[1]}", line, 1, source)
        table[idx] = _vec(value, line, col, out_rank, max_lambda, source)
    return table


def _vec(value: str, line: int, col: int, rank: int, max_lambda, source: str) -> tuple:
    try:
        v = parse_vec(value, line, col, max_lambda)
    except DSLError as exc:
        raise DSLError(exc.message, exc.line, exc.column, source) from None
    if len(v) != rank:
        raise DSLError(f"vector has {len(v)} entries, expected {rank}", line, col, source)
    return v


def parse(text: str, source: str = "") -> DefinitionFile:
    blocks = _split_blocks(text, source)
    alg_blocks = [b for b in blocks if b.kind == "algebra"]
    if len(alg_blocks) != 1:
        line = alg_blocks[1].line if len(alg_blocks) > 1 else 0
        raise DSLError("exactly one [algebra] block is required", line, 0, source)
    names: set = set()
    for b in blocks:
        if b.kind not in ("algebra", "bimodule", "cochain", "extension"):
            raise DSLError(f"unknown block kind {b.kind!r}", b.line, 1, source)
        if b.kind == "algebra" and b.name:
            raise DSLError("[algebra] takes no name", b.line, 1, source)
        if b.kind in ("bimodule", "cochain") and not b.name:
            raise DSLError(f"[{b.kind}] needs a name", b.line, 1, source)
        name = b.name or ("extension" if b.kind == "extension" else None)
        if name is not None:
            if name in names or name == REGULAR:
                raise DSLError(f"name {name!r} is already used", b.line, 1, source)
            names.add(name)

    ab = alg_blocks[0]
    _allowed(ab, {"rank"}, {"prod"}, source)
    rank = _int_key(ab, "rank", source)
    if rank < 1:
        raise DSLError("rank must be positive", ab.keys["rank"][1], 0, source)
    alg = ConformalAlgebra(rank, _table(ab, "prod", (rank, rank), rank, 1, source))
    out = DefinitionFile(alg)

    for b in blocks:
        if b.kind != "bimodule":
            continue
        _allowed(b, {"rank"}, {"left", "right"}, source)
        rm = _int_key(b, "rank", source)
        if rm < 1:
            raise DSLError("rank must be positive", b.keys["rank"][1], 0, source)
        left = _table(b, "left", (rank, rm), rm, 1, source)
        right = _table(b, "right", (rm, rank), rm, 1, source)
        out.bimodules[b.name] = ConformalBimodule(rm, alg, left, right)

    for b in blocks:
        if b.kind != "cochain":
            continue
        _allowed(b, {"degree", "coeffs"}, {"value"}, source)
        n = _int_key(b, "degree", source)
        coeffs = b.keys.get("coeffs", (REGULAR, b.line, 0))
        M = _resolve_bimodule(out, coeffs, source)
        values: dict = {}
        for _, idx, value, line, col in b.entries:
            if len(idx) != n:
                raise DSLError(f"degree {n} cochain needs {n} indices, got {len(idx)}", line, 1, source)
            if any(i >= rank for i in idx):
                raise DSLError(f"generator index out of range (rank {rank})", line, 1, source)
            if idx in values:
                raise DSLError(f"duplicate value for {list(idx)}", line, 1, source)
            v = _vec(value, line, col, M.rank, max(n - 1, 0), source)
            if n == 0 and not all(p.is_constant for p in v):
                raise DSLError("degree 0 values are constants (classes modulo d)", line, col, source)
            values[idx] = v
        values = {k: v for k, v in values.items() if not vec_is_zero(v)}
        out.cochains[b.name] = CochainDef(coeffs[0], Cochain(n, M, values))

    for b in blocks:
        if b.kind != "extension":
            continue
        _allowed(b, {"bimodule", "cocycle"}, {"prod"}, source)
        bim = b.keys.get("bimodule", (REGULAR, b.line, 0))
        M = _resolve_bimodule(out, bim, source)
        cocycle = None
        if "cocycle" in b.keys:
            cocycle, line, col = b.keys["cocycle"]
            c = out.cochains.get(cocycle)
            if c is None:
                raise DSLError(f"no cochain named {cocycle!r}", line, col, source)
            if c.cochain.degree != 2 or c.coeffs != bim[0]:
                raise DSLError(f"cocycle must be a 2-cochain with coeffs = {bim[0]}", line, col, source)
        fp = _table(b, "prod", (M.rank, M.rank), M.rank, 1, source)
        out.extensions[b.name or "extension"] = ExtensionDef(bim[0], cocycle, fp)
    return out


def _resolve_bimodule(defs: DefinitionFile, key: tuple, source: str) -> ConformalBimodule:
    name, line, col = key
    if name == REGULAR:
        return defs.algebra.regular
    if name not in defs.bimodules:
        raise DSLError(f"no bimodule named {name!r}", line, col, source)
    return defs.bimodules[name]


def print_definition(defs: DefinitionFile) -> str:
    alg = defs.algebra
    parts = ["[algebra]", f"rank = {alg.rank}"]
    parts += [f"prod {i} {j} = {format_vec(v)}" for (i, j), v in sorted(alg.prod.items())]
    for name, M in defs.bimodules.items():
        parts += ["", f"[bimodule {name}]", f"rank = {M.rank}"]
        parts += [f"left {i} {k} = {format_vec(v)}" for (i, k), v in sorted(M.left.items())]
        parts += [f"right {k} {j} = {format_vec(v)}" for (k, j), v in sorted(M.right.items())]
    for name, cd in defs.cochains.items():
        phi = cd.cochain
        parts += ["", f"[cochain {name}]", f"degree = {phi.degree}", f"coeffs = {cd.coeffs}"]
        for idx, v in sorted(phi.values.items()):
            if not vec_is_zero(v):
                lhs = " ".join(["value"] + [str(i) for i in idx])
                parts.append(f"{lhs} = {format_vec(v)}")
    for name, ed in defs.extensions.items():
        parts += ["", f"[extension {name}]", f"bimodule = {ed.bimodule}"]
        if ed.cocycle:
            parts.append(f"cocycle = {ed.cocycle}")
        parts += [f"prod {k} {l} = {format_vec(v)}" for (k, l), v in sorted(ed.fiber_product.items())
                  if not vec_is_zero(v)]
    return "\n".join(parts) + "\n"


def load(path) -> DefinitionFile:
    from pathlib import Path

    p = Path(path)
    return parse(p.read_text(encoding="utf-8"), source=p.name)


def cochain_block(name: str, phi: Cochain, coeffs: str = REGULAR) -> str:
    """Text of a single ``[cochain]`` block, as printed by the CLI."""
    text = print_definition(DefinitionFile(phi.algebra, {}, {name: CochainDef(coeffs, phi)}))
    return text.split("\n\n", 1)[1]
