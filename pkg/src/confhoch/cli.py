"""Command-line driver: ``confhoch {check,d,op,identities,cohomology,extension} FILE ...``.

Exit codes: 0 when every check passes, 1 when one fails, 2 for usage,
file or parse errors.  ``--json`` prints ``{"status", "reports"}``; the
output is byte-stable for fixed inputs unless ``--timing`` is given.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .cochain import differential
from .cohomology import TruncationPolicy, check_inner_in_der, cohomology_dims
from .confalg import check_associativity, check_bimodule
from .dsl import REGULAR, DefinitionFile, DSLError, cochain_block, parse
from .extension import (
    ExtensionConsistencyError,
    extension_from_2cocycle,
    run_extension_suite,
    split_extension,
)
from .gerstenhaber import bracket, bullet, check_identities, circ_i, cup, maurer_cartan
from .library import bundled_files, bundled_text
from .report import Report


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 already; keep its message format
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def load_definitions(path: str) -> DefinitionFile:
    p = Path(path)
    if p.exists():
        return parse(p.read_text(encoding="utf-8"), source=p.name)
    name = path if path.endswith(".def") else path + ".def"
    if name in bundled_files():
        return parse(bundled_text(name), source=name)
    raise UsageError(f"no such file: {path} (bundled: {', '.join(bundled_files())})")


def _timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    ms = int((time.perf_counter() - start) * 1000)
    for r in out if isinstance(out, list) else [out]:
        r.millis = r.millis or ms
    return out


# -- subcommands ---------------------------------------------------------------

def cmd_check(defs: DefinitionFile, args) -> tuple[list[Report], str]:
    reports = [_timed(check_associativity, defs.algebra)]
    for name, M in defs.bimodules.items():
        rep = _timed(check_bimodule, M)
        rep.check = f"bimodule:{name}"
        reports.append(rep)
    reports.append(_timed(maurer_cartan, defs.algebra))
    return reports, ""


def cmd_d(defs: DefinitionFile, args) -> tuple[list[Report], str]:
    phi = _cochain(defs, args.cochain)
    start = time.perf_counter()
    dphi = differential(phi)
    text = cochain_block(f"d_{args.cochain}", dphi, defs.cochains[args.cochain].coeffs)
    rep = Report("d", True, millis=int((time.perf_counter() - start) * 1000),
                 inputs={"cochain": args.cochain, "degree": phi.degree},
                 details={"result": text, "is_zero": dphi.is_zero})
    return [rep], text


_OPS = {"cup": cup, "bracket": bracket, "bullet": bullet}


def cmd_op(defs: DefinitionFile, args) -> tuple[list[Report], str]:
    f, g = _cochain(defs, args.lhs), _cochain(defs, args.rhs)
    if not (f.is_algebra_valued and g.is_algebra_valued):
        raise UsageError("operations need cochains with coeffs = regular")
    start = time.perf_counter()
    if args.operation == "circ":
        if args.slot is None:
            raise UsageError("circ needs --slot I (1-based)")
        if not 1 <= args.slot <= f.degree:
            raise UsageError(f"--slot must lie in 1..{f.degree}")
        result = circ_i(f, g, args.slot)
    else:
        result = _OPS[args.operation](f, g)
    name = f"{args.operation}_{args.lhs}_{args.rhs}"
    text = cochain_block(name, result)
    inputs = {"operation": args.operation, "lhs": args.lhs, "rhs": args.rhs}
    if args.slot is not None:
        inputs["slot"] = args.slot
    rep = Report(args.operation, True, millis=int((time.perf_counter() - start) * 1000),
                 inputs=inputs, details={"result": text, "degree": result.degree})
    return [rep], text


def cmd_identities(defs: DefinitionFile, args) -> tuple[list[Report], str]:
    degrees = tuple(range(1, args.max_degree + 1))
    workers = args.workers if args.parallel else 0
    start = time.perf_counter()
    reports = check_identities(defs.algebra, seed=args.seed, trials=args.trials,
                               caps=(args.deg_d, args.deg_l), degrees=degrees,
                               pool_max_degree=args.pool_degree, workers=workers)
    ms = int((time.perf_counter() - start) * 1000)
    for r in reports:
        r.millis = ms
    return reports, ""


def cmd_cohomology(defs: DefinitionFile, args) -> tuple[list[Report], str]:
    M = defs.bimodule(args.coeffs)
    policy = TruncationPolicy(args.cap_d, args.cap_l if args.cap_l is not None else args.cap_d)
    start = time.perf_counter()
    dims = cohomology_dims(defs.algebra, M, args.n, policy, args.slack)
    rep = Report("cohomology", True, millis=int((time.perf_counter() - start) * 1000),
                 inputs={"n": args.n, "caps": [policy.d_cap, policy.l_cap],
                         "slack": args.slack, "coeffs": args.coeffs},
                 details=dims.to_json())
    rep.details["summary"] = f"Z={dims.Z} B={dims.B} HH_upper={dims.HH_upper}"
    reports = [rep]
    if args.n == 1:
        inn = _timed(check_inner_in_der, defs.algebra, M, args.cap_d)
        reports.append(inn)
    return reports, ""


def cmd_extension(defs: DefinitionFile, args) -> tuple[list[Report], str]:
    alg = defs.algebra
    reports: list[Report] = []
    if args.cocycle:
        phi = _cochain(defs, args.cocycle)
        if phi.degree != 2:
            raise UsageError("--cocycle needs a 2-cochain")
        coeffs = defs.cochains[args.cocycle].coeffs
        try:
            ext = extension_from_2cocycle(alg, defs.bimodule(coeffs), phi)
        except ExtensionConsistencyError as exc:
            return [Report("extension.cocycle_consistency", False, details={"error": str(exc)})], ""
        reports.append(Report("extension.cocycle_consistency", True, details=dict(ext.verdict)))
        reports += _timed(run_extension_suite, ext, args.seed, args.trials, (args.deg_d, args.deg_l),
                          args.verdict_trials)
        return reports, ""
    targets = defs.extensions
    if args.name:
        if args.name not in targets:
            raise UsageError(f"no extension named {args.name!r}")
        targets = {args.name: targets[args.name]}
    if not targets:
        from .dsl import ExtensionDef
        targets = {"trivial": ExtensionDef()}
    for name, ed in targets.items():
        M = defs.bimodule(ed.bimodule)
        if ed.cocycle:
            try:
                ext = extension_from_2cocycle(alg, M, defs.cochain(ed.cocycle))
            except ExtensionConsistencyError as exc:
                reports.append(Report(f"{name}:extension.cocycle_consistency", False,
                                      details={"error": str(exc)}))
                continue
        else:
            ext = split_extension(alg, M, ed.fiber_product)
        suite = _timed(run_extension_suite, ext, args.seed, args.trials, (args.deg_d, args.deg_l),
                       args.verdict_trials)
        for r in suite:
            r.check = f"{name}:{r.check}"
        reports += suite
    return reports, ""


def _cochain(defs: DefinitionFile, name: str):
    try:
        return defs.cochain(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


# -- driver --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print machine-readable reports")
    common.add_argument("--parallel", action="store_true", default=argparse.SUPPRESS,
                        help="run independent trials in worker processes")
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS,
                        help="include wall-clock milliseconds in reports")

    parser = _Parser(prog="confhoch", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="algebra and bimodule axioms")
    p.add_argument("file")

    p = sub.add_parser("d", parents=[common], help="print the differential of a cochain")
    p.add_argument("file")
    p.add_argument("--cochain", required=True)

    p = sub.add_parser("op", parents=[common], help="cup, bracket, bullet or circ of two cochains")
    p.add_argument("operation", choices=["cup", "bracket", "bullet", "circ"])
    p.add_argument("file")
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    p.add_argument("--slot", type=int, help="insertion slot for circ, 1-based")

    p = sub.add_parser("identities", parents=[common], help="randomised identity suite")
    p.add_argument("file")
    p.add_argument("--trials", type=_nonneg, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--deg-d", type=_nonneg, default=1, help="d-degree cap of random cochains")
    p.add_argument("--deg-l", type=_nonneg, default=1, help="lambda-degree cap of random cochains")
    p.add_argument("--max-degree", type=_nonneg, default=2, help="largest random cochain degree")
    p.add_argument("--pool-degree", type=_nonneg, default=3,
                   help="largest compared degree in the cocycle-pool checks")
    p.add_argument("--workers", type=_nonneg, default=2)

    p = sub.add_parser("cohomology", parents=[common], help="truncated Z, B and HH dimensions")
    p.add_argument("file")
    p.add_argument("--n", type=_nonneg, required=True)
    p.add_argument("--cap-d", type=_nonneg, default=2)
    p.add_argument("--cap-l", type=_nonneg, default=None, help="defaults to --cap-d")
    p.add_argument("--slack", type=_nonneg, default=0)
    p.add_argument("--coeffs", default=REGULAR, help="bimodule name or 'regular'")

    p = sub.add_parser("extension", parents=[common], help="split-extension suite")
    p.add_argument("file")
    p.add_argument("--name", help="only the named [extension] block")
    p.add_argument("--cocycle", help="build the extension from this 2-cochain")
    p.add_argument("--trials", type=_nonneg, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--deg-d", type=_nonneg, default=1)
    p.add_argument("--deg-l", type=_nonneg, default=1)
    p.add_argument("--verdict-trials", type=_nonneg, default=30)
    return parser


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


_COMMANDS = {
    "check": cmd_check,
    "d": cmd_d,
    "op": cmd_op,
    "identities": cmd_identities,
    "cohomology": cmd_cohomology,
    "extension": cmd_extension,
}


def render(reports: list[Report], as_json: bool, timing: bool, text: str = "") -> str:
    passed = all(r.passed for r in reports)
    if as_json:
        payload = {"status": "pass" if passed else "fail",
                   "reports": [_report_json(r, timing) for r in reports]}
        return json.dumps(payload, indent=2)
    lines = [text.rstrip("\n")] if text else []
    for r in reports:
        if text and r.check in ("d", *_OPS, "circ"):
            continue
        line = r.line()
        if timing:
            line += f"  [{r.millis} ms]"
        lines.append(line)
    return "\n".join(lines)


def _report_json(r: Report, timing: bool) -> dict:
    out = r.to_json(timing=timing)
    if r.check == "cohomology":
        # the headline numbers sit at top level for easy scripting
        for key in ("Z", "B", "HH_upper"):
            out[key] = r.details[key]
    return out


def run_cli(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    as_json = getattr(args, "json", False)
    timing = getattr(args, "timing", False)
    args.parallel = getattr(args, "parallel", False)
    try:
        defs = load_definitions(args.file)
        reports, text = _COMMANDS[args.command](defs, args)
    except (DSLError, UsageError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else str(exc)
        print(f"confhoch: error: {msg}", file=err)
        return 2
    print(render(reports, as_json, timing, text), file=out)
    return 0 if all(r.passed for r in reports) else 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
