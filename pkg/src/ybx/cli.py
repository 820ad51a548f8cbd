"""Command-line front end.

Exit codes form a contract for scripting:

    0  completed, nothing refuted
    1  unusable input (bad flags, unreadable or malformed file)
    2  a probe refuted its question and carries a witness, or an
       exact cross-check failed (the latter also writes a replay file)
    3  the requested computation did not fit the node budget
    4  a precondition of the requested analysis does not hold

Every JSON report embeds the full run configuration; rerunning any
command with the same configuration reproduces the bytes exactly.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import __version__
from .atlas import CHECKS, AtlasSpec, FILTERS, census, census_csv
from .engine import WordEngine
from .errors import CrossCheckFailure, PreconditionUnmet, ResourceLimit, YbxError
from .ideals import noetherian_diagnosis
from .invariants import (
    cancellative_congruence_additive,
    cancellative_congruence_multiplicative,
    invariant_subsets,
    omega_lambda,
    orbit_count,
    quotient_right_cancellative,
    spec_additive,
    spectrum_dot,
)
from .reports import REFUTED, RESOURCE, RunConfig, report_json
from .solution import SolutionTable, classify, load_solution, yang_baxter_witness

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REFUTED = 2
EXIT_RESOURCE = 3
EXIT_PRECONDITION = 4


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-length", type=int, default=8, metavar="L")
    common.add_argument("--node-budget", type=int, default=5_000_000, metavar="N")
    common.add_argument("--d-bound", type=int, default=4, metavar="D")
    common.add_argument("--power-bound", type=int, default=4, metavar="N")
    common.add_argument("--t-max", type=int, default=3, metavar="T")
    common.add_argument("--abelian-bound", type=int, default=6, metavar="L")
    common.add_argument("--cache-dir", default=None, metavar="DIR")
    common.add_argument(
        "--format", choices=("text", "json"), default="text", dest="fmt"
    )
    common.add_argument("--flavor", choices=("M", "A"), default="A")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="ybx", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"ybx {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("validate", "check the braid identity and basic flags"),
        ("classify", "full property flags"),
        ("growth", "class counts per length"),
        ("gk", "growth dimension from invariant subsets"),
        ("spec", "prime spectrum of the additive monoid"),
        ("congruence", "cancellative congruence at one length"),
        ("diagnose", "Noetherianity probes"),
        ("omega", "orbit group of the diagonal element"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("file", help="solution JSON file")
        if name == "spec":
            p.add_argument("--dot", action="store_true", help="emit a DOT Hasse diagram")
        if name == "congruence":
            p.add_argument("--length", type=int, default=4, metavar="L")

    p = sub.add_parser(name="atlas", parents=[common], help="enumerate and census")
    p.add_argument("--n", type=int, required=True)
    p.add_argument(
        "--kind", choices=("general", "lnd", "fixed_rho"), default="lnd"
    )
    p.add_argument(
        "--filter",
        action="append",
        default=[],
        choices=sorted(FILTERS),
        dest="filters",
    )
    p.add_argument("--dedup", action="store_true")
    p.add_argument(
        "--check", action="append", default=[], choices=sorted(CHECKS), dest="checks"
    )
    p.add_argument("--csv", metavar="PATH", help="also write the census as CSV")
    p.add_argument("--replay-dir", metavar="DIR", help="where failure replays go")
    return parser


def _config(args) -> RunConfig:
    cache = os.environ.get("YBX_CACHE") or args.cache_dir or None
    return RunConfig(
        max_length=args.max_length,
        node_budget=args.node_budget,
        d_bound=args.d_bound,
        power_bound=args.power_bound,
        t_max=args.t_max,
        abelian_bound=args.abelian_bound,
        cache_dir=cache,
        fmt=args.fmt,
    )


def _load(path: str) -> SolutionTable:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return load_solution(json.load(fh))
    except OSError as exc:
        raise SystemExit(f"ybx: cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise SystemExit(f"ybx: {path} is not JSON: line {exc.lineno} column {exc.colno}")
    except ValueError as exc:
        raise SystemExit(f"ybx: {path}: {exc}")


def _engine(sol, cfg: RunConfig) -> WordEngine:
    return WordEngine(sol, node_budget=cfg.node_budget, cache_dir=cfg.cache_dir)


def _emit(payload: dict, cfg: RunConfig, text_lines) -> None:
    if cfg.fmt == "json":
        sys.stdout.write(report_json(payload, cfg))
    else:
        for line in text_lines:
            print(line)


def _yesno(flag: bool) -> str:
    return "yes" if flag else "no"


def cmd_validate(args, cfg) -> int:
    sol = _load(args.file)
    witness = yang_baxter_witness(sol)
    flags = classify(sol, abelian_bound=cfg.abelian_bound)
    payload = {"command": args.command, "flags": flags.to_json(), "witness": witness}
    lines = [
        f"solution: {_yesno(flags.is_solution)}"
        + (f"  (braid fails at triple {witness})" if witness else ""),
        f"left non-degenerate: {_yesno(flags.left_nondegenerate)}",
        f"right non-degenerate: {_yesno(flags.right_nondegenerate)}",
        f"bijective: {_yesno(flags.bijective)}",
    ]
    if args.command == "classify":
        lines += [
            f"involutive: {_yesno(flags.involutive)}",
            f"idempotent: {_yesno(flags.idempotent)}",
            f"fixed rho: {_yesno(flags.fixed_rho)}",
            f"abelian A (length <= {flags.abelian_bound}): {_yesno(flags.abelian_A)}",
            f"abelian M (length <= {flags.abelian_bound}): {_yesno(flags.abelian_M)}",
        ]
    _emit(payload, cfg, lines)
    return EXIT_OK if flags.is_solution else EXIT_REFUTED


def cmd_growth(args, cfg) -> int:
    sol = _load(args.file)
    engine = _engine(sol, cfg)
    values = []
    code = EXIT_OK
    for L in range(cfg.max_length + 1):
        try:
            values.append(engine.close(args.flavor, L).class_count)
        except ResourceLimit:
            code = EXIT_RESOURCE
            break
    payload = {
        "command": "growth",
        "flavor": args.flavor,
        "growth": values,
        "complete": code == EXIT_OK,
    }
    note = "" if code == EXIT_OK else f"  (stopped by node budget after L={len(values) - 1})"
    _emit(payload, cfg, [f"h_{args.flavor}(0..{len(values) - 1}) = " + " ".join(map(str, values)) + note])
    return code


def cmd_gk(args, cfg) -> int:
    sol = _load(args.file)
    subsets = invariant_subsets(sol)
    counts = {z.members: orbit_count(sol, z.members) for z in subsets}
    value = max(counts.values())
    payload = {
        "command": "gk",
        "gk": value,
        "subsets": [
            {"z": list(z.members), "orbits": counts[z.members]} for z in subsets
        ],
    }
    lines = [f"GK = {value}"]
    for z in subsets:
        lines.append(f"  Z={set(z.members) if z.members else '{}'}: {counts[z.members]} orbit(s)")
    _emit(payload, cfg, lines)
    return EXIT_OK


def cmd_spec(args, cfg) -> int:
    sol = _load(args.file)
    engine = _engine(sol, cfg)
    data = spec_additive(sol, engine, check_length=min(3, cfg.max_length))
    dot = spectrum_dot(data)
    payload = {"command": "spec", "spectrum": data.to_json(), "dot": dot}
    if args.dot and cfg.fmt == "text":
        sys.stdout.write(dot)
        return EXIT_OK
    lines = [f"primes: {len(data.subsets)}"]
    for z in data.subsets:
        lines.append("  P({})".format(",".join(map(str, z))))
    for a, b in data.hasse_edges:
        lines.append(
            "  P({}) < P({})".format(",".join(map(str, a)), ",".join(map(str, b)))
        )
    _emit(payload, cfg, lines)
    return EXIT_OK


def cmd_congruence(args, cfg) -> int:
    sol = _load(args.file)
    engine = _engine(sol, cfg)
    fn = (
        cancellative_congruence_additive
        if args.flavor == "A"
        else cancellative_congruence_multiplicative
    )
    data = fn(sol, engine, length=args.length, t_max=cfg.t_max)
    quotient = quotient_right_cancellative(
        sol, engine, max_length=min(3, cfg.max_length), t_max=cfg.t_max
    )
    total = engine.close(args.flavor, args.length).class_count
    payload = {
        "command": "congruence",
        "congruence": data.to_json(),
        "quotient": quotient.to_json(),
    }
    shape = "equality" if data.block_count == total else f"{data.block_count} block(s) on {total} class(es)"
    lines = [
        f"eta_{args.flavor} at length {args.length}: {shape}, "
        + (f"stabilized at t={data.t}" if data.stabilized else f"NOT stabilized (reached t={data.reached_t})"),
        quotient.render_text(),
    ]
    _emit(payload, cfg, lines)
    if quotient.verdict == REFUTED:
        return EXIT_REFUTED
    if quotient.verdict == RESOURCE or not data.stabilized:
        return EXIT_RESOURCE
    return EXIT_OK


def cmd_diagnose(args, cfg) -> int:
    sol = _load(args.file)
    engine = _engine(sol, cfg)
    reports = noetherian_diagnosis(
        sol,
        engine,
        max_length=min(6, cfg.max_length),
        d_bound=cfg.d_bound,
        power_bound=cfg.power_bound,
        abelian_bound=cfg.abelian_bound,
    )
    payload = {"command": "diagnose", "reports": [r.to_json() for r in reports]}
    _emit(payload, cfg, [r.render_text() for r in reports])
    if any(r.verdict == REFUTED for r in reports):
        return EXIT_REFUTED
    if any(r.verdict == RESOURCE for r in reports):
        return EXIT_RESOURCE
    return EXIT_OK


def cmd_omega(args, cfg) -> int:
    sol = _load(args.file)
    engine = _engine(sol, cfg)
    data = omega_lambda(sol, engine, max_length=cfg.max_length)
    payload = {
        "command": "omega",
        "size": data.size,
        "certified": data.certified,
        "failure": data.certificate_failure,
        "element_length": data.base.length,
    }
    lines = [
        f"|Omega| = {data.size}  "
        + ("(certified group table)" if data.certified else f"(NOT certified: {data.certificate_failure})")
    ]
    _emit(payload, cfg, lines)
    return EXIT_OK


def cmd_atlas(args, cfg) -> int:
    spec = AtlasSpec(
        n=args.n, kind=args.kind, filters=tuple(args.filters), dedup=args.dedup
    )
    result = census(
        spec, checks=tuple(args.checks), cfg=cfg, replay_dir=args.replay_dir
    )
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(census_csv(result))
    payload = {"command": "atlas", "census": result.to_json()}
    lines = [f"solutions: {result.aggregate['total']}"]
    for name in result.checks:
        tally = result.aggregate["by_check"][name]
        bits = ", ".join(f"{k}={v}" for k, v in sorted(tally.items()))
        lines.append(f"  {name}: {bits}")
    _emit(payload, cfg, lines)
    refuted = any(
        outcome.get("verdict") == REFUTED
        for row in result.rows
        for outcome in row["checks"].values()
    )
    return EXIT_REFUTED if refuted else EXIT_OK


_COMMANDS = {
    "validate": cmd_validate,
    "classify": cmd_validate,
    "growth": cmd_growth,
    "gk": cmd_gk,
    "spec": cmd_spec,
    "congruence": cmd_congruence,
    "diagnose": cmd_diagnose,
    "omega": cmd_omega,
    "atlas": cmd_atlas,
}


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _config(args)
    try:
        return _COMMANDS[args.command](args, cfg)
    except CrossCheckFailure as exc:
        print(f"ybx: cross-check failed: {exc}", file=sys.stderr)
        return EXIT_REFUTED
    except ResourceLimit as exc:
        print(f"ybx: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except PreconditionUnmet as exc:
        print(f"ybx: precondition not met: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except YbxError as exc:
        print(f"ybx: {exc}", file=sys.stderr)
        return EXIT_REFUTED


if __name__ == "__main__":
    raise SystemExit(main())
