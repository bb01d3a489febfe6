"""Command-line entry point.

One executable, eight subcommands, all deterministic: the same flags and
input files produce byte-identical output files. Static artifacts are JSON
with sorted keys; duel and builder traces are JSONL, one record per line.

Exit codes: 0 success, 1 domain error (a precondition or invariant failed;
a machine-readable error object goes to stderr), 2 malformed input or bad
usage. The default stage budget for paritytest and dimhalf can be set with
the PARITYBET_STAGES environment variable; an explicit --stages wins.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import bits
from .blocktest import build_parity_test, packing_certificate
from .builder import run_stage_machine
from .decompose import block_decompose, parity_factorize
from .diagonal import diagonalize, unit_bet_alternating, unit_bet_on_one
from .dimension import empirical_dim_bound, validate_s_test
from .errors import BettingLabError
from .oracles import (
    all_in_growth_fixture,
    floor_parity_grid,
    growth_random,
    minimality_grid,
    two_round_grid,
    two_round_random,
)
from .programs import BetProgram, StageApprox
from .serialize import (
    WireError,
    dumps,
    from_jsonable,
    load_json,
    parse_frac,
    to_jsonable,
    trace_lines,
)
from .serialize import _parse_component  # same package; list files carry no tag
from .strategy import Kind, Parity, StrategyTable, validate

_STAGES_ENV = "PARITYBET_STAGES"


def _default_stages(fallback: int) -> int:
    raw = os.environ.get(_STAGES_ENV)
    if raw is None:
        return fallback
    try:
        value = int(raw)
    except ValueError as exc:
        raise WireError(f"{_STAGES_ENV} must be an integer, got {raw!r}") from exc
    if value < 0:
        raise WireError(f"{_STAGES_ENV} must be nonnegative")
    return value


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)


def _emit_lines(lines, out: str | None) -> None:
    body = "\n".join(lines) + "\n"
    _emit(body, out)


def _line(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True)


def _plain(obj):
    """Primitive-only copy for report dicts the wire layer has no type for."""
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}" if obj.denominator != 1 else str(obj.numerator)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    return _plain(to_jsonable(obj))


def _as_table(obj, depth: int, stage: int | None) -> StrategyTable:
    if isinstance(obj, StrategyTable):
        return obj
    if isinstance(obj, BetProgram):
        return obj.to_table(depth)
    if isinstance(obj, StageApprox):
        if stage is None:
            stage = max((c.stage for c in obj.components), default=0)
        return obj.table(stage, depth)
    raise WireError("expected a table, program, or mixture object")


def _cmd_validate(args) -> int:
    obj = from_jsonable(load_json(args.path))
    table = _as_table(obj, args.depth, args.stage)
    diag = validate(table)
    payload = to_jsonable(diag)
    payload["depth"] = table.depth
    _emit(dumps(payload), args.out)
    return 0


def _cmd_decompose(args) -> int:
    m = from_jsonable(load_json(args.path))
    if not isinstance(m, StrategyTable):
        raise WireError("decompose expects a strategy table")
    if args.mode == "parity":
        odd_factor, even_factor = parity_factorize(m)
        payload = {
            "mode": "parity",
            "root": _plain(m.value(bits.EMPTY)),
            "odd_factor": to_jsonable(odd_factor),
            "even_factor": to_jsonable(even_factor),
        }
        _emit(dumps(payload), args.out)
        return 0
    if args.second is None or args.spec is None:
        raise WireError("block mode needs --second and --spec")
    n = from_jsonable(load_json(args.second))
    if not isinstance(n, StrategyTable):
        raise WireError("--second must hold a strategy table")
    spec = from_jsonable(load_json(args.spec))
    m_core, m_rest, n_core, n_rest = block_decompose(m, n, spec)
    payload = {
        "mode": "block",
        "m_core": to_jsonable(m_core),
        "m_rest": to_jsonable(m_rest),
        "n_core": to_jsonable(n_core),
        "n_rest": to_jsonable(n_rest),
    }
    _emit(dumps(payload), args.out)
    return 0


def _cmd_paritytest(args) -> int:
    raw = load_json(args.mixture)
    if not isinstance(raw, dict) or "odd" not in raw or "even" not in raw:
        raise WireError('mixture file must be an object with "odd" and "even"')
    m = from_jsonable(raw["odd"])
    n = from_jsonable(raw["even"])
    if not isinstance(m, StageApprox) or not isinstance(n, StageApprox):
        raise WireError("odd and even entries must be mixtures")
    stages = args.stages if args.stages is not None else _default_stages(256)
    result = build_parity_test(m, n, args.depth, stages)
    cert, growth = packing_certificate(result.array)
    report = empirical_dim_bound(cert, result.path)
    payload = to_jsonable(result)
    payload["certificate"] = {
        "growth": [to_jsonable(g) for g in growth],
        "dim_report": to_jsonable(report),
    }
    _emit(dumps(payload), args.out)
    return 0


def _cmd_diagonalize(args) -> int:
    raw = load_json(args.adversaries)
    if not isinstance(raw, list):
        raise WireError("adversaries file must hold a JSON list")
    adversaries = []
    for entry in raw:
        obj = from_jsonable(entry)
        adversaries.append(obj)
    engine = unit_bet_on_one() if args.engine == "N" else unit_bet_alternating()
    blocks = args.dim0_blocks if args.dim0 else None
    trace = diagonalize(
        adversaries,
        engine,
        args.target,
        mode=args.mode,
        dim0_blocks=blocks,
        max_bits=args.max_bits,
    )
    _emit_lines(trace_lines(trace), args.out)
    return 0


def _cmd_stest(args) -> int:
    array = from_jsonable(load_json(args.test_path))
    s = parse_frac(args.s)
    verdicts = validate_s_test(array, s)
    payload = {
        "s": _plain(s),
        "levels": [to_jsonable(v) for v in verdicts],
        "ok": all(v.ok() for v in verdicts),
    }
    _emit(dumps(payload), args.out)
    return 0


def _cmd_dim(args) -> int:
    strategy = from_jsonable(load_json(args.strategy))
    with open(args.x, "r", encoding="utf-8") as fh:
        x = "".join(fh.read().split())
    if not x or any(c not in "01" for c in x):
        raise WireError("--x must hold a nonempty string of 0/1 bits")
    report = empirical_dim_bound(
        strategy, x, stage=args.stage, precision=args.precision
    )
    _emit(dumps(to_jsonable(report)), args.out)
    return 0


def _cmd_dimhalf(args) -> int:
    components = []
    if args.components is not None:
        raw = load_json(args.components)
        if not isinstance(raw, list):
            raise WireError("components file must hold a JSON list")
        components = [_parse_component(c) for c in raw]
    by_parity = {Parity.BETS_ON_ODD: [], Parity.BETS_ON_EVEN: []}
    for c in components:
        if c.program.parity not in by_parity:
            raise WireError(
                "every builder component needs a single-parity program"
            )
        by_parity[c.program.parity].append(c)

    def pack(parts, parity):
        kind = (
            Kind.MARTINGALE
            if all(c.program.kind is Kind.MARTINGALE for c in parts)
            else Kind.SUPERMARTINGALE
        )
        return StageApprox(tuple(parts), kind, parity)

    n_approx = pack(by_parity[Parity.BETS_ON_ODD], Parity.BETS_ON_ODD)
    t_approx = pack(by_parity[Parity.BETS_ON_EVEN], Parity.BETS_ON_EVEN)
    stages = args.stages if args.stages is not None else _default_stages(1000)
    state, prefix, ledger = run_stage_machine(n_approx, t_approx, stages, args.nmax)
    payload = {
        "state": to_jsonable(state),
        "ledger": to_jsonable(ledger),
        "prefix": prefix,
    }
    if args.out is None:
        _emit(dumps(payload), None)
        return 0
    _emit(dumps(payload), args.out)
    base = args.out[:-5] if args.out.endswith(".json") else args.out
    lines = [_line({"type": "builder_header", "stages": stages, "nmax": args.nmax})]
    for ev in state.events:
        lines.append(_line(to_jsonable(ev)))
    lines.append(
        _line(
            {
                "type": "summary",
                "prefix": prefix,
                "kraft_weight": _plain(ledger.kraft_weight()),
            }
        )
    )
    _emit_lines(lines, base + ".trace.jsonl")
    _emit(prefix + "\n", base + ".prefix.txt")
    return 0


_LEMMAS = ("two-round", "minimality", "floor-parity", "growth")


def _cmd_verify(args) -> int:
    rng = random.Random(args.seed)
    reports = []
    if args.lemma == "two-round":
        reports.append(two_round_random(rng, count=args.n))
        reports.append(two_round_grid())
    elif args.lemma == "minimality":
        reports.append(minimality_grid())
    elif args.lemma == "floor-parity":
        reports.append(floor_parity_grid())
    else:
        reports.append(growth_random(rng, count=args.n))
        reports.append(all_in_growth_fixture())
    payload = {
        "lemma": args.lemma,
        "seed": args.seed,
        "reports": [
            {
                "name": r.name,
                "total": r.total,
                "passed": r.passed,
                "failures": _plain(r.failures),
                "stats": _plain(r.stats),
            }
            for r in reports
        ],
        "passed": all(r.passed for r in reports),
    }
    _emit(dumps(payload), args.out)
    return 0 if payload["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paritybet",
        description="exact-rational betting strategies with parity restrictions",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("validate", help="diagnose a strategy artifact")
    p.add_argument("-i", "--in", dest="path", required=True)
    p.add_argument("--depth", type=int, default=8, help="table depth for programs")
    p.add_argument("--stage", type=int, default=None, help="mixture stage to evaluate")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("decompose", help="factor a martingale")
    p.add_argument("--in", dest="path", required=True)
    p.add_argument("--mode", choices=("parity", "block"), required=True)
    p.add_argument("--second", default=None, help="first-bit bettor (block mode)")
    p.add_argument("--spec", default=None, help="block targets (block mode)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("paritytest", help="build the nested at-most-three test")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--stages", type=int, default=None)
    p.add_argument("--mixture", required=True, help='JSON {"odd": ..., "even": ...}')
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_paritytest)

    p = sub.add_parser("diagonalize", help="integer duel trace")
    p.add_argument("--engine", choices=("N", "D"), required=True)
    p.add_argument("--adversaries", required=True)
    p.add_argument("--mode", choices=("greedy", "settle"), default="greedy")
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--dim0", action="store_true", help="interpolate 01 blocks")
    p.add_argument("--dim0-blocks", type=int, default=8, help="base block pair count")
    p.add_argument("--max-bits", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_diagonalize)

    p = sub.add_parser("stest", help="check the per-level weight bounds")
    p.add_argument("--validate", dest="test_path", required=True)
    p.add_argument("--s", required=True, help="scale, e.g. 1/2")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_stest)

    p = sub.add_parser("dim", help="growth-exponent report along a sequence")
    p.add_argument("--strategy", required=True)
    p.add_argument("--x", required=True, help="text file of bits")
    p.add_argument("--stage", type=int, default=None)
    p.add_argument("--precision", type=int, default=20)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_dim)

    p = sub.add_parser("dimhalf", help="run the stage machine")
    p.add_argument("--components", default=None, help="JSON list of components")
    p.add_argument("--stages", type=int, default=None)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--out", default=None, help="run summary; siblings get .trace.jsonl/.prefix.txt")
    p.set_defaults(func=_cmd_dimhalf)

    p = sub.add_parser("verify", help="run an oracle suite")
    p.add_argument("--lemma", choices=_LEMMAS, required=True)
    p.add_argument("--n", type=int, default=1000, help="randomized instance count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WireError as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 2
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 2
    except BettingLabError as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
