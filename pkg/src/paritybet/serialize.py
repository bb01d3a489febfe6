"""JSON wire formats: exact rationals as strings, deterministic output.

Strategy tables, bet programs, mixtures, adversary strategies, test
arrays, and block specs round-trip. Reports (diagnoses, level verdicts,
growth verdicts, dimension reports, traces) serialize one way, out.
Every rational crosses the wire as str(Fraction), so nothing is ever
rounded; a file written twice from the same objects is byte-identical.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .blocktest import (
    BlockReport,
    GrowthLine,
    LevelReport,
    ParityTestResult,
    TestArray,
)
from .builder import (
    BuilderState,
    GrowthVerdict,
    RequestLedger,
    StageEvent,
    StageParams,
)
from .decompose import BlockSpec
from .diagonal import (
    BitRecord,
    Checkpoint,
    ConeCertificate,
    DiagTrace,
    IntStrategy,
)
from .dimension import DimReport, ExponentSample, LevelVerdict
from .programs import (
    BetProgram,
    Component,
    FractionBet,
    Fsm,
    FsmState,
    IntegerBet,
    ScaleBet,
    StageApprox,
)
from .strategy import Diagnosis, Kind, Parity, Sided, StrategyTable


class WireError(Exception):
    """Malformed wire data; distinct from domain errors on purpose so the
    command line can map it to its own exit code."""


def frac_str(x) -> str:
    return str(Fraction(x))


def parse_frac(s) -> Fraction:
    if isinstance(s, bool):
        raise WireError(f"expected a rational, got {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise WireError(f"bad rational {s!r}") from exc
    raise WireError(f"expected a rational, got {type(s).__name__}")


def _parse_enum(cls, raw, what: str):
    try:
        return cls(raw)
    except ValueError as exc:
        raise WireError(f"bad {what} {raw!r}") from exc


def _need(d: dict, key: str):
    if not isinstance(d, dict) or key not in d:
        raise WireError(f"missing key {key!r}")
    return d[key]


def _bet_to_jsonable(bet):
    if bet is None:
        return None
    if isinstance(bet, FractionBet):
        return {"bet": "fraction", "stake": frac_str(bet.fraction)}
    if isinstance(bet, IntegerBet):
        return {"bet": "integer", "wager": bet.wager, "outcome": bet.outcome}
    if isinstance(bet, ScaleBet):
        return {"bet": "scale", "factor": frac_str(bet.factor)}
    raise WireError(f"unknown bet {type(bet).__name__}")


def _bet_from_jsonable(d):
    if d is None:
        return None
    tag = _need(d, "bet")
    if tag == "fraction":
        return FractionBet(parse_frac(_need(d, "stake")))
    if tag == "integer":
        wager, outcome = _need(d, "wager"), _need(d, "outcome")
        if not isinstance(wager, int) or not isinstance(outcome, int):
            raise WireError("integer bet needs integer wager and outcome")
        return IntegerBet(wager, outcome)
    if tag == "scale":
        return ScaleBet(parse_frac(_need(d, "factor")))
    raise WireError(f"unknown bet tag {tag!r}")


def _fsm_to_jsonable(fsm: Fsm) -> dict:
    return {
        "states": [
            {"bet": _bet_to_jsonable(s.bet), "on0": s.on0, "on1": s.on1}
            for s in fsm.states
        ],
        "start": fsm.start,
    }


def _fsm_from_jsonable(d) -> Fsm:
    raw_states = _need(d, "states")
    if not isinstance(raw_states, list) or not raw_states:
        raise WireError("machine needs a nonempty state list")
    states = []
    for s in raw_states:
        on0, on1 = _need(s, "on0"), _need(s, "on1")
        if not isinstance(on0, int) or not isinstance(on1, int):
            raise WireError("state transitions must be integer indices")
        states.append(FsmState(_bet_from_jsonable(_need(s, "bet")), on0, on1))
    start = d.get("start", 0)
    if not isinstance(start, int):
        raise WireError("start must be an integer index")
    return Fsm(tuple(states), start)


def to_jsonable(obj):
    """Plain-JSON form of a wire object or report. Deterministic."""
    if isinstance(obj, StrategyTable):
        return {
            "type": "table",
            "depth": obj.depth,
            "kind": obj.kind.value,
            "parity": obj.parity.value,
            "sided": obj.sided.value,
            "values": {s: frac_str(obj.value(s)) for s in sorted(obj.values)},
        }
    if isinstance(obj, BetProgram):
        return {
            "type": "program",
            "initial": frac_str(obj.initial),
            "form": obj.form,
            "parity": obj.parity.value,
            "sided": obj.sided.value,
            "rule": _fsm_to_jsonable(obj.fsm),
        }
    if isinstance(obj, Component):
        return {
            "stage": obj.stage,
            "weight": frac_str(obj.weight),
            "program": to_jsonable(obj.program),
        }
    if isinstance(obj, StageApprox):
        return {
            "type": "mixture",
            "kind": obj.kind.value,
            "parity": obj.parity.value,
            "sided": obj.sided.value,
            "components": [to_jsonable(c) for c in obj.components],
        }
    if isinstance(obj, IntStrategy):
        return {
            "type": "int_strategy",
            "name": obj.name,
            "program": to_jsonable(obj.program),
        }
    if isinstance(obj, TestArray):
        return {
            "type": "test_array",
            "flavor": obj.flavor,
            "levels": [list(level) for level in obj.levels],
        }
    if isinstance(obj, BlockSpec):
        return {
            "type": "block_spec",
            "m00": frac_str(obj.m00),
            "m10": frac_str(obj.m10),
            "n0": frac_str(obj.n0),
            "n1": frac_str(obj.n1),
            "c": frac_str(obj.c),
        }
    if isinstance(obj, Diagnosis):
        return {
            "type": "diagnosis",
            "martingale": obj.martingale,
            "supermartingale": obj.supermartingale,
            "bets_on_even": obj.bets_on_even,
            "bets_on_odd": obj.bets_on_odd,
            "zero_sided": obj.zero_sided,
            "one_sided": obj.one_sided,
            "witnesses": dict(sorted(obj.witnesses.items())),
        }
    if isinstance(obj, BlockReport):
        return {
            "type": "block_report",
            "parent": obj.parent,
            "hypotheses_ok": obj.hypotheses_ok,
            "witness": obj.witness,
            "branch_state": obj.branch_state,
            "branch_value": frac_str(obj.branch_value),
            "threshold": frac_str(obj.threshold),
            "conclusion_ok": obj.conclusion_ok,
            "quantities": [[k, frac_str(v)] for k, v in obj.quantities],
        }
    if isinstance(obj, LevelReport):
        return {
            "type": "level_report",
            "level": obj.level,
            "expanded_parent": obj.expanded_parent,
            "phase": obj.phase,
            "trigger_stage": obj.trigger_stage,
            "children": list(obj.children),
            "final_values": [[s, frac_str(v)] for s, v in obj.final_values],
            "survivors": list(obj.survivors),
            "chosen": obj.chosen,
        }
    if isinstance(obj, ParityTestResult):
        return {
            "type": "parity_test_result",
            "array": to_jsonable(obj.array),
            "path": obj.path,
            "threshold": frac_str(obj.threshold),
            "stages": obj.stages,
            "reports": [to_jsonable(r) for r in obj.reports],
        }
    if isinstance(obj, GrowthLine):
        return {
            "type": "growth_line",
            "level": obj.level,
            "members": obj.members,
            "on_path_value": frac_str(obj.on_path_value),
            "measure_bound": frac_str(obj.measure_bound),
        }
    if isinstance(obj, LevelVerdict):
        return {
            "type": "level_verdict",
            "level": obj.level,
            "count": obj.count,
            "sign": obj.sign,
            "strict": obj.strict,
            "min_length": obj.min_length,
        }
    if isinstance(obj, ExponentSample):
        return {
            "type": "exponent_sample",
            "n": obj.n,
            "value": frac_str(obj.value),
            "exact": None if obj.exact is None else frac_str(obj.exact),
            "bracket": None
            if obj.bracket is None
            else [frac_str(obj.bracket[0]), frac_str(obj.bracket[1])],
            "infinite": obj.infinite,
        }
    if isinstance(obj, DimReport):
        return {
            "type": "dim_report",
            "x": obj.x,
            "lower": None if obj.lower is None else frac_str(obj.lower),
            "upper": None if obj.upper is None else frac_str(obj.upper),
            "half_log2_base": obj.half_log2_base(),
            "samples": [to_jsonable(s) for s in obj.samples],
        }
    if isinstance(obj, GrowthVerdict):
        return {
            "type": "growth_verdict",
            "sigma": obj.sigma,
            "tau": obj.tau,
            "stage_s": obj.stage_s,
            "stage_t": obj.stage_t,
            "p": obj.p,
            "delta_at_sigma": frac_str(obj.delta_at_sigma),
            "hypothesis_holds": obj.hypothesis_holds,
            "value_s_at_tau": frac_str(obj.value_s_at_tau),
            "value_t_at_tau": frac_str(obj.value_t_at_tau),
            "bound": frac_str(obj.bound),
            "conclusion_holds": obj.conclusion_holds,
            "ok": obj.ok(),
        }
    if isinstance(obj, ConeCertificate):
        return {
            "type": "cone_certificate",
            "adversary": obj.adversary,
            "prefix": obj.prefix,
            "kind": obj.kind,
            "machine_state": obj.machine_state,
            "position_parity": obj.position_parity,
            "constant_value": obj.constant_value,
        }
    if isinstance(obj, Checkpoint):
        return {
            "type": "checkpoint",
            "position": obj.position,
            "block_bits": obj.block_bits,
            "fraction": frac_str(obj.fraction),
        }
    if isinstance(obj, StageParams):
        return {
            "type": "stage_params",
            "n": obj.n,
            "q": frac_str(obj.q),
            "p": obj.p,
            "s": obj.s,
            "described_len": obj.described_len,
        }
    if isinstance(obj, StageEvent):
        return {
            "type": "stage_event",
            "stage": obj.stage,
            "kind": obj.kind,
            "n": obj.n,
            "value": obj.value,
        }
    if isinstance(obj, RequestLedger):
        return {
            "type": "ledger",
            "requests": [[t, ln] for t, ln in obj.requests],
            "kraft_weight": frac_str(obj.kraft_weight()),
        }
    if isinstance(obj, BuilderState):
        return {
            "type": "builder_state",
            "stage": obj.stage,
            "sigmas": list(obj.sigmas),
            "change_counts": list(obj.change_counts),
            "params": [to_jsonable(p) for p in obj.params],
            "events": [to_jsonable(e) for e in obj.events],
            "ledger": to_jsonable(obj.ledger),
        }
    raise WireError(f"cannot serialize {type(obj).__name__}")


_PARSERS = {}


def from_jsonable(d):
    """Rebuild a round-trip wire object from its plain-JSON form."""
    if not isinstance(d, dict):
        raise WireError("wire object must be a JSON object")
    tag = _need(d, "type")
    parser = _PARSERS.get(tag)
    if parser is None:
        raise WireError(f"unknown wire type {tag!r}")
    return parser(d)


def _parse_table(d) -> StrategyTable:
    depth = _need(d, "depth")
    if not isinstance(depth, int):
        raise WireError("depth must be an integer")
    raw = _need(d, "values")
    if not isinstance(raw, dict):
        raise WireError("values must be an object")
    values = {s: parse_frac(v) for s, v in raw.items()}
    try:
        return StrategyTable(
            depth,
            values,
            _parse_enum(Kind, _need(d, "kind"), "kind"),
            _parse_enum(Parity, _need(d, "parity"), "parity"),
            _parse_enum(Sided, _need(d, "sided"), "sided"),
        )
    except (ValueError, TypeError) as exc:
        raise WireError(f"bad table: {exc}") from exc


def _parse_program(d) -> BetProgram:
    form = _need(d, "form")
    if form not in ("fractional", "integer", "fsm"):
        raise WireError(f"bad program form {form!r}")
    return BetProgram(
        parse_frac(_need(d, "initial")),
        _fsm_from_jsonable(_need(d, "rule")),
        form,
        _parse_enum(Parity, _need(d, "parity"), "parity"),
        _parse_enum(Sided, _need(d, "sided"), "sided"),
    )


def _parse_component(d) -> Component:
    stage = _need(d, "stage")
    if not isinstance(stage, int):
        raise WireError("component stage must be an integer")
    return Component(
        stage, parse_frac(_need(d, "weight")), _parse_program(_need(d, "program"))
    )


def _parse_mixture(d) -> StageApprox:
    raw = _need(d, "components")
    if not isinstance(raw, list):
        raise WireError("components must be a list")
    return StageApprox(
        tuple(_parse_component(c) for c in raw),
        _parse_enum(Kind, _need(d, "kind"), "kind"),
        _parse_enum(Parity, _need(d, "parity"), "parity"),
        _parse_enum(Sided, _need(d, "sided"), "sided"),
    )


def _parse_int_strategy(d) -> IntStrategy:
    name = d.get("name", "")
    if not isinstance(name, str):
        raise WireError("name must be a string")
    return IntStrategy(_parse_program(_need(d, "program")), name)


def _parse_test_array(d) -> TestArray:
    raw = _need(d, "levels")
    if not isinstance(raw, list):
        raise WireError("levels must be a list")
    levels = []
    for level in raw:
        if not isinstance(level, list) or not all(
            isinstance(m, str) for m in level
        ):
            raise WireError("each level must be a list of bit strings")
        levels.append(tuple(level))
    flavor = d.get("flavor", "block34")
    if not isinstance(flavor, str):
        raise WireError("flavor must be a string")
    return TestArray(tuple(levels), flavor)


def _parse_block_spec(d) -> BlockSpec:
    return BlockSpec(
        parse_frac(_need(d, "m00")),
        parse_frac(_need(d, "m10")),
        parse_frac(_need(d, "n0")),
        parse_frac(_need(d, "n1")),
        parse_frac(_need(d, "c")),
    )


_PARSERS.update(
    {
        "table": _parse_table,
        "program": _parse_program,
        "mixture": _parse_mixture,
        "int_strategy": _parse_int_strategy,
        "test_array": _parse_test_array,
        "block_spec": _parse_block_spec,
    }
)


def dumps(obj) -> str:
    """Deterministic JSON text for an object or plain structure."""
    payload = to_jsonable(obj) if not isinstance(obj, (dict, list)) else obj
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def dump_json(obj, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise WireError(f"{path}: invalid JSON ({exc})") from exc


def trace_lines(trace: DiagTrace):
    """JSONL encoding of a duel trace: header, one line per bit, then
    checkpoints, certificates, and a closing summary line."""
    yield json.dumps(
        {
            "type": "trace_header",
            "engine": trace.engine_name,
            "mode": trace.mode,
            "target": trace.target,
        },
        sort_keys=True,
    )
    for rec in trace.records:
        yield json.dumps(
            {
                "adversaries": list(rec.adversaries),
                "bit": rec.bit,
                "engine": rec.engine,
                "rule": rec.rule,
            },
            sort_keys=True,
        )
    for cp in trace.checkpoints:
        yield json.dumps(
            {
                "type": "checkpoint",
                "position": cp.position,
                "block_bits": cp.block_bits,
                "fraction": frac_str(cp.fraction),
            },
            sort_keys=True,
        )
    for cert in trace.certificates:
        yield json.dumps(to_jsonable(cert), sort_keys=True)
    yield json.dumps(
        {"type": "summary", "reached": trace.reached, "z": trace.z},
        sort_keys=True,
    )


def parse_trace(lines) -> DiagTrace:
    """Rebuild a duel trace from its JSONL lines."""
    header = None
    records: list[BitRecord] = []
    checkpoints: list[Checkpoint] = []
    certificates: list[ConeCertificate] = []
    summary = None
    for raw in lines:
        raw = raw.strip()
        if not raw:
            continue
        try:
            d = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise WireError(f"bad trace line: {exc}") from exc
        tag = d.get("type")
        if tag == "trace_header":
            header = d
        elif tag == "checkpoint":
            checkpoints.append(
                Checkpoint(
                    _need(d, "position"),
                    _need(d, "block_bits"),
                    parse_frac(_need(d, "fraction")),
                )
            )
        elif tag == "cone_certificate":
            certificates.append(
                ConeCertificate(
                    _need(d, "adversary"),
                    _need(d, "prefix"),
                    _need(d, "kind"),
                    _need(d, "machine_state"),
                    _need(d, "position_parity"),
                    _need(d, "constant_value"),
                )
            )
        elif tag == "summary":
            summary = d
        elif tag is None and "bit" in d:
            records.append(
                BitRecord(
                    _need(d, "bit"),
                    _need(d, "rule"),
                    _need(d, "engine"),
                    tuple(_need(d, "adversaries")),
                )
            )
        else:
            raise WireError(f"unknown trace line type {tag!r}")
    if header is None or summary is None:
        raise WireError("trace is missing its header or summary line")
    return DiagTrace(
        engine_name=_need(header, "engine"),
        mode=_need(header, "mode"),
        target=_need(header, "target"),
        z=_need(summary, "z"),
        records=tuple(records),
        checkpoints=tuple(checkpoints),
        certificates=tuple(certificates),
        reached=_need(summary, "reached"),
    )
