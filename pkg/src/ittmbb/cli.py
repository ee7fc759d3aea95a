"""Command-line entry point: ``ittmbb <command> ...``.

Exit status: 0 on success, 1 when the final answer is undetermined (or a
certificate fails to verify), 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import composer, search
from .classical import ClassicalMachine, Halted as CHalted, is_clean_output, run_classical, score_rado
from .eptape import EPTape
from .formats import ParseError, ittm_compact, parse_machine, serialize
from .ittm import ITTMachine, decode_unary, encode_unary
from .ittm_search import DEFAULT_MAX_ENTRIES, TooLarge
from .ledger import Ledger, make_record
from .transfinite import (CYCLE_AND_DRIFT, CYCLE_ONLY, ExecBudget, Halted, NonHaltingCertified, Undetermined,
                          run_transfinite)

OK, UNDETERMINED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _read_machine(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    try:
        return parse_machine(text)
    except ParseError as e:
        raise InputError(f"{path}: {e}") from e
    except ValueError as e:
        raise InputError(f"{path}: {e}") from e


def _want(m, kind):
    if not isinstance(m, kind):
        raise InputError(f"expected a {'classical' if kind is ClassicalMachine else 'ittm'} machine")
    return m


def _budget(args) -> ExecBudget:
    try:
        return ExecBudget(args.max_block_steps, args.max_limits, args.detection)
    except ValueError as e:
        raise InputError(str(e)) from e


def _stage(stage) -> str:
    return f"{stage.pretty()} ({stage})"


def _ledger(args) -> Ledger:
    return Ledger(args.ledger)


def cmd_sim(args) -> int:
    m = _want(_read_machine(args.machine), ClassicalMachine)
    out = run_classical(m, args.budget)
    led = _ledger(args)
    if isinstance(out, CHalted):
        clean = is_clean_output(out.tape)
        print(f"Halted after {out.steps} steps")
        print(f"score (ones) = {score_rado(out.tape)}")
        print(f"clean output = {'no' if clean is None else clean}")
        if args.ledger:
            led.append(make_record("run", n=m.n_states, machine=m.compact(), outcome="halted", stage=out.steps,
                                   score=score_rado(out.tape), budgets={"step_budget": args.budget}))
        return OK
    print(f"Undetermined: no halt within {args.budget} steps")
    if args.ledger:
        led.append(make_record("run", n=m.n_states, machine=m.compact(), outcome="undetermined",
                               budgets={"step_budget": args.budget}))
    return UNDETERMINED


def _parse_tape(text: Optional[str]) -> Optional[EPTape]:
    if text is None:
        return None
    try:
        return EPTape.parse(text)
    except ValueError as e:
        raise InputError(f"bad tape {text!r}: {e}") from e


def _report_outcome(out, m: ITTMachine, args, extra: dict) -> int:
    led = _ledger(args)
    rec = {"n": m.n_states, "convention": m.rule, "budgets": _budget(args).as_dict(),
           "machine": ittm_compact(m), **extra}
    if isinstance(out, Halted):
        print(f"Halted at {_stage(out.stage)}")
        for name, tape in zip(("input", "output", "scratch"), out.final.tapes):
            print(f"{name}: {tape}")
        value = decode_unary(out.final.output)
        print(f"output value: {'undefined' if value is None else value}")
        if args.ledger:
            led.append(make_record("run", outcome="halted", stage=str(out.stage), score=value,
                                   digest=out.digest, **rec))
        return OK
    if isinstance(out, NonHaltingCertified):
        print(f"NonHaltingCertified: equal snapshots at {_stage(out.first)} and {_stage(out.second)}")
        if args.ledger:
            led.append(make_record("run", outcome="nonhalting", stage=str(out.second),
                                   witness=[str(out.first), str(out.second)], **rec))
        return OK
    print(f"Undetermined ({out.reason}) at {_stage(out.stage)}")
    if args.ledger:
        led.append(make_record("run", outcome="undetermined", stage=str(out.stage), reason=out.reason, **rec))
    return UNDETERMINED


def cmd_itsim(args) -> int:
    m = _want(_read_machine(args.machine), ITTMachine)
    rule = args.rule or m.rule
    trace = None
    if args.trace:
        trace = open(args.trace, "w", encoding="utf-8")

    def sink(event: dict) -> None:
        if trace is not None:
            trace.write(json.dumps(event) + "\n")

    try:
        out = run_transfinite(m, _parse_tape(args.input), _budget(args), rule, sink, trace_steps=args.trace_steps)
    finally:
        if trace is not None:
            trace.close()
    return _report_outcome(out, m.with_rule(rule), args, {})


def cmd_fstar(args) -> int:
    m = _want(_read_machine(args.machine), ITTMachine)
    if args.n < 0:
        raise InputError("--n must be a natural number")
    out = run_transfinite(m, encode_unary(args.n), _budget(args), args.rule or m.rule)
    if isinstance(out, Undetermined):
        print(f"f*({args.n}) undetermined ({out.reason})")
        return UNDETERMINED
    value = decode_unary(out.final.output) if isinstance(out, Halted) else None
    print(f"f*({args.n}) = {'undefined' if value is None else value}")
    return OK


def _print_report(r: search.SearchReport) -> int:
    print(r.summary())
    print(f"champion: {r.champion}")
    print(f"machines: {r.leaves}  unresolved: {r.unresolved}")
    print(f"states: at most {r.n} (tables that never reach a state are enumerated too)")
    print(f"budgets: {json.dumps(r.budgets, sort_keys=True)}")
    for c in r.certificates:
        print(f"certificate: {json.dumps(c.as_dict(), sort_keys=True)}")
    return OK if r.value is not None else UNDETERMINED


def cmd_sigma(args) -> int:
    try:
        r = search.sigma_classical(args.n, args.budget, args.convention, args.workers, _ledger(args))
    except ValueError as e:
        raise InputError(str(e)) from e
    return _print_report(r)


def cmd_stime(args) -> int:
    try:
        r = search.s_time_classical(args.n, args.budget, args.workers, _ledger(args))
    except ValueError as e:
        raise InputError(str(e)) from e
    return _print_report(r)


def cmd_sigma_inf(args) -> int:
    try:
        r = search.sigma_inf_lower_bound(args.n, _budget(args), args.rule or "limsup", args.workers,
                                         _ledger(args), args.max_entries)
    except TooLarge as e:
        raise InputError(str(e)) from e
    return _print_report(r)


def cmd_compose(args) -> int:
    m = _want(_read_machine(args.machine), ITTMachine)
    if args.x < 0:
        raise InputError("--x must be a natural number")
    try:
        machine, s = composer.compose_theorem1(m, args.x)
    except ValueError as e:
        raise InputError(str(e)) from e
    acc = composer.accounting(m, args.x)
    sys.stdout.write(serialize(machine))
    print(f"# x={acc['x']} C={acc['C']} h(C)={acc['h(C)']} s(x)={s}")
    return OK


def cmd_verify(args) -> int:
    path = Path(args.certificate)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    try:
        objs = [json.loads(text)]
    except json.JSONDecodeError:
        try:
            objs = [json.loads(line) for line in text.splitlines() if line.strip()]
        except json.JSONDecodeError as e:
            raise InputError(f"{path}: not JSON ({e})") from e
    certs = []
    try:
        for obj in objs:
            if "certificate" in obj:
                certs.append(search.Certificate.from_dict(obj["certificate"]))
            elif {"machine", "digest", "convention"} <= obj.keys():
                certs.append(search.Certificate.from_dict(obj))
    except (KeyError, AttributeError) as e:
        raise InputError(f"{path}: malformed certificate ({e})") from e
    if not certs:
        raise InputError(f"{path}: no certificates found")
    bad = 0
    for c in certs:
        ok = search.verify_certificate(c)
        bad += not ok
        print(f"{'ok  ' if ok else 'FAIL'} {c.machine} {c.convention}={c.score} at {c.stage}")
    print(f"{len(certs) - bad}/{len(certs)} certificates verified")
    return OK if bad == 0 else UNDETERMINED


def cmd_encode(args) -> int:
    if args.value < 0:
        raise InputError("cannot encode a negative number")
    print(encode_unary(args.value))
    return OK


def cmd_decode(args) -> int:
    tape = _parse_tape(args.tape)
    value = decode_unary(tape)  # type: ignore[arg-type]
    print("undefined" if value is None else value)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ittmbb", description="Busy beaver workbench for classical and infinite-time Turing machines.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ledger", help="append results to this JSONL ledger (and resume from it)")
    common.add_argument("--workers", type=int, default=1, help="worker processes for searches")
    exec_opts = argparse.ArgumentParser(add_help=False)
    exec_opts.add_argument("--rule", choices=("limsup", "liminf"))
    exec_opts.add_argument("--max-block-steps", type=int, default=10_000)
    exec_opts.add_argument("--max-limits", type=int, default=8)
    exec_opts.add_argument("--detection", choices=(CYCLE_ONLY, CYCLE_AND_DRIFT), default=CYCLE_AND_DRIFT)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sim", parents=[common], help="run a classical machine from blank")
    s.add_argument("--machine", required=True)
    s.add_argument("--budget", type=int, default=1_000_000)
    s.set_defaults(func=cmd_sim)

    s = sub.add_parser("itsim", parents=[common, exec_opts], help="run an ITTM through limit stages")
    s.add_argument("--machine", required=True)
    s.add_argument("--input", help="input tape, e.g. 111 or 1(10)")
    s.add_argument("--trace", help="write JSON events, one per line, to this file")
    s.add_argument("--trace-steps", action="store_true", help="include every successor step in the trace")
    s.set_defaults(func=cmd_itsim)

    s = sub.add_parser("sigma", parents=[common], help="classical Σ(n)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--budget", type=int, default=100_000)
    s.add_argument("--convention", choices=(search.RADO, search.CLEAN), default=search.RADO)
    s.set_defaults(func=cmd_sigma)

    s = sub.add_parser("stime", parents=[common], help="classical S(n)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--budget", type=int, default=100_000)
    s.set_defaults(func=cmd_stime)

    s = sub.add_parser("sigma-inf-lb", parents=[common, exec_opts], help="certified lower bound for Σ∞(n)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--max-entries", type=int, default=DEFAULT_MAX_ENTRIES,
                   help="deepest tree level expanded (non-halting entries fixed)")
    s.set_defaults(func=cmd_sigma_inf, max_block_steps=1_000, max_limits=4)

    s = sub.add_parser("compose", parents=[common], help="build the F(F(x)) machine from a one-tape ITTM")
    s.add_argument("--machine", required=True)
    s.add_argument("--x", type=int, required=True)
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("fstar", parents=[common, exec_opts], help="f*(n) of an ITTM")
    s.add_argument("--machine", required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_fstar)

    s = sub.add_parser("verify", parents=[common], help="replay certificates (JSON lines or a ledger)")
    s.add_argument("--certificate", required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("encode", parents=[common], help="unary code of a natural number")
    s.add_argument("value", type=int)
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("decode", parents=[common], help="decode a unary tape")
    s.add_argument("tape")
    s.set_defaults(func=cmd_decode)
    return p


def cli_dispatch(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse reports usage errors with status 2 already
        return int(e.code or 0)
    if getattr(args, "workers", 1) < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return BAD_INPUT
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT


def main() -> None:
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
