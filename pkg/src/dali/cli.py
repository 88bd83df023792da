"""Command-line front end.

    dali run <sysconfig> [--trace FILE] [--max-ticks N]
    dali query <agent.dali> <atom> [--strategy k=K,m=M]
    dali transform <agent.dali> [--init e1,e2,past(e3)]
    dali model <agent.dali> [--init ...]
    dali repl <sysconfig>

Exit codes: 0 success/quiescence, 1 failed query, 2 truncated run,
3 parse or validation error.  Results go to stdout, diagnostics to
stderr.  DALI_MAX_STEPS overrides the per-agent step budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .engine import ACTIVE, SUCCEEDED, Strategy, run_agent
from .errors import DaliError, DaliValidationError
from .model import validate_program
from .parser import load_agent_file, parse_init_atoms
from .runtime import SystemRunner, load_system_config
from .semantics import render_transformed, snapshot, transform_program

EXIT_OK = 0
EXIT_QUERY_FAILED = 1
EXIT_TRUNCATED = 2
EXIT_BAD_INPUT = 3


def _die(message: str) -> int:
    print(message, file=sys.stderr)
    return EXIT_BAD_INPUT


def _load_validated(path):
    program = load_agent_file(path)
    report = validate_program(program)
    if not report.ok:
        for issue in report.errors:
            where = f" (clause {issue.clause_index})" if issue.clause_index is not None else ""
            print(f"{path}: {issue.message}{where}", file=sys.stderr)
        raise DaliValidationError(program.name, report)
    for w in report.warnings:
        print(f"{path}: warning: {w}", file=sys.stderr)
    return program


def _strategy(spec: str | None) -> Strategy:
    kwargs = {}
    if spec:
        for part in spec.split(","):
            key, _, value = part.partition("=")
            key = key.strip()
            if key == "k":
                kwargs["event_check_period"] = int(value)
            elif key == "m":
                kwargs["internal_check_period"] = int(value)
            else:
                raise DaliError(f"unknown strategy field {key!r} (use k=..,m=..)")
    env_budget = os.environ.get("DALI_MAX_STEPS")
    if env_budget:
        kwargs["max_steps"] = int(env_budget)
    return Strategy(**kwargs)


def _write_trace(trace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for agent, rec in trace:
            fh.write(json.dumps(rec.trace_dict(agent), separators=(",", ":")))
            fh.write("\n")


def cmd_run(args) -> int:
    config = load_system_config(args.sysconfig)
    if args.max_ticks is not None:
        config.max_ticks = args.max_ticks
    env_budget = os.environ.get("DALI_MAX_STEPS")
    if env_budget:
        config.budget = int(env_budget)
    runner = SystemRunner(config)
    result = runner.run()
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.trace:
        _write_trace(result.trace, args.trace)
    for name, engine in runner.engines.items():
        st = engine.state
        print(
            f"{name}: steps={engine.steps_taken} "
            f"performed=[{', '.join(st.performed_names())}] "
            f"pv=[{', '.join(st.pv_names())}]"
        )
    return EXIT_OK if result.quiescent else EXIT_TRUNCATED


def cmd_query(args) -> int:
    program = _load_validated(args.agent)
    result = run_agent(program, query=args.atom, strategy=_strategy(args.strategy))
    print("yes." if result.query_succeeded else "no.")
    return EXIT_OK if result.query_succeeded else EXIT_QUERY_FAILED


def cmd_transform(args) -> int:
    program = _load_validated(args.agent)
    init = parse_init_atoms(args.init) if args.init else ()
    sys.stdout.write(render_transformed(transform_program(program, init)))
    return EXIT_OK


def cmd_model(args) -> int:
    program = _load_validated(args.agent)
    init = parse_init_atoms(args.init) if args.init else ()
    for atom in sorted(snapshot(program, init)):
        print(atom)
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .oracle import SearchBounds, exhaustive_interleavings

    program = _load_validated(args.agent)
    events = [a.name for a in parse_init_atoms(args.events)] if args.events else []
    result = exhaustive_interleavings(
        program,
        inbox=events,
        query=args.query,
        bounds=SearchBounds(max_states=args.max_states),
    )
    for actions, pv in sorted(
        result.outcomes, key=lambda o: (o[0], tuple(sorted(o[1])))
    ):
        print(f"actions=[{', '.join(actions)}] pv=[{', '.join(sorted(pv))}]")
    print(f"explored={result.explored} truncated={result.truncated}", file=sys.stderr)
    return EXIT_TRUNCATED if result.truncated else EXIT_OK


def cmd_repl(args) -> int:
    config = load_system_config(args.sysconfig)
    env_budget = os.environ.get("DALI_MAX_STEPS")
    budget = int(env_budget) if env_budget else 1000
    runner = SystemRunner(config)
    print(f"agents: {', '.join(runner.engines)}  (inject/step/state/query/quit)")
    while True:
        try:
            sys.stdout.write("dali> ")
            sys.stdout.flush()
            line = sys.stdin.readline()
        except KeyboardInterrupt:
            print()
            return EXIT_OK
        if not line:
            return EXIT_OK
        words = line.split()
        if not words:
            continue
        cmd, rest = words[0], words[1:]
        try:
            if cmd == "quit":
                return EXIT_OK
            elif cmd == "inject" and len(rest) == 2:
                runner.inject(rest[0], rest[1])
                print(f"injected {rest[1]} -> {rest[0]}")
            elif cmd == "step":
                n = int(rest[0]) if rest else 1
                done = 0
                for _ in range(n):
                    if runner.micro_step() is None:
                        break
                    done += 1
                suffix = "; system quiescent" if done < n else ""
                print(f"advanced {done} step(s){suffix}")
            elif cmd == "state" and len(rest) == 1:
                engine = runner.engines.get(rest[0])
                if engine is None:
                    print(f"unknown agent '{rest[0]}'")
                    continue
                st = engine.state
                print(f"ev: [{', '.join(st.ev_names())}]")
                print(f"iv: [{', '.join(st.iv_names())}]")
                print(f"pv: [{', '.join(st.pv_names())}]")
                print(f"performed: [{', '.join(st.performed_names())}]")
            elif cmd == "query" and len(rest) == 2:
                engine = runner.engines.get(rest[0])
                if engine is None:
                    print(f"unknown agent '{rest[0]}'")
                    continue
                index = engine.add_query(rest[1])
                for _ in range(budget):
                    if engine.components[index].status != ACTIVE:
                        break
                    if engine.step() is None:
                        break
                print("yes." if engine.components[index].status == SUCCEEDED else "no.")
            else:
                print("commands: inject <agent> <event> | step [n] | "
                      "state <agent> | query <agent> <atom> | quit")
        except DaliError as exc:
            print(f"error: {exc}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dali", description="Active Horn-clause agent interpreter"
    )
    sub = parser.add_subparsers(
        dest="command",
        required=True,
        metavar="{run,query,transform,model,repl}",
    )

    p = sub.add_parser("run", help="run a multi-agent system to quiescence")
    p.add_argument("sysconfig")
    p.add_argument("--trace", help="write a line-delimited JSON trace here")
    p.add_argument("--max-ticks", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("query", help="ask whether an atom is provable")
    p.add_argument("agent")
    p.add_argument("atom")
    p.add_argument("--strategy", help="k=K,m=M scheduling periods")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("transform", help="print the plain Horn program P'")
    p.add_argument("agent")
    p.add_argument("--init", help="comma-separated initial events")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("model", help="print the snapshot model, one atom per line")
    p.add_argument("agent")
    p.add_argument("--init", help="comma-separated initial events")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("repl", help="interactive session over a system config")
    p.add_argument("sysconfig")
    p.set_defaults(func=cmd_repl)

    # Test-only helper, intentionally absent from the subcommand listing.
    p = sub.add_parser("oracle")
    p.add_argument("agent")
    p.add_argument("--events", help="comma-separated events pending at start")
    p.add_argument("--query", default=None)
    p.add_argument("--max-states", type=int, default=100_000)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DaliValidationError:
        return EXIT_BAD_INPUT  # issues already printed
    except DaliError as exc:
        return _die(str(exc))
    except FileNotFoundError as exc:
        return _die(str(exc))


if __name__ == "__main__":
    raise SystemExit(main())
