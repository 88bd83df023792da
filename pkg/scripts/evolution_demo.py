#!/usr/bin/env python3
"""Show the two views of the ping system side by side.

First the operational one: the tick loop where the producer's ping
travels to the consumer at the next tick.  Then the declarative one: the
round-by-round evolution of snapshot models, which reaches a fixpoint
once the derived events stop changing.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dali import evolve_system, load_system_config
from dali.runtime import SystemRunner

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def main() -> int:
    config = load_system_config(SCENARIOS / "ping.system")

    print("=== tick loop ===")
    runner = SystemRunner(config)
    result = runner.run()
    for agent, rec in result.trace:
        performed = f"  performs {rec.performed}" if rec.performed else ""
        print(f"  {agent:<9} step {rec.step:>2} case {rec.case:<3} {rec.selected}{performed}")
    for warning in result.warnings:
        print(f"  warning: {warning}")
    for name, engine in runner.engines.items():
        st = engine.state
        print(f"  {name}: performed={list(st.performed_names())} pv={list(st.pv_names())}")

    print("\n=== evolution of snapshot models ===")
    trace = evolve_system(load_system_config(SCENARIOS / "ping.system"))
    for i, rnd in enumerate(trace.rounds, start=1):
        print(f"  round {i}:")
        for name in rnd.models:
            units = sorted(str(a) for a in rnd.units[name])
            print(f"    {name:<9} units={units}")
            print(f"    {'':<9} model={sorted(rnd.models[name])}")
    print(f"  fixpoint reached: {trace.reached_fixpoint} "
          f"(rounds: {len(trace.rounds)})")
    for warning in trace.warnings:
        print(f"  warning: {warning}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
