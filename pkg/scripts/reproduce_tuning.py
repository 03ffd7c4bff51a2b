#!/usr/bin/env python3
"""Crossover-rate tuning with the L16 design and grey relational analysis.

Offline mode (default) scores the bundled response table; ``--online`` measures
fresh responses by running the engine on a log for every design row.

Usage:
    python scripts/reproduce_tuning.py
    python scripts/reproduce_tuning.py --online --log data/etm.traces --repeats 3
"""
import argparse
from pathlib import Path

from modprom import EvolutionConfig, read_log
from modprom.tuning import grey_table, l16_design, main_effects_csv, measure, read_responses, recommend

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--responses", default=str(ROOT / "data" / "l16_responses.csv"))
    ap.add_argument("--online", action="store_true")
    ap.add_argument("--log", default=str(ROOT / "data" / "etm.traces"))
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if args.online:
        runs = measure(read_log(args.log), EvolutionConfig(seed=args.seed), l16_design(), args.repeats)
    else:
        runs = read_responses(Path(args.responses).read_text())
    table = grey_table(runs)
    cr1, cr2, effects = recommend(table)
    print(table.to_csv())
    print(main_effects_csv(effects))
    print(f"recommended cr1={cr1} cr2={cr2}")


if __name__ == "__main__":
    main()
