#!/usr/bin/env python3
"""Run the engine on the bundled ETM log for many seeds and summarise the fronts.

Writes one CSV row per (run, front member) plus a per-generation history file,
ready for plotting convergence or front spread.

Usage:
    python scripts/run_etm_batch.py [--runs 30] [--out results/etm]
"""
import argparse
import csv
import logging
import time
from dataclasses import replace
from pathlib import Path

from modprom import EvolutionConfig, Evaluator, read_log, run, weighted_sum

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--log", default=str(ROOT / "data" / "etm.traces"))
    ap.add_argument("--runs", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--pop", type=int, default=100)
    ap.add_argument("--out", default="results/etm")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    log = read_log(args.log)
    ev = Evaluator(log)
    cfg = EvolutionConfig(population_size=args.pop)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    with open(out / "fronts.csv", "w", newline="") as f_front, open(out / "history.csv", "w", newline="") as f_hist:
        fw, hw = csv.writer(f_front), csv.writer(f_hist)
        fw.writerow(["seed", "iterations", "member", "completeness", "generalization", "preciseness",
                     "simplicity", "weighted_sum", "arcs"])
        hw.writerow(["seed", "generation", "max_completeness", "max_generalization"])
        for k in range(args.runs):
            res = run(log, replace(cfg, seed=args.seed + k), ev)
            for j, (m, q) in enumerate(res.pareto, start=1):
                fw.writerow([res.seed, res.iterations_used, j, q.completeness, q.generalization,
                             q.preciseness, q.simplicity, weighted_sum(q), m.arc_count])
            for g, (fc, fg) in enumerate(res.history):
                hw.writerow([res.seed, g, fc, fg])
            best = max(q.completeness for _, q in res.pareto)
            logging.info("seed %d: %d generations, %d front member(s), best completeness %.4f",
                         res.seed, res.iterations_used, len(res.pareto), best)
    logging.info("%d runs in %.1f s; wrote %s", args.runs, time.perf_counter() - t0, out)


if __name__ == "__main__":
    main()
