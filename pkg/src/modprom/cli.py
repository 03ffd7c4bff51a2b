"""Command-line entry point: ``modprom {discover,evaluate,tune,stats,rank}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from . import causality, tuning
from .eventlog import LogError, build_stats, read_log
from .evolution import ConfigError, EvolutionConfig, run_many, weighted_sum
from .metrics import Evaluator, QualityVector
from .pareto import dominates

EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_TASKS, EXIT_DEGENERATE = 0, 2, 3, 4, 5
FORMATS = ("traces", "csv", "xes")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _fmt(x: float) -> float:
    return round(float(x), 6)


def _load_log(args):
    fmt = args.format
    if fmt is None:
        suffix = Path(args.log).suffix.lower().lstrip(".")
        fmt = suffix if suffix in FORMATS else "traces"
    try:
        return read_log(args.log, fmt)
    except (OSError, LogError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read log {args.log}: {exc}", EXIT_INPUT) from None


def _config(args) -> EvolutionConfig:
    cfg = EvolutionConfig(population_size=args.pop, cr1=args.cr1, cr2=args.cr2,
                          max_iterations=args.max_iters, stall_iterations=args.stall,
                          seed=args.seed, runs=getattr(args, "runs", 1))
    try:
        return cfg.validate()
    except ConfigError as exc:
        raise CliError(f"invalid config: {exc}", EXIT_CONFIG) from None


def _entry(q: QualityVector) -> dict:
    return {"metrics": q.to_dict(), "weighted_sum": _fmt(weighted_sum(q))}


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


# --- subcommands -------------------------------------------------------------

def cmd_discover(args) -> int:
    log = _load_log(args)
    cfg = _config(args)
    result = run_many(log, cfg)
    front = result.union
    points = [q.objectives for _, q in front]
    if any(dominates(a, b) for a in points for b in points):
        raise CliError("internal error: front is not mutually non-dominating", 1)

    out = Path(args.out)
    entries = []
    for k, (model, q) in enumerate(front, start=1):
        stem = f"models/model_{k}"
        net = causality.to_petri_net(model, log.tasks)
        _write(out / f"{stem}.csv", causality.export_matrix_csv(model, log.tasks))
        _write(out / f"{stem}.dot", causality.export_dot(net, f"model_{k}"))
        _write(out / f"{stem}.pnml", causality.export_pnml(net, f"model_{k}"))
        entries.append({"id": k, **_entry(q), "matrix_file": f"{stem}.csv"})

    doc = {
        "config": cfg.to_dict(),
        "log": {"path": Path(args.log).name, "tasks": list(log.tasks), "traces": log.trace_count,
                "events": log.event_count},
        "front": entries,
        "iterations_used": result.runs[0].iterations_used if cfg.runs == 1
        else [r.iterations_used for r in result.runs],
    }
    if cfg.runs > 1:
        doc["runs"] = [{"seed": r.seed, "iterations_used": r.iterations_used,
                        "front": [_entry(q) for _, q in r.pareto]} for r in result.runs]
    _write(out / "pareto.json", json.dumps(doc, indent=2) + "\n")

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["run", "seed", "iteration", "ms"])
    for k, r in enumerate(result.runs, start=1):
        for it, secs in enumerate(r.per_iteration_wall_time, start=1):
            w.writerow([k, r.seed, it, f"{secs * 1000:.3f}"])
    _write(out / "timings.csv", buf.getvalue())

    print(f"{'id':>3} {'f_C':>8} {'f_G':>8} {'f_S':>8} {'f_P':>8} {'wsum':>7}")
    for e in entries:
        m = e["metrics"]
        print(f"{e['id']:>3} {m['completeness']:8.3f} {m['generalization']:8.3f} "
              f"{m['simplicity']:8.3f} {m['preciseness']:8.3f} {e['weighted_sum']:7.3f}")
    print(f"wrote {len(entries)} model(s) to {out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    log = _load_log(args)
    try:
        model = causality.parse_matrix_csv(Path(args.model).read_text(encoding="utf-8"))
    except (OSError, causality.MatrixError) as exc:
        raise CliError(f"cannot read model {args.model}: {exc}", EXIT_INPUT) from None
    if set(model.tasks) != set(log.tasks):
        diff = sorted(set(model.tasks) ^ set(log.tasks))
        raise CliError("task sets differ: " + ", ".join(diff), EXIT_TASKS)
    model = model.reindexed(log.tasks)
    ev = Evaluator(log)
    q = ev.evaluate(model)
    diag = ev.replay(model)
    doc = {**_entry(q), "replay": {
        "parsed_tasks_ratio": _fmt(diag.parsed_tasks_ratio),
        "missing_tokens": diag.missing_tokens, "extra_tokens": diag.extra_tokens,
        "traces_with_missing": diag.traces_with_missing,
        "traces_with_extra": diag.traces_with_extra, "penalty": _fmt(diag.penalty)}}
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        _write(Path(args.out), text)
    sys.stdout.write(text)
    return EXIT_OK


def _levels(text: str | None, default):
    if text is None:
        return default
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise CliError(f"bad levels {text!r}", EXIT_CONFIG) from None
    return vals


def cmd_tune(args) -> int:
    l1 = _levels(args.levels_cr1, tuning.DEFAULT_LEVELS_CR1)
    l2 = _levels(args.levels_cr2, tuning.DEFAULT_LEVELS_CR2)
    try:
        design = tuning.l16_design(l1, l2)
    except tuning.TuningError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from None
    if args.responses:
        try:
            runs = tuning.read_responses(Path(args.responses).read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, tuning.TuningError) as exc:
            raise CliError(f"cannot read responses {args.responses}: {exc}", EXIT_INPUT) from None
    elif args.log:
        log = _load_log(args)
        runs = tuning.measure(log, _config(args), design, repeats=args.repeats)
    else:
        raise CliError("tune needs --log or --responses", EXIT_CONFIG)
    try:
        table = tuning.grey_table(runs)
    except tuning.TuningError as exc:
        raise CliError(str(exc), EXIT_DEGENERATE) from None
    cr1, cr2, effects = tuning.recommend(table)
    out = Path(args.out)
    _write(out / "tuning_report.csv", table.to_csv())
    _write(out / "main_effects.csv", tuning.main_effects_csv(effects))
    best = int(np.argmin(table.ranks))
    print(f"best run: {best + 1} (grg {table.grg[best]:.3f})")
    print(f"recommended cr1={cr1} cr2={cr2}")
    return EXIT_OK


def _matrix_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_stats(args) -> int:
    log = _load_log(args)
    s = build_stats(log)
    tasks = list(log.tasks)
    sections = {
        "follows_count.csv": _matrix_csv(["task", *tasks], [[t, *row] for t, row in zip(tasks, s.follows_count.tolist())]),
        "dependency.csv": _matrix_csv(["task", *tasks], [[t, *(f"{v:.6f}" for v in row)]
                                                         for t, row in zip(tasks, s.dependency.tolist())]),
        "visits.csv": _matrix_csv(["task", "visits"], zip(tasks, s.visits.tolist())),
    }
    if args.out:
        for name, text in sections.items():
            _write(Path(args.out) / name, text)
        print(f"n={log.n} traces={log.trace_count} events={log.event_count}; wrote {args.out}")
    else:
        for name, text in sections.items():
            sys.stdout.write(f"# {name}\n{text}")
    return EXIT_OK


def _quadruple(d: dict) -> QualityVector:
    m = d.get("metrics", d)
    return QualityVector(float(m["completeness"]), float(m["generalization"]),
                         float(m["preciseness"]), float(m["simplicity"]))


def _rank_entries(path: Path) -> list[tuple[str, QualityVector]]:
    """Accept a discover pareto.json, a single quadruple object, or a list of labelled quadruples."""
    doc = json.loads(path.read_text(encoding="utf-8"))
    if isinstance(doc, dict) and "front" in doc:
        best = max((_quadruple(e) for e in doc["front"]), key=weighted_sum)
        return [(doc.get("label", path.stem), best)]
    items = doc if isinstance(doc, list) else [doc]
    return [(str(it.get("name", path.stem)), _quadruple(it)) for it in items]


def cmd_rank(args) -> int:
    entries = []
    for f in args.files:
        try:
            entries.extend(_rank_entries(Path(f)))
        except (OSError, ValueError, KeyError, TypeError, AttributeError) as exc:
            raise CliError(f"cannot read {f}: {exc}", EXIT_INPUT) from None
    if not entries:
        raise CliError("nothing to rank", EXIT_INPUT)
    sums = np.array([weighted_sum(q) for _, q in entries])
    dense = rankdata(-sums, method="dense").astype(int)
    ascending = rankdata(sums, method="average")
    print(f"{'name':<20} {'wsum':>7} {'rank':>5} {'avg_rank':>10}")
    for k in np.argsort(dense, kind="stable"):
        print(f"{entries[k][0]:<20} {sums[k]:7.3f} {dense[k]:>5} {ascending[k]:>10g}")
    return EXIT_OK


# --- parser -------------------------------------------------------------------

def _add_log(p, required=True):
    p.add_argument("--log", required=required, help="event log path")
    p.add_argument("--format", choices=FORMATS, default=None,
                   help="log format (default: from the file extension, else traces)")


def _add_engine(p):
    d = EvolutionConfig()
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--pop", type=int, default=d.population_size, help="population size")
    p.add_argument("--cr1", type=float, default=d.cr1, help="crossover rate where donors agree")
    p.add_argument("--cr2", type=float, default=d.cr2, help="crossover rate where donors differ")
    p.add_argument("--max-iters", type=int, default=d.max_iterations)
    p.add_argument("--stall", type=int, default=d.stall_iterations,
                   help="stop after this many generations without improvement")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modprom", description="Pareto process discovery by binary differential evolution")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discover", help="evolve a Pareto front of causality matrices")
    _add_log(p)
    _add_engine(p)
    p.add_argument("--runs", type=int, default=1, help="independent runs (seeds seed..seed+runs-1)")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("evaluate", help="score a matrix CSV against a log")
    _add_log(p)
    p.add_argument("--model", required=True, help="matrix CSV")
    p.add_argument("--out", default=None, help="also write the JSON here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("tune", help="Taguchi L16 + grey relational tuning of cr1/cr2")
    _add_log(p, required=False)
    _add_engine(p)
    p.add_argument("--responses", help="offline mode: CSV of measured responses per L16 run")
    p.add_argument("--levels-cr1", help="four comma-separated levels")
    p.add_argument("--levels-cr2", help="four comma-separated levels")
    p.add_argument("--repeats", type=int, default=3, help="engine runs averaged per design row")
    p.add_argument("--out", default="tuning")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("stats", help="dump follows counts, dependency matrix and visits")
    _add_log(p)
    p.add_argument("--out", default=None, help="directory for the CSV files (default: stdout)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("rank", help="weighted-sum ranking of result/reference JSON files")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_rank)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
