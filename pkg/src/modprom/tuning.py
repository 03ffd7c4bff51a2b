"""Crossover-rate tuning: Taguchi L16 design scored by grey relational analysis."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .eventlog import EventLog
from .evolution import EvolutionConfig, run
from .metrics import Evaluator

DEFAULT_LEVELS_CR1 = (0.2, 0.4, 0.6, 0.8)
DEFAULT_LEVELS_CR2 = (0.3, 0.5, 0.7, 0.9)


class TuningError(ValueError):
    pass


@dataclass(frozen=True)
class TuningRun:
    cr1: float
    cr2: float
    completeness: float
    generalization: float


@dataclass
class GreyTable:
    runs: list[TuningRun]
    normalized: np.ndarray    # (16, 2)
    delta: np.ndarray         # (16, 2)
    coefficients: np.ndarray  # (16, 2)
    grg: np.ndarray           # (16,)
    ranks: np.ndarray         # (16,), 1 = best

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["run", "cr1", "cr2", "completeness", "generalization",
                    "norm_c", "norm_g", "coef_c", "coef_g", "grg", "rank"])
        for i, r in enumerate(self.runs):
            w.writerow([i + 1, r.cr1, r.cr2, r.completeness, r.generalization,
                        *(f"{v:.6f}" for v in self.normalized[i]),
                        *(f"{v:.6f}" for v in self.coefficients[i]),
                        f"{self.grg[i]:.6f}", int(self.ranks[i])])
        return buf.getvalue()


def l16_design(levels_cr1: Sequence[float] = DEFAULT_LEVELS_CR1,
               levels_cr2: Sequence[float] = DEFAULT_LEVELS_CR2) -> list[tuple[float, float]]:
    """Full 4x4 grid, CR1 in blocks of four with CR2 cycling inside each block."""
    for name, levels in (("cr1", levels_cr1), ("cr2", levels_cr2)):
        if len(levels) != 4 or len(set(levels)) != 4:
            raise TuningError(f"{name} needs 4 distinct levels")
    return [(float(a), float(b)) for a in levels_cr1 for b in levels_cr2]


def grey_normalize(responses: np.ndarray) -> np.ndarray:
    """Larger-is-better min-max scaling of each response column."""
    x = np.asarray(responses, dtype=float)
    lo, hi = x.min(axis=0), x.max(axis=0)
    if np.any(hi == lo):
        raise TuningError("degenerate response")
    return (x - lo) / (hi - lo)


def grey_coefficient(normalized: np.ndarray, xi: float = 0.5) -> np.ndarray:
    delta = np.abs(1.0 - np.asarray(normalized, dtype=float))
    dmin, dmax = delta.min(), delta.max()
    return (dmin + xi * dmax) / (delta + xi * dmax)


def grey_grade(coefficients: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    grg = np.asarray(coefficients, dtype=float).mean(axis=1)
    order = sorted(range(len(grg)), key=lambda i: (-grg[i], i))
    ranks = np.empty(len(grg), dtype=int)
    ranks[order] = np.arange(1, len(grg) + 1)
    return grg, ranks


def grey_table(runs: Sequence[TuningRun], xi: float = 0.5) -> GreyTable:
    responses = np.array([[r.completeness, r.generalization] for r in runs])
    norm = grey_normalize(responses)
    coef = grey_coefficient(norm, xi)
    grg, ranks = grey_grade(coef)
    return GreyTable(list(runs), norm, np.abs(1.0 - norm), coef, grg, ranks)


def main_effects(table: GreyTable) -> dict[str, dict[float, float]]:
    """Mean grey relational grade per factor level."""
    effects: dict[str, dict[float, float]] = {"cr1": {}, "cr2": {}}
    for factor in effects:
        levels = sorted({getattr(r, factor) for r in table.runs})
        for lv in levels:
            mask = np.array([getattr(r, factor) == lv for r in table.runs])
            effects[factor][lv] = float(table.grg[mask].mean())
    return effects


def main_effects_csv(effects: dict[str, dict[float, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["factor", "level", "mean_grg"])
    for factor, levels in effects.items():
        for lv, m in levels.items():
            w.writerow([factor, lv, f"{m:.6f}"])
    return buf.getvalue()


def recommend(table: GreyTable) -> tuple[float, float, dict]:
    effects = main_effects(table)
    best = {f: max(lv.items(), key=lambda kv: (kv[1], -kv[0]))[0] for f, lv in effects.items()}
    return best["cr1"], best["cr2"], effects


def read_responses(text: str) -> list[TuningRun]:
    """Parse a ``cr1,cr2,completeness,generalization`` CSV (a ``run`` column is optional)."""
    reader = csv.DictReader(io.StringIO(text))
    fields = {f.strip().lower(): f for f in (reader.fieldnames or [])}
    need = ("cr1", "cr2", "completeness", "generalization")
    if any(k not in fields for k in need):
        raise TuningError("responses file needs columns " + ", ".join(need))
    runs = []
    for k, row in enumerate(reader, start=1):
        try:
            runs.append(TuningRun(*(float(row[fields[c]]) for c in need)))
        except (TypeError, ValueError):
            raise TuningError(f"bad row {k}") from None
    if len(runs) != 16:
        raise TuningError(f"expected 16 runs, got {len(runs)}")
    return runs


def measure(log: EventLog, cfg: EvolutionConfig, design: Sequence[tuple[float, float]],
            repeats: int = 3) -> list[TuningRun]:
    """Run the engine per design row; responses are front maxima averaged over repeats."""
    ev = Evaluator(log)
    runs = []
    for k, (cr1, cr2) in enumerate(design):
        comp, gen = [], []
        for rep in range(repeats):
            seed = cfg.seed + k * repeats + rep
            res = run(log, replace(cfg, cr1=cr1, cr2=cr2, seed=seed, runs=1), ev)
            comp.append(max(q.completeness for _, q in res.pareto))
            gen.append(max(q.generalization for _, q in res.pareto))
        runs.append(TuningRun(cr1, cr2, float(np.mean(comp)), float(np.mean(gen))))
    return runs


def tune(log: EventLog, cfg_base: EvolutionConfig,
         levels_cr1: Sequence[float] = DEFAULT_LEVELS_CR1,
         levels_cr2: Sequence[float] = DEFAULT_LEVELS_CR2,
         repeats: int = 3) -> tuple[float, float, GreyTable]:
    table = grey_table(measure(log, cfg_base, l16_design(levels_cr1, levels_cr2), repeats))
    cr1, cr2, _ = recommend(table)
    return cr1, cr2, table
