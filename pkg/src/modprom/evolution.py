"""Multi-objective binary differential evolution over causality matrices."""
from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .causality import CausalityMatrix, Individual, init_population
from .eventlog import EventLog
from .metrics import Evaluator, QualityVector
from .pareto import dominates, non_dominated_sort, truncate

log = logging.getLogger(__name__)

STALL_EPS = 1e-12


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EvolutionConfig:
    population_size: int = 100
    cr1: float = 0.2
    cr2: float = 0.5
    max_iterations: int = 100
    stall_iterations: int = 10
    seed: int = 0
    runs: int = 1
    threads: Optional[int] = None  # None: MODPROM_THREADS or 1

    def validate(self) -> "EvolutionConfig":
        if self.population_size < 4:
            raise ConfigError("population too small")
        for name in ("cr1", "cr2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if self.stall_iterations < 1:
            raise ConfigError("stall_iterations must be >= 1")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a non-negative 64-bit integer")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("threads")
        return d


@dataclass
class RunResult:
    pareto: list[tuple[CausalityMatrix, QualityVector]]
    iterations_used: int
    per_iteration_wall_time: list[float]  # seconds
    seed: int
    history: list[tuple[float, float]] = field(default_factory=list)  # (max f_c, max f_g) per generation, gen 0 first


@dataclass
class MultiRunResult:
    runs: list[RunResult]
    union: list[tuple[CausalityMatrix, QualityVector]]


def weighted_sum(q: QualityVector) -> float:
    """Completeness-heavy scalarisation: (10 f_c + f_p + f_s + f_g) / 13."""
    return (10 * q.completeness + q.preciseness + q.simplicity + q.generalization) / 13


# --- operators ---------------------------------------------------------------

def mutate_bits(c1: np.ndarray, c2: np.ndarray, rand_bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dichotomous mutation with the random bits supplied. Returns (mutant, donor xor)."""
    xor = np.bitwise_xor(c1, c2)
    mutant = np.where(xor == 1, rand_bits, c1).astype(np.uint8)
    return mutant, xor


def pick_donors(base_index: int, size: int, rng: np.random.Generator) -> tuple[int, int]:
    """Two distinct indices, both different from ``base_index``."""
    if size < 4:
        raise ValueError("population too small")
    r1, r2 = rng.choice(size - 1, size=2, replace=False)
    # shift past base_index so every other member is equally likely
    r1 += r1 >= base_index
    r2 += r2 >= base_index
    return int(r1), int(r2)


def dichotomous_mutate(base_index: int, pop: Sequence[Individual],
                       rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    r1, r2 = pick_donors(base_index, len(pop), rng)
    c1, c2 = pop[r1].model.bits, pop[r2].model.bits
    rand_bits = rng.integers(0, 2, size=c1.shape, dtype=np.uint8)
    return mutate_bits(c1, c2, rand_bits)


def crossover_bits(current: np.ndarray, mutant: np.ndarray, xor: np.ndarray,
                   cr1: float, cr2: float, uniform: np.ndarray) -> np.ndarray:
    cr = np.where(xor == 1, cr2, cr1)
    return np.where(uniform < cr, mutant, current).astype(np.uint8)


def dichotomous_crossover(current: np.ndarray, mutant: np.ndarray, r1_xor_r2: np.ndarray,
                          cr1: float, cr2: float, rng: np.random.Generator) -> np.ndarray:
    current = np.asarray(getattr(current, "bits", current))
    return crossover_bits(current, mutant, r1_xor_r2, cr1, cr2, rng.random(current.shape))


def select(pop: Sequence[Individual], candidates: Sequence[Individual]) -> list[Individual]:
    """One-to-one parent/child comparison; incomparable pairs both survive."""
    if len(pop) != len(candidates):
        raise ValueError("population and candidates differ in size")
    survivors: list[Individual] = []
    extra: list[Individual] = []
    for parent, child in zip(pop, candidates):
        if dominates(child.objectives, parent.objectives):
            survivors.append(child)
        elif dominates(parent.objectives, child.objectives):
            survivors.append(parent)
        else:
            survivors.append(parent)
            extra.append(child)
    return survivors + extra


# --- main loop ---------------------------------------------------------------

def _thread_count(cfg: EvolutionConfig) -> int:
    if cfg.threads is not None:
        return max(1, cfg.threads)
    try:
        return max(1, int(os.environ.get("MODPROM_THREADS", "1")))
    except ValueError:
        return 1


def _front_summary(pop: Sequence[Individual]) -> tuple[float, float]:
    return (max(ind.fitness.completeness for ind in pop),
            max(ind.fitness.generalization for ind in pop))


def pareto_members(pop: Sequence[Individual]) -> list[tuple[CausalityMatrix, QualityVector]]:
    """Distinct models of the first front, ordered by completeness then generalization."""
    part = non_dominated_sort([ind.objectives for ind in pop])
    seen = set()
    out = []
    for i in part.fronts[0]:
        ind = pop[i]
        if ind.model in seen:
            continue
        seen.add(ind.model)
        out.append((ind.model, ind.fitness))
    out.sort(key=lambda mq: (mq[1].completeness, mq[1].generalization, mq[0].bits.tobytes()))
    return out


def run(log_: EventLog, cfg: EvolutionConfig, evaluator: Evaluator | None = None,
        on_generation: Callable[[int, list[Individual]], None] | None = None) -> RunResult:
    cfg.validate()
    ev = evaluator if evaluator is not None else Evaluator(log_)
    N = cfg.population_size
    threads = _thread_count(cfg)

    pop = init_population(log_.n, N, ev.stats.dependency, np.random.default_rng([cfg.seed, 0]))
    for ind, q in zip(pop, ev.evaluate_many([ind.model for ind in pop])):
        ind.fitness = q
    history = [_front_summary(pop)]
    if on_generation:
        on_generation(0, pop)
    best = sum(history[0])
    stall = 0
    timings: list[float] = []
    gen = 0

    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        while gen < cfg.max_iterations and stall < cfg.stall_iterations:
            gen += 1
            t0 = time.perf_counter()
            children = []
            for i in range(N):
                rng = np.random.default_rng([cfg.seed, gen, i])
                mutant, xor = dichotomous_mutate(i, pop, rng)
                child = dichotomous_crossover(pop[i].model.bits, mutant, xor, cfg.cr1, cfg.cr2, rng)
                children.append(Individual(CausalityMatrix(child)))
            models = [c.model for c in children]
            if pool:
                chunks = [models[k::threads] for k in range(threads)]
                parts = list(pool.map(ev.evaluate_many, chunks))
                fits = [parts[i % threads][i // threads] for i in range(N)]
            else:
                fits = ev.evaluate_many(models)
            for child, q in zip(children, fits):
                child.fitness = q

            pop = select(pop, children)
            if len(pop) > N:
                points = [ind.objectives for ind in pop]
                keep = truncate(non_dominated_sort(points), points, N)
                pop = [pop[i] for i in keep]
            timings.append(time.perf_counter() - t0)

            history.append(_front_summary(pop))
            if on_generation:
                on_generation(gen, pop)
            score = sum(history[-1])
            if score > best + STALL_EPS:
                best = score
                stall = 0
            else:
                stall += 1
    finally:
        if pool:
            pool.shutdown()

    log.debug("seed %d: %d generations, best (f_c, f_g) = %s", cfg.seed, gen, history[-1])
    return RunResult(pareto_members(pop), gen, timings, cfg.seed, history)


def run_many(log_: EventLog, cfg: EvolutionConfig) -> MultiRunResult:
    """Independent runs seeded ``seed + k``; the union front merges all of them."""
    cfg.validate()
    ev = Evaluator(log_)
    results = [run(log_, replace(cfg, seed=cfg.seed + k, runs=1), ev) for k in range(cfg.runs)]
    merged = [Individual(m, q) for r in results for m, q in r.pareto]
    return MultiRunResult(results, pareto_members(merged))
