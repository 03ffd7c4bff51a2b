"""Completeness, generalization, preciseness and simplicity of a causality matrix.

All four are pure functions of (model, log). Counting is done with integer
arrays so that the float results depend only on a handful of final
operations; sums of float terms go through ``math.fsum``.

Interpretation notes for the replay-based completeness:

* the parsed ratio is normalised by the number of distinct directly-follows
  pairs in the log, so it lies in [0, 1];
* every unparsed directly-follows occurrence costs one missing token;
* ``extra1`` counts target tasks fed by *every* task that has an outgoing
  arc (zero when no task has one);
* ``extra2`` counts triples (a, b, c) with arcs a->c and b->c but not a->b,
  where b directly follows a and, for some k >= 2, c is k tasks after a and
  k-1 tasks after b (log-level predicates);
* a trace "has" missing tokens if it contains an unparsed adjacent pair, and
  extra tokens if it contains an ``extra1`` target or satisfies an ``extra2``
  triple on its own.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .causality import CausalityMatrix
from .eventlog import EventLog, FollowsStats, build_stats


@dataclass(frozen=True)
class QualityVector:
    completeness: float
    generalization: float
    preciseness: float
    simplicity: float

    @property
    def objectives(self) -> tuple[float, float]:
        return (self.completeness, self.generalization)

    def to_dict(self, digits: int = 6) -> dict:
        return {k: round(v, digits) for k, v in asdict(self).items()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class ReplayDiagnostics:
    parsed_tasks_ratio: float
    missing_tokens: int
    extra_tokens: int
    traces_with_missing: int
    traces_with_extra: int
    penalty: float


def _bits(model) -> np.ndarray:
    c = getattr(model, "bits", model)
    if isinstance(c, np.ndarray) and c.dtype == np.int64:
        return c
    return np.asarray(c, dtype=np.int64)


def _stack(models) -> np.ndarray:
    """(B, n, n) int64 stack of causality matrices."""
    return np.stack([_bits(m) for m in models])


def _follows_k_stack(variants, n: int, max_k: int) -> np.ndarray:
    """``out[k, a, b]``: b occurs exactly k positions after a in some variant (k >= 1)."""
    out = np.zeros((max_k + 1, n, n), dtype=bool)
    for events, _ in variants:
        ev = np.asarray(events)
        for k in range(1, len(ev)):
            out[k, ev[:-k], ev[k:]] = True
    return out


def _extra2_witness(fk: np.ndarray) -> np.ndarray:
    """W[a, b, c] = follows(a,b) and exists k>=2: follows_k(a,c) and follows_{k-1}(b,c)."""
    n = fk.shape[1]
    if fk.shape[0] < 3:
        return np.zeros((n, n, n), dtype=bool)
    hits = np.einsum("kac,kbc->abc", fk[2:].astype(np.int64), fk[1:-1].astype(np.int64)) > 0
    return hits & fk[1][:, :, None]


class _StatsMetrics:
    """Metrics that need only the directly-follows statistics."""

    def __init__(self, stats: FollowsStats):
        self.stats = stats
        self.n = stats.n
        self.fcount = np.asarray(stats.follows_count, dtype=np.int64)
        self.fbool = np.asarray(stats.follows_bool, dtype=np.int64)
        self.visits = np.asarray(stats.visits, dtype=np.int64)
        self.pairs = int(self.fbool.sum())
        self.outgoing = self.fbool.sum(axis=1)
        self.total_marking = int((self.visits * self.outgoing).sum())
        keep = self.outgoing > 0
        self._vis_k, self._out_k, self._fbool_k = self.visits[keep], self.outgoing[keep], self.fbool[keep]
        self._keep = keep

    def generalization_many(self, C: np.ndarray) -> list[float]:
        freq = (self.fcount * C).sum(axis=2)
        out = []
        for row in freq.tolist():
            terms = [1.0 / math.sqrt(f) if f > 0 else 1.0 for f in row]
            out.append(1.0 - (1.0 / self.n) * math.fsum(terms))
        return out

    def preciseness_many(self, C: np.ndarray) -> list[float]:
        if self.total_marking == 0:
            return [1.0] * len(C)
        used = (self._fbool_k * C[:, self._keep, :]).sum(axis=2)
        share = self._vis_k * (self._out_k - used) / self._out_k
        return [1.0 - math.fsum(row) / self.total_marking for row in share.tolist()]

    def generalization(self, model) -> float:
        return self.generalization_many(_bits(model)[None])[0]

    def preciseness(self, model) -> float:
        return self.preciseness_many(_bits(model)[None])[0]


class Evaluator(_StatsMetrics):
    """Precomputed replay index for one log; evaluates many models cheaply."""

    def __init__(self, log: EventLog, stats: FollowsStats | None = None):
        super().__init__(stats if stats is not None else build_stats(log))
        self.log = log
        self.trace_count = log.trace_count
        n = self.n

        variants = log.variants
        self.mult = np.array([m for _, m in variants], dtype=np.int64)
        self.presence = np.zeros((len(variants), n), dtype=bool)
        # per-variant segments of flat pair / triple positions, each closed by a
        # sentinel position that never fires, so no segment is empty
        pair_seg, tri_seg, pair_len, tri_len = [], [], [], []
        max_len = max(len(ev) for ev, _ in variants)
        for v, (events, _) in enumerate(variants):
            ev = np.asarray(events)
            self.presence[v, ev] = True
            flat = np.unique(ev[:-1] * n + ev[1:])
            pair_seg.extend([flat, [n * n]])
            pair_len.append(len(flat) + 1)
            w = _extra2_witness(_follows_k_stack([(events, 1)], n, len(ev) - 1))
            flat3 = np.flatnonzero(w)
            tri_seg.extend([flat3, [n ** 3]])
            tri_len.append(len(flat3) + 1)
        self.pair_seg = np.concatenate(pair_seg).astype(np.int64)
        self.pair_starts = np.concatenate([[0], np.cumsum(pair_len)[:-1]]).astype(np.int64)
        self.tri_seg = np.concatenate(tri_seg).astype(np.int64)
        self.tri_starts = np.concatenate([[0], np.cumsum(tri_len)[:-1]]).astype(np.int64)
        self.witness = _extra2_witness(_follows_k_stack(variants, n, max_len - 1))
        self.witness_flat = self.witness.ravel()
        self.presence_int = self.presence.astype(np.int64)
        self.fbool_flat = self.fbool.ravel()
        self.fcount_flat = self.fcount.ravel()
        self.event_pairs = int(self.fcount.sum())

    # -- batched metrics --------------------------------------------------------

    def replay_many(self, C: np.ndarray) -> list[ReplayDiagnostics]:
        """Replay diagnostics for a (B, n, n) stack of models."""
        B, n, T = len(C), self.n, self.trace_count
        flat = C.reshape(B, -1)
        parsed = (flat @ self.fbool_flat).tolist()
        missing = (self.event_pairs - flat @ self.fcount_flat).tolist()
        unparsed = np.concatenate([flat == 0, np.zeros((B, 1), dtype=bool)], axis=1)
        bad_variant = np.logical_or.reduceat(unparsed[:, self.pair_seg], self.pair_starts, axis=1)
        traces_missing = (bad_variant @ self.mult).tolist()

        # a target is fed by every task that has an outgoing arc
        feeders = np.count_nonzero(C.any(axis=2), axis=1)[:, None]
        targets = (C.sum(axis=1) == feeders) & (feeders > 0)
        extra1 = np.count_nonzero(targets, axis=1)
        cb = C.astype(bool)
        # active[b, t1, t2, t3] = c[t2, t3] and c[t1, t3] and not c[t1, t2]
        active = (cb[:, None, :, :] & cb[:, :, None, :] & ~cb[:, :, :, None]).reshape(B, -1)
        extra = (extra1 + np.count_nonzero(active & self.witness_flat, axis=1)).tolist()

        extra_variant = (targets.astype(np.int64) @ self.presence_int.T) > 0
        active = np.concatenate([active, np.zeros((B, 1), dtype=bool)], axis=1)
        extra_variant |= np.logical_or.reduceat(active[:, self.tri_seg], self.tri_starts, axis=1)
        traces_extra = (extra_variant @ self.mult).tolist()

        out = []
        for b in range(B):
            ratio = parsed[b] / self.pairs if self.pairs else 1.0
            penalty = (1.0 / n) * (missing[b] / (T - traces_missing[b] + 1)
                                   + extra[b] / (T - traces_extra[b] + 1))
            out.append(ReplayDiagnostics(ratio, missing[b], extra[b], traces_missing[b], traces_extra[b], penalty))
        return out

    def evaluate_many(self, models) -> list[QualityVector]:
        if len(models) == 0:
            return []
        C = _stack(models)
        diags = self.replay_many(C)
        gens = self.generalization_many(C)
        precs = self.preciseness_many(C)
        simps = [1.0 / (2 * k) if k else 1.0 for k in np.count_nonzero(C.reshape(len(C), -1), axis=1).tolist()]
        return [QualityVector(d.parsed_tasks_ratio - d.penalty, g, p, s)
                for d, g, p, s in zip(diags, gens, precs, simps)]

    # -- single model -----------------------------------------------------------

    def replay(self, model) -> ReplayDiagnostics:
        return self.replay_many(_bits(model)[None])[0]

    def completeness(self, model) -> tuple[float, ReplayDiagnostics]:
        diag = self.replay(model)
        return diag.parsed_tasks_ratio - diag.penalty, diag

    def evaluate(self, model) -> QualityVector:
        return self.evaluate_many([model])[0]

    def objectives(self, model) -> tuple[float, float]:
        comp, _ = self.completeness(model)
        return comp, self.generalization(model)


def simplicity(model) -> float:
    cardinality = 2 * int(np.count_nonzero(_bits(model)))
    return 1.0 / cardinality if cardinality else 1.0


def completeness(model: CausalityMatrix, stats: FollowsStats, log: EventLog) -> tuple[float, ReplayDiagnostics]:
    return Evaluator(log, stats).completeness(model)


def generalization(model: CausalityMatrix, stats: FollowsStats) -> float:
    return _StatsMetrics(stats).generalization(model)


def preciseness(model: CausalityMatrix, stats: FollowsStats) -> float:
    return _StatsMetrics(stats).preciseness(model)


def evaluate(model: CausalityMatrix, stats: FollowsStats, log: EventLog) -> QualityVector:
    return Evaluator(log, stats).evaluate(model)
