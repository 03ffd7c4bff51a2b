"""Two-objective (maximisation) dominance, non-dominated sorting and crowding truncation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np


class ObjectivePoint(NamedTuple):
    f_c: float
    f_g: float
    owner: int = -1


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """a is at least as good as b on both objectives and strictly better on one."""
    return a[0] >= b[0] and a[1] >= b[1] and (a[0] > b[0] or a[1] > b[1])


@dataclass
class FrontPartition:
    fronts: list[list[int]]

    def rank_of(self) -> dict[int, int]:
        return {i: r for r, front in enumerate(self.fronts, start=1) for i in front}

    def __len__(self) -> int:
        return len(self.fronts)


def non_dominated_sort(points: Sequence[Sequence[float]]) -> FrontPartition:
    """Counter-based sort: each point tracks who it dominates and how many dominate it."""
    size = len(points)
    if size == 0:
        raise ValueError("cannot sort an empty population")
    P = np.array([(p[0], p[1]) for p in points], dtype=float)
    dom = (P[:, None, :] >= P[None, :, :]).all(-1) & (P[:, None, :] > P[None, :, :]).any(-1)
    dominated_by_me = [np.flatnonzero(row).tolist() for row in dom]
    dom_count = dom.sum(axis=0).tolist()
    first = [r for r in range(size) if dom_count[r] == 0]
    fronts = []
    current = first
    while current:
        fronts.append(current)
        nxt = []
        for r in current:
            for z in dominated_by_me[r]:
                dom_count[z] -= 1
                if dom_count[z] == 0:
                    nxt.append(z)
        current = sorted(nxt)
    return FrontPartition(fronts)


def crowding_distance(front: Sequence[Sequence[float]]) -> list[float]:
    size = len(front)
    if size == 0:
        raise ValueError("empty front")
    d = [0.0] * size
    if size <= 2:
        return [math.inf] * size
    for j in range(2):
        order = sorted(range(size), key=lambda i: -front[i][j])
        best, worst = front[order[0]][j], front[order[-1]][j]
        d[order[0]] = d[order[-1]] = math.inf
        span = abs(best - worst)
        if span == 0:
            continue
        for pos in range(1, size - 1):
            i = order[pos]
            d[i] += abs(front[order[pos + 1]][j] - front[order[pos - 1]][j]) / span
    return d


def truncate(partition: FrontPartition, points: Sequence[Sequence[float]], target_size: int) -> list[int]:
    """Admit whole fronts in order; trim the overflowing front by crowding distance.

    The least crowded member is removed one at a time with distances recomputed
    after every removal; ties go to the lower index.
    """
    if target_size > len(points):
        raise ValueError("target size exceeds population")
    kept: list[int] = []
    for front in partition.fronts:
        if len(kept) + len(front) <= target_size:
            kept.extend(front)
            if len(kept) == target_size:
                break
            continue
        remaining = sorted(front)
        while len(kept) + len(remaining) > target_size:
            d = crowding_distance([points[i] for i in remaining])
            victim = min(range(len(remaining)), key=lambda k: (d[k], remaining[k]))
            del remaining[victim]
        kept.extend(remaining)
        break
    return kept
