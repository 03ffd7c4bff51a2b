"""Event-log ingestion and the log statistics the quality metrics consume."""
from __future__ import annotations

import csv
import io
import warnings
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

TaskRef = Union[int, str]


class LogError(ValueError):
    """Raised when an event log cannot be ingested."""


@dataclass(frozen=True)
class Trace:
    case_id: str
    events: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class EventLog:
    tasks: tuple[str, ...]
    traces: tuple[Trace, ...]

    def __post_init__(self):
        if not self.traces:
            raise LogError("empty log")
        if len(set(self.tasks)) != len(self.tasks):
            raise LogError("duplicate task names")
        n = len(self.tasks)
        for tr in self.traces:
            if not tr.events:
                raise LogError(f"trace {tr.case_id!r} is empty")
            if min(tr.events) < 0 or max(tr.events) >= n:
                raise LogError(f"trace {tr.case_id!r} references an unknown task")

    @property
    def n(self) -> int:
        return len(self.tasks)

    @property
    def trace_count(self) -> int:
        return len(self.traces)

    @property
    def event_count(self) -> int:
        return sum(len(tr) for tr in self.traces)

    def index(self, task: TaskRef) -> int:
        if isinstance(task, str):
            try:
                return self.tasks.index(task)
            except ValueError:
                raise KeyError(f"unknown task {task!r}") from None
        if not 0 <= task < self.n:
            raise KeyError(f"task index {task} out of range")
        return int(task)

    @cached_property
    def variants(self) -> tuple[tuple[tuple[int, ...], int], ...]:
        """Distinct event sequences with their multiplicity, in first-seen order."""
        counts = Counter(tr.events for tr in self.traces)
        return tuple(counts.items())

    @classmethod
    def from_sequences(cls, sequences: Iterable[Sequence[str]],
                       case_ids: Sequence[str] | None = None) -> "EventLog":
        tasks: dict[str, int] = {}
        traces = []
        for k, seq in enumerate(sequences):
            if not seq:
                continue
            events = tuple(tasks.setdefault(name, len(tasks)) for name in seq)
            cid = case_ids[k] if case_ids is not None else str(k + 1)
            traces.append(Trace(cid, events))
        if not traces:
            raise LogError("empty log")
        return cls(tuple(tasks), tuple(traces))


@dataclass(frozen=True, eq=False)
class FollowsStats:
    follows_count: np.ndarray
    follows_bool: np.ndarray
    visits: np.ndarray
    dependency: np.ndarray

    @property
    def n(self) -> int:
        return self.visits.shape[0]


def _as_text(data: bytes | str) -> str:
    if isinstance(data, bytes):
        return data.decode("utf-8-sig")
    return data


def parse_traces(data: bytes | str) -> EventLog:
    """One trace per non-empty line, tasks separated by whitespace.

    Case ids are the 1-based line numbers of the source lines.
    """
    seqs, ids = [], []
    for lineno, line in enumerate(_as_text(data).splitlines(), start=1):
        tokens = line.split()
        if tokens:
            seqs.append(tokens)
            ids.append(str(lineno))
    if not seqs:
        raise LogError("empty log")
    return EventLog.from_sequences(seqs, ids)


def _timestamp_keys(raw: list[str]) -> list:
    try:
        return [float(v) for v in raw]
    except ValueError:
        pass
    keys = []
    for k, v in enumerate(raw, start=1):
        try:
            ts = datetime.fromisoformat(v.strip().replace("Z", "+00:00"))
        except ValueError:
            raise LogError(f"bad row {k}") from None
        if ts.tzinfo is not None:
            ts = ts.astimezone(timezone.utc).replace(tzinfo=None)
        keys.append(ts)
    return keys


def parse_csv(data: bytes | str) -> EventLog:
    """Parse a ``case,activity,timestamp`` CSV (extra columns ignored).

    Timestamps are numeric if every value parses as a number, otherwise they
    must all be ISO-8601. Ties keep file order. Row numbers in errors count
    data rows from 1.
    """
    reader = csv.reader(io.StringIO(_as_text(data)))
    header = next(reader, None)
    if header is None:
        raise LogError("empty log")
    cols = {name.strip().lower(): i for i, name in enumerate(header)}
    try:
        ci, ai, ti = cols["case"], cols["activity"], cols["timestamp"]
    except KeyError:
        raise LogError("bad header") from None
    rows = []
    for k, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) <= max(ci, ai, ti) or not row[ai].strip():
            raise LogError(f"bad row {k}")
        rows.append((k, row[ci].strip(), row[ai].strip(), row[ti]))
    if not rows:
        raise LogError("empty log")
    keys = _timestamp_keys([r[3] for r in rows])

    cases: dict[str, list[tuple]] = {}
    for (k, case, act, _), key in zip(rows, keys):
        cases.setdefault(case, []).append((key, k, act))
    seqs = []
    for events in cases.values():
        events.sort(key=lambda e: (e[0], e[1]))
        seqs.append([act for _, _, act in events])
    return EventLog.from_sequences(seqs, list(cases))


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _concept_name(elem: ET.Element) -> str | None:
    for child in elem:
        if _local(child.tag) == "string" and child.get("key") == "concept:name":
            return child.get("value")
    return None


def parse_xes_minimal(data: bytes | str) -> EventLog:
    """Read the activity sequence of every ``<trace>`` in an XES document.

    Events without a ``concept:name`` string attribute are skipped with a
    warning; traces left empty are dropped.
    """
    try:
        root = ET.fromstring(data if isinstance(data, bytes) else data.encode("utf-8"))
    except ET.ParseError as exc:
        raise LogError(f"xes parse error: {exc}") from None
    seqs, ids = [], []
    skipped = 0
    for k, trace in enumerate((e for e in root.iter() if _local(e.tag) == "trace"), start=1):
        acts = []
        for ev in trace:
            if _local(ev.tag) != "event":
                continue
            name = _concept_name(ev)
            if name is None:
                skipped += 1
                continue
            acts.append(name)
        if acts:
            seqs.append(acts)
            ids.append(_concept_name(trace) or str(k))
    if skipped:
        warnings.warn(f"skipped {skipped} event(s) without concept:name", stacklevel=2)
    if not seqs:
        raise LogError("empty log")
    return EventLog.from_sequences(seqs, ids)


def read_log(path, fmt: str = "traces") -> EventLog:
    with open(path, "rb") as fh:
        data = fh.read()
    parsers = {"traces": parse_traces, "csv": parse_csv, "xes": parse_xes_minimal}
    try:
        parser = parsers[fmt]
    except KeyError:
        raise LogError(f"unknown log format {fmt!r}") from None
    return parser(data)


def dependency_matrix(follows_count: np.ndarray) -> np.ndarray:
    """Heuristic dependency in [0, 1): a->b / (a->b + b->a + 1); self-loops a->a / (a->a + 1)."""
    fc = follows_count.astype(float)
    dep = fc / (fc + fc.T + 1.0)
    diag = np.diag(fc)
    np.fill_diagonal(dep, diag / (diag + 1.0))
    return dep


def build_stats(log: EventLog) -> FollowsStats:
    n = log.n
    counts = np.zeros((n, n), dtype=np.int64)
    visits = np.zeros(n, dtype=np.int64)
    for events, mult in log.variants:
        ev = np.asarray(events)
        np.add.at(visits, ev, mult)
        if len(ev) > 1:
            np.add.at(counts, (ev[:-1], ev[1:]), mult)
    stats = FollowsStats(
        follows_count=counts,
        follows_bool=(counts > 0).astype(np.int8),
        visits=visits,
        dependency=dependency_matrix(counts),
    )
    for arr in (stats.follows_count, stats.follows_bool, stats.visits, stats.dependency):
        arr.setflags(write=False)
    return stats


def follows_k(log: EventLog, t1: TaskRef, t2: TaskRef, k: int) -> bool:
    """True iff some trace has ``t2`` exactly ``k`` positions after an occurrence of ``t1``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    a, b = log.index(t1), log.index(t2)
    for events, _ in log.variants:
        for i in range(len(events) - k):
            if events[i] == a and events[i + k] == b:
                return True
    return False

