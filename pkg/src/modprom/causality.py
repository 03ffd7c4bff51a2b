"""Causality-matrix genome, population initialisation and Petri-net exports."""
from __future__ import annotations

import csv
import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class MatrixError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CausalityMatrix:
    """Binary n x n model; ``bits[a, b] == 1`` means task a causes task b."""

    bits: np.ndarray
    tasks: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2 or bits.shape[0] != bits.shape[1]:
            raise MatrixError("causality matrix must be square")
        if not np.isin(bits, (0, 1)).all():
            raise MatrixError("causality matrix must be binary")
        bits = bits.astype(np.uint8)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)
        if self.tasks is not None:
            if len(self.tasks) != bits.shape[0]:
                raise MatrixError("task names do not match matrix size")
            object.__setattr__(self, "tasks", tuple(self.tasks))

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    @property
    def arc_count(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other):
        if not isinstance(other, CausalityMatrix):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return hash((self.bits.shape, self.bits.tobytes()))

    def reindexed(self, tasks: Sequence[str]) -> "CausalityMatrix":
        """Permute rows/columns into the order given by ``tasks``."""
        if self.tasks is None:
            raise MatrixError("matrix carries no task names")
        if set(tasks) != set(self.tasks) or len(tasks) != len(self.tasks):
            raise MatrixError("task sets differ")
        perm = [self.tasks.index(t) for t in tasks]
        return CausalityMatrix(self.bits[np.ix_(perm, perm)], tuple(tasks))


@dataclass
class Individual:
    model: CausalityMatrix
    fitness: Optional[object] = None  # metrics.QualityVector
    rank: Optional[int] = None
    crowding: Optional[float] = None

    @property
    def objectives(self) -> tuple[float, float]:
        if self.fitness is None:
            raise ValueError("individual has not been evaluated")
        return self.fitness.objectives


def init_population(n: int, N: int, D: np.ndarray, rng: np.random.Generator) -> list[Individual]:
    """Sample N matrices, setting each bit iff a fresh uniform draw is below D."""
    if N < 4:
        raise ValueError("population too small")
    D = np.asarray(D, dtype=float)
    if D.shape != (n, n):
        raise ValueError(f"dependency matrix must be {n}x{n}")
    return [Individual(CausalityMatrix(rng.random((n, n)) < D)) for _ in range(N)]


# --- Petri-net view ---------------------------------------------------------

@dataclass
class PetriNet:
    places: list[tuple[str, str]] = field(default_factory=list)       # (id, label)
    transitions: list[tuple[str, str]] = field(default_factory=list)  # (id, label)
    arcs: list[tuple[str, str]] = field(default_factory=list)         # (source id, target id)


def to_petri_net(model: CausalityMatrix, tasks: Sequence[str]) -> PetriNet:
    """Place-per-arc net with a synthetic source and sink place.

    Display only: every causal arc a->b becomes ``t_a -> p_a_b -> t_b``;
    tasks with no incoming (outgoing) arc hang off the source (sink).
    """
    bits = model.bits
    n = model.n
    if len(tasks) != n:
        raise MatrixError("task names do not match matrix size")
    net = PetriNet()
    tids = [f"t{i}" for i in range(n)]
    net.transitions = list(zip(tids, tasks))
    net.places.append(("source", "source"))
    for a, b in zip(*np.nonzero(bits)):
        pid = f"p{a}_{b}"
        net.places.append((pid, f"{tasks[a]}->{tasks[b]}"))
        net.arcs.append((tids[a], pid))
        net.arcs.append((pid, tids[b]))
    net.places.append(("sink", "sink"))
    indeg = bits.sum(axis=0)
    outdeg = bits.sum(axis=1)
    for i in range(n):
        if indeg[i] == 0:
            net.arcs.append(("source", tids[i]))
    for i in range(n):
        if outdeg[i] == 0:
            net.arcs.append((tids[i], "sink"))
    return net


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(net: PetriNet, name: str = "model") -> str:
    lines = [f"digraph {_dot_quote(name)} {{", "  rankdir=LR;"]
    for pid, label in net.places:
        shown = label if pid in ("source", "sink") else ""
        lines.append(f"  {_dot_quote(pid)} [shape=circle, label={_dot_quote(shown)}, tooltip={_dot_quote(label)}];")
    for tid, label in net.transitions:
        lines.append(f"  {_dot_quote(tid)} [shape=box, label={_dot_quote(label)}];")
    for src, dst in net.arcs:
        lines.append(f"  {_dot_quote(src)} -> {_dot_quote(dst)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_pnml(net: PetriNet, name: str = "model") -> str:
    pnml = ET.Element("pnml")
    xnet = ET.SubElement(pnml, "net", id=name, type="http://www.pnml.org/version-2009/grammar/ptnet")
    page = ET.SubElement(xnet, "page", id="page0")

    def named(tag, eid, label):
        el = ET.SubElement(page, tag, id=eid)
        ET.SubElement(ET.SubElement(el, "name"), "text").text = label
        return el

    for pid, label in net.places:
        place = named("place", pid, label)
        if pid == "source":
            ET.SubElement(ET.SubElement(place, "initialMarking"), "text").text = "1"
    for tid, label in net.transitions:
        named("transition", tid, label)
    for k, (src, dst) in enumerate(net.arcs):
        ET.SubElement(page, "arc", id=f"a{k}", source=src, target=dst)
    ET.indent(pnml)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(pnml, encoding="unicode") + "\n"


# --- matrix CSV -------------------------------------------------------------

def export_matrix_csv(model: CausalityMatrix, tasks: Sequence[str]) -> str:
    if len(tasks) != model.n:
        raise MatrixError("task names do not match matrix size")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(tasks)
    w.writerows(model.bits.tolist())
    return buf.getvalue()


def parse_matrix_csv(text: str) -> CausalityMatrix:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise MatrixError("bad matrix file")
    tasks = tuple(t.strip() for t in rows[0])
    body = rows[1:]
    n = len(tasks)
    if n == 0 or len(body) != n or any(len(r) != n for r in body) or len(set(tasks)) != n:
        raise MatrixError("bad matrix file")
    try:
        bits = [[int(v) for v in r] for r in body]
    except ValueError:
        raise MatrixError("bad matrix file") from None
    if any(v not in (0, 1) for r in bits for v in r):
        raise MatrixError("bad matrix file")
    return CausalityMatrix(np.array(bits, dtype=np.uint8), tasks)
