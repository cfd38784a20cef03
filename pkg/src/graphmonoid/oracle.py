"""Independent ground truth on finite acyclic row-finite graphs.

On such a graph the monoid is free on the sinks, and the class of a_v is
determined by the vector of path counts from v to each sink: forward
rewriting by the regular-vertex relations terminates (ranges sit strictly
lower in the DAG) and is confluent (left-hand sides are single generators),
so the normal form of a_v counts paths.  This gives a second, completion-free
route to equality against which the word engine is cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .engine import equal
from .graphs import Graph, GraphError, VertexClass, out_edges, require_valid, vertex_class
from .limits import GraphMorphism, induced_monoid_morphism
from .presentation import (
    Generator,
    MonoidElement,
    apply_generator_map,
    presentation_of,
)


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class SinkVector:
    counts: tuple[tuple[str, int], ...] = ()

    @classmethod
    def from_dict(cls, d: Mapping[str, int]) -> "SinkVector":
        return cls(tuple(sorted((k, int(v)) for k, v in d.items() if v)))

    def as_dict(self) -> dict[str, int]:
        return dict(self.counts)

    def __add__(self, other: "SinkVector") -> "SinkVector":
        d = self.as_dict()
        for k, v in other.counts:
            d[k] = d.get(k, 0) + v
        return SinkVector.from_dict(d)

    def __mul__(self, n: int) -> "SinkVector":
        return SinkVector.from_dict({k: v * n for k, v in self.counts})

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.counts)


def topological_order(g: Graph) -> tuple[str, ...]:
    """Vertices in an order with every edge pointing forward; raises on cycles."""
    require_valid(g)
    if g.emitters:
        raise OracleError("graph has infinite emitters; the oracle needs row-finite input")
    indeg = {v: 0 for v in g.vertices}
    for e in g.edges:
        indeg[e.dst] += 1
    ready = sorted(v for v, d in indeg.items() if d == 0)
    order: list[str] = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        changed = False
        for e in g.edges:
            if e.src == v:
                indeg[e.dst] -= 1
                if indeg[e.dst] == 0:
                    ready.append(e.dst)
                    changed = True
        if changed:
            ready.sort()
    if len(order) != len(g.vertices):
        raise OracleError("graph has a cycle; the oracle needs acyclic input")
    return tuple(order)


def path_count_table(g: Graph) -> dict[str, SinkVector]:
    """Path-count vectors of every vertex, one reverse-topological sweep."""
    order = topological_order(g)
    table: dict[str, SinkVector] = {}
    for v in reversed(order):
        if vertex_class(g, v) is VertexClass.SINK:
            table[v] = SinkVector(((v, 1),))
        else:
            total = SinkVector()
            for e in out_edges(g, v):
                total = total + table[e.dst]
            table[v] = total
    return table


def path_count(g: Graph, v: str) -> SinkVector:
    """Number of directed paths from v to each sink; a sink counts its empty path."""
    if v not in g.vertices:
        raise GraphError(f"unknown vertex id {v!r}")
    return path_count_table(g)[v]


def gamma_acyclic(g: Graph, x: MonoidElement) -> SinkVector:
    """Additive extension of path counting to elements over vertex generators."""
    table = path_count_table(g)
    total = SinkVector()
    for gen, mult in x.terms:
        if gen.is_cofinite:
            raise OracleError(f"{gen} is a cofinite generator; the oracle domain is row-finite")
        if gen.vertex not in table:
            raise GraphError(f"unknown vertex generator {gen}")
        total = total + table[gen.vertex] * mult
    return total


@dataclass(frozen=True)
class CrossCheckReport:
    agreements: int
    discrepancies: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.discrepancies


def cross_check(
    g: Graph,
    pairs: Iterable[tuple[MonoidElement, MonoidElement]],
    budget: int | None = None,
) -> CrossCheckReport:
    """Compare the word engine against path counting on each pair of elements."""
    p = presentation_of(g)
    agreements = 0
    bad: list[str] = []
    for u, v in pairs:
        by_engine = bool(equal(p, u, v, budget))
        by_counts = gamma_acyclic(g, u) == gamma_acyclic(g, v)
        if by_engine == by_counts:
            agreements += 1
        else:
            bad.append(
                f"engine says {by_engine}, path counts say {by_counts} for {u} vs {v}"
            )
    return CrossCheckReport(agreements, tuple(bad))


def sink_transfer(m: GraphMorphism, sv: SinkVector) -> SinkVector:
    """Push a source sink vector through a morphism into the target's sink basis.

    The unit at a source sink w contributes the target path-count vector of
    its image; this is the matrix the morphism induces on free sink bases.
    """
    table = path_count_table(m.target)
    vmap = m.vertex_map()
    total = SinkVector()
    for w, mult in sv.counts:
        total = total + table[vmap[w]] * mult
    return total


@dataclass(frozen=True)
class NaturalityReport:
    checked: int
    mismatches: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.mismatches


def check_naturality(m: GraphMorphism) -> NaturalityReport:
    """Verify the square: induced map then oracle equals oracle then transfer.

    Both graphs must be finite acyclic row-finite; checked exactly on every
    vertex generator of the source.
    """
    topological_order(m.source)
    topological_order(m.target)
    gen_map = induced_monoid_morphism(m)
    checked = 0
    bad: list[str] = []
    for v in m.source.vertices:
        x = MonoidElement.single(Generator(v))
        via_map = gamma_acyclic(m.target, apply_generator_map(gen_map, x))
        via_transfer = sink_transfer(m, gamma_acyclic(m.source, x))
        checked += 1
        if via_map != via_transfer:
            bad.append(
                f"square does not commute at a_({v}): {via_map.as_dict()} vs "
                f"{via_transfer.as_dict()}"
            )
    return NaturalityReport(checked, tuple(bad))


def sink_vector_to_json(sv: SinkVector) -> dict:
    return sv.as_dict()


def sink_vector_from_json(data: dict) -> SinkVector:
    return SinkVector.from_dict({str(k): int(v) for k, v in data.items()})
