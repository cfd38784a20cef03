"""Row-finite approximations of a graph by attaching tails to singular vertices.

Every singular vertex v grows a tail w_0(v) -> w_1(v) -> ... -> w_N(v) of
fresh vertices joined by edges g_n^v.  Out-edges are redistributed: a finite
emitter keeps its edges at w_0(v); the n-th out-edge of an infinite emitter
leaves from w_n(v) instead.  The construction is truncated at a level N, and
the tail ends w_N(v) (the boundary) carry no out-edges, so every relation of
the untruncated graph that only mentions indices below N holds verbatim.

The two generator maps realize the isomorphism between the monoid of the
original graph and the monoid of its row-finite approximation:

  to_tailed:   a_v -> b_{w_0(v)}
               a_{v,S} -> b_{w_{n+1}(v)} + sum of b over redistributed edges
               missing from S, where n is the largest index in S;
  from_tailed: b_{w_0(v)} -> a_v,
               b_{w_n(v)} -> a_{v, {e_0..e_{n-1}}} for emitters, a_v for sinks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import (
    Graph,
    GraphError,
    VertexClass,
    is_singular,
    out_edges,
    require_valid,
    vertex_class,
)
from .presentation import (
    Generator,
    MonoidElement,
    PresentationError,
    elem_sum,
    sgen,
)


class TruncationError(ValueError):
    """Truncation level too small for the element; carries the required level."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


class MaterializationError(ValueError):
    """The map would need a generator over edges that are not materialized."""


def w_name(v: str, n: int) -> str:
    return f"w{n}({v})"


def f_name(v: str, n: int) -> str:
    return f"f{n}^{v}"


def g_name(v: str, n: int) -> str:
    return f"g{n}^{v}"


@dataclass(frozen=True)
class Desingularization:
    source: Graph
    level: int
    graph: Graph
    boundary: frozenset[str]

    def origin(self) -> dict[str, tuple[str, int]]:
        """Map each tail vertex name back to (source vertex, tail index)."""
        out = {}
        for v in self.source.vertices:
            out[w_name(v, 0)] = (v, 0)
            if is_singular(self.source, v):
                for n in range(1, self.level + 1):
                    out[w_name(v, n)] = (v, n)
        return out

    def mentions_boundary(self, y: MonoidElement) -> bool:
        return any(g.vertex in self.boundary for g in y.support())


def desingularize(g: Graph, level: int) -> Desingularization:
    """Build the truncated row-finite approximation at the given level."""
    require_valid(g)
    if level < 1:
        raise GraphError(f"truncation level must be >= 1, got {level}")
    vertices: list[str] = []
    edges: list[tuple[str, str, str]] = []
    boundary: set[str] = set()
    for v in g.vertices:
        vertices.append(w_name(v, 0))
        cls = vertex_class(g, v)
        if cls is VertexClass.REGULAR:
            for n, e in enumerate(out_edges(g, v)):
                edges.append((f_name(v, n), w_name(v, 0), w_name(e.dst, 0)))
            continue
        for n in range(1, level + 1):
            vertices.append(w_name(v, n))
        boundary.add(w_name(v, level))
        for n in range(level):
            edges.append((g_name(v, n), w_name(v, n), w_name(v, n + 1)))
        if cls is VertexClass.INFINITE_EMITTER:
            desc = g.descriptor(v)
            for n in range(level):
                edges.append((f_name(v, n), w_name(v, n), w_name(desc.range_at(n), 0)))
    tailed = Graph.build(vertices, edges)
    require_valid(tailed)
    return Desingularization(g, level, tailed, frozenset(boundary))


def _max_index(g: Graph, gen: Generator) -> int:
    return max(g.edge_index(gen.vertex, eid) for eid in gen.edges)


def required_truncation(g: Graph, x: MonoidElement) -> int:
    """Smallest safe level for mapping x into the tailed graph: max index + 2, floor 2."""
    best = 0
    for gen in x.support():
        if gen.is_cofinite:
            best = max(best, _max_index(g, gen))
    return max(2, best + 2)


def phi(d: Desingularization, x: MonoidElement) -> MonoidElement:
    """Map an element of the source monoid into the tailed graph's monoid."""
    g = d.source
    total = MonoidElement()
    for gen, mult in x.terms:
        if not gen.is_cofinite:
            if gen.vertex not in g.vertices:
                raise PresentationError(f"unknown vertex generator {gen}")
            total = total + MonoidElement.single(Generator(w_name(gen.vertex, 0)), mult)
            continue
        v = gen.vertex
        indices = sorted(g.edge_index(v, eid) for eid in gen.edges)
        n = indices[-1]
        if n + 1 > d.level:
            raise TruncationError(
                f"level {d.level} too small for edge index {n} of {v!r}; "
                f"required truncation is {n + 2}",
                required=n + 2,
            )
        in_s = set(indices)
        desc = g.descriptor(v)
        image = MonoidElement.single(Generator(w_name(v, n + 1)))
        image = image + elem_sum(
            MonoidElement.single(Generator(w_name(desc.range_at(k), 0)))
            for k in range(n + 1)
            if k not in in_s
        )
        total = total + image * mult
    return total


def psi(d: Desingularization, y: MonoidElement) -> MonoidElement:
    """Map an element of the tailed graph's monoid back to the source monoid."""
    g = d.source
    origin = d.origin()
    total = MonoidElement()
    for gen, mult in y.terms:
        if gen.is_cofinite:
            raise PresentationError(f"tailed graph is row-finite; {gen} is not a vertex generator")
        try:
            v, n = origin[gen.vertex]
        except KeyError:
            raise PresentationError(f"{gen.vertex!r} is not a vertex of the tailed graph") from None
        if n == 0 or vertex_class(g, v) is VertexClass.SINK:
            total = total + MonoidElement.single(Generator(v), mult)
            continue
        mat = g.materialized(v)
        if len(mat) < n:
            raise MaterializationError(
                f"mapping w_{n}({v}) back needs edges e_0..e_{n - 1} of {v!r} "
                f"materialized, only {len(mat)} are"
            )
        total = total + MonoidElement.single(sgen(g, v, mat[:n]), mult)
    return total


def phi_generator_map(d: Desingularization) -> dict[Generator, MonoidElement]:
    from .presentation import generators

    return {gen: phi(d, MonoidElement.single(gen)) for gen in generators(d.source)}


def psi_generator_map(d: Desingularization) -> dict[Generator, MonoidElement]:
    """Images of all tailed-graph generators for which the inverse map is defined."""
    out = {}
    for name, (v, n) in sorted(d.origin().items()):
        gen = Generator(name)
        if n > 0 and vertex_class(d.source, v) is VertexClass.INFINITE_EMITTER:
            if len(d.source.materialized(v)) < n:
                continue
        out[gen] = psi(d, MonoidElement.single(gen))
    return out
