"""Directed graphs with sinks and finitely presented infinite emitters.

A vertex may be declared an infinite emitter by attaching an
:class:`EdgeIndexDescriptor`, an eventually periodic list of range vertices
for its out-edge family e_0, e_1, e_2, ...  Only finitely many of those
edges are ever materialized as concrete edges; the descriptor fixes the
range of every index, materialized or not.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping


class GraphError(ValueError):
    """Raised for operations on malformed graphs or unknown ids."""


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str


@dataclass(frozen=True)
class EdgeIndexDescriptor:
    """Eventually periodic range assignment n -> range_at(n) for an out-edge family."""

    prefix: tuple[str, ...]
    cycle: tuple[str, ...]

    def __post_init__(self):
        if not self.cycle:
            raise GraphError("descriptor cycle must be non-empty")

    def range_at(self, n: int) -> str:
        if n < 0:
            raise GraphError(f"edge index must be >= 0, got {n}")
        if n < len(self.prefix):
            return self.prefix[n]
        return self.cycle[(n - len(self.prefix)) % len(self.cycle)]


class VertexClass(enum.Enum):
    REGULAR = "regular"
    SINK = "sink"
    INFINITE_EMITTER = "infinite_emitter"


@dataclass(frozen=True)
class Graph:
    """Immutable directed graph.

    ``emitters`` holds one entry per declared infinite emitter:
    (vertex, descriptor, materialized edge ids in index order).  A vertex
    with a descriptor is singular no matter how many edges are
    materialized; regularity is never inferred from counts.
    """

    vertices: tuple[str, ...] = ()
    edges: tuple[Edge, ...] = ()
    emitters: tuple[tuple[str, EdgeIndexDescriptor, tuple[str, ...]], ...] = ()

    @classmethod
    def build(
        cls,
        vertices: Iterable[str],
        edges: Iterable[tuple[str, str, str]] = (),
        emitters: Mapping[str, tuple[EdgeIndexDescriptor, Iterable[str]]] | None = None,
    ) -> "Graph":
        """Canonical constructor from plain data; (id, src, dst) edge triples."""
        es = tuple(sorted((Edge(*t) for t in edges), key=lambda e: e.id))
        ems = tuple(
            (v, desc, tuple(mat))
            for v, (desc, mat) in sorted((emitters or {}).items())
        )
        return cls(tuple(sorted(vertices)), es, ems)

    def edge(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise GraphError(f"unknown edge id {eid!r}")

    def has_vertex(self, v: str) -> bool:
        return v in self.vertices

    def descriptor(self, v: str) -> EdgeIndexDescriptor | None:
        for u, desc, _ in self.emitters:
            if u == v:
                return desc
        return None

    def materialized(self, v: str) -> tuple[str, ...]:
        """Materialized out-edge ids of emitter v, in index order."""
        for u, _, mat in self.emitters:
            if u == v:
                return mat
        raise GraphError(f"{v!r} is not an infinite emitter")

    def is_infinite_emitter(self, v: str) -> bool:
        return any(u == v for u, _, _ in self.emitters)

    def edge_index(self, v: str, eid: str) -> int:
        """Index n of materialized edge e_n of emitter v."""
        mat = self.materialized(v)
        try:
            return mat.index(eid)
        except ValueError:
            raise GraphError(f"edge {eid!r} is not a materialized edge of {v!r}") from None


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_graph(g: Graph) -> ValidationReport:
    """Report every invariant violation; an empty report means the graph is valid."""
    bad: list[str] = []
    seen_v: set[str] = set()
    for v in g.vertices:
        if v in seen_v:
            bad.append(f"duplicate vertex id {v!r}")
        seen_v.add(v)
    vset = set(g.vertices)
    seen_e: set[str] = set()
    by_id: dict[str, Edge] = {}
    for e in g.edges:
        if e.id in seen_e:
            bad.append(f"duplicate edge id {e.id!r}")
        seen_e.add(e.id)
        by_id[e.id] = e
        if e.src not in vset:
            bad.append(f"edge {e.id!r} has unknown source {e.src!r}")
        if e.dst not in vset:
            bad.append(f"edge {e.id!r} has unknown range {e.dst!r}")

    emitter_vs = set()
    for v, desc, mat in g.emitters:
        if v in emitter_vs:
            bad.append(f"duplicate emitter declaration for {v!r}")
        emitter_vs.add(v)
        if v not in vset:
            bad.append(f"emitter {v!r} is not a vertex")
        for w in desc.prefix + desc.cycle:
            if w not in vset:
                bad.append(f"descriptor of {v!r} names unknown vertex {w!r}")
        seen_mat: set[str] = set()
        for n, eid in enumerate(mat):
            if eid in seen_mat:
                bad.append(f"emitter {v!r} lists edge {eid!r} twice")
            seen_mat.add(eid)
            e = by_id.get(eid)
            if e is None:
                bad.append(f"emitter {v!r} lists unknown edge {eid!r}")
                continue
            if e.src != v:
                bad.append(f"materialized edge {eid!r} of {v!r} has source {e.src!r}")
            want = desc.range_at(n) if all(w in vset for w in desc.prefix + desc.cycle) else None
            if want is not None and e.dst != want:
                bad.append(
                    f"materialized edge {eid!r} of {v!r} at index {n} has range "
                    f"{e.dst!r}, descriptor prescribes {want!r}"
                )
        # every concrete out-edge of an emitter must be one of its indexed edges
        for e in g.edges:
            if e.src == v and e.id not in seen_mat:
                bad.append(f"edge {e.id!r} leaves emitter {v!r} but is not in its materialized list")
    return ValidationReport(tuple(bad))


def require_valid(g: Graph) -> Graph:
    rep = validate_graph(g)
    if not rep.ok:
        raise GraphError("invalid graph: " + "; ".join(rep.violations))
    return g


def vertex_class(g: Graph, v: str) -> VertexClass:
    """Classify v as regular, sink or infinite emitter."""
    if v not in g.vertices:
        raise GraphError(f"unknown vertex id {v!r}")
    if g.is_infinite_emitter(v):
        return VertexClass.INFINITE_EMITTER
    if any(e.src == v for e in g.edges):
        return VertexClass.REGULAR
    return VertexClass.SINK


def is_singular(g: Graph, v: str) -> bool:
    return vertex_class(g, v) is not VertexClass.REGULAR


def out_edges(g: Graph, v: str) -> tuple[Edge, ...]:
    """Materialized out-edges of v; index order for emitters, id order otherwise."""
    if v not in g.vertices:
        raise GraphError(f"unknown vertex id {v!r}")
    if g.is_infinite_emitter(v):
        return tuple(g.edge(eid) for eid in g.materialized(v))
    return tuple(e for e in g.edges if e.src == v)


def materialized_edge_id(v: str, n: int) -> str:
    return f"e{n}^{v}"


def materialize_edges(g: Graph, v: str, k: int) -> Graph:
    """Return g with edges e_0..e_{k-1} of emitter v instantiated.

    Idempotent when k equals the current count; refuses to shrink.
    """
    if not g.is_infinite_emitter(v):
        raise GraphError(f"{v!r} is not an infinite emitter")
    desc = g.descriptor(v)
    mat = g.materialized(v)
    if k < len(mat):
        raise GraphError(f"cannot shrink materialized edges of {v!r} from {len(mat)} to {k}")
    if k == len(mat):
        return g
    existing = {e.id for e in g.edges}
    new_edges = []
    new_ids = []
    for n in range(len(mat), k):
        eid = materialized_edge_id(v, n)
        if eid in existing:
            raise GraphError(f"generated edge id {eid!r} already in use")
        new_edges.append(Edge(eid, v, desc.range_at(n)))
        new_ids.append(eid)
    edges = tuple(sorted(g.edges + tuple(new_edges), key=lambda e: e.id))
    emitters = tuple(
        (u, d, (m + tuple(new_ids)) if u == v else m) for u, d, m in g.emitters
    )
    return Graph(g.vertices, edges, emitters)


def graph_to_json(g: Graph, boundary: frozenset[str] | set[str] = frozenset()) -> dict:
    """Graph JSON document; boundary vertices get a {"boundary": true} annotation."""
    verts: list = []
    for v in g.vertices:
        if v in boundary:
            verts.append({"id": v, "boundary": True})
        else:
            verts.append(v)
    # per-emitter blocks last, in index order (array order carries the indices)
    in_emitters = {eid for _, _, mat in g.emitters for eid in mat}
    rest = sorted((e for e in g.edges if e.id not in in_emitters), key=lambda e: e.id)
    blocks = [g.edge(eid) for _, _, mat in g.emitters for eid in mat]
    edges = [{"id": e.id, "src": e.src, "dst": e.dst} for e in rest + blocks]
    emitters = {
        v: {"prefix": list(d.prefix), "cycle": list(d.cycle), "materialized": len(mat)}
        for v, d, mat in g.emitters
    }
    return {"vertices": verts, "edges": edges, "infinite_emitters": emitters}


def graph_from_json(data: dict) -> Graph:
    """Parse the Graph JSON format; materialized edge indices follow array order."""
    if not isinstance(data, dict):
        raise GraphError("graph document must be a JSON object")
    try:
        raw_vs = data["vertices"]
    except KeyError as exc:
        raise GraphError("graph document lacks a 'vertices' array") from exc
    raw_es = data.get("edges", [])
    raw_em = data.get("infinite_emitters", {})
    if not isinstance(raw_vs, list) or not isinstance(raw_es, list):
        raise GraphError("'vertices' and 'edges' must be arrays")
    if not isinstance(raw_em, dict):
        raise GraphError("'infinite_emitters' must be an object")
    vertices = []
    for item in raw_vs:
        if isinstance(item, str):
            vertices.append(item)
        elif isinstance(item, dict) and isinstance(item.get("id"), str):
            vertices.append(item["id"])
        else:
            raise GraphError(f"malformed vertex entry {item!r}")
    edges = []
    for item in raw_es:
        try:
            edges.append((str(item["id"]), str(item["src"]), str(item["dst"])))
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed edge entry {item!r}") from exc
    emitters = {}
    for v, entry in raw_em.items():
        if not isinstance(entry, dict):
            raise GraphError(f"emitter entry for {v!r} must be an object")
        try:
            desc = EdgeIndexDescriptor(
                tuple(str(x) for x in entry.get("prefix", [])),
                tuple(str(x) for x in entry["cycle"]),
            )
            count = int(entry.get("materialized", 0))
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed emitter entry for {v!r}: {exc}") from exc
        mat = [eid for eid, src, _ in edges if src == v]
        if len(mat) != count:
            raise GraphError(
                f"emitter {v!r} declares {count} materialized edges but "
                f"{len(mat)} edges have source {v!r}"
            )
        emitters[v] = (desc, mat)
    return Graph.build(vertices, edges, emitters)


def boundary_from_json(data: dict) -> frozenset[str]:
    out = set()
    for item in data.get("vertices", []):
        if isinstance(item, dict) and item.get("boundary"):
            out.add(item["id"])
    return frozenset(out)

