"""Generators, relations and free-commutative-monoid arithmetic for graph monoids.

The monoid attached to a graph is presented by one generator a_v per vertex
and one generator a_{v,S} per infinite emitter v and non-empty set S of its
materialized out-edges.  Relations:

  (R1)  a_v = sum of a_{r(e)} over out-edges e, for every regular v;
  (R2)  a_{v,S} + sum_{e in S} a_{r(e)} = a_v;
  (R3)  a_{v,S} + sum_{S\\T} a_{r(e)} = a_{v,T} + sum_{T\\S} a_{r(e)}.

Sinks contribute nothing.  R3 is stored once per unordered pair {S,T};
the word engine treats relations bidirectionally, so nothing is lost.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from .graphs import Graph, VertexClass, out_edges, require_valid, vertex_class


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    """a_v when edges is None, else a_{v,S} with S = edges in index order."""

    vertex: str
    edges: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.edges is not None and not self.edges:
            raise PresentationError("cofinite generator needs a non-empty edge set")

    @property
    def is_cofinite(self) -> bool:
        return self.edges is not None

    def sort_key(self):
        if self.edges is None:
            return (0, self.vertex)
        return (1, self.vertex, self.edges)

    def __str__(self):
        if self.edges is None:
            return f"a({self.vertex})"
        return f"a({self.vertex},{{{','.join(self.edges)}}})"


def vgen(v: str) -> Generator:
    return Generator(v)


def sgen(g: Graph, v: str, edge_ids: Iterable[str]) -> Generator:
    """Cofinite generator a_{v,S}, with S canonically sorted by edge index."""
    ids = list(edge_ids)
    if not g.is_infinite_emitter(v):
        raise PresentationError(f"{v!r} is not an infinite emitter")
    indexed = sorted((g.edge_index(v, eid), eid) for eid in ids)
    if len(set(ids)) != len(ids):
        raise PresentationError(f"edge set for a_({v},S) lists an edge twice")
    return Generator(v, tuple(eid for _, eid in indexed))


@dataclass(frozen=True)
class MonoidElement:
    """Finite formal sum of generators with positive integer multiplicities."""

    terms: tuple[tuple[Generator, int], ...] = ()

    @classmethod
    def from_counts(cls, counts: Mapping[Generator, int]) -> "MonoidElement":
        items = []
        for gen, mult in counts.items():
            if mult < 0:
                raise PresentationError(f"negative multiplicity for {gen}")
            if mult:
                items.append((gen, int(mult)))
        items.sort(key=lambda t: t[0].sort_key())
        return cls(tuple(items))

    @classmethod
    def single(cls, gen: Generator, mult: int = 1) -> "MonoidElement":
        return cls.from_counts({gen: mult})

    def counts(self) -> dict[Generator, int]:
        return dict(self.terms)

    def support(self) -> tuple[Generator, ...]:
        return tuple(g for g, _ in self.terms)

    def exponent(self, gen: Generator) -> int:
        for g, m in self.terms:
            if g == gen:
                return m
        return 0

    def degree(self) -> int:
        return sum(m for _, m in self.terms)

    def __add__(self, other: "MonoidElement") -> "MonoidElement":
        counts = self.counts()
        for g, m in other.terms:
            counts[g] = counts.get(g, 0) + m
        return MonoidElement.from_counts(counts)

    def __mul__(self, n: int) -> "MonoidElement":
        if n < 0:
            raise PresentationError("multiplicity must be non-negative")
        return MonoidElement.from_counts({g: m * n for g, m in self.terms})

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{m}*{g}" if m != 1 else str(g) for g, m in self.terms)


ZERO = MonoidElement()


def elem_add(x: MonoidElement, y: MonoidElement) -> MonoidElement:
    return x + y


def elem_sum(items: Iterable[MonoidElement]) -> MonoidElement:
    total = ZERO
    for it in items:
        total = total + it
    return total


def apply_generator_map(
    mapping: Mapping[Generator, MonoidElement], x: MonoidElement
) -> MonoidElement:
    """Additive extension of a generator assignment; a monoid morphism."""
    total = ZERO
    for gen, mult in x.terms:
        try:
            image = mapping[gen]
        except KeyError:
            raise PresentationError(f"generator {gen} outside the map's domain") from None
        total = total + image * mult
    return total


def compose_generator_maps(
    outer: Mapping[Generator, MonoidElement], inner: Mapping[Generator, MonoidElement]
) -> dict[Generator, MonoidElement]:
    return {g: apply_generator_map(outer, img) for g, img in inner.items()}


@dataclass(frozen=True)
class Presentation:
    alphabet: tuple[Generator, ...]
    relations: tuple[tuple[MonoidElement, MonoidElement], ...]

    def __post_init__(self):
        known = set(self.alphabet)
        for lhs, rhs in self.relations:
            if not lhs or not rhs:
                raise PresentationError("relation sides must be non-zero")
            for side in (lhs, rhs):
                for g in side.support():
                    if g not in known:
                        raise PresentationError(f"relation uses unknown generator {g}")

    def index(self) -> dict[Generator, int]:
        return {g: i for i, g in enumerate(self.alphabet)}


def _nonempty_subsets(ids: tuple[str, ...]):
    for r in range(1, len(ids) + 1):
        yield from combinations(ids, r)


def generators(g: Graph) -> tuple[Generator, ...]:
    """Alphabet of the graph monoid: all a_v plus all a_{v,S} over materialized S."""
    require_valid(g)
    gens = [Generator(v) for v in g.vertices]
    for v, _, mat in g.emitters:
        for sub in _nonempty_subsets(mat):
            gens.append(Generator(v, sub))
    gens.sort(key=lambda x: x.sort_key())
    return tuple(gens)


def relations(g: Graph) -> tuple[tuple[MonoidElement, MonoidElement], ...]:
    """Defining relations R1, R2 and (deduplicated) R3 of the graph monoid."""
    require_valid(g)
    rels: list[tuple[MonoidElement, MonoidElement]] = []
    for v in g.vertices:
        if vertex_class(g, v) is VertexClass.REGULAR:
            rhs = elem_sum(MonoidElement.single(Generator(e.dst)) for e in out_edges(g, v))
            rels.append((MonoidElement.single(Generator(v)), rhs))
    for v, _, mat in g.emitters:
        ranges = {eid: g.edge(eid).dst for eid in mat}
        subsets = list(_nonempty_subsets(mat))
        for sub in subsets:
            lhs = MonoidElement.single(Generator(v, sub)) + elem_sum(
                MonoidElement.single(Generator(ranges[eid])) for eid in sub
            )
            rels.append((lhs, MonoidElement.single(Generator(v))))
        for s, t in combinations(subsets, 2):
            sset, tset = set(s), set(t)
            lhs = MonoidElement.single(Generator(v, s)) + elem_sum(
                MonoidElement.single(Generator(ranges[eid])) for eid in s if eid not in tset
            )
            rhs = MonoidElement.single(Generator(v, t)) + elem_sum(
                MonoidElement.single(Generator(ranges[eid])) for eid in t if eid not in sset
            )
            rels.append((lhs, rhs))
    return tuple(rels)


def presentation_of(g: Graph) -> Presentation:
    return Presentation(generators(g), relations(g))


# -- JSON -------------------------------------------------------------------

def generator_to_json(gen: Generator) -> dict:
    if gen.is_cofinite:
        return {"kind": "vS", "v": gen.vertex, "S": list(gen.edges)}
    return {"kind": "v", "v": gen.vertex}


def generator_from_json(data: dict, g: Graph | None = None) -> Generator:
    try:
        kind = data["kind"]
        v = data["v"]
    except (KeyError, TypeError) as exc:
        raise PresentationError(f"malformed generator {data!r}: {exc}") from exc
    if kind == "v":
        return Generator(v)
    if kind == "vS":
        ids = [str(x) for x in data.get("S", [])]
        if g is not None:
            return sgen(g, v, ids)
        return Generator(v, tuple(ids))
    raise PresentationError(f"unknown generator kind {kind!r}")


def element_to_json(x: MonoidElement) -> dict:
    return {"terms": [{"gen": generator_to_json(g), "mult": m} for g, m in x.terms]}


def element_from_json(data: dict, g: Graph | None = None) -> MonoidElement:
    counts: dict[Generator, int] = {}
    try:
        terms = data["terms"]
    except (KeyError, TypeError) as exc:
        raise PresentationError(f"malformed element {data!r}: {exc}") from exc
    for term in terms:
        try:
            gen = generator_from_json(term["gen"], g)
            mult = int(term["mult"])
        except (KeyError, TypeError) as exc:
            raise PresentationError(f"malformed term {term!r}: {exc}") from exc
        counts[gen] = counts.get(gen, 0) + mult
    return MonoidElement.from_counts(counts)


def presentation_to_json(p: Presentation) -> dict:
    return {
        "generators": [generator_to_json(g) for g in p.alphabet],
        "relations": [
            {"lhs": element_to_json(l), "rhs": element_to_json(r)} for l, r in p.relations
        ],
    }

