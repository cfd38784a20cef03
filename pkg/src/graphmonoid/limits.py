"""CK-morphisms, chains of graphs, induced monoid maps, and direct limits.

A graph morphism is CK when it is injective on vertices and edges, restricts
to a bijection on the out-edges of every regular vertex, and sends infinite
emitters to infinite emitters.  Direct systems are restricted to finite
chains; the colimit of a chain is its top object, and equality of limit
representatives is decided by mapping both to the top and running the word
engine there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .engine import completed_system, elements_up_to_degree, equal
from .graphs import Graph, VertexClass, out_edges, require_valid, validate_graph, vertex_class
from .presentation import (
    Generator,
    MonoidElement,
    Presentation,
    apply_generator_map,
    generators,
    presentation_of,
    sgen,
)


class MorphismError(ValueError):
    pass


@dataclass(frozen=True)
class GraphMorphism:
    source: Graph
    target: Graph
    vertex_pairs: tuple[tuple[str, str], ...]
    edge_pairs: tuple[tuple[str, str], ...]

    @classmethod
    def build(
        cls,
        source: Graph,
        target: Graph,
        vertex_map: Mapping[str, str],
        edge_map: Mapping[str, str],
    ) -> "GraphMorphism":
        return cls(
            source,
            target,
            tuple(sorted(vertex_map.items())),
            tuple(sorted(edge_map.items())),
        )

    def vertex_map(self) -> dict[str, str]:
        return dict(self.vertex_pairs)

    def edge_map(self) -> dict[str, str]:
        return dict(self.edge_pairs)

    def v(self, vid: str) -> str:
        for a, b in self.vertex_pairs:
            if a == vid:
                return b
        raise MorphismError(f"vertex {vid!r} has no image")

    def e(self, eid: str) -> str:
        for a, b in self.edge_pairs:
            if a == eid:
                return b
        raise MorphismError(f"edge {eid!r} has no image")


def identity_morphism(g: Graph) -> GraphMorphism:
    return GraphMorphism.build(g, g, {v: v for v in g.vertices}, {e.id: e.id for e in g.edges})


def compose(outer: GraphMorphism, inner: GraphMorphism) -> GraphMorphism:
    if outer.source != inner.target:
        raise MorphismError("composition mismatch: inner target differs from outer source")
    vmap = outer.vertex_map()
    emap = outer.edge_map()
    return GraphMorphism.build(
        inner.source,
        outer.target,
        {a: vmap[b] for a, b in inner.vertex_pairs},
        {a: emap[b] for a, b in inner.edge_pairs},
    )


def structural_violations(m: GraphMorphism) -> tuple[str, ...]:
    """Ways in which m fails to be a graph morphism at all."""
    bad: list[str] = []
    for g, label in ((m.source, "source"), (m.target, "target")):
        rep = validate_graph(g)
        if not rep.ok:
            bad.append(f"{label} graph invalid: {rep.violations[0]}")
    vmap = m.vertex_map()
    emap = m.edge_map()
    tverts = set(m.target.vertices)
    teids = {e.id for e in m.target.edges}
    for v in m.source.vertices:
        if v not in vmap:
            bad.append(f"vertex {v!r} has no image")
        elif vmap[v] not in tverts:
            bad.append(f"vertex {v!r} maps to unknown vertex {vmap[v]!r}")
    for e in m.source.edges:
        if e.id not in emap:
            bad.append(f"edge {e.id!r} has no image")
            continue
        img = emap[e.id]
        if img not in teids:
            bad.append(f"edge {e.id!r} maps to unknown edge {img!r}")
            continue
        te = m.target.edge(img)
        if e.src in vmap and te.src != vmap[e.src]:
            bad.append(f"edge {e.id!r}: image source {te.src!r} != image of source {vmap[e.src]!r}")
        if e.dst in vmap and te.dst != vmap[e.dst]:
            bad.append(f"edge {e.id!r}: image range {te.dst!r} != image of range {vmap[e.dst]!r}")
    return tuple(bad)


@dataclass(frozen=True)
class CKReport:
    ok: bool
    violations: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def is_ck_morphism(m: GraphMorphism) -> CKReport:
    """Decide the CK conditions; structural invalidity raises instead of reporting."""
    structural = structural_violations(m)
    if structural:
        raise MorphismError("not a graph morphism: " + "; ".join(structural))
    bad: list[str] = []
    vmap = m.vertex_map()
    emap = m.edge_map()
    if len(set(vmap.values())) != len(vmap):
        bad.append("vertex map is not injective")
    if len(set(emap.values())) != len(emap):
        bad.append("edge map is not injective")
    for v in m.source.vertices:
        cls = vertex_class(m.source, v)
        if cls is VertexClass.REGULAR:
            images = {emap[e.id] for e in out_edges(m.source, v)}
            targets = {e.id for e in out_edges(m.target, vmap[v])}
            if images != targets:
                bad.append(
                    f"out-edges of regular vertex {v!r} do not biject onto "
                    f"out-edges of {vmap[v]!r}"
                )
        elif cls is VertexClass.INFINITE_EMITTER:
            if not m.target.is_infinite_emitter(vmap[v]):
                bad.append(f"infinite emitter {v!r} maps to non-emitter {vmap[v]!r}")
    return CKReport(not bad, tuple(bad))


def induced_monoid_morphism(m: GraphMorphism) -> dict[Generator, MonoidElement]:
    """Generator map a_v -> b_{eta(v)}, a_{v,S} -> b_{eta(v),eta(S)}; CK inputs only."""
    report = is_ck_morphism(m)
    if not report.ok:
        raise MorphismError("not a CK-morphism: " + "; ".join(report.violations))
    vmap = m.vertex_map()
    emap = m.edge_map()
    out: dict[Generator, MonoidElement] = {}
    for gen in generators(m.source):
        if gen.is_cofinite:
            image = sgen(m.target, vmap[gen.vertex], [emap[eid] for eid in gen.edges])
        else:
            image = Generator(vmap[gen.vertex])
        out[gen] = MonoidElement.single(image)
    return out


@dataclass(frozen=True)
class GraphChain:
    graphs: tuple[Graph, ...]
    steps: tuple[GraphMorphism, ...]

    @classmethod
    def build(cls, graphs: Sequence[Graph], steps: Sequence[GraphMorphism]) -> "GraphChain":
        graphs = tuple(graphs)
        steps = tuple(steps)
        if not graphs:
            raise MorphismError("a chain needs at least one graph")
        if len(steps) != len(graphs) - 1:
            raise MorphismError("a chain of k graphs needs k-1 connecting morphisms")
        for i, step in enumerate(steps):
            if step.source != graphs[i] or step.target != graphs[i + 1]:
                raise MorphismError(f"connecting morphism {i} does not join levels {i} and {i + 1}")
        for g in graphs:
            require_valid(g)
        return cls(graphs, steps)

    def __len__(self) -> int:
        return len(self.graphs)

    def morphism(self, i: int, j: int) -> GraphMorphism:
        if not 0 <= i <= j < len(self.graphs):
            raise MorphismError(f"bad chain indices {i}, {j}")
        m = identity_morphism(self.graphs[i])
        for k in range(i, j):
            m = compose(self.steps[k], m)
        return m


@dataclass(frozen=True)
class GraphColimit:
    graph: Graph
    injections: tuple[GraphMorphism, ...]


def colimit_graph(chain: GraphChain) -> GraphColimit:
    """Colimit of a CK chain: the top graph with the composed injections."""
    for i, step in enumerate(chain.steps):
        report = is_ck_morphism(step)
        if not report.ok:
            raise MorphismError(
                f"connecting morphism {i} is not CK: " + "; ".join(report.violations)
            )
    top = len(chain) - 1
    return GraphColimit(chain.graphs[top], tuple(chain.morphism(i, top) for i in range(len(chain))))


GenMap = tuple[tuple[Generator, MonoidElement], ...]


def _freeze_map(m: Mapping[Generator, MonoidElement]) -> GenMap:
    return tuple(sorted(m.items(), key=lambda kv: kv[0].sort_key()))


@dataclass(frozen=True)
class MonoidChain:
    presentations: tuple[Presentation, ...]
    steps: tuple[GenMap, ...]

    @classmethod
    def build(
        cls,
        presentations: Sequence[Presentation],
        steps: Sequence[Mapping[Generator, MonoidElement]],
    ) -> "MonoidChain":
        presentations = tuple(presentations)
        frozen = tuple(_freeze_map(s) for s in steps)
        if not presentations:
            raise MorphismError("a chain needs at least one presentation")
        if len(frozen) != len(presentations) - 1:
            raise MorphismError("a chain of k presentations needs k-1 connecting maps")
        for i, step in enumerate(frozen):
            dom = dict(step)
            lower = set(presentations[i].alphabet)
            upper = set(presentations[i + 1].alphabet)
            for gen in presentations[i].alphabet:
                if gen not in dom:
                    raise MorphismError(f"incoherent connecting map {i}: no image for {gen}")
            for gen, img in step:
                for got in img.support():
                    if got not in upper:
                        raise MorphismError(
                            f"incoherent connecting map {i}: image of {gen} uses {got} "
                            f"outside level {i + 1}"
                        )
        return cls(presentations, frozen)

    def __len__(self) -> int:
        return len(self.presentations)

    def step_map(self, i: int) -> dict[Generator, MonoidElement]:
        return dict(self.steps[i])

    def map_up(self, i: int, j: int, x: MonoidElement) -> MonoidElement:
        if not 0 <= i <= j < len(self.presentations):
            raise MorphismError(f"bad chain indices {i}, {j}")
        for k in range(i, j):
            x = apply_generator_map(self.step_map(k), x)
        return x


def monoid_chain(chain: GraphChain) -> MonoidChain:
    """Monoid presentations and induced connecting maps of a CK graph chain."""
    return MonoidChain.build(
        [presentation_of(g) for g in chain.graphs],
        [induced_monoid_morphism(step) for step in chain.steps],
    )


@dataclass(frozen=True)
class LimitElement:
    level: int
    element: MonoidElement


@dataclass(frozen=True)
class DirectLimit:
    """Colimit of a monoid chain, realized on leveled representatives.

    Two representatives are equivalent iff their images at the top of the
    chain are congruent there; for a chain this is the existential condition
    over all higher levels.
    """

    chain: MonoidChain

    @property
    def top(self) -> int:
        return len(self.chain) - 1

    def inject(self, level: int, x: MonoidElement) -> LimitElement:
        alphabet = set(self.chain.presentations[level].alphabet)
        for gen in x.support():
            if gen not in alphabet:
                raise MorphismError(f"{gen} is not a generator at level {level}")
        return LimitElement(level, x)

    def to_top(self, a: LimitElement) -> MonoidElement:
        return self.chain.map_up(a.level, self.top, a.element)

    def equivalent(self, a: LimitElement, b: LimitElement, budget: int | None = None) -> bool:
        top_p = self.chain.presentations[self.top]
        return bool(equal(top_p, self.to_top(a), self.to_top(b), budget))

    def add(self, a: LimitElement, b: LimitElement) -> LimitElement:
        k = max(a.level, b.level)
        return LimitElement(
            k, self.chain.map_up(a.level, k, a.element) + self.chain.map_up(b.level, k, b.element)
        )


def colimit_monoid(chain: MonoidChain) -> DirectLimit:
    return DirectLimit(chain)


@dataclass(frozen=True)
class UniversalMap:
    limit: DirectLimit
    target: Presentation
    maps: tuple[GenMap, ...]

    def __call__(self, a: LimitElement) -> MonoidElement:
        return apply_generator_map(dict(self.maps[a.level]), a.element)


def universal_map(
    limit: DirectLimit,
    target: Presentation,
    maps: Sequence[Mapping[Generator, MonoidElement]],
    budget: int | None = None,
) -> UniversalMap:
    """Factor a compatible family of maps through the limit.

    Compatibility (each map agrees with the next one composed with the
    connecting map) is verified generator by generator in the target monoid;
    an incompatible family is refused naming a witnessing generator.
    """
    chain = limit.chain
    if len(maps) != len(chain):
        raise MorphismError("one map per chain level is required")
    frozen = tuple(_freeze_map(m) for m in maps)
    for i in range(len(chain) - 1):
        lower = dict(frozen[i])
        upper = dict(frozen[i + 1])
        step = chain.step_map(i)
        for gen in chain.presentations[i].alphabet:
            via_step = apply_generator_map(upper, apply_generator_map(step, MonoidElement.single(gen)))
            direct = apply_generator_map(lower, MonoidElement.single(gen))
            if not equal(target, direct, via_step, budget):
                raise MorphismError(
                    f"incompatible family: maps at levels {i} and {i + 1} disagree on {gen}"
                )
    return UniversalMap(limit, target, frozen)


@dataclass(frozen=True)
class ContinuityReport:
    ok: bool
    levels: int
    sample_sizes: tuple[int, ...]
    mismatches: tuple[str, ...]
    uncovered_generators: tuple[str, ...]
    merged_classes: tuple[int, ...] = ()


def _generator_matrix(
    mapping: Mapping[Generator, MonoidElement], dom: Presentation, cod: Presentation
) -> np.ndarray:
    cod_index = cod.index()
    rows = []
    for gen in dom.alphabet:
        row = np.zeros(len(cod.alphabet), dtype=np.int64)
        for tgen, mult in mapping[gen].terms:
            row[cod_index[tgen]] += mult
        rows.append(row)
    return kernels.as_matrix(rows, len(cod.alphabet))


def check_continuity(
    chain: GraphChain,
    into_top: GraphMorphism | None = None,
    degree: int = 2,
    budget: int | None = None,
) -> ContinuityReport:
    """Check limit behaviour of the chain against the top graph.

    For every level, all elements of total degree <= degree are pushed up and
    three things are verified on the induced normal-form partitions, which is
    equivalent to checking every pair of sampled elements:

      * soundness: elements congruent at their level have congruent images in
        the top graph;
      * limit equality: images are congruent at the top of the chain iff they
        are congruent in the top graph (representative equality in the limit
        is decided at the chain top, so this is the two-sided check);
      * coverage: every top generator is the image of a generator at some
        level.

    Connecting maps may genuinely merge classes (a class distinct at one
    level can collapse once more edges are materialized), so levelwise
    injectivity is not checked; the number of merged classes per level is
    reported instead.
    """
    colimit_graph(chain)  # raises unless every step is CK
    last = len(chain) - 1
    if into_top is None:
        into_top = identity_morphism(chain.graphs[last])
    elif into_top.source != chain.graphs[last]:
        raise MorphismError("into_top must start at the chain's top graph")
    report = is_ck_morphism(into_top)
    if not report.ok:
        raise MorphismError("into_top is not CK: " + "; ".join(report.violations))

    top_graph = into_top.target
    top_p = presentation_of(top_graph)
    top_rs = completed_system(top_p, budget)
    mid_p = presentation_of(chain.graphs[last])
    mid_rs = completed_system(mid_p, budget)
    mismatches: list[str] = []
    sizes: list[int] = []
    merges: list[int] = []
    covered: set[Generator] = set()

    for i, g in enumerate(chain.graphs):
        p_i = presentation_of(g)
        rs_i = completed_system(p_i, budget)
        mu_i = induced_monoid_morphism(chain.morphism(i, last))
        phi_i = induced_monoid_morphism(compose(into_top, chain.morphism(i, last)))
        covered.update(img.support()[0] for img in phi_i.values())
        to_mid = _generator_matrix(mu_i, p_i, mid_p)
        to_top = _generator_matrix(phi_i, p_i, top_p)
        sample = elements_up_to_degree(len(p_i.alphabet), degree)
        sizes.append(sample.shape[0])
        nf_here = kernels.nf_batch(sample, rs_i.lhs, rs_i.rhs)
        nf_mid = kernels.nf_batch(sample @ to_mid, mid_rs.lhs, mid_rs.rhs)
        nf_top = kernels.nf_batch(sample @ to_top, top_rs.lhs, top_rs.rhs)
        sound: dict[bytes, tuple[bytes, int]] = {}
        fwd: dict[bytes, tuple[bytes, int]] = {}
        bwd: dict[bytes, tuple[bytes, int]] = {}
        here_keys: set[bytes] = set()
        mid_keys: set[bytes] = set()
        for row in range(sample.shape[0]):
            kh = nf_here[row].tobytes()
            km = nf_mid[row].tobytes()
            kt = nf_top[row].tobytes()
            here_keys.add(kh)
            mid_keys.add(km)
            if kh in sound and sound[kh][0] != kt:
                other = sound[kh][1]
                mismatches.append(
                    f"level {i}: elements #{other} and #{row} are equal at the level "
                    f"but their images differ in the top graph"
                )
            else:
                sound.setdefault(kh, (kt, row))
            if km in fwd and fwd[km][0] != kt:
                other = fwd[km][1]
                mismatches.append(
                    f"level {i}: elements #{other} and #{row} are equal in the limit "
                    f"but their images differ in the top graph"
                )
            else:
                fwd.setdefault(km, (kt, row))
            if kt in bwd and bwd[kt][0] != km:
                other = bwd[kt][1]
                mismatches.append(
                    f"level {i}: elements #{other} and #{row} have equal images in the "
                    f"top graph but differ in the limit"
                )
            else:
                bwd.setdefault(kt, (km, row))
        merges.append(len(here_keys) - len(mid_keys))

    uncovered = tuple(str(gen) for gen in top_p.alphabet if gen not in covered)
    return ContinuityReport(
        ok=not mismatches and not uncovered,
        levels=len(chain),
        sample_sizes=tuple(sizes),
        mismatches=tuple(mismatches),
        uncovered_generators=uncovered,
        merged_classes=tuple(merges),
    )


# -- JSON ---------------------------------------------------------------------

def morphism_to_json(m: GraphMorphism) -> dict:
    return {"vertex_map": m.vertex_map(), "edge_map": m.edge_map()}


def morphism_from_json(data: dict, source: Graph, target: Graph) -> GraphMorphism:
    try:
        vmap = {str(k): str(v) for k, v in data["vertex_map"].items()}
        emap = {str(k): str(v) for k, v in data.get("edge_map", {}).items()}
    except (KeyError, TypeError, AttributeError) as exc:
        raise MorphismError(f"malformed morphism document: {exc}") from exc
    return GraphMorphism.build(source, target, vmap, emap)


def chain_from_json(data: dict) -> GraphChain:
    from .graphs import graph_from_json

    try:
        graphs = [graph_from_json(g) for g in data["graphs"]]
        raw_ms = data.get("morphisms", [])
    except (KeyError, TypeError) as exc:
        raise MorphismError(f"malformed system document: {exc}") from exc
    if len(raw_ms) != len(graphs) - 1:
        raise MorphismError("system must list one morphism between consecutive graphs")
    steps = [
        morphism_from_json(raw, graphs[i], graphs[i + 1]) for i, raw in enumerate(raw_ms)
    ]
    return GraphChain.build(graphs, steps)
