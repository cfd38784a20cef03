"""Decision procedure for the word problem of a finitely presented commutative monoid.

Elements are exponent vectors over the presentation's alphabet.  Relations are
completed into a confluent, terminating rewrite system under the graded
lexicographic order (total degree first, ties by the canonical generator
order), by orienting every relation downhill and resolving critical pairs:
for rules with overlapping left-hand sides the componentwise maximum is a
peak whose two reducts must join.  Rules with disjoint left-hand supports are
skipped; both reducts step to the same element, so such peaks always join.

Every rule carries a proof: a chain of original-relation applications
transforming its left side into its right side.  Equality certificates are
assembled from those chains and replay step by step against the presentation.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from . import kernels
from .presentation import Generator, MonoidElement, Presentation

DEFAULT_BUDGET = 100_000


class EngineError(ValueError):
    pass


class BudgetExceededError(EngineError):
    """Completion ran out of its S-pair budget; the instance is undecided, not unequal."""

    def __init__(self, processed: int, budget: int):
        super().__init__(f"completion budget exhausted after {processed} S-pair reductions (budget {budget})")
        self.processed = processed
        self.budget = budget


def resolve_budget(budget: int | None) -> int:
    if budget is not None:
        return int(budget)
    return int(os.environ.get("GRAPHMONOID_BUDGET", DEFAULT_BUDGET))


Step = tuple[int, int]  # (relation index, +1 forward / -1 backward)


@dataclass(frozen=True, eq=False)
class RewriteSystem:
    presentation: Presentation
    lhs: np.ndarray  # (r, g) int64
    rhs: np.ndarray
    proofs: tuple[tuple[Step, ...], ...]
    completed: bool
    spairs_processed: int

    # total degree first, ties broken on the alphabet's canonical order
    term_order: str = "graded-lexicographic"

    @property
    def rule_count(self) -> int:
        return self.lhs.shape[0]

    def rule(self, k: int) -> tuple[MonoidElement, MonoidElement]:
        p = self.presentation
        return _unvec(self.lhs[k], p.alphabet), _unvec(self.rhs[k], p.alphabet)


def _vec(x: MonoidElement, index: dict[Generator, int]) -> np.ndarray:
    out = np.zeros(len(index), dtype=np.int64)
    for gen, mult in x.terms:
        try:
            out[index[gen]] = mult
        except KeyError:
            raise EngineError(f"element uses generator {gen} outside the alphabet") from None
    return out


def _unvec(v: np.ndarray, alphabet: tuple[Generator, ...]) -> MonoidElement:
    return MonoidElement.from_counts(
        {alphabet[i]: int(v[i]) for i in np.nonzero(v)[0]}
    )


def _compare(u: np.ndarray, v: np.ndarray) -> int:
    """Graded-lex comparison: sign of u - v in the term order."""
    du, dv = int(u.sum()), int(v.sum())
    if du != dv:
        return 1 if du > dv else -1
    diff = u - v
    nz = np.nonzero(diff)[0]
    if nz.size == 0:
        return 0
    return 1 if diff[nz[0]] > 0 else -1


def _invert(chain: tuple[Step, ...]) -> tuple[Step, ...]:
    return tuple((rel, -d) for rel, d in reversed(chain))


class _Rule:
    __slots__ = ("lhs", "rhs", "proof", "alive")

    def __init__(self, lhs, rhs, proof):
        self.lhs = lhs
        self.rhs = rhs
        self.proof = proof
        self.alive = True


def complete(p: Presentation, budget: int | None = None) -> RewriteSystem:
    """Complete the presentation into a confluent rewrite system.

    Deterministic given the presentation; raises BudgetExceededError when the
    S-pair budget runs out.
    """
    budget = resolve_budget(budget)
    index = p.index()
    g = len(p.alphabet)
    rules: list[_Rule] = []
    equations: deque[tuple[np.ndarray, np.ndarray, tuple[Step, ...]]] = deque()
    pairs: deque[tuple[int, int]] = deque()
    spairs = 0

    for i, (u, v) in enumerate(p.relations):
        equations.append((_vec(u, index), _vec(v, index), ((i, +1),)))

    def reduce_trace(x: np.ndarray) -> tuple[np.ndarray, list[int]]:
        y = x.copy()
        applied: list[int] = []
        moved = True
        while moved:
            moved = False
            for k, rule in enumerate(rules):
                if rule.alive and (rule.lhs <= y).all():
                    y = y - rule.lhs + rule.rhs
                    applied.append(k)
                    moved = True
                    break
        return y, applied

    def proof_of(applied: list[int]) -> tuple[Step, ...]:
        out: list[Step] = []
        for k in applied:
            out.extend(rules[k].proof)
        return tuple(out)

    def process_equation(u, v, chain):
        nfu, su = reduce_trace(u)
        nfv, sv = reduce_trace(v)
        cmp = _compare(nfu, nfv)
        if cmp == 0:
            return
        full = _invert(proof_of(su)) + chain + proof_of(sv)  # nfu -> nfv
        if cmp > 0:
            new = _Rule(nfu, nfv, full)
        else:
            new = _Rule(nfv, nfu, _invert(full))
        k_new = len(rules)
        rules.append(new)
        for k, rule in enumerate(rules[:k_new]):
            if not rule.alive:
                continue
            if (new.lhs <= rule.lhs).all():
                rule.alive = False
                equations.append((rule.lhs, rule.rhs, rule.proof))
            elif (new.lhs <= rule.rhs).all():
                nfr, sr = reduce_trace(rule.rhs)
                rule.proof = rule.proof + proof_of(sr)
                rule.rhs = nfr
        for k, rule in enumerate(rules[:k_new]):
            if rule.alive:
                pairs.append((k, k_new))

    while equations or pairs:
        if equations:
            process_equation(*equations.popleft())
            continue
        i, j = pairs.popleft()
        if not (rules[i].alive and rules[j].alive):
            continue
        li, lj = rules[i].lhs, rules[j].lhs
        if not np.minimum(li, lj).any():
            # disjoint supports: both reducts step to rhs_i + rhs_j, peak joins
            continue
        spairs += 1
        if spairs > budget:
            raise BudgetExceededError(spairs, budget)
        peak = np.maximum(li, lj)
        u = peak - li + rules[i].rhs
        v = peak - lj + rules[j].rhs
        process_equation(u, v, _invert(rules[i].proof) + rules[j].proof)

    final = sorted(
        (r for r in rules if r.alive),
        key=lambda r: (int(r.lhs.sum()), tuple(r.lhs), tuple(r.rhs)),
    )
    if final:
        lhs = np.stack([r.lhs for r in final])
        rhs = np.stack([r.rhs for r in final])
    else:
        lhs = np.empty((0, g), dtype=np.int64)
        rhs = np.empty((0, g), dtype=np.int64)
    return RewriteSystem(
        presentation=p,
        lhs=lhs,
        rhs=rhs,
        proofs=tuple(r.proof for r in final),
        completed=True,
        spairs_processed=spairs,
    )


@lru_cache(maxsize=None)
def _completed(p: Presentation, budget: int) -> RewriteSystem:
    return complete(p, budget)


def completed_system(p: Presentation, budget: int | None = None) -> RewriteSystem:
    return _completed(p, resolve_budget(budget))


def normal_form(rs: RewriteSystem, x: MonoidElement) -> MonoidElement:
    """Unique irreducible element congruent to x under a completed system."""
    if not rs.completed:
        raise EngineError("rewrite system is not completed")
    v = _vec(x, rs.presentation.index())
    return _unvec(kernels.nf_vector(v, rs.lhs, rs.rhs), rs.presentation.alphabet)


def _reduce_trace_final(rs: RewriteSystem, x: np.ndarray) -> tuple[np.ndarray, list[int]]:
    y = x.copy()
    applied: list[int] = []
    moved = True
    while moved:
        moved = False
        for k in range(rs.rule_count):
            if (rs.lhs[k] <= y).all():
                y = y - rs.lhs[k] + rs.rhs[k]
                applied.append(k)
                moved = True
                break
    return y, applied


@dataclass(frozen=True)
class EqualityResult:
    """Decision plus certificate: a replayable chain when equal, separating
    normal forms when not."""

    equal: bool
    lhs_normal_form: MonoidElement
    rhs_normal_form: MonoidElement
    chain: tuple[Step, ...] | None = None

    def __bool__(self) -> bool:
        return self.equal

    @property
    def normal_form(self) -> MonoidElement | None:
        return self.lhs_normal_form if self.equal else None


def equal(p: Presentation, u: MonoidElement, v: MonoidElement, budget: int | None = None) -> EqualityResult:
    """Decide u = v in the monoid presented by p.

    Raises BudgetExceededError if completion cannot finish in budget; that is
    an explicit undecided outcome, never a wrong answer.
    """
    rs = completed_system(p, budget)
    index = p.index()
    uv, vv = _vec(u, index), _vec(v, index)
    nfu, su = _reduce_trace_final(rs, uv)
    nfv, sv = _reduce_trace_final(rs, vv)
    alphabet = p.alphabet
    if _compare(nfu, nfv) == 0:
        chain: list[Step] = []
        for k in su:
            chain.extend(rs.proofs[k])
        for k in reversed(sv):
            chain.extend(_invert(rs.proofs[k]))
        return EqualityResult(True, _unvec(nfu, alphabet), _unvec(nfv, alphabet), tuple(chain))
    return EqualityResult(False, _unvec(nfu, alphabet), _unvec(nfv, alphabet), None)


def replay_chain(p: Presentation, start: MonoidElement, chain: tuple[Step, ...]) -> MonoidElement:
    """Replay a certificate chain from start, one relation instance at a time."""
    index = p.index()
    cur = _vec(start, index)
    rel_vecs = [(_vec(a, index), _vec(b, index)) for a, b in p.relations]
    for rel, direction in chain:
        if not 0 <= rel < len(rel_vecs):
            raise EngineError(f"chain names unknown relation {rel}")
        a, b = rel_vecs[rel]
        src, dst = (a, b) if direction > 0 else (b, a)
        if not (src <= cur).all():
            raise EngineError(f"relation {rel} does not apply at this chain position")
        cur = cur - src + dst
    return _unvec(cur, p.alphabet)


def certificate_to_json(p: Presentation, start: MonoidElement, result: EqualityResult) -> dict:
    """Serialize a certificate; chain steps carry their context element."""
    from .presentation import element_to_json

    if not result.equal:
        return {
            "kind": "separated",
            "lhs_normal_form": element_to_json(result.lhs_normal_form),
            "rhs_normal_form": element_to_json(result.rhs_normal_form),
        }
    index = p.index()
    cur = _vec(start, index)
    rel_vecs = [(_vec(a, index), _vec(b, index)) for a, b in p.relations]
    steps = []
    for rel, direction in result.chain or ():
        a, b = rel_vecs[rel]
        src, dst = (a, b) if direction > 0 else (b, a)
        ctx = cur - src
        steps.append(
            {
                "relation": rel,
                "direction": "forward" if direction > 0 else "backward",
                "context": element_to_json(_unvec(ctx, p.alphabet)),
            }
        )
        cur = ctx + dst
    return {
        "kind": "chain",
        "normal_form": element_to_json(result.lhs_normal_form),
        "steps": steps,
    }


def congruence_bfs(
    p: Presentation, x: MonoidElement, depth: int, max_size: int | None = None
) -> set[MonoidElement]:
    """All elements reachable from x by at most depth bidirectional relation steps."""
    reached, _ = bfs_reach(p, x, depth, max_size)
    return {_unvec(np.array(t, dtype=np.int64), p.alphabet) for t in reached}


def bfs_reach(
    p: Presentation, x: MonoidElement, depth: int, max_size: int | None = None
) -> tuple[set[tuple[int, ...]], bool]:
    """Reachable exponent vectors and whether the class was fully saturated.

    Saturation means the breadth-first closure stopped producing new elements
    before the depth bound (and before any size cap), so the congruence class
    of x is exactly the returned set.
    """
    if depth < 0:
        raise EngineError("depth must be >= 0")
    index = p.index()
    g = len(p.alphabet)
    lhs = kernels.as_matrix([_vec(a, index) for a, _ in p.relations], g)
    rhs = kernels.as_matrix([_vec(b, index) for _, b in p.relations], g)
    start = _vec(x, index)
    seen: set[tuple[int, ...]] = {tuple(int(c) for c in start)}
    frontier = start.reshape(1, g)
    saturated = lhs.shape[0] == 0
    for _ in range(depth):
        cand = kernels.expand_frontier(frontier, lhs, rhs)
        if cand.shape[0] == 0:
            saturated = True
            break
        cand = np.unique(cand, axis=0)
        fresh = [row for row in cand if tuple(int(c) for c in row) not in seen]
        if not fresh:
            saturated = True
            break
        for row in fresh:
            seen.add(tuple(int(c) for c in row))
        if max_size is not None and len(seen) > max_size:
            return seen, False
        frontier = np.stack(fresh)
    return seen, saturated


def elements_up_to_degree(n_generators: int, degree: int) -> np.ndarray:
    """All exponent vectors of total degree <= degree, in deterministic order."""
    rows = [np.zeros(n_generators, dtype=np.int64)]
    for d in range(1, degree + 1):
        for combo in combinations_with_replacement(range(n_generators), d):
            row = np.zeros(n_generators, dtype=np.int64)
            for i in combo:
                row[i] += 1
            rows.append(row)
    return np.stack(rows) if rows else np.empty((0, n_generators), dtype=np.int64)
