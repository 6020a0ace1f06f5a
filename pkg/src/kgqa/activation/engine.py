"""Spreading-activation subgraph search.

For a constraint quad, activation spreads from the linked subject node and
the linked object node in two runs with per-hop decay and an activation
threshold.  During the object-side run, any edge whose far end lies inside
the finished subject-side subgraph is not traversed; it is recorded as a
crossover relation (CR) — the evidence connecting candidate answers to the
property constraint.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import UnknownEntityError
from ..kg.graph import ISA, KnowledgeGraph, RelationEdge
from . import kernels


@dataclass(frozen=True)
class ActivationParams:
    active_threshold: float = 0.8
    decay_factor: float = 0.85
    max_iterations: int = 30
    seed_activation: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.active_threshold < 1.0:
            raise ValueError("active_threshold must be in (0,1)")
        if not 0.0 < self.decay_factor < 1.0:
            raise ValueError("decay_factor must be in (0,1)")
        if self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")
        if not (self.active_threshold < self.seed_activation <= 1.0):
            raise ValueError("seed_activation must exceed the active threshold")

    def override(self, at=None, df=None, st=None) -> "ActivationParams":
        return replace(
            self,
            active_threshold=self.active_threshold if at is None else at,
            decay_factor=self.decay_factor if df is None else df,
            max_iterations=self.max_iterations if st is None else st,
        )


@dataclass
class ActivationState:
    """Activation values plus the frontier set of nodes that spread next."""

    activation: dict[str, float]
    frontier: set[str]
    iteration: int = 0


@dataclass(frozen=True)
class CrossoverRelation:
    subj_node: str              # endpoint inside the subject-side subgraph
    edge: RelationEdge
    obj_node: str               # frontier node of the object-side run
    forward: bool               # traversal followed the edge's direction

    def key(self):
        return (self.subj_node, self.edge.source, self.edge.predicate,
                self.edge.target, self.obj_node)


@dataclass
class SubgraphResult:
    subj_id: str
    obj_id: str
    sg_subj: dict[str, float]
    sg_obj: dict[str, float]
    cr: list[CrossoverRelation] = field(default_factory=list)

    @property
    def sg(self) -> set[str]:
        return set(self.sg_subj) | set(self.sg_obj)


def spread_step(state: ActivationState, kg: KnowledgeGraph,
                params: ActivationParams, backend: str | None = None
                ) -> ActivationState:
    """One synchronous spreading round (no crossover blocking)."""
    csr = kg._ensure_csr()
    n = len(csr.ids)
    act = np.zeros(n, dtype=np.float64)
    for node, value in state.activation.items():
        act[csr.index[node]] = value
    frontier = np.array(sorted(csr.index[f] for f in state.frontier),
                        dtype=np.int64)
    blocked = np.zeros(n, dtype=np.bool_)
    cr_hits = np.zeros(len(csr.nbr), dtype=np.bool_)
    if frontier.size:
        newly = kernels.spread_round(
            csr.indptr, csr.nbr, csr.wts, act, frontier,
            params.active_threshold, params.decay_factor,
            blocked, cr_hits, backend=backend)
    else:
        newly = np.empty(0, dtype=np.int64)
    activation = {nid: float(act[i]) for i, nid in enumerate(csr.ids)}
    return ActivationState(
        activation=activation,
        frontier={csr.ids[i] for i in newly},
        iteration=state.iteration + 1,
    )


def _run_spread(kg, csr, seed_index, params, blocked, cr_hits, backend):
    """SpdActi: spread until the frontier empties, the iteration budget is
    used up, or every node is active.  Returns final activations and the
    set of activated node indexes (seed included)."""
    n = len(csr.ids)
    act = np.zeros(n, dtype=np.float64)
    act[seed_index] = params.seed_activation
    frontier = np.array([seed_index], dtype=np.int64)
    activated = {int(seed_index)}
    rounds = 0
    at = params.active_threshold
    while (frontier.size and rounds < params.max_iterations
           and not bool(np.all(act >= at))):
        frontier = kernels.spread_round(
            csr.indptr, csr.nbr, csr.wts, act, frontier,
            at, params.decay_factor, blocked, cr_hits, backend=backend)
        activated.update(int(i) for i in frontier)
        rounds += 1
    return act, activated


def subgraph_search(kg: KnowledgeGraph, subj, obj,
                    params: ActivationParams | None = None,
                    backend: str | None = None) -> SubgraphResult:
    """Run the two-sided search for a (category, property) node pair.

    ``subj``/``obj`` are entity ids (callers resolve constraint phrases and
    wildcards before getting here).  Both runs own a private activation
    state; the object side observes the completed subject side for CR
    recording.
    """
    params = params or ActivationParams()
    csr = kg._ensure_csr()
    for node in (subj, obj):
        if node not in csr.index:
            raise UnknownEntityError(node)
    n = len(csr.ids)
    no_block = np.zeros(n, dtype=np.bool_)
    scratch_hits = np.zeros(len(csr.nbr), dtype=np.bool_)

    subj_act, subj_set = _run_spread(
        kg, csr, csr.index[subj], params, no_block, scratch_hits, backend)

    blocked = np.zeros(n, dtype=np.bool_)
    for i in subj_set:
        blocked[i] = True
    cr_hits = np.zeros(len(csr.nbr), dtype=np.bool_)
    obj_act, obj_set = _run_spread(
        kg, csr, csr.index[obj], params, blocked, cr_hits, backend)

    crs = []
    for p in np.flatnonzero(cr_hits):
        i = int(np.searchsorted(csr.indptr, p, side="right") - 1)
        j = int(csr.nbr[p])
        edge = kg.edges[int(csr.eid[p])]
        crs.append(CrossoverRelation(
            subj_node=csr.ids[j], edge=edge, obj_node=csr.ids[i],
            forward=bool(csr.forward[p])))
    crs.sort(key=lambda c: c.key())

    return SubgraphResult(
        subj_id=subj,
        obj_id=obj,
        sg_subj={csr.ids[i]: float(subj_act[i]) for i in sorted(subj_set)},
        sg_obj={csr.ids[i]: float(obj_act[i]) for i in sorted(obj_set)},
        cr=crs,
    )


def spread_from(kg: KnowledgeGraph, node: str,
                params: ActivationParams | None = None,
                backend: str | None = None) -> dict[str, float]:
    """Single-sided spread; returns the activated nodes with activations.
    Used for constraint quads whose property side is a wildcard."""
    params = params or ActivationParams()
    csr = kg._ensure_csr()
    if node not in csr.index:
        raise UnknownEntityError(node)
    n = len(csr.ids)
    act, activated = _run_spread(
        kg, csr, csr.index[node], params,
        np.zeros(n, dtype=np.bool_),
        np.zeros(len(csr.nbr), dtype=np.bool_),
        backend)
    return {csr.ids[i]: float(act[i]) for i in sorted(activated)}


def candidate_answers(result: SubgraphResult, kg: KnowledgeGraph,
                      category: str) -> list[str]:
    """Most-subclass nodes of the subject-side subgraph: nodes reachable
    from the category via reversed ``is_a`` edges inside sg_subj that have
    no incoming ``is_a`` edge from another sg_subj node.  Sorted by id."""
    inside = set(result.sg_subj)
    if category not in inside:
        raise UnknownEntityError(category)
    reach = {category}
    queue = [category]
    while queue:
        current = queue.pop()
        for idx in kg.in_index.get(current, ()):
            e = kg.edges[idx]
            if e.predicate == ISA and e.source in inside and e.source not in reach:
                reach.add(e.source)
                queue.append(e.source)
    leaves = []
    for node in reach:
        has_child = any(
            kg.edges[idx].predicate == ISA and kg.edges[idx].source in inside
            for idx in kg.in_index.get(node, ()))
        if not has_child:
            leaves.append(node)
    return sorted(leaves)
