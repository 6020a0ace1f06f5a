"""Layered query solving with explanation assembly.

Quads are solved outer layer first.  Accepted answers of an outer quad
replace the matching property constraint of inner quads, producing one
branch per answer; an inner answer's confidence is the product of its own
decision confidence and the confidences of the outer answers it depends on.
Same-layer quads sharing a category constraint combine by intersection
(answers must satisfy every constraint; confidence is the product) or by
union.

The explanation is a role-annotated subgraph: the entities linked from the
query itself (red, layer 0) plus the reasoned answers per layer, joined by
the crossover relations that served as accepted evidence and the ``is_a``
paths that connect categories to their candidates.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .activation import (
    ActivationParams,
    CrossoverRelation,
    SubgraphResult,
    candidate_answers,
    spread_from,
    subgraph_search,
)
from .decision.evidence import EvidenceTag, FeatureVector, classify_evidence, extract_features
from .decision.models import DecisionModel
from .errors import ValidationError
from .kg.graph import KnowledgeGraph
from .query_graph import (
    ANYENTITY,
    ANYRELATION,
    DATE,
    PERSON,
    ConstraintQuad,
    QueryGraph,
    solving_order,
)
from .semantics import (
    DEFAULT_NEGATION_LEXICON,
    EmbeddingStore,
    is_negative_predicate,
    predicate_similarity,
)

COMBINE_MODES = ("intersection", "union")

_WILDCARD_NODE = {PERSON: "person", DATE: "date"}


@dataclass(frozen=True)
class Answer:
    entity: str
    confidence: float


@dataclass(frozen=True)
class SubgraphNode:
    id: str
    role: str                   # query-entity | reasoned
    layer: int


@dataclass(frozen=True)
class SubgraphEdge:
    source: str
    predicate: str
    target: str
    from_cr: bool


@dataclass
class ReasoningSubgraph:
    nodes: list[SubgraphNode] = field(default_factory=list)
    edges: list[SubgraphEdge] = field(default_factory=list)

    def node_ids(self) -> set[str]:
        return {n.id for n in self.nodes}


@dataclass
class CandidateDecision:
    entity: str
    features: FeatureVector
    label: int
    confidence: float
    tags: list[EvidenceTag] = field(default_factory=list)


@dataclass
class QuadTrace:
    quad: ConstraintQuad
    pattern: int
    branch: int
    subj_id: str | None
    obj_id: str | None
    substituted: bool
    result: SubgraphResult | None
    candidates: list[str]
    decisions: dict[str, CandidateDecision]
    accepted: dict[str, float]
    note: str = ""


@dataclass
class SolveResult:
    answers: list[Answer]
    explanation: ReasoningSubgraph
    trace: list[QuadTrace]


@dataclass
class _Branch:
    ident: int
    confidence: float = 1.0
    substitutions: dict[str, str] = field(default_factory=dict)
    used: list[tuple] = field(default_factory=list)      # (QuadTrace, entity)
    traces: list[QuadTrace] = field(default_factory=list)

    def child(self, ident: int) -> "_Branch":
        return _Branch(ident, self.confidence, dict(self.substitutions),
                       list(self.used), list(self.traces))


def combine_same_layer(per_quad: list[dict[str, float]], mode: str = "intersection"
                       ) -> dict[str, float]:
    """Combine the answer sets of same-layer quads sharing a category."""
    if mode not in COMBINE_MODES:
        raise ValidationError(f"combine mode must be one of {COMBINE_MODES}")
    if not per_quad:
        return {}
    if mode == "intersection":
        keys = set(per_quad[0])
        for answers in per_quad[1:]:
            keys &= set(answers)
    else:
        keys = set()
        for answers in per_quad:
            keys |= set(answers)
    combined = {}
    for key in keys:
        conf = 1.0
        for answers in per_quad:
            if key in answers:
                conf *= answers[key]
        combined[key] = conf
    return combined


class _Solver:
    def __init__(self, kg, qg, params, model, store, combine, seed,
                 negation_lexicon, backend):
        self.kg = kg
        self.qg = qg
        self.params = params
        self.model = model
        self.store = store
        self.combine = combine
        self.seed = seed
        self.lexicon = negation_lexicon
        self.backend = backend
        self.trace: list[QuadTrace] = []
        self._next_branch = 0

    # -- linking --------------------------------------------------------

    def _link(self, phrase: str) -> str:
        tokens = self.qg.phrase_tokens.get(phrase)
        return self.kg.link_entity(tokens if tokens else phrase)

    # -- per-quad solving -------------------------------------------------

    def _decide(self, fv: FeatureVector) -> tuple[int, float]:
        return self.model.predict(fv)

    def _solve_quad(self, branch: _Branch, quad: ConstraintQuad) -> QuadTrace:
        pattern = self.qg.pattern_of(quad)
        substituted = quad.property in branch.substitutions
        prop = branch.substitutions.get(quad.property, quad.property)

        if quad.category == ANYENTITY:
            trace = self._solve_wildcard_category(branch, quad, pattern, prop,
                                                  substituted)
        elif prop == ANYENTITY:
            trace = self._solve_wildcard_property(branch, quad, pattern)
        else:
            trace = self._solve_concrete(branch, quad, pattern, prop, substituted)
        self.trace.append(trace)
        branch.traces.append(trace)
        return trace

    def _solve_concrete(self, branch, quad, pattern, prop, substituted):
        subj = self._link(_WILDCARD_NODE.get(quad.category, quad.category))
        obj = prop if substituted and prop in self.kg.entities else self._link(prop)
        result = subgraph_search(self.kg, subj, obj, self.params,
                                 backend=self.backend)
        candidates = candidate_answers(result, self.kg, subj)
        n_sub = len(self.kg.subclasses(obj))
        decisions, accepted = {}, {}
        for cand in candidates:
            tags = classify_evidence(cand, quad, result, self.kg, self.store,
                                     self.lexicon)
            fv = extract_features(tags, len(candidates), n_sub)
            label, conf = self._decide(fv)
            decisions[cand] = CandidateDecision(cand, fv, label, conf, tags)
            if label == 1:
                accepted[cand] = conf
        return QuadTrace(quad, pattern, branch.ident, subj, obj, substituted,
                         result, candidates, decisions, accepted)

    def _solve_wildcard_property(self, branch, quad, pattern):
        """Property is ANYENTITY: any neighbor satisfies it, so candidates
        are scored on wildcard evidence alone (similarity forced to 1)."""
        subj = self._link(_WILDCARD_NODE.get(quad.category, quad.category))
        sg_subj = spread_from(self.kg, subj, self.params, backend=self.backend)
        result = SubgraphResult(subj_id=subj, obj_id=subj, sg_subj=sg_subj,
                                sg_obj={}, cr=[])
        candidates = candidate_answers(result, self.kg, subj)
        decisions, accepted = {}, {}
        for cand in candidates:
            tags = [EvidenceTag("R1", True, 1.0, None)]
            fv = extract_features(tags, len(candidates), 0)
            label, conf = self._decide(fv)
            decisions[cand] = CandidateDecision(cand, fv, label, conf, tags)
            if label == 1:
                accepted[cand] = conf
        return QuadTrace(quad, pattern, branch.ident, subj, None, False,
                         result, candidates, decisions, accepted,
                         note="wildcard-property")

    def _solve_wildcard_category(self, branch, quad, pattern, prop, substituted):
        """Category is ANYENTITY: candidates are the direct neighbors of the
        property node, scored on their connecting edges."""
        obj = prop if substituted and prop in self.kg.entities else self._link(prop)
        sg_obj = spread_from(self.kg, obj, self.params, backend=self.backend)
        by_neighbor: dict[str, list[CrossoverRelation]] = {}
        for edge, other, fwd in self.kg.neighbors(obj):
            by_neighbor.setdefault(other, []).append(
                CrossoverRelation(other, edge, obj, forward=fwd))
        candidates = sorted(by_neighbor)
        result = SubgraphResult(
            subj_id=obj, obj_id=obj, sg_subj={}, sg_obj=sg_obj,
            cr=[cr for cand in candidates for cr in by_neighbor[cand]])
        n_sub = len(self.kg.subclasses(obj))
        decisions, accepted = {}, {}
        for cand in candidates:
            tags = []
            for cr in by_neighbor[cand]:
                sim = (1.0 if quad.predicate == ANYRELATION else
                       predicate_similarity(self.store, cr.edge.predicate,
                                            quad.predicate))
                tags.append(EvidenceTag(
                    "R1",
                    not is_negative_predicate(cr.edge.predicate, self.lexicon),
                    sim, cr))
            fv = extract_features(tags, len(candidates), n_sub)
            label, conf = self._decide(fv)
            decisions[cand] = CandidateDecision(cand, fv, label, conf, tags)
            if label == 1:
                accepted[cand] = conf
        return QuadTrace(quad, pattern, branch.ident, None, obj, substituted,
                         result, candidates, decisions, accepted,
                         note="wildcard-category")

    # -- definition queries ----------------------------------------------

    def _solve_definition(self) -> SolveResult:
        """'What is X': no constraint to score — return X's direct
        neighborhood with confidence 1.0 and skip decision making."""
        quads = self.qg.quads
        subject_phrase = next(q.property for q in quads if q.property != ANYENTITY)
        x = self._link(subject_phrase)
        answers = {}
        for quad in quads:
            incoming = quad.property != ANYENTITY
            neighbors = sorted({
                other for _e, other, fwd in self.kg.neighbors(x)
                if fwd != incoming
            })
            accepted = {n: 1.0 for n in neighbors}
            answers.update(accepted)
            self.trace.append(QuadTrace(
                quad, 4, 0, x if quad.category != ANYENTITY else None,
                x if quad.property != ANYENTITY else None, False, None,
                neighbors, {}, accepted, note="definition"))
        explanation = ReasoningSubgraph(
            nodes=[SubgraphNode(x, "query-entity", 0)]
                  + [SubgraphNode(n, "reasoned", 1) for n in sorted(answers)],
            edges=sorted(
                (SubgraphEdge(e.source, e.predicate, e.target, False)
                 for e, other, _ in self.kg.neighbors(x) if other in answers),
                key=lambda e: (e.source, e.predicate, e.target)),
        )
        ranked = [Answer(n, c) for n, c in
                  sorted(answers.items(), key=lambda kv: (-kv[1], kv[0]))]
        return SolveResult(ranked, explanation, self.trace)

    # -- the layered loop -------------------------------------------------

    def solve(self) -> SolveResult:
        self.qg.validate()
        if any(p == 4 for p in self.qg.patterns):
            return self._solve_definition()

        order = solving_order(self.qg, self.seed)
        max_layer = max(q.layer for q in order)
        branches = [self._new_branch()]
        finals: dict[str, tuple[float, _Branch]] = {}

        for layer in range(max_layer, 0, -1):
            layer_quads = [q for q in order if q.layer == layer]
            groups: dict[str, list[ConstraintQuad]] = {}
            for quad in layer_quads:
                groups.setdefault(quad.category, []).append(quad)

            next_branches = []
            for branch in branches:
                group_results = {}
                for category, quads in groups.items():
                    per_quad = [self._solve_quad(branch, q).accepted for q in quads]
                    group_results[category] = combine_same_layer(per_quad,
                                                                 self.combine)
                if layer == 1:
                    merged: dict[str, float] = {}
                    for combined in group_results.values():
                        for ent, conf in combined.items():
                            merged[ent] = max(merged.get(ent, 0.0), conf)
                    for ent, conf in merged.items():
                        total = conf * branch.confidence
                        if ent not in finals or total > finals[ent][0]:
                            finals[ent] = (total, branch)
                else:
                    variants = [branch]
                    for category, combined in group_results.items():
                        feeds_inner = any(q.layer < layer and q.property == category
                                          for q in order)
                        if not combined:
                            if feeds_inner:
                                variants = []
                                break
                            continue
                        # the quads of this category in this branch share one
                        # trace each; remember which answer each child follows
                        cat_traces = [t for t in branch.traces
                                      if t.quad in groups[category]
                                      and t.branch == branch.ident]
                        expanded = []
                        for parent in variants:
                            for ent, conf in sorted(combined.items()):
                                child = parent.child(self._next_branch_id())
                                child.substitutions[category] = ent
                                child.confidence *= conf
                                for t in cat_traces:
                                    if ent in t.accepted:
                                        child.used.append((t, ent))
                                expanded.append(child)
                        variants = expanded
                    next_branches.extend(variants)
            if layer > 1:
                branches = next_branches
                if not branches:
                    break

        ranked = [Answer(ent, conf) for ent, (conf, _b) in
                  sorted(finals.items(), key=lambda kv: (-kv[1][0], kv[0]))]
        explanation = self._assemble(finals)
        return SolveResult(ranked, explanation, self.trace)

    def _new_branch(self) -> _Branch:
        b = _Branch(self._next_branch_id())
        return b

    def _next_branch_id(self) -> int:
        self._next_branch += 1
        return self._next_branch - 1

    # -- explanation -------------------------------------------------------

    def _assemble(self, finals) -> ReasoningSubgraph:
        query_entities: set[str] = set()
        for t in self.trace:
            if t.subj_id is not None:
                query_entities.add(t.subj_id)
            if t.obj_id is not None and not t.substituted:
                query_entities.add(t.obj_id)

        reasoned: dict[str, int] = {}
        evidence: list[tuple[QuadTrace, str]] = []
        for ent, (_conf, branch) in finals.items():
            for t in branch.traces:
                if t.quad.layer == 1 and ent in t.accepted:
                    reasoned.setdefault(ent, 1)
                    evidence.append((t, ent))
            for t, picked in branch.used:
                reasoned.setdefault(picked, t.quad.layer)
                evidence.append((t, picked))

        nodes = {}
        for ent in query_entities:
            nodes[ent] = SubgraphNode(ent, "query-entity", 0)
        for ent, layer in reasoned.items():
            if ent not in nodes:
                nodes[ent] = SubgraphNode(ent, "reasoned", layer)
        listed = set(nodes)

        edges: dict[tuple, SubgraphEdge] = {}

        def add_edge(source, predicate, target, from_cr):
            if source in listed and target in listed:
                key = (source, predicate, target)
                if key not in edges or (from_cr and not edges[key].from_cr):
                    edges[key] = SubgraphEdge(source, predicate, target, from_cr)

        seen_pairs = set()
        for t, ent in evidence:
            if (id(t), ent) in seen_pairs:
                continue
            seen_pairs.add((id(t), ent))
            decision = t.decisions.get(ent)
            if decision is not None:
                for tag in decision.tags:
                    if tag.cr is None:
                        continue
                    e = tag.cr.edge
                    add_edge(e.source, e.predicate, e.target, True)
                    if t.result is not None:
                        self._add_path_edges(t.result, t.subj_id,
                                             tag.cr.subj_node, listed, add_edge)
                        self._add_path_edges(t.result, t.obj_id,
                                             tag.cr.obj_node, listed, add_edge)
            if t.result is not None and t.subj_id is not None:
                self._add_path_edges(t.result, t.subj_id, ent, listed, add_edge)

        return ReasoningSubgraph(
            nodes=sorted(nodes.values(), key=lambda n: (n.layer, n.id)),
            edges=sorted(edges.values(),
                         key=lambda e: (e.source, e.predicate, e.target)),
        )

    def _add_path_edges(self, result, start, goal, listed, add_edge):
        if start is None or goal is None or start == goal:
            return
        inside = result.sg
        if start not in inside or goal not in inside:
            return
        parent: dict[str, tuple] = {start: None}
        queue = deque([start])
        while queue:
            current = queue.popleft()
            if current == goal:
                break
            steps = []
            for edge, other, _fwd in self.kg.neighbors(current):
                if other in inside and other not in parent:
                    steps.append((other, edge))
            for other, edge in sorted(steps, key=lambda s: s[0]):
                parent[other] = (current, edge)
                queue.append(other)
        if goal not in parent:
            return
        cur = goal
        while parent[cur] is not None:
            prev, edge = parent[cur]
            add_edge(edge.source, edge.predicate, edge.target, False)
            cur = prev


def solve(kg: KnowledgeGraph, qg: QueryGraph,
          params: ActivationParams | None = None,
          model: DecisionModel | None = None,
          store: EmbeddingStore | None = None,
          combine: str = "intersection",
          seed: int | None = None,
          negation_lexicon=DEFAULT_NEGATION_LEXICON,
          backend: str | None = None) -> SolveResult:
    if model is None:
        raise ValidationError("a trained decision model is required")
    if combine not in COMBINE_MODES:
        raise ValidationError(f"combine mode must be one of {COMBINE_MODES}")
    solver = _Solver(kg, qg, params or ActivationParams(), model, store,
                     combine, seed, negation_lexicon, backend)
    return solver.solve()


def assemble_explanation(trace: list[QuadTrace], kg: KnowledgeGraph,
                         finals=None) -> ReasoningSubgraph:
    """Rebuild the reasoning subgraph from a completed trace.  When
    ``finals`` is omitted every accepted answer is treated as surviving."""
    solver = _Solver.__new__(_Solver)
    solver.kg = kg
    solver.trace = trace
    if finals is None:
        branch = _Branch(0)
        branch.traces = list(trace)
        branch.used = [(t, ent) for t in trace if t.quad.layer > 1
                       for ent in t.accepted]
        finals = {}
        for t in trace:
            for ent in t.accepted:
                if t.quad.layer == 1:
                    finals[ent] = (t.accepted[ent], branch)
    return solver._assemble(finals)
