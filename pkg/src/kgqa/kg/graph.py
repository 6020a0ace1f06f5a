"""Domain knowledge graph: entities, weighted predicate edges, synonym map
and ``is_a`` hierarchy queries.

The graph is built/augmented by a single writer, then frozen and shared
read-only by any number of concurrent query evaluations.
"""

from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..canonical import canonical_id, canonical_phrase, singular_variants, tokens_of
from ..errors import (
    CycleError,
    FrozenGraphError,
    LinkFailureError,
    SnapshotFormatError,
    TripleParseError,
    UnknownEntityError,
)

ISA = "is_a"

SNAPSHOT_FORMAT = "kgqa-kg"
SNAPSHOT_VERSION = 1


@dataclass
class WeightPolicy:
    """Edge weights are not part of the triple files; they come from here.

    ``default`` applies to every predicate without an explicit override.
    """

    default: float = 0.9
    per_predicate: dict[str, float] = field(default_factory=dict)

    def weight_for(self, predicate: str) -> float:
        w = self.per_predicate.get(predicate, self.default)
        if not 0.0 < w < 1.0:
            raise ValueError(f"edge weight must be in (0,1), got {w}")
        return w

    @classmethod
    def from_file(cls, path) -> "WeightPolicy":
        import yaml

        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
        return cls(
            default=float(raw.get("default", 0.9)),
            per_predicate={
                canonical_id(k): float(v)
                for k, v in (raw.get("predicates") or {}).items()
            },
        )


@dataclass
class Entity:
    id: str
    aliases: set[str] = field(default_factory=set)


@dataclass(frozen=True)
class RelationEdge:
    source: str
    predicate: str
    target: str
    weight: float

    def key(self):
        return (self.source, self.predicate, self.target)


class _Csr:
    """Undirected CSR adjacency over the directed edge list.

    Every edge contributes two directed slots; ``eid``/``forward`` map a slot
    back to the original edge and traversal orientation.
    """

    def __init__(self, ids, edges):
        self.ids = ids
        self.index = {e: i for i, e in enumerate(ids)}
        n = len(ids)
        deg = np.zeros(n + 1, dtype=np.int64)
        for e in edges:
            deg[self.index[e.source] + 1] += 1
            deg[self.index[e.target] + 1] += 1
        self.indptr = np.cumsum(deg)
        m2 = int(self.indptr[-1])
        self.nbr = np.zeros(m2, dtype=np.int64)
        self.wts = np.zeros(m2, dtype=np.float64)
        self.eid = np.zeros(m2, dtype=np.int64)
        self.forward = np.zeros(m2, dtype=np.bool_)
        cursor = self.indptr[:-1].copy()
        for k, e in enumerate(edges):
            s, t = self.index[e.source], self.index[e.target]
            p = cursor[s]
            self.nbr[p], self.wts[p], self.eid[p], self.forward[p] = t, e.weight, k, True
            cursor[s] += 1
            p = cursor[t]
            self.nbr[p], self.wts[p], self.eid[p], self.forward[p] = s, e.weight, k, False
            cursor[t] += 1


class KnowledgeGraph:
    """Entities + weighted predicate edges with adjacency and synonym indexes."""

    def __init__(self, weights: WeightPolicy | None = None):
        self.entities: dict[str, Entity] = {}
        self.edges: list[RelationEdge] = []
        self.out_index: dict[str, list[int]] = {}
        self.in_index: dict[str, list[int]] = {}
        self.synonym_map: dict[str, str] = {}
        self.weights = weights or WeightPolicy()
        self._edge_keys: dict[tuple, int] = {}
        self._frozen = False
        self._csr: _Csr | None = None

    # -- construction -------------------------------------------------

    def _check_mutable(self):
        if self._frozen:
            raise FrozenGraphError("graph is frozen; augmentation is closed")

    def add_entity(self, entity_id: str) -> Entity:
        self._check_mutable()
        eid = canonical_id(entity_id)
        if not eid:
            raise ValueError("entity id must be non-empty")
        ent = self.entities.get(eid)
        if ent is None:
            ent = Entity(eid)
            self.entities[eid] = ent
            self.out_index[eid] = []
            self.in_index[eid] = []
        return ent

    def add_edge(self, source, predicate, target, weight=None) -> bool:
        """Insert a triple, auto-creating endpoints.  Returns False when the
        (source, predicate, target) triple already exists."""
        self._check_mutable()
        s = self.add_entity(source).id
        p = canonical_id(predicate)
        t = self.add_entity(target).id
        key = (s, p, t)
        if key in self._edge_keys:
            return False
        w = self.weights.weight_for(p) if weight is None else float(weight)
        if not 0.0 < w < 1.0:
            raise ValueError(f"edge weight must be in (0,1), got {w}")
        idx = len(self.edges)
        self.edges.append(RelationEdge(s, p, t, w))
        self._edge_keys[key] = idx
        self.out_index[s].append(idx)
        self.in_index[t].append(idx)
        self._csr = None
        return True

    def _rebuild_indexes(self):
        self.out_index = {e: [] for e in self.entities}
        self.in_index = {e: [] for e in self.entities}
        self._edge_keys = {}
        for idx, e in enumerate(self.edges):
            self.out_index[e.source].append(idx)
            self.in_index[e.target].append(idx)
            self._edge_keys[e.key()] = idx
        self._csr = None

    def freeze(self):
        """End the build/augment phase; the graph becomes immutable."""
        self._frozen = True
        self._ensure_csr()

    # -- basic queries ------------------------------------------------

    def __contains__(self, entity_id):
        return entity_id in self.entities

    def has_edge(self, source, predicate, target) -> bool:
        return (canonical_id(source), canonical_id(predicate),
                canonical_id(target)) in self._edge_keys

    def edge_between(self, source, predicate, target) -> RelationEdge | None:
        idx = self._edge_keys.get(
            (canonical_id(source), canonical_id(predicate), canonical_id(target)))
        return None if idx is None else self.edges[idx]

    def neighbors(self, entity_id):
        """Yield (edge, other_id, forward) over both edge directions."""
        for idx in self.out_index.get(entity_id, ()):
            e = self.edges[idx]
            yield e, e.target, True
        for idx in self.in_index.get(entity_id, ()):
            e = self.edges[idx]
            yield e, e.source, False

    def stats(self):
        return {"entities": len(self.entities), "edges": len(self.edges)}

    # -- is_a hierarchy -----------------------------------------------

    def _isa_closure(self, entity_id, index, endpoint):
        if entity_id not in self.entities:
            raise UnknownEntityError(entity_id)
        seen = []
        visited = {entity_id}
        queue = deque([entity_id])
        while queue:
            current = queue.popleft()
            layer = []
            for idx in index[current]:
                e = self.edges[idx]
                if e.predicate != ISA:
                    continue
                other = endpoint(e)
                if other not in visited:
                    visited.add(other)
                    layer.append(other)
            for other in sorted(layer):
                seen.append(other)
                queue.append(other)
        return seen

    def superclasses(self, entity_id) -> list[str]:
        """Transitive closure over outgoing ``is_a`` edges, excluding self;
        breadth-first order with ties broken by id."""
        return self._isa_closure(entity_id, self.out_index, lambda e: e.target)

    def subclasses(self, entity_id) -> list[str]:
        """Mirror of :meth:`superclasses` over incoming ``is_a`` edges."""
        return self._isa_closure(entity_id, self.in_index, lambda e: e.source)

    def check_isa_acyclic(self):
        """Raise :class:`CycleError` (naming the cycle) unless the ``is_a``
        subgraph is a DAG.  Iterative coloring DFS."""
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {e: WHITE for e in self.entities}
        parent = {}
        isa_children = {
            e: sorted(self.edges[i].target
                      for i in self.out_index[e]
                      if self.edges[i].predicate == ISA)
            for e in self.entities
        }
        for start in self.entities:
            if color[start] != WHITE:
                continue
            stack = [(start, iter(isa_children[start]))]
            color[start] = GRAY
            while stack:
                node, children = stack[-1]
                advanced = False
                for child in children:
                    if color[child] == GRAY:
                        cycle = [child, node]
                        cur = node
                        while cur != child:
                            cur = parent[cur]
                            cycle.append(cur)
                        cycle.reverse()
                        raise CycleError(cycle)
                    if color[child] == WHITE:
                        color[child] = GRAY
                        parent[child] = node
                        stack.append((child, iter(isa_children[child])))
                        advanced = True
                        break
                if not advanced:
                    color[node] = BLACK
                    stack.pop()

    # -- entity linking -----------------------------------------------

    def resolve_id(self, candidate: str) -> str | None:
        if candidate in self.entities:
            return candidate
        if candidate in self.synonym_map:
            return self.synonym_map[candidate]
        return None

    def link_entity(self, phrase) -> str:
        """Resolve a word sequence to an entity id.

        ``phrase`` is either a plain string or a sequence of
        (form, lemma, pos) triples.  Resolution order: exact canonical id,
        synonym map, lemma-canonical form, plural-stripped variants.
        """
        if isinstance(phrase, str):
            forms = phrase.replace("_", " ").split()
            lemmas = pos_tags = None
        else:
            forms = [t[0] for t in phrase]
            lemmas = [t[1] for t in phrase]
            pos_tags = [t[2] for t in phrase]
        if not forms:
            raise LinkFailureError("")
        surface = canonical_id(" ".join(forms))
        candidates = [surface]
        if lemmas is not None:
            lemma_form = canonical_phrase(forms, lemmas, pos_tags)
            if lemma_form not in candidates:
                candidates.append(lemma_form)
        for cand in list(candidates):
            for variant in singular_variants(cand):
                if variant not in candidates:
                    candidates.append(variant)
        for cand in candidates:
            hit = self.resolve_id(cand)
            if hit is not None:
                return hit
        raise LinkFailureError(surface)

    # -- persistence ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "weights": {
                "default": self.weights.default,
                "predicates": dict(sorted(self.weights.per_predicate.items())),
            },
            "entities": [
                {"id": e.id, "aliases": sorted(e.aliases)}
                for e in sorted(self.entities.values(), key=lambda x: x.id)
            ],
            "edges": [[e.source, e.predicate, e.target, e.weight]
                      for e in self.edges],
            "synonyms": dict(sorted(self.synonym_map.items())),
        }

    def save(self, path):
        tmp = f"{path}.tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1)
        os.replace(tmp, path)

    @classmethod
    def from_dict(cls, raw: dict) -> "KnowledgeGraph":
        if not isinstance(raw, dict) or raw.get("format") != SNAPSHOT_FORMAT:
            raise SnapshotFormatError("not a kgqa knowledge-graph snapshot")
        if raw.get("version") != SNAPSHOT_VERSION:
            raise SnapshotFormatError(
                f"unsupported snapshot version: {raw.get('version')!r}")
        weights = raw.get("weights", {})
        kg = cls(WeightPolicy(weights.get("default", 0.9),
                              dict(weights.get("predicates", {}))))
        try:
            for ent in raw["entities"]:
                kg.add_entity(ent["id"]).aliases.update(ent.get("aliases", ()))
            for s, p, t, w in raw["edges"]:
                kg.add_edge(s, p, t, weight=w)
            kg.synonym_map.update(raw.get("synonyms", {}))
        except (KeyError, TypeError, ValueError) as exc:
            raise SnapshotFormatError(f"malformed snapshot: {exc}") from exc
        return kg

    @classmethod
    def load(cls, path) -> "KnowledgeGraph":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SnapshotFormatError(f"cannot read snapshot: {exc}") from exc
        return cls.from_dict(raw)

    # -- numeric adjacency for the activation kernels ------------------

    def _ensure_csr(self) -> _Csr:
        if self._csr is None:
            self._csr = _Csr(sorted(self.entities), self.edges)
        return self._csr


def load_triples(source, weights: WeightPolicy | None = None) -> KnowledgeGraph:
    """Build a graph from a 3-column tab-separated triple stream.

    ``source`` is a path or an iterable of lines.  ``#`` comment lines and
    blank lines are ignored; duplicate triples collapse to one edge.
    """
    kg = KnowledgeGraph(weights)
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            _read_triples(kg, fh)
    else:
        _read_triples(kg, source)
    kg.check_isa_acyclic()
    return kg


def _read_triples(kg, lines):
    for line_no, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise TripleParseError(
                line_no, f"expected 3 tab-separated fields, got {len(fields)}")
        s, p, t = (f.strip() for f in fields)
        if not s or not p or not t:
            raise TripleParseError(line_no, "empty field in triple")
        kg.add_edge(s, p, t)


def render_phrase(entity_id: str) -> str:
    """Entity id rendered back to a space-separated phrase."""
    return " ".join(tokens_of(entity_id))
