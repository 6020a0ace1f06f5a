"""Knowledge-graph augmentation: synonym merging, head-rule hierarchy
derivation, equivalence expansion, and entity-type assertions.

All operations are idempotent and keep the ``is_a`` subgraph acyclic.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field

from ..canonical import canonical_id, tokens_of
from ..errors import TripleParseError, ValidationError
from .graph import ISA, KnowledgeGraph, RelationEdge

logger = logging.getLogger(__name__)

DEFAULT_TYPE_VOCABULARY = frozenset({
    "person", "organization", "location", "date", "time",
    "money", "percent", "misc",
})


def apply_synonyms(kg: KnowledgeGraph, pairs) -> KnowledgeGraph:
    """Merge alias entities into their canonical entity and record the
    mapping.  ``pairs`` is an iterable of (alias, canonical) names."""
    for alias, canonical in pairs:
        alias_id = canonical_id(alias)
        target_id = canonical_id(canonical)
        target_id = kg.synonym_map.get(target_id, target_id)
        if alias_id == target_id:
            logger.warning("synonym pair maps %r to itself; skipped", alias_id)
            continue
        target = kg.add_entity(target_id)
        target.aliases.add(alias_id)
        if alias_id in kg.entities:
            _merge_entity(kg, alias_id, target_id)
        kg.synonym_map[alias_id] = target_id
        # keep the map flat: anything that pointed at the alias now points
        # at the canonical id
        for k, v in list(kg.synonym_map.items()):
            if v == alias_id:
                kg.synonym_map[k] = target_id
                target.aliases.add(k)
    kg.check_isa_acyclic()
    return kg


def _merge_entity(kg: KnowledgeGraph, alias_id: str, target_id: str):
    target = kg.entities[target_id]
    target.aliases.update(kg.entities[alias_id].aliases)
    target.aliases.discard(target_id)
    renamed: list[RelationEdge] = []
    seen = set()
    for e in kg.edges:
        s = target_id if e.source == alias_id else e.source
        t = target_id if e.target == alias_id else e.target
        key = (s, e.predicate, t)
        if key in seen:
            continue
        seen.add(key)
        renamed.append(RelationEdge(s, e.predicate, t, e.weight))
    kg.edges = renamed
    del kg.entities[alias_id]
    kg._rebuild_indexes()


def derive_head_hierarchy(kg: KnowledgeGraph) -> int:
    """Add (entity2, is_a, entity1) whenever entity1's token sequence is a
    strict suffix of entity2's.  Returns the number of edges added."""
    by_tokens = {tuple(tokens_of(e)): e for e in kg.entities}
    added = 0
    for entity_id in list(kg.entities):
        toks = tokens_of(entity_id)
        for cut in range(1, len(toks)):
            head = by_tokens.get(tuple(toks[cut:]))
            if head is None or head == entity_id:
                continue
            if not kg.has_edge(entity_id, ISA, head):
                kg.add_edge(entity_id, ISA, head)
                added += 1
    kg.check_isa_acyclic()
    return added


@dataclass(frozen=True)
class EquivalenceRule:
    """When an entity holds (entity, trigger_predicate, trigger_object),
    derive one (entity, derived_predicate, obj) edge per derived object."""

    trigger_predicate: str
    trigger_object: str
    derived_predicate: str
    derived_objects: tuple[str, ...] = field(default_factory=tuple)


def load_equivalence_rules(path) -> list[EquivalenceRule]:
    """Rule config schema (YAML)::

        rules:
          - when: {predicate: is, object: cross_platform}
            add:  {predicate: run_on, objects: [microsoft_windows, linux, macos]}
    """
    import yaml

    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    rules = []
    for i, entry in enumerate(raw.get("rules", [])):
        try:
            when, add = entry["when"], entry["add"]
            rules.append(EquivalenceRule(
                canonical_id(when["predicate"]),
                canonical_id(when["object"]),
                canonical_id(add["predicate"]),
                tuple(canonical_id(o) for o in add["objects"]),
            ))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad equivalence rule #{i + 1}: {exc}") from exc
    return rules


def expand_equivalence(kg: KnowledgeGraph, rules) -> int:
    added = 0
    for rule in rules:
        holders = [
            e.source for e in kg.edges
            if e.predicate == rule.trigger_predicate
            and e.target == rule.trigger_object
        ]
        for holder in holders:
            for obj in rule.derived_objects:
                if kg.add_edge(holder, rule.derived_predicate, obj):
                    added += 1
    kg.check_isa_acyclic()
    return added


def apply_entity_types(kg: KnowledgeGraph, assertions,
                       vocabulary=DEFAULT_TYPE_VOCABULARY) -> int:
    """Ingest (entity, type) assertions as (entity, is_a, type) edges."""
    added = 0
    for entity, type_name in assertions:
        type_id = canonical_id(type_name)
        if type_id not in vocabulary:
            raise ValidationError(
                f"unknown entity type {type_id!r}; expected one of "
                + ", ".join(sorted(vocabulary)))
        if kg.add_edge(entity, ISA, type_id):
            added += 1
    kg.check_isa_acyclic()
    return added


def read_pair_file(source):
    """Yield (left, right) pairs from a 2-column tab-separated file; used for
    both synonym and entity-type inputs."""
    own = isinstance(source, (str, os.PathLike))
    fh = open(source, "r", encoding="utf-8") if own else source
    try:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise TripleParseError(
                    line_no, f"expected 2 tab-separated fields, got {len(fields)}")
            yield fields[0].strip(), fields[1].strip()
    finally:
        if own:
            fh.close()
