from .graph import (
    ISA,
    Entity,
    KnowledgeGraph,
    RelationEdge,
    WeightPolicy,
    load_triples,
    render_phrase,
)
from .augment import (
    DEFAULT_TYPE_VOCABULARY,
    EquivalenceRule,
    apply_entity_types,
    apply_synonyms,
    derive_head_hierarchy,
    expand_equivalence,
    load_equivalence_rules,
    read_pair_file,
)

__all__ = [
    "ISA",
    "Entity",
    "KnowledgeGraph",
    "RelationEdge",
    "WeightPolicy",
    "load_triples",
    "render_phrase",
    "DEFAULT_TYPE_VOCABULARY",
    "EquivalenceRule",
    "apply_entity_types",
    "apply_synonyms",
    "derive_head_hierarchy",
    "expand_equivalence",
    "load_equivalence_rules",
    "read_pair_file",
]
