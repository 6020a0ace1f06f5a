"""Access to the packaged desk-scale fixture data: a small software
engineering knowledge graph, embeddings, a frozen annotated query, and the
default decision model."""

from __future__ import annotations

from importlib import resources

from .kg import (
    WeightPolicy,
    apply_entity_types,
    apply_synonyms,
    derive_head_hierarchy,
    expand_equivalence,
    load_equivalence_rules,
    load_triples,
    read_pair_file,
)

SAMPLE_QUERY_TEXT = ("Which graph databases support Python and can be accessed "
                     "through the RDF query languages that support subgraph "
                     "extraction?")


def data_path(name: str):
    return resources.files("kgqa.data") / name


def fixture_weights() -> WeightPolicy:
    return WeightPolicy.from_file(data_path("fixture_weights.yaml"))


def build_fixture_kg(augment: bool = True):
    """The fixture graph after the full augmentation pipeline: synonyms,
    head-rule hierarchy, equivalence expansion, entity types."""
    kg = load_triples(data_path("fixture_kg.tsv"), fixture_weights())
    if augment:
        with open(data_path("fixture_synonyms.tsv"), encoding="utf-8") as fh:
            apply_synonyms(kg, read_pair_file(fh))
        derive_head_hierarchy(kg)
        expand_equivalence(kg, load_equivalence_rules(
            data_path("fixture_equivalence.yaml")))
        with open(data_path("fixture_types.tsv"), encoding="utf-8") as fh:
            apply_entity_types(kg, read_pair_file(fh))
    return kg


def fixture_embeddings():
    from .semantics import load_embeddings

    return load_embeddings(data_path("fixture_embeddings.txt"))


def sample_query_conllu() -> str:
    return data_path("sample_query.conllu").read_text(encoding="utf-8")


def sample_query():
    from .annotation import parse_annotated

    return parse_annotated(sample_query_conllu())


def default_model():
    from .decision.models import load_model

    return load_model(data_path("default_model.json"))
