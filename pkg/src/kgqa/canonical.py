"""Canonical naming rules for entities, predicates and query phrases.

Entity ids are lowercase with tokens joined by underscores.  Predicates keep
their full surface phrase in the same shape (modals and all), deliberately
without lemmatization, so relation names such as ``can_be_accessed_through``
survive intact.
"""

import re

_WS = re.compile(r"\s+")


def canonical_id(text: str) -> str:
    """Normalize an entity or predicate name: lowercase, spaces -> ``_``."""
    return _WS.sub("_", text.strip().lower())


def tokens_of(identifier: str) -> list[str]:
    return [t for t in identifier.split("_") if t]


def is_noun_tag(pos: str) -> bool:
    return pos.startswith("NN")


def canonical_phrase(forms, lemmas=None, pos_tags=None) -> str:
    """Canonical id of a word sequence, lemmatizing noun tokens when
    lemmas/POS are available (e.g. ``graph databases`` -> ``graph_database``).
    """
    parts = []
    for i, form in enumerate(forms):
        word = form
        if lemmas is not None and pos_tags is not None and lemmas[i]:
            if is_noun_tag(pos_tags[i]):
                word = lemmas[i]
        parts.append(word.strip().lower())
    return canonical_id(" ".join(parts))


def naive_singular(token: str) -> str:
    """Cheap plural stripper used as a last-resort lookup variant when no
    lemma information is available."""
    if len(token) > 3 and token.endswith("ies"):
        return token[:-3] + "y"
    for suffix in ("ches", "shes", "sses", "xes", "zes"):
        if len(token) > len(suffix) and token.endswith(suffix):
            return token[: -2]
    if len(token) > 1 and token.endswith("s") and not token.endswith("ss"):
        return token[:-1]
    return token


def singular_variants(identifier: str) -> list[str]:
    """Lookup variants of a canonical id with plural endings stripped."""
    toks = tokens_of(identifier)
    if not toks:
        return []
    variants = []
    last = naive_singular(toks[-1])
    if last != toks[-1]:
        variants.append("_".join(toks[:-1] + [last]))
    all_singular = "_".join(naive_singular(t) for t in toks)
    if all_singular != identifier and all_singular not in variants:
        variants.append(all_singular)
    return variants
