"""Build multi-layer constraint query graphs from chunked, dependency-parsed
questions.

A constraint quad is (category, predicate, property, layer); higher layers
are outer constraints and are solved earlier.  Five sentence shapes are
recognized:

1. sentence-initial WHNP — its embedded NP is the category of the direct
   answers; subject/object dependency pairs anchored at a WHNP word and a
   VP word each yield a layer-1 quad
2. chaining — when the property phrase of an extracted quad itself acts as
   the subject of another VP/NP pair, a one-layer-deeper quad is added;
   iterated to fixpoint
3. sentence-initial WHVP — ``who``/``what`` + non-copula verb map to the
   PERSON/ANYENTITY category wildcards, ``when`` to DATE
4. wh + copula ("What is X") — a definition query producing the two
   wildcard quads around X
5. leading literal ``List`` + NP — category-only listing query
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .annotation import (
    OBJECT_DEPRELS,
    SUBJECT_DEPRELS,
    AnnotatedQuery,
    PairPattern,
    deprel_matches,
    find_dependency_pairs,
)
from .chunking import Chunk, ChunkViews
from .errors import UnsupportedQueryError, ValidationError

PERSON = "PERSON"
DATE = "DATE"
ANYENTITY = "ANYENTITY"
ANYRELATION = "ANYRELATION"

CATEGORY_WILDCARDS = {PERSON, DATE, ANYENTITY}
_PUNCT_TAGS = {".", ",", ":", "``", "''", "-LRB-", "-RRB-", "HYPH", "SYM"}


def is_wildcard(phrase: str) -> bool:
    return phrase in CATEGORY_WILDCARDS or phrase == ANYRELATION


@dataclass(frozen=True)
class ConstraintQuad:
    category: str
    predicate: str
    property: str
    layer: int


@dataclass
class QueryGraph:
    quads: list[ConstraintQuad] = field(default_factory=list)
    patterns: list[int] = field(default_factory=list)
    # phrase -> (form, lemma, pos) token triples, kept for entity linking
    phrase_tokens: dict[str, tuple] = field(default_factory=dict)

    def pattern_of(self, quad: ConstraintQuad) -> int:
        return self.patterns[self.quads.index(quad)]

    def validate(self):
        if not self.quads:
            raise ValidationError("query graph has no quads")
        layers = {q.layer for q in self.quads}
        if layers != set(range(1, max(layers) + 1)):
            raise ValidationError(f"layers not contiguous from 1: {sorted(layers)}")
        for q in self.quads:
            if q.layer < 1:
                raise ValidationError("layer must be >= 1")
            if q.layer > 1 and not any(
                    p.layer == q.layer - 1 and p.property == q.category
                    for p in self.quads):
                raise ValidationError(
                    f"quad {q} is not chained to a layer-{q.layer - 1} property")
        return self

    def to_json(self) -> str:
        return json.dumps({
            "quads": [
                {"category": q.category, "predicate": q.predicate,
                 "property": q.property, "layer": q.layer, "pattern": p}
                for q, p in zip(self.quads, self.patterns)
            ]
        }, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "QueryGraph":
        try:
            raw = json.loads(text)
            qg = cls()
            for rec in raw["quads"]:
                qg.quads.append(ConstraintQuad(
                    rec["category"], rec["predicate"],
                    rec["property"], int(rec["layer"])))
                qg.patterns.append(int(rec.get("pattern", 0)))
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ValidationError(f"malformed query-graph document: {exc}") from exc
        return qg.validate()


def _render(tokens) -> str:
    """Quad phrases join token forms with underscores, case preserved;
    canonicalization happens only at entity-linking time."""
    return "_".join(t.form for t in tokens)


class _Builder:
    def __init__(self, q: AnnotatedQuery, chunks: list[Chunk]):
        self.q = q
        self.chunks = chunks
        self.views = ChunkViews(chunks)
        self.vps = self.views.all("VP")
        self.nps = self.views.all("NP")
        self.vp_tokens = frozenset(i for c in self.vps for i in c.token_indexes)
        self.np_tokens = frozenset(i for c in self.nps for i in c.token_indexes)
        self.qg = QueryGraph()
        self._consumed: set[tuple[int, int, int]] = set()
        self._chain_queue: list[tuple[Chunk, str, int]] = []

    # -- helpers -------------------------------------------------------

    def _np_of(self, token_index: int) -> Chunk:
        return next(c for c in self.nps if token_index in c.token_indexes)

    def _vp_of(self, token_index: int) -> Chunk:
        return next(c for c in self.vps if token_index in c.token_indexes)

    def _emit(self, quad: ConstraintQuad, pattern: int,
              phrase_chunks: dict[str, tuple]):
        if quad in self.qg.quads:
            return
        self.qg.quads.append(quad)
        self.qg.patterns.append(pattern)
        for phrase, tokens in phrase_chunks.items():
            self.qg.phrase_tokens.setdefault(
                phrase, tuple(t.triple() for t in tokens))

    def _subject_object_pairs(self, subject_tokens: frozenset[int]):
        """All (subj_arc, obj_arc) pairs for the four subject/object deprel
        templates, anchored at ``subject_tokens``, each arc pair used once."""
        for subj_rel in SUBJECT_DEPRELS:
            for obj_rel in OBJECT_DEPRELS:
                pattern = PairPattern(
                    subj_rel, obj_rel,
                    governor_tokens=self.vp_tokens,
                    first_dependent_tokens=subject_tokens,
                    second_dependent_tokens=self.np_tokens,
                )
                for subj_arc, obj_arc in find_dependency_pairs(self.q, pattern):
                    key = (subj_arc.governor, subj_arc.dependent, obj_arc.dependent)
                    if key in self._consumed:
                        continue
                    self._consumed.add(key)
                    yield subj_arc, obj_arc

    def _quads_from_anchor(self, category: str, anchor_tokens: frozenset[int],
                           layer: int, pattern: int,
                           category_tokens=None) -> int:
        emitted = 0
        for subj_arc, obj_arc in self._subject_object_pairs(anchor_tokens):
            vp = self._vp_of(subj_arc.governor)
            np = self._np_of(obj_arc.dependent)
            prop_phrase = _render(np.content_tokens)
            quad = ConstraintQuad(category, _render(vp.tokens), prop_phrase, layer)
            phrases = {quad.predicate: vp.tokens, prop_phrase: np.content_tokens}
            if category_tokens is not None:
                phrases[category] = category_tokens
            self._emit(quad, pattern, phrases)
            self._chain_queue.append((np, prop_phrase, layer))
            emitted += 1
        return emitted

    # -- patterns ------------------------------------------------------

    def pattern_1(self, whnp: Chunk):
        inner = whnp.inner_tokens
        category_tokens = whnp.content_tokens
        category = _render(category_tokens)
        emitted = self._quads_from_anchor(
            category, frozenset(t.index for t in inner), 1, 1,
            category_tokens=category_tokens)
        if not emitted:
            raise UnsupportedQueryError(
                "no subject/object dependency pair anchors the WHNP category",
                self.chunks)

    def pattern_2_fixpoint(self):
        while self._chain_queue:
            np, phrase, layer = self._chain_queue.pop(0)
            self._quads_from_anchor(
                phrase, frozenset(t.index for t in np.content_tokens),
                layer + 1, 2, category_tokens=np.content_tokens)

    def pattern_3(self, whvp: Chunk, category: str):
        inner = whvp.inner_tokens
        anchor = frozenset(t.index for t in inner)
        emitted = 0
        seen = set()
        for obj_rel in OBJECT_DEPRELS:
            for arc in self.q.arcs():
                if not deprel_matches(arc.deprel, obj_rel):
                    continue
                if arc.governor not in anchor or arc.dependent not in self.np_tokens:
                    continue
                if (arc.governor, arc.dependent) in seen:
                    continue
                seen.add((arc.governor, arc.dependent))
                np = self._np_of(arc.dependent)
                prop_phrase = _render(np.content_tokens)
                quad = ConstraintQuad(category, _render(inner), prop_phrase, 1)
                self._emit(quad, 3, {quad.predicate: inner,
                                     prop_phrase: np.content_tokens})
                self._chain_queue.append((np, prop_phrase, 1))
                emitted += 1
        if not emitted:
            raise UnsupportedQueryError(
                f"wh-verb query with no object constraint for category {category}",
                self.chunks)

    def pattern_4(self, whvp: Chunk):
        following = [c for c in self.nps if c.start > whvp.end]
        if not following:
            raise UnsupportedQueryError(
                "definition query without a subject NP", self.chunks)
        x = following[0]
        phrase = _render(x.content_tokens)
        self._emit(ConstraintQuad(ANYENTITY, ANYRELATION, phrase, 1), 4,
                   {phrase: x.content_tokens})
        self._emit(ConstraintQuad(phrase, ANYRELATION, ANYENTITY, 1), 4,
                   {phrase: x.content_tokens})

    def pattern_5(self):
        candidates = [c for c in self.nps if c.start == 2]
        if not candidates:
            raise UnsupportedQueryError(
                "'List' query must be followed by a noun phrase", self.chunks)
        np = candidates[0]
        trailing = [t for t in self.q.tokens[np.end:] if t.pos not in _PUNCT_TAGS]
        if trailing:
            raise UnsupportedQueryError(
                "'List' query must be followed by only a noun phrase", self.chunks)
        phrase = _render(np.content_tokens)
        self._emit(ConstraintQuad(phrase, ANYRELATION, ANYENTITY, 1), 5,
                   {phrase: np.content_tokens})

    # -- driver ----------------------------------------------------------

    def build(self) -> QueryGraph:
        whnps = self.views.all("WHNP")
        whvps = self.views.all("WHVP")
        if whnps and whvps:
            # the extraction patterns never cover this shape; refusing beats
            # guessing
            raise UnsupportedQueryError(
                "query mixes WHNP and WHVP interrogatives", self.chunks)
        if whnps and whnps[0].start == 1:
            if len(whnps) != 1:
                raise UnsupportedQueryError(
                    "multiple WHNP chunks are not supported", self.chunks)
            self.pattern_1(whnps[0])
            self.pattern_2_fixpoint()
        elif whvps and whvps[0].start == 1:
            whvp = whvps[0]
            wh = whvp.tokens[0].form.lower()
            inner = whvp.inner_tokens
            first_verb = next((t for t in inner if t.pos.startswith("VB")), None)
            copula = first_verb is not None and first_verb.lemma.lower() == "be"
            if wh == "when":
                self.pattern_3(whvp, DATE)
            elif copula:
                self.pattern_4(whvp)
            elif wh == "who":
                self.pattern_3(whvp, PERSON)
            elif wh == "what":
                self.pattern_3(whvp, ANYENTITY)
            else:
                raise UnsupportedQueryError(
                    f"unsupported interrogative {wh!r}", self.chunks)
            self.pattern_2_fixpoint()
        elif (self.q.tokens[0].form.lower() == "list"
                and not whnps and not whvps):
            self.pattern_5()
        else:
            raise UnsupportedQueryError(
                "no extraction pattern applies", self.chunks)
        return self.qg.validate()


def build_query_graph(q: AnnotatedQuery, chunks: list[Chunk]) -> QueryGraph:
    return _Builder(q, chunks).build()


def solving_order(qg: QueryGraph, seed: int | None = None) -> list[ConstraintQuad]:
    """Outer layers first.  Within a layer, document order unless an explicit
    seed requests a reproducible random permutation."""
    by_layer: dict[int, list[ConstraintQuad]] = {}
    for quad in qg.quads:
        by_layer.setdefault(quad.layer, []).append(quad)
    rng = random.Random(seed) if seed is not None else None
    ordered = []
    for layer in sorted(by_layer, reverse=True):
        group = list(by_layer[layer])
        if rng is not None:
            rng.shuffle(group)
        ordered.extend(group)
    return ordered
