"""Linguistically annotated queries: tokens, POS tags and dependency arcs.

Annotation itself (tokenizing, tagging, parsing, lemmatizing) is delegated
to an external tool; this module ingests its output from a tab-separated
CoNLL-style file or from a remote service and evaluates dependency-pair
patterns over the result.

The file format carries one head per token (a tree).  Subject arcs that
annotators only emit in their *enhanced* dependency graphs — a subject
shared across a verb conjunction, or a relative pronoun standing in for the
noun it modifies — are derived here from the tree, so patterns that need
``nsubjpass(accessed, databases)`` style arcs still match.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConllParseError

SUBJECT_DEPRELS = ("nsubj", "nsubjpass")
OBJECT_DEPRELS = ("dobj", "nmod")
_RELATIVE_PRONOUN_TAGS = {"WDT", "WP"}
_PROPAGATED_DEPRELS = {"nsubj", "nsubjpass", "dobj"}


@dataclass(frozen=True)
class Token:
    index: int          # 1-based position
    form: str
    lemma: str
    pos: str            # Penn Treebank tag
    head: int           # governor index, 0 = root
    deprel: str

    def triple(self):
        return (self.form, self.lemma, self.pos)


@dataclass(frozen=True)
class DependencyArc:
    deprel: str
    governor: int
    dependent: int
    derived: bool = False


def deprel_matches(label: str, pattern: str) -> bool:
    """Subtyped labels match their bare form: ``nmod:through`` ~ ``nmod``."""
    return label == pattern or label.startswith(pattern + ":")


class AnnotatedQuery:
    def __init__(self, raw_text: str, tokens: list[Token]):
        self.raw_text = raw_text
        self.tokens = list(tokens)
        self._validate()
        self._arcs: list[DependencyArc] | None = None

    def _validate(self):
        if not self.tokens:
            raise ConllParseError(0, "no sentence")
        n = len(self.tokens)
        roots = 0
        for pos, tok in enumerate(self.tokens, start=1):
            if tok.index != pos:
                raise ConllParseError(
                    pos, f"token indexes must be contiguous from 1, got {tok.index}")
            if not 0 <= tok.head <= n:
                raise ConllParseError(pos, f"head {tok.head} out of range [0, {n}]")
            if not tok.pos:
                raise ConllParseError(pos, "empty POS tag")
            if tok.head == 0:
                roots += 1
        if roots != 1:
            raise ConllParseError(0, f"expected exactly one root, found {roots}")
        # every token must reach the root through head pointers
        for tok in self.tokens:
            seen = set()
            cur = tok.index
            while cur != 0:
                if cur in seen:
                    raise ConllParseError(
                        tok.index, "dependency graph is not a tree (head cycle)")
                seen.add(cur)
                cur = self.tokens[cur - 1].head

    def __len__(self):
        return len(self.tokens)

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    @property
    def root(self) -> Token:
        return next(t for t in self.tokens if t.head == 0)

    def tree_arcs(self) -> list[DependencyArc]:
        return [DependencyArc(t.deprel, t.head, t.index)
                for t in self.tokens if t.head != 0]

    def arcs(self, enhanced: bool = True) -> list[DependencyArc]:
        """Tree arcs plus, when ``enhanced``, subject/object arcs derived
        from conjunctions and relative clauses."""
        if not enhanced:
            return self.tree_arcs()
        if self._arcs is None:
            self._arcs = self.tree_arcs() + derive_enhanced_arcs(self)
        return list(self._arcs)

    def children(self, governor: int) -> list[Token]:
        return [t for t in self.tokens if t.head == governor]

    def is_passive(self, verb_index: int) -> bool:
        return any(deprel_matches(t.deprel, "auxpass") or t.deprel == "aux:pass"
                   for t in self.children(verb_index))

    def to_conllu(self) -> str:
        lines = [f"# text = {self.raw_text}"] if self.raw_text else []
        for t in self.tokens:
            lines.append("\t".join(
                [str(t.index), t.form, t.lemma, t.pos, str(t.head), t.deprel]))
        return "\n".join(lines) + "\n"


def derive_enhanced_arcs(q: AnnotatedQuery) -> list[DependencyArc]:
    derived: list[DependencyArc] = []
    seen = {(a.deprel, a.governor, a.dependent) for a in q.tree_arcs()}

    def add(deprel, governor, dependent):
        key = (deprel, governor, dependent)
        if key not in seen:
            seen.add(key)
            derived.append(DependencyArc(deprel, governor, dependent, derived=True))

    # subject propagation across verb conjunction:
    # conj(support, accessed) + nsubj(support, databases)
    #   -> nsubj|nsubjpass(accessed, databases)
    for tok in q.tokens:
        if not deprel_matches(tok.deprel, "conj"):
            continue
        conjunct = tok.index
        governor = tok.head
        has_own_subject = any(
            any(deprel_matches(c.deprel, s) for s in SUBJECT_DEPRELS)
            for c in q.children(conjunct))
        if has_own_subject:
            continue
        for c in q.children(governor):
            if any(deprel_matches(c.deprel, s) for s in SUBJECT_DEPRELS):
                deprel = "nsubjpass" if q.is_passive(conjunct) else "nsubj"
                add(deprel, conjunct, c.index)

    # relative-pronoun resolution:
    # acl:relcl(languages, support) + nsubj(support, that/WDT)
    #   -> nsubj(support, languages)
    for tok in q.tokens:
        if not deprel_matches(tok.deprel, "acl"):
            continue
        verb, noun = tok.index, tok.head
        for c in q.children(verb):
            base = c.deprel.split(":")[0]
            if base in _PROPAGATED_DEPRELS and c.pos in _RELATIVE_PRONOUN_TAGS:
                add(c.deprel, verb, noun)
    return derived


def parse_annotated(text: str) -> AnnotatedQuery:
    """Parse a single-sentence CoNLL-style block.

    Accepts the 6-column subset (ID FORM LEMMA POS HEAD DEPREL) or full
    10-column CoNLL-U rows, in which case XPOS is used as the POS tag and
    the UPOS/FEATS/DEPS/MISC columns are ignored.
    """
    tokens: list[Token] = []
    raw_text = ""
    seen_indexes = set()
    in_sentence = False
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("#"):
            if stripped.startswith("# text ="):
                raw_text = stripped.split("=", 1)[1].strip()
            continue
        if not stripped:
            if in_sentence:
                # a second non-empty block means multi-sentence input
                rest = text.splitlines()[line_no:]
                if any(r.strip() and not r.strip().startswith("#") for r in rest):
                    raise ConllParseError(
                        line_no, "multiple sentences; only one is accepted")
            continue
        in_sentence = True
        cols = line.rstrip("\n").split("\t")
        if len(cols) == 10:
            idx_s, form, lemma, _upos, pos, _f, head_s, deprel = cols[:8]
        elif len(cols) == 6:
            idx_s, form, lemma, pos, head_s, deprel = cols
        else:
            raise ConllParseError(
                line_no, f"expected 6 or 10 tab-separated columns, got {len(cols)}")
        if "-" in idx_s or "." in idx_s:
            raise ConllParseError(
                line_no, f"multiword/empty-node line not supported: {idx_s!r}")
        try:
            idx, head = int(idx_s), int(head_s)
        except ValueError as exc:
            raise ConllParseError(line_no, f"non-integer ID or HEAD: {exc}") from exc
        if idx in seen_indexes:
            raise ConllParseError(line_no, f"duplicate token index {idx}")
        seen_indexes.add(idx)
        tokens.append(Token(idx, form, lemma, pos, head, deprel))
    if not tokens:
        raise ConllParseError(0, "no sentence")
    tokens.sort(key=lambda t: t.index)
    if not raw_text:
        raw_text = " ".join(t.form for t in tokens)
    return AnnotatedQuery(raw_text, tokens)


@dataclass(frozen=True)
class PairPattern:
    """Two deprels sharing a governor, with optional positional constraints
    restricting which token set each participant must fall in."""

    first: str
    second: str
    governor_tokens: frozenset[int] | None = None
    first_dependent_tokens: frozenset[int] | None = None
    second_dependent_tokens: frozenset[int] | None = None


def find_dependency_pairs(q: AnnotatedQuery, pattern: PairPattern,
                          enhanced: bool = True):
    """All (arc1, arc2) pairs with a common governor matching the pattern,
    in document order.  Subtyped deprels match their bare form."""

    def allowed(tokens, value):
        return tokens is None or value in tokens

    arcs = q.arcs(enhanced=enhanced)
    firsts = [a for a in arcs if deprel_matches(a.deprel, pattern.first)
              and allowed(pattern.first_dependent_tokens, a.dependent)
              and allowed(pattern.governor_tokens, a.governor)]
    seconds = [a for a in arcs if deprel_matches(a.deprel, pattern.second)
               and allowed(pattern.second_dependent_tokens, a.dependent)
               and allowed(pattern.governor_tokens, a.governor)]
    pairs = []
    for a in firsts:
        for b in seconds:
            if a is b or a.governor != b.governor:
                continue
            pairs.append((a, b))
    pairs.sort(key=lambda p: (p[0].governor, p[0].dependent, p[1].dependent))
    return pairs
