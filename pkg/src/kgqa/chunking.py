"""Constituency-style shallow parsing over Penn Treebank tag sequences.

A small expression language describes each chunk kind:

* ``(TAG)`` groups with quantifiers ``?`` (0-1), ``*`` (0+), ``+`` (1+)
* alternation inside a group: ``(WDT|WP$)``
* tag-family wildcard: ``NN.*`` = NN/NNS/NNP/NNPS, ``VB.*`` = all verb tags
* a per-atom ``*`` inside an alternation (``(IN*|TO*)+``) makes the whole
  group repeatable from zero, i.e. it normalizes to ``(IN|TO)*``

A chunk kind may carry several alternative expressions; the longest match
across them wins.  Kinds are tried in priority order WHNP, WHVP, INNP, VP,
NP so interrogative chunks always beat their NP/VP suffixes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .annotation import AnnotatedQuery, Token
from .errors import PatternSyntaxError

KIND_PRIORITY = ("WHNP", "WHVP", "INNP", "VP", "NP")

_WH_NP_LEAD_TAGS = {"WDT", "WP$"}
_WH_VP_LEAD_TAGS = {"WP", "WRB"}

_GROUP_RE = re.compile(r"\(([^()]*)\)([?*+]?)")
_ATOM_RE = re.compile(r"^[A-Z]+\$?(\.\*)?\*?$")

DEFAULT_GRAMMAR_SPEC = [
    ("INNP", "(IN)+(CD)*(DT)?(CD)*(JJ)*(CD)*(VBD|VBG)*(NN.*)*(POS)*(CD)*"
             "(VBD|VBG)*(NN.*)*(VBD|VBG)*(NN.*)*(POS)*(CD)*(NN.*)+"),
    ("WHNP", "(WDT|WP$)+(CD)*(DT)?(CD)*(JJ)*(CD)*(VBD)*(NN.*)*(POS)*(CD)*"
             "(VBD)*(NN.*)*(VBD)*(NN.*)*(POS)*(CD)*(NN.*)+"),
    ("WHVP", "(WP|WRB)+(MD)*(VB.*)+(JJ)*(RB)*(JJ)*(VB.*)?(DT)?(IN*|TO*)+"),
    ("WHVP", "(WP|WRB)+(MD)*(VB.*)+"),
    ("NP", "(CD)*(DT)?(CD)*(JJ)*(CD)*(VBD|VBG)*(NN.*)*(POS)*(CD)*"
           "(VBD|VBG)*(NN.*)*(VBD|VBG)*(NN.*)*(POS)*(CD)*(NN.*)+"),
    ("VP", "(MD)*(VB.*)+(CD)*(JJ)*(RB)*(JJ)*(VB.*)?(DT)?(IN*|TO*)+"),
]


def _translate_atom(atom: str) -> str:
    """One tag atom -> regex over the encoded tag string (tags end with a
    space).  Returns (regex, starred) where starred marks a per-atom ``*``."""
    starred = False
    if atom.endswith("*") and not atom.endswith(".*"):
        atom = atom[:-1]
        starred = True
    if atom.endswith(".*"):
        rx = re.escape(atom[:-2]) + r"[^ ]*"
    else:
        rx = re.escape(atom)
    return rx + " ", starred


def _compile_single(kind: str, pattern: str) -> re.Pattern:
    pos = 0
    parts = []
    can_be_empty = True
    while pos < len(pattern):
        if pattern[pos].isspace():
            pos += 1
            continue
        m = _GROUP_RE.match(pattern, pos)
        if m is None:
            raise PatternSyntaxError(pattern, pos, "expected a (group)")
        body, quant = m.group(1), m.group(2)
        if not body:
            raise PatternSyntaxError(pattern, pos, "empty group")
        alt_rx = []
        any_starred = False
        for atom in body.split("|"):
            atom = atom.strip()
            if not _ATOM_RE.match(atom):
                raise PatternSyntaxError(pattern, pos, f"bad tag atom {atom!r}")
            rx, starred = _translate_atom(atom)
            any_starred = any_starred or starred
            alt_rx.append(rx)
        if any_starred and quant in ("+", ""):
            quant = "*"
        parts.append(f"(?:{'|'.join(alt_rx)}){quant}")
        if quant in ("+", ""):
            can_be_empty = False
        pos = m.end()
    if not parts:
        raise PatternSyntaxError(pattern, 0, "empty pattern")
    if can_be_empty:
        raise PatternSyntaxError(pattern, 0, "pattern may match the empty sequence")
    return re.compile("".join(parts))


@dataclass
class ParsingExpression:
    """Compiled matcher for one chunk kind; possibly several alternative
    rows, longest match wins."""

    kind: str
    patterns: tuple[str, ...]
    _regexes: tuple[re.Pattern, ...]

    def match_length(self, encoded: str, offsets: list[int], start: int) -> int:
        """Longest number of tags matched starting at token position
        ``start`` (1-based); 0 when nothing matches."""
        best = 0
        at = offsets[start - 1]
        for rx in self._regexes:
            m = rx.match(encoded, at)
            if m and m.end() > at:
                best = max(best, encoded.count(" ", at, m.end()))
        return best


def compile_expression(kind: str, *patterns: str) -> ParsingExpression:
    if kind not in KIND_PRIORITY:
        raise PatternSyntaxError(kind, 0, f"unknown chunk kind {kind!r}")
    return ParsingExpression(
        kind, tuple(patterns),
        tuple(_compile_single(kind, p) for p in patterns))


def _build_grammar(spec) -> dict[str, ParsingExpression]:
    rows: dict[str, list[str]] = {}
    for kind, pattern in spec:
        rows.setdefault(kind, []).append(pattern)
    return {kind: compile_expression(kind, *pats) for kind, pats in rows.items()}


DEFAULT_GRAMMAR = _build_grammar(DEFAULT_GRAMMAR_SPEC)


def load_grammar(path) -> dict[str, ParsingExpression]:
    """Read a ``kind: pattern`` per-line grammar file; repeated kinds become
    alternative rows for that kind."""
    spec = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            kind, _, pattern = line.partition(":")
            spec.append((kind.strip(), pattern.strip()))
    grammar = _build_grammar(spec)
    missing = set(KIND_PRIORITY) - set(grammar)
    if missing:
        raise PatternSyntaxError(path, 0, f"grammar missing kinds: {sorted(missing)}")
    return grammar


@dataclass(frozen=True)
class Chunk:
    kind: str
    start: int                  # token index interval, inclusive
    end: int
    tokens: tuple[Token, ...]

    @property
    def text(self) -> str:
        return " ".join(t.form for t in self.tokens)

    @property
    def token_indexes(self) -> frozenset[int]:
        return frozenset(t.index for t in self.tokens)

    @property
    def inner_tokens(self) -> tuple[Token, ...]:
        """For WHNP/WHVP: the tokens after the leading wh word(s) — the
        embedded NP resp. VP.  Other kinds return all tokens."""
        if self.kind == "WHNP":
            lead = _WH_NP_LEAD_TAGS
        elif self.kind == "WHVP":
            lead = _WH_VP_LEAD_TAGS
        else:
            return self.tokens
        i = 0
        while i < len(self.tokens) and self.tokens[i].pos in lead:
            i += 1
        return self.tokens[i:]

    @property
    def content_tokens(self) -> tuple[Token, ...]:
        """Tokens that render into constraint phrases: the inner phrase with
        any leading determiner dropped (``the RDF query languages`` ->
        ``RDF query languages``)."""
        toks = self.inner_tokens
        i = 0
        while i < len(toks) and toks[i].pos == "DT":
            i += 1
        return toks[i:]


def chunk(q: AnnotatedQuery, grammar: dict[str, ParsingExpression] | None = None
          ) -> list[Chunk]:
    """Left-to-right longest-match segmentation; unmatched tokens stay
    chunkless."""
    grammar = grammar or DEFAULT_GRAMMAR
    encoded = "".join(t.pos + " " for t in q.tokens)
    offsets = [0]
    for t in q.tokens:
        offsets.append(offsets[-1] + len(t.pos) + 1)
    chunks = []
    i = 1
    n = len(q.tokens)
    while i <= n:
        for kind in KIND_PRIORITY:
            expr = grammar.get(kind)
            if expr is None:
                continue
            length = expr.match_length(encoded, offsets, i)
            if length:
                chunks.append(Chunk(kind, i, i + length - 1,
                                    tuple(q.tokens[i - 1: i + length - 1])))
                i += length
                break
        else:
            i += 1
    return chunks


class ChunkViews:
    """1-based per-kind indexing with per-word accessors (the f-th word of
    the i-th chunk of a kind)."""

    def __init__(self, chunks: list[Chunk]):
        self._by_kind: dict[str, list[Chunk]] = {k: [] for k in KIND_PRIORITY}
        for c in chunks:
            self._by_kind[c.kind].append(c)

    def count(self, kind: str) -> int:
        return len(self._by_kind[kind])

    def all(self, kind: str) -> list[Chunk]:
        return list(self._by_kind[kind])

    def get(self, kind: str, i: int) -> Chunk:
        items = self._by_kind[kind]
        if not 1 <= i <= len(items):
            raise IndexError(f"{kind} index {i} out of range 1..{len(items)}")
        return items[i - 1]

    def word(self, kind: str, i: int, f: int) -> Token:
        c = self.get(kind, i)
        if not 1 <= f <= len(c.tokens):
            raise IndexError(
                f"word index {f} out of range 1..{len(c.tokens)} for {kind}_{i}")
        return c.tokens[f - 1]


def enumerate_chunks(chunks: list[Chunk], kind: str) -> list[Chunk]:
    return [c for c in chunks if c.kind == kind]
