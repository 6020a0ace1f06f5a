"""Crossover-relation evidence and candidate-answer features.

Evidence topologies relative to a candidate answer and the property
constraint c_obj:

* R1 — the candidate (or any of its superclasses) connects to c_obj or any
  superclass of c_obj
* R2 — the candidate (or any of its superclasses) connects to a subclass of
  c_obj

Each piece of evidence carries the similarity between its edge predicate
and the quad predicate, and a polarity from the negation lexicon.  The four
features are: max positive-R1 similarity, normalized positive-R2 similarity
mass, and the two negative-evidence indicator bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..activation.engine import CrossoverRelation, SubgraphResult
from ..kg.graph import KnowledgeGraph
from ..query_graph import ANYRELATION, ConstraintQuad
from ..semantics import (
    DEFAULT_NEGATION_LEXICON,
    EmbeddingStore,
    is_negative_predicate,
    predicate_similarity,
)

R1 = "R1"
R2 = "R2"


@dataclass(frozen=True)
class EvidenceTag:
    kind: str                   # R1 | R2
    positive: bool
    pdict_sim: float
    cr: CrossoverRelation | None = None


@dataclass(frozen=True)
class FeatureVector:
    p_r1: float
    p_r2: float
    n_r1: int
    n_r2: int

    def as_array(self) -> np.ndarray:
        return np.array([self.p_r1, self.p_r2, float(self.n_r1),
                         float(self.n_r2)], dtype=np.float64)

    @classmethod
    def from_array(cls, arr) -> "FeatureVector":
        return cls(float(arr[0]), float(arr[1]), int(round(arr[2])),
                   int(round(arr[3])))


def classify_evidence(candidate: str, quad: ConstraintQuad,
                      result: SubgraphResult, kg: KnowledgeGraph,
                      store: EmbeddingStore | None,
                      negation_lexicon=DEFAULT_NEGATION_LEXICON
                      ) -> list[EvidenceTag]:
    """Tag each crossover relation as R1/R2 evidence for ``candidate``;
    relations matching neither topology are ignored."""
    cand_side = {candidate, *kg.superclasses(candidate)}
    obj = result.obj_id
    r1_side = {obj, *kg.superclasses(obj)}
    r2_side = set(kg.subclasses(obj))
    tags = []
    for cr in result.cr:
        if cr.subj_node not in cand_side:
            continue
        if cr.obj_node in r1_side:
            kind = R1
        elif cr.obj_node in r2_side:
            kind = R2
        else:
            continue
        sim = (1.0 if quad.predicate == ANYRELATION
               else predicate_similarity(store, cr.edge.predicate, quad.predicate))
        tags.append(EvidenceTag(
            kind=kind,
            positive=not is_negative_predicate(cr.edge.predicate, negation_lexicon),
            pdict_sim=sim,
            cr=cr,
        ))
    return tags


def extract_features(tags: list[EvidenceTag], leaf_count: int,
                     subclass_count: int) -> FeatureVector:
    """Fold evidence tags into the 4-dimensional feature vector.

    ``leaf_count`` is the number of candidate answers (leaf nodes) under the
    category constraint; ``subclass_count`` the number of subclasses of the
    property constraint.  Their product normalizes the positive-R2 mass.
    """
    pos_r1 = [t.pdict_sim for t in tags if t.kind == R1 and t.positive]
    pos_r2 = [t.pdict_sim for t in tags if t.kind == R2 and t.positive]
    if pos_r2:
        if leaf_count <= 0 or subclass_count <= 0:
            # R2 evidence implies at least one subclass and one leaf exist
            raise ValueError(
                "degenerate R2 denominator: "
                f"leaves={leaf_count}, subclasses={subclass_count}")
        p_r2 = sum(pos_r2) / (leaf_count * subclass_count)
    else:
        p_r2 = 0.0
    return FeatureVector(
        p_r1=max(pos_r1) if pos_r1 else 0.0,
        p_r2=p_r2,
        n_r1=int(any(t.kind == R1 and not t.positive for t in tags)),
        n_r2=int(any(t.kind == R2 and not t.positive for t in tags)),
    )
