"""Synthetic labeled candidates for training/evaluating decision models.

The generator mirrors the feature semantics: correct answers carry strong
positive R1 similarity and some normalized R2 mass; wrong answers either
have no evidence at all or weak similarities plus negative-evidence bits.
The two classes are linearly separable by construction.
"""

from __future__ import annotations

import numpy as np

from .evidence import FeatureVector
from .models import LabeledExample


def generate_dataset(n: int = 600, seed: int = 0,
                     positive_fraction: float = 0.5) -> list[LabeledExample]:
    rng = np.random.default_rng(seed)
    n_pos = int(round(n * positive_fraction))
    examples = []
    for _ in range(n_pos):
        examples.append(LabeledExample(FeatureVector(
            p_r1=float(rng.uniform(0.75, 1.0)),
            p_r2=float(rng.uniform(0.0, 0.8)),
            n_r1=0,
            n_r2=0,
        ), 1))
    for i in range(n - n_pos):
        if i % 2 == 0:
            # candidate with no crossover evidence at all
            features = FeatureVector(0.0, 0.0, 0, 0)
        else:
            features = FeatureVector(
                p_r1=float(rng.uniform(0.0, 0.3)),
                p_r2=float(rng.uniform(0.0, 0.2)),
                n_r1=1,
                n_r2=int(rng.integers(0, 2)),
            )
        examples.append(LabeledExample(features, 0))
    order = rng.permutation(len(examples))
    return [examples[i] for i in order]


def train_test_split(dataset, test_fraction: float = 0.3, seed: int = 0):
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(dataset))
    cut = int(round(len(dataset) * (1.0 - test_fraction)))
    train = [dataset[i] for i in order[:cut]]
    test = [dataset[i] for i in order[cut:]]
    return train, test
