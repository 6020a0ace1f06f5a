#!/usr/bin/env python3
"""Regenerate the packaged default decision model from the synthetic
generator (fixed seed, default hyperparameters)."""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from kgqa.decision.models import evaluate, train
from kgqa.decision.synthetic import generate_dataset, train_test_split


def main():
    dataset = generate_dataset(n=600, seed=0)
    train_set, test_set = train_test_split(dataset, test_fraction=0.3, seed=0)
    model = train(train_set, "mlp", seed=0)
    metrics = evaluate(model, test_set)
    print(f"held-out balanced accuracy: {metrics.balanced_accuracy:.4f}")
    print(f"held-out confidence MSE:    {metrics.confidence_mse:.4f}")
    out = pathlib.Path(__file__).resolve().parents[1] / "src/kgqa/data/default_model.json"
    model.save(out)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
