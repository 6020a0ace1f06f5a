"""Command-line interface.

Subcommands:

* ``build-kg``  — load triples, apply synonym/equivalence/type augmentation,
  derive the head-rule hierarchy, and write a snapshot
* ``query``     — solve one query from an annotated file or raw text
* ``eval``      — train and evaluate a decision model on a labeled dataset
* ``serve``     — run the HTTP service
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .activation import ActivationParams
from .errors import KgqaError
from .kg import (
    KnowledgeGraph,
    WeightPolicy,
    apply_entity_types,
    apply_synonyms,
    derive_head_hierarchy,
    expand_equivalence,
    load_equivalence_rules,
    load_triples,
    read_pair_file,
)
from .reasoner import COMBINE_MODES


def _add_runtime_args(p):
    p.add_argument("--kg", required=True, help="knowledge-graph snapshot path")
    p.add_argument("--embeddings", default=None,
                   help="word-vector text file (default: packaged fixture vectors)")
    p.add_argument("--model", default=None,
                   help="decision-model snapshot (default: packaged model)")
    p.add_argument("--at", type=float, default=None, help="active threshold")
    p.add_argument("--df", type=float, default=None, help="decay factor")
    p.add_argument("--st", type=int, default=None, help="max spreading iterations")
    p.add_argument("--combine", choices=COMBINE_MODES, default="intersection",
                   help="same-layer answer combination mode")


def build_parser():
    parser = argparse.ArgumentParser(prog="kgqa")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-kg", help="build and snapshot a knowledge graph")
    b.add_argument("--triples", required=True)
    b.add_argument("--synonyms", default=None)
    b.add_argument("--equiv", default=None)
    b.add_argument("--types", default=None)
    b.add_argument("--weights", default=None,
                   help="YAML weight policy (default + per-predicate)")
    b.add_argument("--default-weight", type=float, default=None)
    b.add_argument("--out", required=True)

    q = sub.add_parser("query", help="answer a single query")
    _add_runtime_args(q)
    src = q.add_mutually_exclusive_group(required=True)
    src.add_argument("--annotated", help="CoNLL-style annotated query file")
    src.add_argument("--text", help="raw query text (needs an annotator)")
    q.add_argument("--annotator-url",
                   default=os.environ.get("KGQA_ANNOTATOR_URL"),
                   help="CoreNLP-compatible annotation endpoint")
    q.add_argument("--seed", type=int, default=None,
                   help="same-layer solving-order shuffle seed")
    q.add_argument("--json", action="store_true",
                   help="print the full wire-format response")

    e = sub.add_parser("eval", help="train + evaluate a decision model")
    e.add_argument("--dataset", required=True,
                   help="labeled CSV (p_r1,p_r2,n_r1,n_r2,label)")
    e.add_argument("--model-kind", required=True,
                   choices=["mlp", "logistic", "gaussian-bayes"])
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--test-fraction", type=float, default=0.3)
    e.add_argument("--save-model", default=None)

    s = sub.add_parser("serve", help="run the HTTP service")
    _add_runtime_args(s)
    s.add_argument("--annotator-url",
                   default=os.environ.get("KGQA_ANNOTATOR_URL"))
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int,
                   default=int(os.environ.get("KGQA_PORT", "8000")))
    return parser


def _cmd_build_kg(args) -> int:
    weights = WeightPolicy()
    if args.weights:
        weights = WeightPolicy.from_file(args.weights)
    if args.default_weight is not None:
        weights.default = args.default_weight
    kg = load_triples(args.triples, weights)
    if args.synonyms:
        with open(args.synonyms, encoding="utf-8") as fh:
            apply_synonyms(kg, read_pair_file(fh))
    hierarchy_added = derive_head_hierarchy(kg)
    equiv_added = types_added = 0
    if args.equiv:
        equiv_added = expand_equivalence(kg, load_equivalence_rules(args.equiv))
    if args.types:
        with open(args.types, encoding="utf-8") as fh:
            types_added = apply_entity_types(kg, read_pair_file(fh))
    kg.save(args.out)
    stats = kg.stats()
    print(f"wrote {args.out}: {stats['entities']} entities, "
          f"{stats['edges']} edges "
          f"(+{hierarchy_added} hierarchy, +{equiv_added} equivalence, "
          f"+{types_added} type edges)")
    return 0


def _load_pipeline(args):
    from . import fixtures
    from .decision.models import load_model
    from .semantics import load_embeddings
    from .service import Pipeline

    kg = KnowledgeGraph.load(args.kg)
    kg.freeze()
    store = (load_embeddings(args.embeddings) if args.embeddings
             else fixtures.fixture_embeddings())
    model = (load_model(args.model) if args.model
             else fixtures.default_model())
    params = ActivationParams().override(at=args.at, df=args.df, st=args.st)
    return Pipeline(kg=kg, store=store, model=model, params=params,
                    annotator_url=getattr(args, "annotator_url", None),
                    combine=args.combine)


def _cmd_query(args) -> int:
    pipeline = _load_pipeline(args)
    text = args.text
    annotated = None
    if args.annotated:
        with open(args.annotated, encoding="utf-8") as fh:
            annotated = fh.read()
    response = pipeline.run(text=text, annotated=annotated, seed=args.seed)
    if args.json:
        print(json.dumps(response, indent=1))
        return 0
    answers = response["answers"]
    if not answers:
        print("no accepted answers")
    for a in answers:
        print(f"{a['rank']:>3}. {a['entity']}  (confidence {a['confidence']:.4f})")
    print("\nquery graph:")
    for qd in response["query_graph"]:
        print(f"  layer {qd['layer']} [pattern {qd['pattern']}] "
              f"({qd['category']}, {qd['predicate']}, {qd['property']})")
    sub = response["subgraph"]
    print(f"\nreasoning subgraph: {len(sub['nodes'])} nodes, "
          f"{len(sub['edges'])} edges")
    for node in sub["nodes"]:
        print(f"  [{node['role']} L{node['layer']}] {node['id']}")
    for e in sub["edges"]:
        mark = "CR" if e["from_cr"] else "  "
        print(f"  {mark} {e['source']} -{e['predicate']}-> {e['target']}")
    return 0


def _cmd_eval(args) -> int:
    from .decision.models import evaluate, load_dataset, train
    from .decision.synthetic import train_test_split

    dataset = load_dataset(args.dataset)
    train_set, test_set = train_test_split(dataset, args.test_fraction,
                                           seed=args.seed)
    model = train(train_set, args.model_kind, seed=args.seed)
    metrics = evaluate(model, test_set)
    print(f"model: {args.model_kind}  (train {len(train_set)}, "
          f"test {len(test_set)}, seed {args.seed})")
    print(f"  balanced accuracy : {metrics.balanced_accuracy:.4f}")
    print(f"  precision         : {metrics.precision:.4f}")
    print(f"  recall            : {metrics.recall:.4f}")
    print(f"  f1                : {metrics.f1:.4f}")
    print(f"  confidence MSE    : {metrics.confidence_mse:.4f}")
    if args.save_model:
        model.save(args.save_model)
        print(f"saved model to {args.save_model}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(_load_pipeline(args))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


_COMMANDS = {
    "build-kg": _cmd_build_kg,
    "query": _cmd_query,
    "eval": _cmd_eval,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except KgqaError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
