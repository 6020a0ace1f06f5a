"""HTTP service exposing query solving and graph exploration.

Wire schema (JSON over HTTP, schema_version 1):

* ``POST /api/query`` — body carries exactly one of ``text`` (requires a
  configured annotator endpoint) or ``annotated`` (inline CoNLL document),
  plus optional ``at``/``df``/``st``/``combine``/``seed`` overrides.
  Response: ranked answers, the query graph, the role-annotated reasoning
  subgraph, and per-stage timings.  Failures map to structured payloads
  ``{"error": {"code": ..., "message": ...}}``.
* ``GET /api/graph/{entity_id}?depth=N`` — neighborhood fragment, depth <= 2,
  capped at 200 edges with a truncation flag.
* ``GET /api/health``
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .activation import ActivationParams
from .annotation import parse_annotated
from .annotator_client import fetch_annotation
from .chunking import chunk
from .errors import (
    AnnotationServiceError,
    ConllParseError,
    KgqaError,
    LinkFailureError,
    UnknownEntityError,
    UnsupportedQueryError,
    ValidationError,
)
from .kg.graph import KnowledgeGraph
from .query_graph import build_query_graph
from .reasoner import COMBINE_MODES, SolveResult, solve

SCHEMA_VERSION = 1

MAX_NEIGHBOR_DEPTH = 2
MAX_NEIGHBOR_EDGES = 200

_ERROR_STATUS = {
    "validation": 400,
    "link-failure": 422,
    "unsupported-query": 422,
    "annotation-parse": 422,
    "annotation-service": 502,
    "not-found": 404,
}


@dataclass
class Pipeline:
    """Everything a query needs, loaded once and shared read-only."""

    kg: KnowledgeGraph
    store: object
    model: object
    params: ActivationParams = None
    annotator_url: str | None = None
    combine: str = "intersection"

    def __post_init__(self):
        if self.params is None:
            self.params = ActivationParams()

    def annotate(self, *, text=None, annotated=None):
        if (text is None) == (annotated is None):
            raise ValidationError("provide exactly one of 'text' or 'annotated'")
        if annotated is not None:
            return parse_annotated(annotated)
        if not self.annotator_url:
            raise AnnotationServiceError(
                "no annotator endpoint configured; pass an annotated document "
                "or set --annotator-url / KGQA_ANNOTATOR_URL")
        return fetch_annotation(self.annotator_url, text)

    def run(self, *, text=None, annotated=None, at=None, df=None, st=None,
            combine=None, seed=None) -> dict:
        timing = {}
        t0 = time.perf_counter()
        query = self.annotate(text=text, annotated=annotated)
        timing["annotate_ms"] = _ms_since(t0)

        t1 = time.perf_counter()
        chunks = chunk(query)
        qg = build_query_graph(query, chunks)
        timing["understand_ms"] = _ms_since(t1)

        t2 = time.perf_counter()
        params = self.params.override(at=at, df=df, st=st)
        result = solve(self.kg, qg, params, self.model, self.store,
                       combine=combine or self.combine, seed=seed)
        timing["solve_ms"] = _ms_since(t2)
        timing["total_ms"] = _ms_since(t0)
        return render_response(qg, result, timing)


def _ms_since(t):
    return round((time.perf_counter() - t) * 1000.0, 3)


def render_response(qg, result: SolveResult, timing: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "answers": [
            {"entity": a.entity, "confidence": a.confidence, "rank": i + 1}
            for i, a in enumerate(result.answers)
        ],
        "query_graph": [
            {"category": q.category, "predicate": q.predicate,
             "property": q.property, "layer": q.layer, "pattern": p}
            for q, p in zip(qg.quads, qg.patterns)
        ],
        "subgraph": {
            "nodes": [{"id": n.id, "role": n.role, "layer": n.layer}
                      for n in result.explanation.nodes],
            "edges": [{"source": e.source, "predicate": e.predicate,
                       "target": e.target, "from_cr": e.from_cr}
                      for e in result.explanation.edges],
        },
        "timing": timing,
    }


def graph_neighbors(kg: KnowledgeGraph, entity_id: str, depth: int = 1) -> dict:
    """Breadth-first neighborhood fragment around an entity."""
    if entity_id not in kg.entities:
        raise UnknownEntityError(entity_id)
    depth = max(1, min(int(depth), MAX_NEIGHBOR_DEPTH))
    visited = {entity_id: 0}
    frontier = [entity_id]
    edges = []
    truncated = False
    for level in range(1, depth + 1):
        next_frontier = []
        for node in sorted(frontier):
            for edge, other, _fwd in kg.neighbors(node):
                if other not in visited:
                    visited[other] = level
                    next_frontier.append(other)
                if len(edges) >= MAX_NEIGHBOR_EDGES:
                    truncated = True
                    continue
                if edge.key() not in {e.key() for e in edges}:
                    edges.append(edge)
        frontier = next_frontier
    return {
        "root": entity_id,
        "nodes": [{"id": nid, "distance": dist}
                  for nid, dist in sorted(visited.items())],
        "edges": sorted(
            ({"source": e.source, "predicate": e.predicate, "target": e.target,
              "weight": e.weight} for e in edges),
            key=lambda d: (d["source"], d["predicate"], d["target"])),
        "truncated": truncated,
    }


def error_payload(exc: KgqaError) -> tuple[int, dict]:
    status = _ERROR_STATUS.get(exc.code, 422)
    detail = {"code": exc.code, "message": str(exc)}
    if isinstance(exc, LinkFailureError):
        detail["phrase"] = exc.phrase
    if isinstance(exc, UnsupportedQueryError):
        detail["chunks"] = [{"kind": c.kind, "text": c.text} for c in exc.chunks]
    return status, {"error": detail}


def create_app(pipeline: Pipeline) -> FastAPI:
    app = FastAPI(title="kgqa", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(KgqaError)
    async def _kgqa_error(_request: Request, exc: KgqaError):
        status, payload = error_payload(exc)
        return JSONResponse(status_code=status, content=payload)

    @app.get("/api/health")
    def health():
        stats = pipeline.kg.stats()
        return {"status": "ok", **stats}

    @app.post("/api/query")
    async def query(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise ValidationError("request body must be a JSON object")
        if not isinstance(body, dict):
            raise ValidationError("request body must be a JSON object")
        allowed = {"text", "annotated", "at", "df", "st", "combine", "seed"}
        unknown = set(body) - allowed
        if unknown:
            raise ValidationError(f"unknown request fields: {sorted(unknown)}")
        combine = body.get("combine")
        if combine is not None and combine not in COMBINE_MODES:
            raise ValidationError(f"combine must be one of {COMBINE_MODES}")
        for numeric, (lo, hi) in {"at": (0.0, 1.0), "df": (0.0, 1.0)}.items():
            value = body.get(numeric)
            if value is not None and not (lo < float(value) < hi):
                raise ValidationError(f"{numeric} must be in ({lo}, {hi})")
        try:
            return pipeline.run(
                text=body.get("text"),
                annotated=body.get("annotated"),
                at=body.get("at"),
                df=body.get("df"),
                st=body.get("st"),
                combine=combine,
                seed=body.get("seed"),
            )
        except ConllParseError as exc:
            raise exc
        except ValueError as exc:
            raise ValidationError(str(exc))

    @app.get("/api/graph/{entity_id}")
    def neighbors(entity_id: str, depth: int = 1):
        return graph_neighbors(pipeline.kg, entity_id, depth)

    return app
