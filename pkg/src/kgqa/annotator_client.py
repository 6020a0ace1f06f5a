"""Client for a CoreNLP-compatible annotation HTTP service.

Request: the raw sentence is POSTed as the body with a ``properties`` query
parameter asking for ``tokenize,ssplit,pos,lemma,depparse`` in JSON.
Response: ``{"sentences": [{"tokens": [...], "basicDependencies": [...]}]}``.
The converted result honours the same contract as :func:`parse_annotated`.
"""

from __future__ import annotations

import json

import requests

from .annotation import AnnotatedQuery, Token
from .errors import AnnotationServiceError

_PROPERTIES = json.dumps({
    "annotators": "tokenize,ssplit,pos,lemma,depparse",
    "outputFormat": "json",
})


def fetch_annotation(endpoint: str, raw: str, timeout: float = 15.0) -> AnnotatedQuery:
    if not raw or not raw.strip():
        raise AnnotationServiceError("empty query string")
    try:
        resp = requests.post(
            endpoint,
            params={"properties": _PROPERTIES},
            data=raw.encode("utf-8"),
            timeout=timeout,
        )
    except requests.RequestException as exc:
        raise AnnotationServiceError(f"annotation service unreachable: {exc}") from exc
    if resp.status_code != 200:
        raise AnnotationServiceError(
            f"annotation service returned HTTP {resp.status_code}")
    try:
        payload = resp.json()
    except ValueError as exc:
        raise AnnotationServiceError("annotation response is not JSON") from exc
    return convert_corenlp_payload(payload, raw)


def convert_corenlp_payload(payload: dict, raw: str) -> AnnotatedQuery:
    sentences = payload.get("sentences") or []
    if len(sentences) != 1:
        raise AnnotationServiceError(
            f"expected exactly one sentence, got {len(sentences)}")
    sent = sentences[0]
    deps = sent.get("basicDependencies") or sent.get("enhancedDependencies")
    if not sent.get("tokens") or deps is None:
        raise AnnotationServiceError("annotation response missing tokens or dependencies")
    head_by_index: dict[int, tuple[int, str]] = {}
    for d in deps:
        deprel = d.get("dep", "")
        head_by_index[int(d["dependent"])] = (
            int(d["governor"]),
            "root" if deprel.upper() == "ROOT" else deprel,
        )
    tokens = []
    try:
        for t in sent["tokens"]:
            idx = int(t["index"])
            head, deprel = head_by_index.get(idx, (0, "root"))
            tokens.append(Token(
                index=idx,
                form=t["word"],
                lemma=t.get("lemma", t["word"]),
                pos=t["pos"],
                head=head,
                deprel=deprel,
            ))
    except (KeyError, TypeError, ValueError) as exc:
        raise AnnotationServiceError(f"unconvertible annotation payload: {exc}") from exc
    try:
        return AnnotatedQuery(raw.strip(), sorted(tokens, key=lambda t: t.index))
    except Exception as exc:
        raise AnnotationServiceError(f"invalid annotation: {exc}") from exc
