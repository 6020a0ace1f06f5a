// Pure DOM renderers: every function maps a response payload to elements
// without touching network or global state, so views are snapshot-testable.

import { colorForNode } from "./colors";
import type { AnswerRecord, ErrorPayload, QuadRecord, QueryResponse } from "./types";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function formatConfidence(value: number): string {
  return value.toFixed(4);
}

export function renderAnswerCard(doc: Document, answer: AnswerRecord): HTMLElement {
  const card = el(doc, "article", "answer-card");
  card.dataset.entity = answer.entity;
  card.append(
    el(doc, "span", "answer-rank", `#${answer.rank}`),
    el(doc, "h3", "answer-entity", answer.entity),
    el(doc, "span", "answer-confidence",
       `confidence ${formatConfidence(answer.confidence)}`),
  );
  return card;
}

export function renderAnswers(doc: Document, answers: AnswerRecord[]): HTMLElement {
  const list = el(doc, "section", "answer-list");
  if (answers.length === 0) {
    list.append(el(doc, "p", "no-answers", "No accepted answers."));
    return list;
  }
  for (const answer of [...answers].sort((a, b) => a.rank - b.rank)) {
    list.append(renderAnswerCard(doc, answer));
  }
  return list;
}

export function renderQuads(doc: Document, quads: QuadRecord[]): HTMLElement {
  const table = el(doc, "ul", "quad-list");
  for (const quad of quads) {
    table.append(el(
      doc, "li", "quad",
      `L${quad.layer} (${quad.category}, ${quad.predicate}, ${quad.property})`,
    ));
  }
  return table;
}

export function renderLegend(doc: Document, maxLayer: number): HTMLElement {
  const legend = el(doc, "div", "legend");
  const query = el(doc, "span", "legend-item", "query entity");
  query.style.setProperty("--swatch", colorForNode("query-entity", 0));
  legend.append(query);
  for (let layer = 1; layer <= maxLayer; layer += 1) {
    const item = el(doc, "span", "legend-item", `reasoned, layer ${layer}`);
    item.style.setProperty("--swatch", colorForNode("reasoned", layer));
    legend.append(item);
  }
  return legend;
}

export function renderTiming(doc: Document, timing: Record<string, number>): HTMLElement {
  const parts = Object.entries(timing)
    .map(([stage, ms]) => `${stage.replace(/_ms$/, "")} ${ms.toFixed(1)}ms`);
  return el(doc, "p", "timing", parts.join(" · "));
}

export function renderError(doc: Document, payload: ErrorPayload["error"],
                            retry?: () => void): HTMLElement {
  const banner = el(doc, "div", "error-banner");
  banner.dataset.code = payload.code;
  banner.append(el(doc, "strong", undefined, payload.code));
  banner.append(el(doc, "span", undefined, ` ${payload.message}`));
  if (payload.phrase) {
    banner.append(el(doc, "mark", "unlinked-phrase", payload.phrase));
  }
  if (retry) {
    const button = el(doc, "button", "retry", "Retry");
    button.addEventListener("click", retry);
    banner.append(button);
  }
  return banner;
}

export interface ResultView {
  root: HTMLElement;
  answerEntities: string[];
}

export function renderResult(doc: Document, response: QueryResponse,
                             label?: string): ResultView {
  const root = el(doc, "section", "result-view");
  if (label) {
    root.append(el(doc, "h2", "result-label", label));
  }
  root.append(renderAnswers(doc, response.answers));
  root.append(renderQuads(doc, response.query_graph));
  const maxLayer = Math.max(0, ...response.subgraph.nodes.map((n) => n.layer));
  root.append(renderLegend(doc, maxLayer));
  root.append(renderTiming(doc, response.timing));
  return { root, answerEntities: response.answers.map((a) => a.entity) };
}

/** Side-by-side what-if comparison of two runs of the same query. */
export function renderComparison(doc: Document,
                                 before: { label: string; response: QueryResponse },
                                 after: { label: string; response: QueryResponse },
                                 ): HTMLElement {
  const wrap = el(doc, "div", "comparison");
  wrap.append(renderResult(doc, before.response, before.label).root);
  wrap.append(renderResult(doc, after.response, after.label).root);
  const beforeSet = new Set(before.response.answers.map((a) => a.entity));
  const added = after.response.answers
    .map((a) => a.entity)
    .filter((entity) => !beforeSet.has(entity));
  const summary = el(
    doc, "p", "comparison-summary",
    added.length
      ? `new answers under ${after.label}: ${added.join(", ")}`
      : "both runs accept the same answers",
  );
  wrap.append(summary);
  return wrap;
}
