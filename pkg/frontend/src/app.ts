// Application wiring: query form, parameter panel, result + subgraph pane,
// node expansion, and side-by-side what-if reruns.

import { ApiClient, ApiError, StaleResponseError, validateOverrides } from "./api";
import { GraphModel, renderGraph } from "./graphview";
import { renderComparison, renderError, renderResult } from "./render";
import type { QueryOverrides, QueryRequest, QueryResponse } from "./types";

export interface AppHandles {
  submit: (text: string) => Promise<void>;
  rerun: (overrides: QueryOverrides) => Promise<void>;
}

export function createApp(doc: Document, root: HTMLElement,
                          client: ApiClient): AppHandles {
  root.innerHTML = "";

  const form = doc.createElement("form");
  form.className = "query-form";
  const input = doc.createElement("input");
  input.type = "text";
  input.placeholder = "Ask about the knowledge graph…";
  input.className = "query-input";
  const button = doc.createElement("button");
  button.type = "submit";
  button.textContent = "Direct Search";
  button.disabled = true;
  form.append(input, button);

  const message = doc.createElement("div");
  message.className = "message-area";
  const resultPane = doc.createElement("div");
  resultPane.className = "result-pane";
  const graphPane = doc.createElement("div");
  graphPane.className = "graph-pane";
  root.append(form, message, resultPane, graphPane);

  let lastRequest: QueryRequest | null = null;
  let lastResponse: QueryResponse | null = null;
  const model = new GraphModel();

  input.addEventListener("input", () => {
    button.disabled = input.value.trim().length === 0;
  });

  function showError(payload: ApiError["payload"], retry?: () => void): void {
    message.innerHTML = "";
    message.append(renderError(doc, payload, retry));
  }

  function drawGraph(): void {
    graphPane.innerHTML = "";
    graphPane.append(renderGraph(doc, model, {
      onExpand: (id) => void expandNode(id),
    }));
  }

  function showResponse(response: QueryResponse, label?: string): void {
    lastResponse = response;
    message.innerHTML = "";
    resultPane.innerHTML = "";
    resultPane.append(renderResult(doc, response, label).root);
    model.nodes.clear();
    model.edges.length = 0;
    const fresh = new GraphModel();
    fresh.loadSubgraph(response.subgraph.nodes, response.subgraph.edges);
    Object.assign(model, { });
    for (const n of fresh.nodes.values()) {
      model.addNode(n.id, n.role, n.layer);
    }
    for (const e of fresh.edges) {
      model.addEdge(e);
    }
    drawGraph();
  }

  async function run(request: QueryRequest, label?: string): Promise<void> {
    try {
      const response = await client.submitQuery(request);
      lastRequest = request;
      showResponse(response, label);
    } catch (err) {
      if (err instanceof StaleResponseError) {
        return; // a newer query owns the panes
      }
      if (err instanceof ApiError) {
        showError(err.payload, () => void run(request, label));
        return;
      }
      showError({ code: "network", message: String(err) },
                () => void run(request, label));
    }
  }

  async function expandNode(entityId: string): Promise<void> {
    try {
      const fragment = await client.fetchNeighbors(entityId, 1);
      model.mergeFragment(fragment);
      drawGraph();
    } catch (err) {
      if (err instanceof ApiError) {
        showError(err.payload);
      }
    }
  }

  async function rerun(overrides: QueryOverrides): Promise<void> {
    if (!lastRequest || !lastResponse) {
      showError({ code: "validation", message: "run a query first" });
      return;
    }
    const problem = validateOverrides(overrides);
    if (problem) {
      showError({ code: "validation", message: problem });
      return;
    }
    const request = { ...lastRequest, ...overrides };
    try {
      const response = await client.submitQuery(request);
      message.innerHTML = "";
      resultPane.innerHTML = "";
      resultPane.append(renderComparison(
        doc,
        { label: "previous", response: lastResponse },
        { label: describeOverrides(overrides), response },
      ));
    } catch (err) {
      if (err instanceof StaleResponseError) {
        return;
      }
      if (err instanceof ApiError) {
        showError(err.payload);
      }
    }
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (text) {
      void run({ text });
    }
  });

  return {
    submit: (text: string) => run({ text }),
    rerun,
  };
}

export function describeOverrides(overrides: QueryOverrides): string {
  const parts: string[] = [];
  if (overrides.at !== undefined) parts.push(`AT=${overrides.at}`);
  if (overrides.df !== undefined) parts.push(`DF=${overrides.df}`);
  if (overrides.st !== undefined) parts.push(`ST=${overrides.st}`);
  if (overrides.combine) parts.push(`combine=${overrides.combine}`);
  return parts.length ? parts.join(" ") : "rerun";
}
