// Typed client for the kgqa service. One query may be in flight at a time:
// every submission takes a fresh token and responses arriving for an older
// token are discarded as stale.

import type {
  ErrorPayload,
  NeighborFragment,
  QueryRequest,
  QueryResponse,
} from "./types";

export class ApiError extends Error {
  readonly code: string;
  readonly payload: ErrorPayload["error"];

  constructor(payload: ErrorPayload["error"], status: number) {
    super(`${payload.code} (HTTP ${status}): ${payload.message}`);
    this.code = payload.code;
    this.payload = payload;
  }
}

export class StaleResponseError extends Error {
  constructor() {
    super("a newer query superseded this one");
  }
}

async function parseError(response: Response): Promise<never> {
  let payload: ErrorPayload["error"] = {
    code: "http-error",
    message: `HTTP ${response.status}`,
  };
  try {
    const body = (await response.json()) as ErrorPayload;
    if (body && body.error) {
      payload = body.error;
    }
  } catch {
    // non-JSON error body; keep the generic payload
  }
  throw new ApiError(payload, response.status);
}

export class ApiClient {
  private token = 0;

  constructor(readonly baseUrl: string = "") {}

  currentToken(): number {
    return this.token;
  }

  /** POST /api/query; resolves only if no newer query was submitted. */
  async submitQuery(request: QueryRequest): Promise<QueryResponse> {
    const mine = ++this.token;
    const response = await fetch(`${this.baseUrl}/api/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
    if (mine !== this.token) {
      throw new StaleResponseError();
    }
    if (!response.ok) {
      await parseError(response);
    }
    const body = (await response.json()) as QueryResponse;
    if (mine !== this.token) {
      throw new StaleResponseError();
    }
    return body;
  }

  /** GET /api/graph/{id}?depth=N — not token-guarded; merges are additive. */
  async fetchNeighbors(entityId: string, depth = 1): Promise<NeighborFragment> {
    const response = await fetch(
      `${this.baseUrl}/api/graph/${encodeURIComponent(entityId)}?depth=${depth}`,
    );
    if (!response.ok) {
      await parseError(response);
    }
    return (await response.json()) as NeighborFragment;
  }

  async health(): Promise<{ status: string }> {
    const response = await fetch(`${this.baseUrl}/api/health`);
    if (!response.ok) {
      await parseError(response);
    }
    return (await response.json()) as { status: string };
  }
}

/** Client-side validation mirroring the service's bounds. */
export function validateOverrides(overrides: {
  at?: number;
  df?: number;
  st?: number;
}): string | null {
  if (overrides.at !== undefined && !(overrides.at > 0 && overrides.at < 1)) {
    return "active threshold must be strictly between 0 and 1";
  }
  if (overrides.df !== undefined && !(overrides.df > 0 && overrides.df < 1)) {
    return "decay factor must be strictly between 0 and 1";
  }
  if (overrides.st !== undefined && !(Number.isInteger(overrides.st) && overrides.st > 0)) {
    return "iteration bound must be a positive integer";
  }
  return null;
}
