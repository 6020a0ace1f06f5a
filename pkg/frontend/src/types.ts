// Wire schema of the kgqa HTTP service (schema_version 1).

export interface AnswerRecord {
  entity: string;
  confidence: number;
  rank: number;
}

export interface QuadRecord {
  category: string;
  predicate: string;
  property: string;
  layer: number;
  pattern: number;
}

export type NodeRole = "query-entity" | "reasoned";

export interface SubgraphNode {
  id: string;
  role: NodeRole;
  layer: number;
}

export interface SubgraphEdge {
  source: string;
  predicate: string;
  target: string;
  from_cr: boolean;
}

export interface QueryResponse {
  schema_version: number;
  answers: AnswerRecord[];
  query_graph: QuadRecord[];
  subgraph: {
    nodes: SubgraphNode[];
    edges: SubgraphEdge[];
  };
  timing: Record<string, number>;
}

export interface ErrorPayload {
  error: {
    code: string;
    message: string;
    phrase?: string;
    chunks?: { kind: string; text: string }[];
  };
}

export interface NeighborFragment {
  root: string;
  nodes: { id: string; distance: number }[];
  edges: { source: string; predicate: string; target: string; weight: number }[];
  truncated: boolean;
}

export interface QueryOverrides {
  at?: number;
  df?: number;
  st?: number;
  combine?: "intersection" | "union";
  seed?: number;
}

export interface QueryRequest extends QueryOverrides {
  text?: string;
  annotated?: string;
}
