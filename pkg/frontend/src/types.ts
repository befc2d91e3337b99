/** JSON payloads exchanged with the graph-query service. */

export interface GraphQueryJson {
  nodes: string[];
  rels: [string, string][];
}

export interface SessionInfo {
  session_id: string;
  state: SessionState;
  query: GraphQueryJson;
}

export type SessionState = "created" | "expanded" | "selected" | "retrieved";

export interface CandidatePathJson {
  nodes: string[];
  edges: string[];
  length: number;
  avg_npmi: number;
}

export interface ExpansionJson {
  rel: [string, string];
  direct: boolean;
  unreachable: boolean;
  selected: number | null;
  candidates: CandidatePathJson[];
}

export interface ExpandResponse {
  session_id: string;
  state: SessionState;
  expansions: ExpansionJson[];
}

export interface SelectResponse {
  session_id: string;
  state: SessionState;
  selections: Record<string, number>;
}

export interface RelationshipBreakdown {
  rel: [string, string];
  explained_edges: number;
  path_length: number;
  fraction: number;
  unreachable: boolean;
}

export interface ScoredPublicationJson {
  pub_id: string;
  title: string;
  abstract: string;
  publish_date: string;
  journal: string | null;
  doi: string | null;
  num_cited_by: number | null;
  score: number;
  score_rational: [number, number];
  npmi_sum: number;
  explained: RelationshipBreakdown[];
}

export interface ResultsResponse {
  session_id: string;
  state: SessionState;
  total: number;
  offset: number;
  results: ScoredPublicationJson[];
}

export interface ConceptJson {
  concept_id: string;
  name: string;
  synonyms: string[];
  source: string;
  semantic_type: string;
  macrocategory: string;
  frequency: number;
}

export interface ConceptsResponse {
  total: number;
  offset: number;
  results: ConceptJson[];
}

export interface HealthResponse {
  status: string;
  n_entities: number;
  n_edges: number;
  n_docs: number;
}

export interface ErrorEnvelope {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

export type ResultSort = "score" | "citations" | "date";
