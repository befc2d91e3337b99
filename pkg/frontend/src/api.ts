/** Thin typed client for the service endpoints; every call resolves to the
 * raw response JSON so the UI renders server data verbatim. */

import type {
  ConceptsResponse,
  ErrorEnvelope,
  ExpandResponse,
  GraphQueryJson,
  HealthResponse,
  ResultSort,
  ResultsResponse,
  SelectResponse,
  SessionInfo,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface ConceptFilters {
  prefix?: string;
  category?: string;
  type?: string;
  offset?: number;
  limit?: number;
}

export interface ResultParams {
  sort?: ResultSort;
  filter?: string;
  offset?: number;
  limit?: number;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const payload = (await response.json()) as unknown;
    if (!response.ok) {
      const envelope = payload as Partial<ErrorEnvelope>;
      throw new ApiRequestError(
        response.status,
        envelope.code ?? "unknown_error",
        envelope.message ?? `request failed with status ${response.status}`,
        envelope.details ?? {},
      );
    }
    return payload as T;
  }

  health(): Promise<HealthResponse> {
    return this.request("GET", "/healthz");
  }

  concepts(filters: ConceptFilters = {}): Promise<ConceptsResponse> {
    const params = new URLSearchParams();
    if (filters.prefix) params.set("prefix", filters.prefix);
    if (filters.category) params.set("category", filters.category);
    if (filters.type) params.set("type", filters.type);
    if (filters.offset !== undefined) params.set("offset", String(filters.offset));
    if (filters.limit !== undefined) params.set("limit", String(filters.limit));
    const qs = params.toString();
    return this.request("GET", qs ? `/concepts?${qs}` : "/concepts");
  }

  createSession(query: GraphQueryJson): Promise<SessionInfo> {
    return this.request("POST", "/sessions", query);
  }

  editSession(sessionId: string, query: GraphQueryJson): Promise<SessionInfo> {
    return this.request("PUT", `/sessions/${sessionId}`, query);
  }

  expand(sessionId: string): Promise<ExpandResponse> {
    return this.request("POST", `/sessions/${sessionId}/expand`);
  }

  select(sessionId: string, selections: Record<string, number>): Promise<SelectResponse> {
    return this.request("POST", `/sessions/${sessionId}/select`, { selections });
  }

  results(sessionId: string, params: ResultParams = {}): Promise<ResultsResponse> {
    const qs = new URLSearchParams();
    if (params.sort) qs.set("sort", params.sort);
    if (params.filter) qs.set("filter", params.filter);
    if (params.offset !== undefined) qs.set("offset", String(params.offset));
    if (params.limit !== undefined) qs.set("limit", String(params.limit));
    const suffix = qs.toString() ? `?${qs.toString()}` : "";
    return this.request("GET", `/sessions/${sessionId}/results${suffix}`);
  }
}

/** Canonical selection key for a relationship, matching the service format. */
export function relKey(a: string, b: string): string {
  return a < b ? `${a}|${b}` : `${b}|${a}`;
}
