/** Application state: the query canvas, the session, and the page flow.
 *
 * Pages mirror the service session states one-to-one:
 *   build -> created, paths -> expanded, select -> selected, results -> retrieved.
 * Any edit to the query invalidates the session and returns to the build page,
 * so the client can never display stale expansions or scores.
 */

import { ApiClient, relKey, type ResultParams } from "./api.js";
import type { ExpansionJson, GraphQueryJson, ResultsResponse } from "./types.js";

export type Page = "build" | "paths" | "select" | "results";

export interface PlacedNode {
  conceptId: string;
  name: string;
  x: number;
  y: number;
  pinned: boolean;
}

export interface DrawnRel {
  a: string;
  b: string;
}

export type ValidationResult =
  | { ok: true }
  | { ok: false; reason: string; components: string[][] };

export interface StoreListener {
  (store: QueryStore): void;
}

export class QueryStore {
  page: Page = "build";
  nodes = new Map<string, PlacedNode>();
  rels: DrawnRel[] = [];
  subset = new Set<string>();
  sessionId: string | null = null;
  expansions: ExpansionJson[] = [];
  /** Chips highlighted on the paths page, keyed "a|b"; unset rels default to 0. */
  pendingSelections = new Map<string, number>();
  confirmedSelections: Record<string, number> = {};
  results: ResultsResponse | null = null;
  lastError: string | null = null;

  private listeners: StoreListener[] = [];

  constructor(private readonly client: ApiClient) {}

  subscribe(listener: StoreListener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener(this);
    }
  }

  // ---- canvas editing -----------------------------------------------------

  addNode(conceptId: string, name: string, x = 0, y = 0): void {
    if (this.nodes.has(conceptId)) {
      return;
    }
    this.nodes.set(conceptId, { conceptId, name, x, y, pinned: false });
    this.invalidateSession();
  }

  removeNode(conceptId: string): void {
    if (!this.nodes.delete(conceptId)) {
      return;
    }
    this.rels = this.rels.filter((r) => r.a !== conceptId && r.b !== conceptId);
    this.subset.delete(conceptId);
    this.invalidateSession();
  }

  addRel(a: string, b: string): void {
    if (a === b || !this.nodes.has(a) || !this.nodes.has(b)) {
      throw new Error(`relationship endpoints must be two distinct placed nodes: ${a}, ${b}`);
    }
    const key = relKey(a, b);
    if (this.rels.some((r) => relKey(r.a, r.b) === key)) {
      return;
    }
    const [first, second] = a < b ? [a, b] : [b, a];
    this.rels.push({ a: first, b: second });
    this.invalidateSession();
  }

  removeRel(a: string, b: string): void {
    const key = relKey(a, b);
    const next = this.rels.filter((r) => relKey(r.a, r.b) !== key);
    if (next.length !== this.rels.length) {
      this.rels = next;
      this.invalidateSession();
    }
  }

  toggleSubset(conceptId: string): void {
    if (!this.nodes.has(conceptId)) {
      return;
    }
    if (this.subset.has(conceptId)) {
      this.subset.delete(conceptId);
    } else {
      this.subset.add(conceptId);
    }
    // the subset changes what would be submitted, so it is a query edit
    this.invalidateSession();
  }

  /** Editing anything about the query restarts the whole flow. */
  private invalidateSession(): void {
    this.sessionId = null;
    this.expansions = [];
    this.pendingSelections.clear();
    this.confirmedSelections = {};
    this.results = null;
    this.page = "build";
    this.notify();
  }

  // ---- validation and submission ------------------------------------------

  currentQuery(): GraphQueryJson {
    return {
      nodes: [...this.nodes.keys()].sort(),
      rels: this.rels.map((r) => [r.a, r.b] as [string, string]),
    };
  }

  /** Induced query over the subset selection (whole query when empty). */
  submittableQuery(): GraphQueryJson {
    if (this.subset.size === 0) {
      return this.currentQuery();
    }
    const nodes = [...this.subset].sort();
    const rels = this.rels
      .filter((r) => this.subset.has(r.a) && this.subset.has(r.b))
      .map((r) => [r.a, r.b] as [string, string]);
    return { nodes, rels };
  }

  validate(query: GraphQueryJson = this.submittableQuery()): ValidationResult {
    if (query.nodes.length < 2) {
      return { ok: false, reason: "place at least two concepts", components: [] };
    }
    const components = connectedComponents(query.nodes, query.rels);
    if (components.length > 1) {
      return {
        ok: false,
        reason: `query is disconnected (${components.length} parts)`,
        components,
      };
    }
    return { ok: true };
  }

  async submit(): Promise<void> {
    const query = this.submittableQuery();
    const check = this.validate(query);
    if (!check.ok) {
      this.lastError = check.reason;
      this.notify();
      throw new Error(check.reason);
    }
    const session = await this.guard(() => this.client.createSession(query));
    this.sessionId = session.session_id;
    await this.expand();
  }

  async expand(): Promise<void> {
    const response = await this.guard(() => this.client.expand(this.requireSession()));
    this.expansions = response.expansions;
    this.pendingSelections.clear();
    this.page = "paths";
    this.notify();
  }

  /** Highlight a candidate chip; the selection is sent on confirm. */
  pickCandidate(rel: [string, string], index: number): void {
    const expansion = this.expansions.find((e) => relKey(e.rel[0], e.rel[1]) === relKey(rel[0], rel[1]));
    if (!expansion || expansion.unreachable) {
      throw new Error(`no selectable paths for relationship ${rel[0]}|${rel[1]}`);
    }
    if (index < 0 || index >= expansion.candidates.length) {
      throw new Error(`candidate index ${index} out of range`);
    }
    this.pendingSelections.set(relKey(rel[0], rel[1]), index);
    this.notify();
  }

  async confirmSelections(): Promise<void> {
    const selections = Object.fromEntries(this.pendingSelections);
    const response = await this.guard(() => this.client.select(this.requireSession(), selections));
    this.confirmedSelections = response.selections;
    this.page = "select";
    this.notify();
  }

  async fetchResults(params: ResultParams = {}): Promise<void> {
    this.results = await this.guard(() => this.client.results(this.requireSession(), params));
    this.page = "results";
    this.notify();
  }

  /** Re-submit the (possibly edited) query over the existing session. */
  async editAndRestart(): Promise<void> {
    const query = this.submittableQuery();
    const check = this.validate(query);
    if (!check.ok) {
      this.lastError = check.reason;
      this.notify();
      throw new Error(check.reason);
    }
    const sessionId = this.requireSession();
    await this.guard(() => this.client.editSession(sessionId, query));
    this.expansions = [];
    this.pendingSelections.clear();
    this.confirmedSelections = {};
    this.results = null;
    this.page = "build";
    this.notify();
  }

  private requireSession(): string {
    if (!this.sessionId) {
      throw new Error("no active session; submit the query first");
    }
    return this.sessionId;
  }

  private async guard<T>(call: () => Promise<T>): Promise<T> {
    try {
      const value = await call();
      this.lastError = null;
      return value;
    } catch (error) {
      this.lastError = error instanceof Error ? error.message : String(error);
      this.notify();
      throw error;
    }
  }
}

export function connectedComponents(nodes: string[], rels: [string, string][]): string[][] {
  const adjacency = new Map<string, Set<string>>(nodes.map((n) => [n, new Set<string>()]));
  for (const [a, b] of rels) {
    adjacency.get(a)?.add(b);
    adjacency.get(b)?.add(a);
  }
  const seen = new Set<string>();
  const components: string[][] = [];
  for (const start of [...nodes].sort()) {
    if (seen.has(start)) {
      continue;
    }
    const component: string[] = [];
    const queue = [start];
    seen.add(start);
    while (queue.length > 0) {
      const current = queue.shift() as string;
      component.push(current);
      for (const next of adjacency.get(current) ?? []) {
        if (!seen.has(next)) {
          seen.add(next);
          queue.push(next);
        }
      }
    }
    components.push(component.sort());
  }
  return components;
}
