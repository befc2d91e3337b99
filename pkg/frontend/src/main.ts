/** Entry point: wires the store, the layout, and the page renderers. */

import { ApiClient } from "./api.js";
import { ForceLayout } from "./layout.js";
import { QueryStore, type Page } from "./store.js";
import {
  renderCanvas,
  renderConceptBrowser,
  renderPathPicker,
  renderResults,
} from "./views.js";

export interface AppElements {
  browser: HTMLElement;
  canvas: HTMLElement;
  paths: HTMLElement;
  results: HTMLElement;
  pageLabel: HTMLElement;
  submit: HTMLButtonElement;
  retrieve: HTMLButtonElement;
  search: HTMLInputElement;
}

const PAGE_TITLES: Record<Page, string> = {
  build: "1 · Build the graph query",
  paths: "2 · Inspect candidate paths",
  select: "3 · Paths selected",
  results: "4 · Ranked results",
};

export function startApp(elements: AppElements, baseUrl: string): QueryStore {
  const client = new ApiClient(baseUrl);
  const store = new QueryStore(client);
  const browser = renderConceptBrowser(elements.browser, client, (concept) => {
    store.addNode(concept.concept_id, concept.name, 400 + Math.random() * 40, 300 + Math.random() * 40);
    relayout(store);
  });

  elements.search.addEventListener("input", () => {
    void browser.refresh({ prefix: elements.search.value, limit: 20 });
  });
  elements.submit.addEventListener("click", () => {
    void store.submit().catch(() => undefined);
  });
  elements.retrieve.addEventListener("click", () => {
    void store.fetchResults().catch(() => undefined);
  });

  store.subscribe(() => {
    elements.pageLabel.textContent = PAGE_TITLES[store.page];
    renderCanvas(elements.canvas, store);
    renderPathPicker(elements.paths, store, () => {
      void store.confirmSelections().catch(() => undefined);
    });
    renderResults(elements.results, store, {
      onSort: (sort) => {
        void store.fetchResults({ sort }).catch(() => undefined);
      },
      onEdit: () => {
        void store.editAndRestart().catch(() => undefined);
      },
    });
  });

  void browser.refresh({ limit: 20 });
  return store;
}

function relayout(store: QueryStore): void {
  const nodes = [...store.nodes.values()].map((n) => ({
    id: n.conceptId,
    x: n.x,
    y: n.y,
    pinned: n.pinned,
  }));
  const layout = new ForceLayout(nodes, store.rels.map((r) => ({ a: r.a, b: r.b })));
  layout.run(60);
  for (const node of layout.nodes) {
    const placed = store.nodes.get(node.id);
    if (placed && !placed.pinned) {
      placed.x = node.x;
      placed.y = node.y;
    }
  }
}

declare global {
  interface Window {
    __coocsearchStore?: QueryStore;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const byId = (id: string) => document.getElementById(id) as HTMLElement;
  window.__coocsearchStore = startApp(
    {
      browser: byId("concept-browser"),
      canvas: byId("query-canvas"),
      paths: byId("path-picker"),
      results: byId("results-view"),
      pageLabel: byId("page-label"),
      submit: byId("submit-query") as HTMLButtonElement,
      retrieve: byId("fetch-results") as HTMLButtonElement,
      search: byId("concept-search") as HTMLInputElement,
    },
    (window as { COOCSEARCH_BASE_URL?: string }).COOCSEARCH_BASE_URL ?? "http://127.0.0.1:8000",
  );
}
