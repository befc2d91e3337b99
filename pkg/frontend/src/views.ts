/** DOM renderers for the four pages. Each renderer rebuilds its container
 * from the current store state; all numbers shown come straight from the
 * service responses (the client never recomputes scores or paths). */

import { relKey, type ApiClient, type ConceptFilters } from "./api.js";
import { formatFraction, formatNpmi, formatScore } from "./format.js";
import type { QueryStore } from "./store.js";
import type { ConceptJson, ExpansionJson, ResultSort, ScoredPublicationJson } from "./types.js";

function clear(container: HTMLElement): Document {
  container.textContent = "";
  return container.ownerDocument;
}

// ---- concept browser -------------------------------------------------------

export interface ConceptBrowserHandle {
  refresh(filters: ConceptFilters): Promise<void>;
}

export function renderConceptBrowser(
  container: HTMLElement,
  client: ApiClient,
  onPick: (concept: ConceptJson) => void,
): ConceptBrowserHandle {
  const doc = clear(container);
  const list = doc.createElement("ul");
  list.className = "concept-list";
  const status = doc.createElement("p");
  status.className = "concept-status";
  container.append(status, list);

  async function refresh(filters: ConceptFilters): Promise<void> {
    try {
      const response = await client.concepts(filters);
      list.textContent = "";
      if (response.results.length === 0) {
        status.textContent = "No concepts match; relax the prefix or filters.";
        return;
      }
      status.textContent = `${response.total} matching concepts`;
      for (const concept of response.results) {
        const item = doc.createElement("li");
        item.className = "concept-item";
        item.dataset.conceptId = concept.concept_id;
        item.textContent = `${concept.name} [${concept.concept_id}] — ${concept.semantic_type}, ${concept.macrocategory}`;
        item.addEventListener("click", () => onPick(concept));
        list.append(item);
      }
    } catch (error) {
      status.textContent = `Lookup failed: ${error instanceof Error ? error.message : error}`;
    }
  }

  return { refresh };
}

// ---- query canvas ----------------------------------------------------------

export function renderCanvas(container: HTMLElement, store: QueryStore): void {
  const doc = clear(container);
  const svg = doc.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("class", "query-canvas");
  svg.setAttribute("viewBox", "0 0 800 600");

  const validation = store.validate(store.currentQuery());
  const badComponent = new Set<string>();
  if (!validation.ok && validation.components.length > 1) {
    // highlight every component beyond the first so the split is visible
    for (const component of validation.components.slice(1)) {
      for (const id of component) {
        badComponent.add(id);
      }
    }
  }

  for (const rel of store.rels) {
    const a = store.nodes.get(rel.a);
    const b = store.nodes.get(rel.b);
    if (!a || !b) {
      continue;
    }
    const line = doc.createElementNS("http://www.w3.org/2000/svg", "line");
    line.setAttribute("x1", String(a.x));
    line.setAttribute("y1", String(a.y));
    line.setAttribute("x2", String(b.x));
    line.setAttribute("y2", String(b.y));
    line.setAttribute("class", "rel-line");
    line.setAttribute("data-rel", relKey(rel.a, rel.b));
    svg.append(line);
  }

  for (const node of store.nodes.values()) {
    const group = doc.createElementNS("http://www.w3.org/2000/svg", "g");
    group.setAttribute("data-concept-id", node.conceptId);
    const classes = ["node"];
    if (badComponent.has(node.conceptId)) {
      classes.push("node-disconnected");
    }
    if (store.subset.has(node.conceptId)) {
      classes.push("node-subset");
    }
    group.setAttribute("class", classes.join(" "));
    const circle = doc.createElementNS("http://www.w3.org/2000/svg", "circle");
    circle.setAttribute("cx", String(node.x));
    circle.setAttribute("cy", String(node.y));
    circle.setAttribute("r", "18");
    const label = doc.createElementNS("http://www.w3.org/2000/svg", "text");
    label.setAttribute("x", String(node.x));
    label.setAttribute("y", String(node.y - 24));
    label.textContent = node.name;
    group.append(circle, label);
    svg.append(group);
  }

  container.append(svg);

  const hint = doc.createElement("p");
  hint.className = "canvas-hint";
  hint.textContent = validation.ok
    ? "Query is connected and ready to submit."
    : validation.reason;
  container.append(hint);
}

// ---- path picker -----------------------------------------------------------

export function renderPathPicker(
  container: HTMLElement,
  store: QueryStore,
  onConfirm: () => void,
): void {
  const doc = clear(container);
  for (const expansion of store.expansions) {
    container.append(renderExpansion(doc, store, expansion));
  }
  const confirm = doc.createElement("button");
  confirm.className = "confirm-selections";
  confirm.textContent = "Use selected paths";
  confirm.addEventListener("click", onConfirm);
  container.append(confirm);
}

function renderExpansion(doc: Document, store: QueryStore, expansion: ExpansionJson): HTMLElement {
  const key = relKey(expansion.rel[0], expansion.rel[1]);
  const section = doc.createElement("section");
  section.className = "expansion";
  section.dataset.rel = key;

  const heading = doc.createElement("h3");
  heading.textContent = expansion.direct
    ? `${expansion.rel[0]} — ${expansion.rel[1]} (direct)`
    : `${expansion.rel[0]} — ${expansion.rel[1]}`;
  section.append(heading);

  if (expansion.unreachable) {
    const flag = doc.createElement("p");
    flag.className = "unreachable-flag";
    flag.textContent = "No path in the network; this relationship scores 0.";
    section.append(flag);
    return section;
  }

  const highlighted = store.pendingSelections.get(key) ?? 0;
  expansion.candidates.forEach((candidate, index) => {
    const chip = doc.createElement("button");
    chip.className = index === highlighted ? "path-chip path-chip-selected" : "path-chip";
    chip.dataset.index = String(index);
    chip.textContent = `${candidate.nodes.join(" → ")}  (${candidate.length} hops, avg NPMI ${formatNpmi(candidate.avg_npmi)})`;
    chip.addEventListener("click", () => store.pickCandidate(expansion.rel, index));
    section.append(chip);
  });
  return section;
}

// ---- results table ---------------------------------------------------------

export interface ResultsCallbacks {
  onSort(sort: ResultSort): void;
  onEdit(): void;
}

export function renderResults(
  container: HTMLElement,
  store: QueryStore,
  callbacks: ResultsCallbacks,
): void {
  const doc = clear(container);
  const response = store.results;
  if (!response) {
    const empty = doc.createElement("p");
    empty.textContent = "No results fetched yet.";
    container.append(empty);
    return;
  }

  const toolbar = doc.createElement("div");
  toolbar.className = "results-toolbar";
  for (const sort of ["score", "citations", "date"] as ResultSort[]) {
    const button = doc.createElement("button");
    button.className = `sort-${sort}`;
    button.textContent = `Sort by ${sort}`;
    button.addEventListener("click", () => callbacks.onSort(sort));
    toolbar.append(button);
  }
  const edit = doc.createElement("button");
  edit.className = "edit-query";
  edit.textContent = "Edit query";
  edit.addEventListener("click", callbacks.onEdit);
  toolbar.append(edit);
  container.append(toolbar);

  const table = doc.createElement("table");
  table.className = "results-table";
  const head = doc.createElement("tr");
  for (const title of ["publication", "score", "NPMI sum", "date", "citations"]) {
    const cell = doc.createElement("th");
    cell.textContent = title;
    head.append(cell);
  }
  table.append(head);
  for (const row of response.results) {
    table.append(renderResultRow(doc, row));
  }
  container.append(table);

  const count = doc.createElement("p");
  count.className = "results-count";
  count.textContent = `${response.total} publications`;
  container.append(count);
}

function renderResultRow(doc: Document, row: ScoredPublicationJson): HTMLElement {
  const tr = doc.createElement("tr");
  tr.className = "result-row";
  tr.dataset.pubId = row.pub_id;

  const title = doc.createElement("td");
  title.className = "cell-title";
  title.textContent = row.title;
  const score = doc.createElement("td");
  score.className = "cell-score";
  score.textContent = formatScore(row.score);
  const npmiSum = doc.createElement("td");
  npmiSum.className = "cell-npmi";
  npmiSum.textContent = formatNpmi(row.npmi_sum);
  const date = doc.createElement("td");
  date.className = "cell-date";
  date.textContent = row.publish_date;
  const cited = doc.createElement("td");
  cited.className = "cell-citations";
  cited.textContent = row.num_cited_by === null ? "—" : String(row.num_cited_by);
  tr.append(title, score, npmiSum, date, cited);

  const detail = doc.createElement("div");
  detail.className = "result-detail";
  detail.hidden = true;
  const abstract = doc.createElement("p");
  abstract.className = "detail-abstract";
  abstract.textContent = row.abstract;
  detail.append(abstract);
  const breakdown = doc.createElement("ul");
  breakdown.className = "detail-breakdown";
  for (const item of row.explained) {
    const li = doc.createElement("li");
    li.dataset.rel = relKey(item.rel[0], item.rel[1]);
    li.textContent = item.unreachable
      ? `${item.rel[0]} — ${item.rel[1]}: unreachable`
      : `${item.rel[0]} — ${item.rel[1]}: ${formatFraction(item.explained_edges, item.path_length)} edges explained`;
    breakdown.append(li);
  }
  detail.append(breakdown);
  title.addEventListener("click", () => {
    detail.hidden = !detail.hidden;
  });
  title.append(detail);
  return tr;
}
