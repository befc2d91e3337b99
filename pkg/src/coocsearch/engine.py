"""Graph query matching, path expansion, and publication scoring.

A query relationship already present in the network is matched directly;
a missing one is expanded into all minimal-hop paths between its
endpoints, ranked by average NPMI (top 10 kept). Publications are scored
by the fraction of each selected path they mention, summed over the
query's relationships, as exact rationals.
"""

from __future__ import annotations

import datetime as dt
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .corpus import PublicationRecord
from .index_store import InvertedIndex
from .network import CoocEdge, CoocNetwork, PairKey, count_components, pair_key

TOP_K_PATHS = 10


class QueryError(Exception):
    pass


class ValidationError(QueryError):
    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}


@dataclass(frozen=True)
class GraphQuery:
    nodes: frozenset[str]
    rels: frozenset[PairKey]

    @classmethod
    def from_pairs(cls, nodes, rels) -> "GraphQuery":
        return cls(frozenset(nodes), frozenset(pair_key(a, b) for a, b in rels))

    @classmethod
    def from_json(cls, d: dict) -> "GraphQuery":
        return cls.from_pairs(d["nodes"], d["rels"])

    def to_json(self) -> dict:
        return {"nodes": sorted(self.nodes), "rels": [list(r) for r in sorted(self.rels)]}


def load_query_file(path: str | Path) -> tuple[GraphQuery, dict[PairKey, int]]:
    """Query JSON: nodes, rels, and optional selections (rel -> index)."""
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    q = GraphQuery.from_json(d)
    selections: dict[PairKey, int] = {}
    for key, idx in (d.get("selections") or {}).items():
        a, _, b = key.partition("|")
        selections[pair_key(a, b)] = int(idx)
    return q, selections


@dataclass(frozen=True)
class CandidatePath:
    nodes: tuple[str, ...]  # endpoint-to-endpoint node sequence
    edges: tuple[CoocEdge, ...]

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def avg_npmi(self) -> float:
        return sum(e.npmi for e in self.edges) / len(self.edges)

    @property
    def edge_names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.edges)

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": list(self.edge_names),
            "length": self.length,
            "avg_npmi": self.avg_npmi,
        }


@dataclass
class Expansion:
    rel: PairKey
    candidates: list[CandidatePath]
    direct: bool = False
    unreachable: bool = False
    selected: int | None = None

    @property
    def selected_path(self) -> CandidatePath | None:
        if self.unreachable or not self.candidates:
            return None
        return self.candidates[self.selected if self.selected is not None else 0]

    def to_json(self) -> dict:
        return {
            "rel": list(self.rel),
            "direct": self.direct,
            "unreachable": self.unreachable,
            "selected": self.selected,
            "candidates": [c.to_json() for c in self.candidates],
        }


@dataclass(frozen=True)
class ScoredPublication:
    publication: PublicationRecord
    score: Fraction
    npmi_sum: float
    explained: tuple[dict, ...]  # per-relationship breakdown

    def to_json(self) -> dict:
        return {
            "pub_id": self.publication.pub_id,
            "title": self.publication.title,
            "abstract": self.publication.abstract,
            "publish_date": self.publication.publish_date.isoformat(),
            "journal": self.publication.journal,
            "doi": self.publication.doi,
            "num_cited_by": self.publication.num_cited_by,
            "score": float(self.score),
            "score_rational": [self.score.numerator, self.score.denominator],
            "npmi_sum": self.npmi_sum,
            "explained": list(self.explained),
        }


def validate_query(q: GraphQuery, net: CoocNetwork) -> None:
    if len(q.nodes) < 2:
        raise ValidationError("a query needs at least 2 nodes", {"nodes": sorted(q.nodes)})
    unknown = sorted(n for n in q.nodes if not net.has_entity(n))
    if unknown:
        raise ValidationError(f"unknown concepts: {unknown}", {"unknown_concepts": unknown})
    loose = sorted(n for rel in q.rels for n in rel if n not in q.nodes)
    if loose:
        raise ValidationError(f"relationship endpoints not in node set: {loose}", {"loose_endpoints": loose})
    adj: dict[str, set[str]] = {n: set() for n in q.nodes}
    for a, b in q.rels:
        adj[a].add(b)
        adj[b].add(a)
    components = _components(q.nodes, adj)
    if len(components) > 1:
        raise ValidationError(
            f"query is disconnected ({len(components)} components)",
            {"components": [sorted(c) for c in components]},
        )


def _components(nodes: frozenset[str], adj: dict[str, set[str]]) -> list[set[str]]:
    seen: set[str] = set()
    out = []
    for start in sorted(nodes):
        if start in seen:
            continue
        comp = {start}
        queue = deque([start])
        seen.add(start)
        while queue:
            cur = queue.popleft()
            for nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    comp.add(nxt)
                    queue.append(nxt)
        out.append(comp)
    return out


def all_shortest_paths(net: CoocNetwork, source: str, target: str) -> list[tuple[str, ...]]:
    """All minimal-hop node paths between source and target (BFS + parent DAG)."""
    if source == target:
        return [(source,)]
    dist = {source: 0}
    parents: dict[str, list[str]] = {source: []}
    queue = deque([source])
    target_dist = None
    adj = net.adjacency
    while queue:
        cur = queue.popleft()
        if target_dist is not None and dist[cur] >= target_dist:
            break
        for nxt in adj.get(cur, ()):
            d = dist[cur] + 1
            if nxt not in dist:
                dist[nxt] = d
                parents[nxt] = [cur]
                if nxt == target:
                    target_dist = d
                else:
                    queue.append(nxt)
            elif dist[nxt] == d:
                parents[nxt].append(cur)
    if target not in dist:
        return []
    paths: list[tuple[str, ...]] = []
    stack: list[tuple[str, tuple[str, ...]]] = [(target, (target,))]
    while stack:
        node, suffix = stack.pop()
        if node == source:
            paths.append(suffix)
            continue
        for par in parents[node]:
            stack.append((par, (par, *suffix)))
    return paths


def find_paths(q: GraphQuery, net: CoocNetwork, k: int = TOP_K_PATHS) -> list[Expansion]:
    """One expansion per query relationship, in sorted rel order."""
    expansions = []
    for rel in sorted(q.rels):
        a, b = rel
        direct = net.edge(a, b)
        if direct is not None:
            expansions.append(Expansion(rel, [CandidatePath((a, b), (direct,))], direct=True))
            continue
        node_paths = all_shortest_paths(net, a, b)
        if not node_paths:
            expansions.append(Expansion(rel, [], unreachable=True))
            continue
        candidates = []
        for nodes in node_paths:
            edges = tuple(net.edges[pair_key(u, v)] for u, v in zip(nodes, nodes[1:]))
            candidates.append(CandidatePath(nodes, edges))
        candidates.sort(key=lambda c: (-c.avg_npmi, c.edge_names))
        expansions.append(Expansion(rel, candidates[:k]))
    return expansions


def select_path(expansions: list[Expansion], rel: PairKey, index: int) -> None:
    for exp in expansions:
        if exp.rel == rel:
            if exp.unreachable or not exp.candidates:
                raise QueryError(f"cannot select a path for unreachable relationship {rel}")
            if not (0 <= index < len(exp.candidates)):
                raise QueryError(f"path index {index} out of range for {rel} ({len(exp.candidates)} candidates)")
            exp.selected = index
            return
    raise QueryError(f"unknown relationship {rel}")


def apply_selections(expansions: list[Expansion], selections: dict[PairKey, int] | None) -> None:
    """Explicit selections first; every other non-empty expansion defaults to
    the top average-NPMI candidate (index 0)."""
    for rel, idx in (selections or {}).items():
        select_path(expansions, rel, idx)
    for exp in expansions:
        if exp.selected is None and not exp.unreachable:
            exp.selected = 0


def score_publication(mentioned: set[str], expansions: list[Expansion]) -> Fraction:
    """Sum over relationships of (mentioned path edges) / (path length)."""
    total = Fraction(0)
    for exp in expansions:
        path = exp.selected_path
        if path is None:
            continue
        m = sum(1 for name in path.edge_names if name in mentioned)
        total += Fraction(m, path.length)
    return total


def retrieve(
    expansions: list[Expansion],
    index: InvertedIndex,
    pubs: dict[str, PublicationRecord],
) -> list[ScoredPublication]:
    """Score and rank every publication mentioning any selected-path edge.

    Ranking keys: score desc, NPMI sum desc, publish date newest first,
    pub_id asc as the determinism key. Each mentioned edge counts once in
    npmi_sum even when shared by two selected paths.
    """
    edge_pubs: dict[str, set[str]] = {}
    edge_npmi: dict[str, float] = {}
    for exp in expansions:
        path = exp.selected_path
        if path is None:
            continue
        for edge in path.edges:
            if edge.name not in edge_pubs:
                edge_pubs[edge.name] = set(index.lookup(edge.name))
                edge_npmi[edge.name] = edge.npmi
    candidates = set()
    for pubs_of_edge in edge_pubs.values():
        candidates |= pubs_of_edge

    results = []
    for pub_id in candidates:
        if pub_id not in pubs:
            continue
        mentioned = {name for name, plist in edge_pubs.items() if pub_id in plist}
        score = score_publication(mentioned, expansions)
        npmi_sum = sum(edge_npmi[name] for name in mentioned)
        breakdown = []
        for exp in expansions:
            path = exp.selected_path
            if path is None:
                breakdown.append(
                    {"rel": list(exp.rel), "explained_edges": 0, "path_length": 0, "fraction": 0.0, "unreachable": True}
                )
                continue
            m = sum(1 for name in path.edge_names if name in mentioned)
            breakdown.append(
                {
                    "rel": list(exp.rel),
                    "explained_edges": m,
                    "path_length": path.length,
                    "fraction": m / path.length,
                    "unreachable": False,
                }
            )
        results.append(ScoredPublication(pubs[pub_id], score, npmi_sum, tuple(breakdown)))

    results.sort(
        key=lambda r: (
            -r.score,
            -r.npmi_sum,
            -r.publication.publish_date.toordinal(),
            r.publication.pub_id,
        )
    )
    return results


def run_query(
    q: GraphQuery,
    net: CoocNetwork,
    index: InvertedIndex,
    pubs: dict[str, PublicationRecord],
    selections: dict[PairKey, int] | None = None,
    k: int = TOP_K_PATHS,
) -> tuple[list[Expansion], list[ScoredPublication]]:
    validate_query(q, net)
    expansions = find_paths(q, net, k)
    apply_selections(expansions, selections)
    return expansions, retrieve(expansions, index, pubs)


def induced_subquery(q: GraphQuery, node_subset: set[str]) -> GraphQuery:
    subset = frozenset(node_subset)
    missing = sorted(subset - q.nodes)
    if missing:
        raise ValidationError(f"subset nodes not in query: {missing}", {"missing": missing})
    rels = frozenset(r for r in q.rels if r[0] in subset and r[1] in subset)
    return GraphQuery(subset, rels)


def run_subgraph(
    q: GraphQuery,
    node_subset: set[str],
    net: CoocNetwork,
    index: InvertedIndex,
    pubs: dict[str, PublicationRecord],
    selections: dict[PairKey, int] | None = None,
    k: int = TOP_K_PATHS,
) -> tuple[list[Expansion], list[ScoredPublication]]:
    """Run the full pipeline on the induced connected subgraph of the query."""
    return run_query(induced_subquery(q, node_subset), net, index, pubs, selections, k)
