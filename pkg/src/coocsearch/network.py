"""Co-occurrence network construction.

Relationships are mined in a single pass over the publications; each edge
carries PMI, NPMI and Cramér's V computed from document frequencies.
Edges with NPMI <= 0 are pruned at consolidation, and connectivity of the
surviving graph is verified and reported (a disconnected result is a
warning, not an error).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .annotate import ConceptEntity, RawEntityMention
from .kernels import LOG_BASE, edge_stats

NETWORK_FORMAT_VERSION = 1
EDGE_SEPARATOR = "—"  # em-dash

PairKey = tuple[str, str]  # concept ids, sorted


def pair_key(a: str, b: str) -> PairKey:
    if a == b:
        raise ValueError(f"self-pair not allowed: {a!r}")
    return (a, b) if a < b else (b, a)


def edge_name(name_x: str, name_y: str) -> str:
    """Canonical relationship name: endpoint names in alphabetical order.

    Names containing the separator are escaped by doubling it.
    """
    first, second = sorted((name_x, name_y))
    esc = EDGE_SEPARATOR * 2
    return f"{first.replace(EDGE_SEPARATOR, esc)}{EDGE_SEPARATOR}{second.replace(EDGE_SEPARATOR, esc)}"


def parse_edge_name(name: str) -> tuple[str, str]:
    """Inverse of edge_name; raises on a malformed name."""
    parts: list[str] = []
    buf: list[str] = []
    i = 0
    while i < len(name):
        if name[i] == EDGE_SEPARATOR:
            if i + 1 < len(name) and name[i + 1] == EDGE_SEPARATOR:
                buf.append(EDGE_SEPARATOR)
                i += 2
                continue
            parts.append("".join(buf))
            buf = []
            i += 1
            continue
        buf.append(name[i])
        i += 1
    parts.append("".join(buf))
    if len(parts) != 2:
        raise ValueError(f"malformed edge name: {name!r}")
    return parts[0], parts[1]


@dataclass(frozen=True)
class CoocEdge:
    name: str
    a: str  # concept_id, a < b
    b: str
    frequency: int
    pmi: float
    npmi: float
    cramers_v: float
    degenerate_v: bool = False

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "a": self.a,
            "b": self.b,
            "frequency": self.frequency,
            "pmi": self.pmi,
            "npmi": self.npmi,
            "cramers_v": self.cramers_v,
            "degenerate_v": self.degenerate_v,
        }

    @classmethod
    def from_json(cls, d: dict) -> "CoocEdge":
        return cls(
            d["name"], d["a"], d["b"], d["frequency"],
            d["pmi"], d["npmi"], d["cramers_v"], d.get("degenerate_v", False),
        )


@dataclass
class CoocNetwork:
    entities: dict[str, ConceptEntity]
    edges: dict[PairKey, CoocEdge]
    n_docs: int
    n_components: int = 1
    isolated: set[str] = field(default_factory=set)

    def __post_init__(self):
        self._adjacency: dict[str, set[str]] | None = None
        self._by_name: dict[str, CoocEdge] | None = None

    @property
    def adjacency(self) -> dict[str, set[str]]:
        if self._adjacency is None:
            adj: dict[str, set[str]] = {cid: set() for cid in self.entities}
            for a, b in self.edges:
                adj[a].add(b)
                adj[b].add(a)
            self._adjacency = adj
        return self._adjacency

    @property
    def edges_by_name(self) -> dict[str, CoocEdge]:
        if self._by_name is None:
            self._by_name = {e.name: e for e in self.edges.values()}
        return self._by_name

    def has_entity(self, concept_id: str) -> bool:
        return concept_id in self.entities

    def edge(self, a: str, b: str) -> CoocEdge | None:
        return self.edges.get(pair_key(a, b))

    def name_of(self, a: str, b: str) -> str:
        return edge_name(self.entities[a].name, self.entities[b].name)

    @property
    def connected(self) -> bool:
        return self.n_components <= 1


def build_lookup_tables(
    mentions: Iterable[RawEntityMention],
) -> tuple[dict[str, list[str]], dict[str, list[str]]]:
    """Materialize publication->entities and entity->publications maps."""
    pub_entities: dict[str, set[str]] = {}
    entity_pubs: dict[str, set[str]] = {}
    for m in mentions:
        pub_entities.setdefault(m.pub_id, set()).add(m.concept_id)
        entity_pubs.setdefault(m.concept_id, set()).add(m.pub_id)
    return (
        {p: sorted(es) for p, es in sorted(pub_entities.items())},
        {e: sorted(ps) for e, ps in sorted(entity_pubs.items())},
    )


def mine_links(
    publication_entities: dict[str, list[str]],
) -> tuple[dict[PairKey, int], dict[PairKey, list[str]]]:
    """Single pass over publications: every unordered pair of distinct
    entities in a publication contributes one co-occurrence."""
    freq: dict[PairKey, int] = {}
    postings: dict[PairKey, list[str]] = {}
    for pub_id in sorted(publication_entities):
        ents = sorted(set(publication_entities[pub_id]))
        for i in range(len(ents)):
            for j in range(i + 1, len(ents)):
                key = (ents[i], ents[j])
                freq[key] = freq.get(key, 0) + 1
                postings.setdefault(key, []).append(pub_id)
    return freq, postings


def count_components(nodes: Iterable[str], adjacency: dict[str, set[str]]) -> int:
    """BFS component count over the given node set."""
    nodes = set(nodes)
    seen: set[str] = set()
    components = 0
    for start in sorted(nodes):
        if start in seen:
            continue
        components += 1
        queue = deque([start])
        seen.add(start)
        while queue:
            cur = queue.popleft()
            for nxt in adjacency.get(cur, ()):
                if nxt in nodes and nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return components


def consolidate(
    bigrams: dict[PairKey, int],
    entities: list[ConceptEntity],
    n_docs: int,
) -> CoocNetwork:
    """Score every bigram, prune NPMI <= 0, verify connectivity.

    Entities whose edges are all pruned stay in the table but are flagged
    as isolated.
    """
    by_id = {e.concept_id: e for e in entities}
    keys = sorted(bigrams)
    edges: dict[PairKey, CoocEdge] = {}
    if keys:
        f_x = np.array([by_id[a].frequency for a, _ in keys], dtype=np.int64)
        f_y = np.array([by_id[b].frequency for _, b in keys], dtype=np.int64)
        f_xy = np.array([bigrams[k] for k in keys], dtype=np.int64)
        pmi_v, npmi_v, v_v, deg_v = edge_stats(f_x, f_y, f_xy, n_docs)
        for idx, (a, b) in enumerate(keys):
            if npmi_v[idx] <= 0.0:
                continue
            edges[(a, b)] = CoocEdge(
                name=edge_name(by_id[a].name, by_id[b].name),
                a=a,
                b=b,
                frequency=int(f_xy[idx]),
                pmi=float(pmi_v[idx]),
                npmi=float(npmi_v[idx]),
                cramers_v=float(v_v[idx]),
                degenerate_v=bool(deg_v[idx]),
            )

    net = CoocNetwork(entities=by_id, edges=edges, n_docs=n_docs)
    non_isolated = {cid for key in edges for cid in key}
    net.isolated = set(by_id) - non_isolated
    net.n_components = count_components(non_isolated, net.adjacency) if non_isolated else 0
    return net


def network_header(net: CoocNetwork, config_hash: str = "") -> dict:
    return {
        "format_version": NETWORK_FORMAT_VERSION,
        "n_docs": net.n_docs,
        "log_base": LOG_BASE,
        "npmi_prune_threshold": 0.0,
        "config_hash": config_hash,
        "n_components": net.n_components,
        "connected": net.connected,
        "n_entities": len(net.entities),
        "n_edges": len(net.edges),
        "isolated_entities": sorted(net.isolated),
    }


def write_network(net: CoocNetwork, out_dir: str | Path, config_hash: str = "") -> None:
    out_dir = Path(out_dir)
    with open(out_dir / "entities.ndjson", "w", encoding="utf-8") as fh:
        for cid in sorted(net.entities):
            fh.write(json.dumps(net.entities[cid].to_json(), sort_keys=True, ensure_ascii=False) + "\n")
    with open(out_dir / "edges.ndjson", "w", encoding="utf-8") as fh:
        for edge in sorted(net.edges.values(), key=lambda e: e.name):
            fh.write(json.dumps(edge.to_json(), sort_keys=True, ensure_ascii=False) + "\n")
    with open(out_dir / "network_header.json", "w", encoding="utf-8") as fh:
        json.dump(network_header(net, config_hash), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_network(out_dir: str | Path) -> CoocNetwork:
    out_dir = Path(out_dir)
    with open(out_dir / "network_header.json", encoding="utf-8") as fh:
        header = json.load(fh)
    if header.get("format_version") != NETWORK_FORMAT_VERSION:
        raise ValueError(
            f"network format version mismatch: file has {header.get('format_version')}, "
            f"reader supports {NETWORK_FORMAT_VERSION}"
        )
    entities: dict[str, ConceptEntity] = {}
    with open(out_dir / "entities.ndjson", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                e = ConceptEntity.from_json(json.loads(line))
                entities[e.concept_id] = e
    edges: dict[PairKey, CoocEdge] = {}
    with open(out_dir / "edges.ndjson", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                e = CoocEdge.from_json(json.loads(line))
                edges[(e.a, e.b)] = e
    net = CoocNetwork(entities=entities, edges=edges, n_docs=header["n_docs"])
    net.n_components = header["n_components"]
    net.isolated = set(header.get("isolated_entities", ()))
    return net
