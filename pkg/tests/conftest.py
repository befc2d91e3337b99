"""Shared fixtures: hand-built networks, a small synthetic corpus, and the
worked retrieval example with scores 9/2 and 11/3."""

from __future__ import annotations

import datetime as dt

import pytest

from coocsearch.annotate import ConceptEntity
from coocsearch.corpus import PublicationRecord
from coocsearch.engine import GraphQuery
from coocsearch.index_store import InvertedIndex
from coocsearch.network import CoocEdge, CoocNetwork, edge_name, pair_key


def make_network(
    edge_npmi: dict[tuple[str, str], float],
    n_docs: int = 10,
    extra_nodes: tuple[str, ...] = (),
    entity_freq: int = 2,
    edge_freq: dict[tuple[str, str], int] | None = None,
) -> CoocNetwork:
    """Build a network directly from an edge -> npmi map (ids double as names)."""
    nodes = set(extra_nodes)
    for a, b in edge_npmi:
        nodes.update((a, b))
    entities = {
        n: ConceptEntity(n, n, "UMLS-like", "T000", "ENTITY", entity_freq)
        for n in nodes
    }
    edges = {}
    for (a, b), npmi in edge_npmi.items():
        key = pair_key(a, b)
        freq = (edge_freq or {}).get(key, 1)
        edges[key] = CoocEdge(edge_name(*key), key[0], key[1], freq, npmi, npmi, 0.0)
    net = CoocNetwork(entities=entities, edges=edges, n_docs=n_docs)
    connected = {c for k in edges for c in k}
    net.isolated = nodes - connected
    return net


def make_pub(pub_id: str, date: str = "2021-06-01", **kw) -> PublicationRecord:
    return PublicationRecord(
        pub_id=pub_id,
        title=kw.get("title", f"title {pub_id}"),
        abstract=kw.get("abstract", f"abstract {pub_id}"),
        publish_date=dt.date.fromisoformat(date),
        date_precision="day",
        journal=kw.get("journal"),
        doi=kw.get("doi"),
        num_cited_by=kw.get("num_cited_by"),
    )


@pytest.fixture
def figure_topology():
    """Topology where the 2-hop path A-X-B is the unique shortest A..B route
    among longer alternatives A-Y-Z-B and A-V-Y-Z-B."""
    edges = {
        ("A", "X"): 0.5,
        ("X", "B"): 0.6,
        ("A", "Y"): 0.9,
        ("Y", "Z"): 0.9,
        ("Z", "B"): 0.9,
        ("A", "V"): 0.8,
        ("V", "Y"): 0.8,
    }
    return make_network(edges)


class WorkedExample:
    """Five-relationship star query: three direct edges, one 2-edge and one
    3-edge expansion. pub1 scores 9/2, pub2 scores 11/3."""

    def __init__(self):
        self.edges = {
            ("A", "B"): 0.9,
            ("A", "C"): 0.8,
            ("A", "D"): 0.7,
            ("A", "X"): 0.6,
            ("X", "E"): 0.5,
            ("A", "Y"): 0.4,
            ("Y", "Z"): 0.3,
            ("Z", "F"): 0.2,
        }
        self.postings = {
            ("A", "B"): ["p1", "p2"],
            ("A", "C"): ["p1", "p2"],
            ("A", "D"): ["p1", "p2"],
            ("A", "X"): ["p1"],
            ("E", "X"): ["p3"],
            ("A", "Y"): ["p1", "p2"],
            ("Y", "Z"): ["p1", "p2"],
            ("F", "Z"): ["p1"],
        }
        edge_freq = {pair_key(a, b): len(v) for (a, b), v in self.postings.items()}
        self.net = make_network(self.edges, n_docs=10, edge_freq=edge_freq, entity_freq=3)
        self.query = GraphQuery.from_pairs(
            ["A", "B", "C", "D", "E", "F"],
            [("A", "B"), ("A", "C"), ("A", "D"), ("A", "E"), ("A", "F")],
        )
        self.index = InvertedIndex(
            {self.net.edges[pair_key(a, b)].name: pubs for (a, b), pubs in self.postings.items()},
            n_docs=10,
        )
        self.pubs = {
            "p1": make_pub("p1", "2021-06-01"),
            "p2": make_pub("p2", "2020-03-01"),
            "p3": make_pub("p3", "2022-01-01"),
        }


@pytest.fixture
def worked_example():
    return WorkedExample()
