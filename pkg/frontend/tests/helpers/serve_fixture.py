"""Serve the worked retrieval example over HTTP for frontend tests.

Usage: python3 serve_fixture.py <port>

Builds the star-query fixture (three direct relationships, one 2-edge and
one 3-edge expansion; publication scores 9/2 and 11/3) in memory and runs
the real service on localhost.
"""

import datetime as dt
import sys

import uvicorn

from coocsearch.annotate import ConceptEntity
from coocsearch.corpus import PublicationRecord
from coocsearch.index_store import InvertedIndex, build_keyword_index
from coocsearch.network import CoocEdge, CoocNetwork, edge_name, pair_key
from coocsearch.pipeline import Artifacts
from coocsearch.service import create_app

EDGES = {
    ("A", "B"): 0.9,
    ("A", "C"): 0.8,
    ("A", "D"): 0.7,
    ("A", "X"): 0.6,
    ("X", "E"): 0.5,
    ("A", "Y"): 0.4,
    ("Y", "Z"): 0.3,
    ("Z", "F"): 0.2,
}

POSTINGS = {
    ("A", "B"): ["p1", "p2"],
    ("A", "C"): ["p1", "p2"],
    ("A", "D"): ["p1", "p2"],
    ("A", "X"): ["p1"],
    ("E", "X"): ["p3"],
    ("A", "Y"): ["p1", "p2"],
    ("Y", "Z"): ["p1", "p2"],
    ("F", "Z"): ["p1"],
}

DATES = {"p1": "2021-06-01", "p2": "2020-03-01", "p3": "2022-01-01"}
CITATIONS = {"p1": 12, "p2": 40, "p3": 3}


def build_artifacts() -> Artifacts:
    nodes = {n for pair in EDGES for n in pair}
    entities = {
        n: ConceptEntity(n, n, "UMLS-like", "T000", "ENTITY", 3) for n in nodes
    }
    edges = {}
    for (a, b), npmi in EDGES.items():
        key = pair_key(a, b)
        freq = len(POSTINGS[key])
        edges[key] = CoocEdge(edge_name(*key), key[0], key[1], freq, npmi, npmi, 0.0)
    net = CoocNetwork(entities=entities, edges=edges, n_docs=10)
    pubs = {
        pid: PublicationRecord(
            pub_id=pid,
            title=f"title {pid}",
            abstract=f"abstract {pid}",
            publish_date=dt.date.fromisoformat(date),
            date_precision="day",
            journal="Journal of Examples",
            doi=None,
            num_cited_by=CITATIONS[pid],
        )
        for pid, date in DATES.items()
    }
    inverted = InvertedIndex(
        {edges[k].name: v for k, v in POSTINGS.items()}, n_docs=10
    )
    return Artifacts(
        publications=pubs,
        net=net,
        inverted=inverted,
        keyword=build_keyword_index(pubs.values()),
        config_hash="fixture",
    )


def main() -> None:
    port = int(sys.argv[1])
    app = create_app(build_artifacts())
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


if __name__ == "__main__":
    main()
