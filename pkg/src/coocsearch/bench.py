"""Query latency benchmark.

Samples random connected subgraphs of the network by random walk with
restarts (restart probability 0.15), runs them as graph queries with
default path selections, and times the matching and retrieval phases
separately.
"""

from __future__ import annotations

import statistics
import time

import numpy as np

from .engine import GraphQuery, apply_selections, find_paths, retrieve
from .index_store import InvertedIndex
from .network import CoocNetwork, pair_key

RESTART_PROBABILITY = 0.15
_MAX_STEPS_PER_NODE = 10_000


class BenchError(Exception):
    pass


def random_walk_query(
    net: CoocNetwork,
    n_nodes: int,
    rng: np.random.Generator,
    restart: float = RESTART_PROBABILITY,
) -> GraphQuery:
    """Sample a connected n_nodes query; its rels are the network edges
    induced by the visited node set."""
    candidates = sorted(cid for cid in net.entities if cid not in net.isolated)
    if len(candidates) < n_nodes:
        raise BenchError(f"network has {len(candidates)} connected entities, need {n_nodes}")
    adj = net.adjacency
    start_order = list(rng.permutation(len(candidates)))
    for start_idx in start_order:
        start = candidates[start_idx]
        visited = {start}
        cur = start
        steps = 0
        budget = _MAX_STEPS_PER_NODE * n_nodes
        while len(visited) < n_nodes and steps < budget:
            steps += 1
            if rng.random() < restart:
                cur = start
                continue
            neighbors = sorted(adj[cur])
            if not neighbors:
                break
            cur = neighbors[rng.integers(len(neighbors))]
            visited.add(cur)
        if len(visited) == n_nodes:
            rels = {
                pair_key(a, b)
                for a in visited
                for b in adj[a]
                if b in visited and a < b
            }
            return GraphQuery(frozenset(visited), frozenset(rels))
    raise BenchError(f"could not sample a connected query of {n_nodes} nodes")


def run_bench(
    net: CoocNetwork,
    index: InvertedIndex,
    publications: dict,
    sizes: list[int],
    reps: int = 10,
    seed: int = 0,
    restart: float = RESTART_PROBABILITY,
    k: int = 10,
) -> dict:
    rng = np.random.default_rng(seed)
    results: dict = {
        "params": {"sizes": sizes, "reps": reps, "seed": seed, "restart_probability": restart, "top_k_paths": k},
        "sizes": {},
        "samples": [],
    }
    for size in sizes:
        matching_times: list[float] = []
        retrieval_times: list[float] = []
        for rep in range(reps):
            query = random_walk_query(net, size, rng, restart)
            t0 = time.perf_counter()
            expansions = find_paths(query, net, k)
            t1 = time.perf_counter()
            apply_selections(expansions, None)
            ranked = retrieve(expansions, index, publications)
            t2 = time.perf_counter()
            matching_times.append(t1 - t0)
            retrieval_times.append(t2 - t1)
            results["samples"].append(
                {
                    "size": size,
                    "rep": rep,
                    "query_nodes": sorted(query.nodes),
                    "n_rels": len(query.rels),
                    "n_results": len(ranked),
                    "matching_s": t1 - t0,
                    "retrieval_s": t2 - t1,
                }
            )
        results["sizes"][str(size)] = {
            "matching_s": _summary(matching_times),
            "retrieval_s": _summary(retrieval_times),
        }
    return results


def _summary(values: list[float]) -> dict:
    return {"min": min(values), "median": statistics.median(values), "max": max(values)}


def bench_csv(results: dict) -> str:
    """Box-plot-ready CSV: one row per (size, rep, phase)."""
    lines = ["size,rep,phase,seconds"]
    for s in results["samples"]:
        lines.append(f"{s['size']},{s['rep']},matching,{s['matching_s']:.6f}")
        lines.append(f"{s['size']},{s['rep']},retrieval,{s['retrieval_s']:.6f}")
    return "\n".join(lines) + "\n"
