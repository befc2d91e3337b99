import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coocsearch.annotate import ConceptEntity, RawEntityMention
from coocsearch.kernels import npmi
from coocsearch.network import (
    build_lookup_tables,
    consolidate,
    count_components,
    edge_name,
    mine_links,
    network_header,
    pair_key,
    parse_edge_name,
    read_network,
    write_network,
)


def mention(pub_id, concept_id):
    return RawEntityMention(pub_id, concept_id, concept_id, 1.0, 0, 1)


def entity(cid, freq, name=None):
    return ConceptEntity(cid, name or cid, "UMLS-like", "T000", "ENTITY", freq)


def random_mentions(rng, n_pubs=8, n_concepts=6):
    out = []
    for p in range(n_pubs):
        for c in range(n_concepts):
            if rng.random() < 0.4:
                out.append(mention(f"p{p}", f"C{c}"))
    return out


class TestEdgeNames:
    def test_alphabetical(self):
        assert edge_name("fever", "ace2") == "ace2—fever"

    def test_parse_inverse(self):
        assert parse_edge_name("ace2—fever") == ("ace2", "fever")

    def test_separator_in_name_escaped(self):
        name = edge_name("a—b", "c")
        assert parse_edge_name(name) == ("a—b", "c")

    @settings(max_examples=200)
    @given(
        st.text(min_size=1, max_size=12),
        st.text(min_size=1, max_size=12),
    )
    def test_round_trip_property(self, a, b):
        first, second = sorted((a, b))
        assert parse_edge_name(edge_name(a, b)) == (first, second)

    def test_malformed_rejected(self):
        with pytest.raises(ValueError):
            parse_edge_name("no-separator-here")

    def test_self_pair_rejected(self):
        with pytest.raises(ValueError):
            pair_key("x", "x")


class TestLookupTables:
    def test_mutual_transpose(self):
        rng = random.Random(3)
        for _ in range(20):
            pub_ents, ent_pubs = build_lookup_tables(random_mentions(rng))
            # each table is exactly the transpose of the other
            pairs_a = {(p, e) for p, es in pub_ents.items() for e in es}
            pairs_b = {(p, e) for e, ps in ent_pubs.items() for p in ps}
            assert pairs_a == pairs_b

    def test_sorted_and_deduped(self):
        ms = [mention("p1", "C2"), mention("p1", "C1"), mention("p1", "C2")]
        pub_ents, ent_pubs = build_lookup_tables(ms)
        assert pub_ents == {"p1": ["C1", "C2"]}
        assert ent_pubs == {"C1": ["p1"], "C2": ["p1"]}


class TestMineLinks:
    def brute_force(self, pub_entities):
        """Oracle: enumerate all unordered pairs per publication."""
        freq = {}
        postings = {}
        for pub_id, ents in pub_entities.items():
            for a, b in itertools.combinations(sorted(set(ents)), 2):
                freq[(a, b)] = freq.get((a, b), 0) + 1
                postings.setdefault((a, b), []).append(pub_id)
        return freq, {k: sorted(v) for k, v in postings.items()}

    def test_matches_brute_force_random(self):
        rng = random.Random(11)
        for _ in range(25):
            pub_ents, _ = build_lookup_tables(random_mentions(rng))
            freq, postings = mine_links(pub_ents)
            oracle_freq, oracle_postings = self.brute_force(pub_ents)
            assert freq == oracle_freq
            assert postings == oracle_postings

    def test_postings_sorted(self):
        pub_ents = {"p2": ["C1", "C2"], "p1": ["C1", "C2"]}
        _, postings = mine_links(pub_ents)
        assert postings[("C1", "C2")] == ["p1", "p2"]

    def test_frequency_equals_postings_length(self):
        rng = random.Random(5)
        pub_ents, _ = build_lookup_tables(random_mentions(rng))
        freq, postings = mine_links(pub_ents)
        for key, f in freq.items():
            assert f == len(postings[key])


class TestConsolidate:
    def test_positive_npmi_kept_zero_and_negative_pruned(self):
        # n=10: (f_x=2, f_y=2, f_xy=1) -> pmi=ln(2.5)>0 kept;
        # (4, 5, 2) -> pmi=0 exactly -> npmi=0 -> pruned;
        # (5, 6, 3) -> pmi=ln(0.99...)? 3*10/30=1 -> 0 -> pruned; use (5,6,2): 20/30<1 negative
        entities = [entity("A", 2), entity("B", 2), entity("C", 4), entity("D", 5), entity("E", 6)]
        bigrams = {("A", "B"): 1, ("C", "D"): 2, ("D", "E"): 2}
        assert npmi(2, 2, 1, 10) > 0
        assert npmi(4, 5, 2, 10) == 0.0
        assert npmi(5, 6, 2, 10) < 0
        net = consolidate(bigrams, entities, n_docs=10)
        assert ("A", "B") in net.edges
        assert ("C", "D") not in net.edges  # npmi == 0 must be absent
        assert ("D", "E") not in net.edges
        assert net.edges[("A", "B")].npmi == pytest.approx(npmi(2, 2, 1, 10))

    def test_edge_fields_match_scalar_kernels(self):
        entities = [entity("A", 4), entity("B", 5)]
        net = consolidate({("A", "B"): 3}, entities, n_docs=10)
        e = net.edges[("A", "B")]
        assert e.frequency == 3
        assert e.pmi == pytest.approx(math.log(1.5))
        assert e.npmi == pytest.approx(0.3368, abs=1e-4)

    def test_isolated_entities_flagged(self):
        entities = [entity("A", 2), entity("B", 2), entity("C", 6)]
        # A-B survives; C has no surviving edge -> isolated
        net = consolidate({("A", "B"): 1, ("B", "C"): 1}, entities, n_docs=10)
        assert ("B", "C") not in net.edges
        assert net.isolated == {"C"}

    def test_component_count_connected(self):
        entities = [entity(c, 2) for c in "ABC"]
        net = consolidate({("A", "B"): 1, ("B", "C"): 1}, entities, n_docs=10)
        assert net.n_components == 1
        assert net.connected

    def test_component_count_split(self):
        entities = [entity(c, 2) for c in "ABCD"]
        net = consolidate({("A", "B"): 1, ("C", "D"): 1}, entities, n_docs=10)
        assert net.n_components == 2
        assert not net.connected

    def test_empty_network(self):
        net = consolidate({}, [entity("A", 2)], n_docs=10)
        assert net.edges == {}
        assert net.isolated == {"A"}
        assert net.n_components == 0

    def test_edge_names_use_entity_names(self):
        entities = [entity("C2", 2, name="fever"), entity("C1", 2, name="ace2")]
        net = consolidate({("C1", "C2"): 1}, entities, n_docs=10)
        assert net.edges[("C1", "C2")].name == "ace2—fever"
        assert net.edges_by_name["ace2—fever"].a == "C1"


class TestCountComponents:
    def flood_fill_oracle(self, nodes, adjacency):
        """Independent flood fill with an explicit stack."""
        nodes = set(nodes)
        seen = set()
        comps = 0
        for n in nodes:
            if n in seen:
                continue
            comps += 1
            stack = [n]
            while stack:
                cur = stack.pop()
                if cur in seen:
                    continue
                seen.add(cur)
                stack.extend(x for x in adjacency.get(cur, ()) if x in nodes)
        return comps

    def test_random_graphs_match_oracle(self):
        rng = random.Random(42)
        for _ in range(50):
            n = rng.randint(1, 15)
            nodes = [f"n{i}" for i in range(n)]
            adjacency = {x: set() for x in nodes}
            for a, b in itertools.combinations(nodes, 2):
                if rng.random() < 0.15:
                    adjacency[a].add(b)
                    adjacency[b].add(a)
            assert count_components(nodes, adjacency) == self.flood_fill_oracle(nodes, adjacency)


class TestRoundTrip:
    def build(self):
        entities = [entity("A", 2), entity("B", 2), entity("C", 3)]
        return consolidate({("A", "B"): 1, ("A", "C"): 2}, entities, n_docs=10)

    def test_write_read_equal(self, tmp_path):
        net = self.build()
        write_network(net, tmp_path, config_hash="abc")
        back = read_network(tmp_path)
        assert back.entities == net.entities
        assert back.edges == net.edges
        assert back.n_docs == net.n_docs
        assert back.n_components == net.n_components
        assert back.isolated == net.isolated

    def test_header_contents(self, tmp_path):
        net = self.build()
        header = network_header(net, config_hash="abc")
        assert header["log_base"] == "e"
        assert header["npmi_prune_threshold"] == 0.0
        assert header["n_edges"] == len(net.edges)
        assert header["config_hash"] == "abc"

    def test_version_mismatch_names_both(self, tmp_path):
        net = self.build()
        write_network(net, tmp_path)
        header_path = tmp_path / "network_header.json"
        header_path.write_text(header_path.read_text().replace('"format_version": 1', '"format_version": 99'))
        with pytest.raises(ValueError, match=r"99.*1|1.*99"):
            read_network(tmp_path)
