"""Homophily, clique sampling and diversity statistics."""

import itertools

import numpy as np
import pytest

from tgin.analytics import (
    attribute_share_stats,
    clique_probability,
    clique_report,
    clique_report_tsv,
    diversity_metric,
    homophily_report_tsv,
    homophily_stats,
    shared_attributes,
)
from tgin.catalog import ItemCatalog
from tgin.errors import InvalidInputError, InvalidParameterError
from tgin.synth import make_clustered_catalog, make_er_graph, make_planted_graph

from conftest import complete_graph, graph_from_pairs


def uniform_catalog(items, category="X"):
    return ItemCatalog({v: {"category": category} for v in items},
                       {v: np.ones(2) for v in items})


def distinct_catalog(items):
    return ItemCatalog({v: {"category": f"c-{v}"} for v in items},
                       {v: np.ones(2) for v in items})


class TestHomophily:
    def test_uniform_category_shares_everything(self):
        items = [f"i{k}" for k in range(6)]
        g = complete_graph(items)
        report = homophily_stats(g, uniform_catalog(items), 6, 50, seed=0)
        assert report.share_rate == 1.0
        assert report.per_attribute["category"] == 1.0
        assert report.sample_size > 0

    def test_all_distinct_attributes(self):
        items = [f"i{k}" for k in range(6)]
        g = complete_graph(items)
        report = homophily_stats(g, distinct_catalog(items), 6, 50, seed=0)
        assert report.share_rate == 0.0

    def test_no_triangles_reports_null(self):
        items = ["a", "b", "c"]
        g = graph_from_pairs([("a", "b")], nodes=items)
        report = homophily_stats(g, uniform_catalog(items), 3, 10, seed=0)
        assert report.sample_size == 0
        assert report.share_rate is None
        assert all(v is None for v in report.per_attribute.values())

    def test_planted_clusters_share_category(self):
        catalog, clusters = make_clustered_catalog(40, 4, 8, seed=5)
        g = make_planted_graph(clusters, intra_p=0.9, inter_p=0.0, seed=5)
        report = homophily_stats(g, catalog, 40, 30, seed=1)
        assert report.per_attribute["category"] == 1.0
        assert report.share_rate == 1.0
        # brand is drawn from a global pool: sharing should be far rarer
        assert report.per_attribute["brand"] < 0.5

    def test_share_rate_dominates_each_attribute(self):
        catalog, clusters = make_clustered_catalog(30, 3, 8, seed=2)
        g = make_planted_graph(clusters, intra_p=0.8, inter_p=0.1, seed=2)
        report = homophily_stats(g, catalog, 30, 30, seed=3)
        for fraction in report.per_attribute.values():
            assert report.share_rate >= fraction

    def test_shared_attributes_ignores_nulls(self):
        cat = ItemCatalog(
            {"a": {"x": "1", "y": None}, "b": {"x": "1", "y": "2"},
             "c": {"x": "1", "y": "2"}},
            {v: np.ones(1) for v in "abc"})
        assert shared_attributes(cat, ["a", "b", "c"]) == {"x"}

    def test_empty_groups(self):
        cat = uniform_catalog(["a"])
        share, per_attr = attribute_share_stats(cat, [])
        assert share is None
        assert per_attr == {"category": None}


class TestCliqueSampling:
    def test_complete_graph_probability_one(self):
        g = complete_graph([f"i{k}" for k in range(8)])
        for k in (2, 3, 4, 5):
            prob, _ = clique_probability(g, k, trials=500, seed=0)
            assert prob == 1.0

    def test_edgeless_graph(self):
        g = graph_from_pairs([], nodes=[f"i{k}" for k in range(6)])
        prob, _ = clique_probability(g, 2, trials=500, seed=0)
        assert prob == 0.0

    def test_er_closed_form(self):
        # expected k-clique probability in G(n, p) is p^(k(k-1)/2)
        n, p, trials = 200, 0.3, 60000
        g = make_er_graph(n, p, seed=123)
        prob, _ = clique_probability(g, 3, trials=trials, seed=9)
        expected = p ** 3
        se = np.sqrt(expected * (1 - expected) / trials)
        assert abs(prob - expected) <= 4 * se + 0.002

    def test_monotone_in_k_within_report(self):
        g = make_er_graph(100, 0.25, seed=4)
        report = clique_report(g, None, trials=20000, seed=5)
        probs = [report.per_k[k][0] for k in (2, 3, 4, 5)]
        assert all(a >= b for a, b in zip(probs, probs[1:]))

    def test_monotone_across_separate_calls(self):
        g = make_er_graph(60, 0.3, seed=6)
        probs = [clique_probability(g, k, trials=5000, seed=7)[0]
                 for k in (2, 3, 4, 5)]
        assert all(a >= b for a, b in zip(probs, probs[1:]))

    def test_homophily_of_cliques(self):
        items = [f"i{k}" for k in range(6)]
        g = complete_graph(items)
        _, hom = clique_probability(g, 3, trials=200, seed=0,
                                    catalog=uniform_catalog(items))
        assert hom == 1.0
        _, hom = clique_probability(g, 3, trials=200, seed=0,
                                    catalog=distinct_catalog(items))
        assert hom == 0.0

    def test_graph_too_small(self):
        g = graph_from_pairs([("a", "b")])
        with pytest.raises(InvalidInputError):
            clique_probability(g, 3, trials=10, seed=0)

    def test_bad_k(self):
        g = complete_graph("abcdef")
        for k in (1, 6):
            with pytest.raises(InvalidParameterError):
                clique_probability(g, k, trials=10, seed=0)

    def test_node_cap_restricts_universe(self):
        g = make_er_graph(100, 0.2, seed=8)
        prob, _ = clique_probability(g, 2, trials=2000, seed=1, node_cap=20)
        assert 0.0 <= prob <= 1.0


class TestDiversityMetric:
    def catalog(self):
        attrs = {"a": {"keyword": "shoe"}, "b": {"keyword": "shoe"},
                 "c": {"keyword": "bag"}, "d": {"keyword": "hat"},
                 "e": {"keyword": None}}
        return ItemCatalog(attrs, {v: np.ones(1) for v in attrs})

    def test_single_value(self):
        assert diversity_metric(["a", "b", "a"], self.catalog(), "keyword") == 1

    def test_null_excluded(self):
        assert diversity_metric(["b", "c", "d", "e"], self.catalog(), "keyword") == 3

    def test_permutation_and_duplication_invariance(self):
        items = ["a", "c", "d"]
        base = diversity_metric(items, self.catalog(), "keyword")
        assert diversity_metric(items[::-1], self.catalog(), "keyword") == base
        assert diversity_metric(items * 3, self.catalog(), "keyword") == base

    def test_unknown_attribute(self):
        with pytest.raises(InvalidParameterError):
            diversity_metric(["a"], self.catalog(), "color")


class TestReportSerialization:
    def test_homophily_tsv(self):
        items = [f"i{k}" for k in range(5)]
        g = complete_graph(items)
        text = homophily_report_tsv(homophily_stats(g, uniform_catalog(items),
                                                    5, 20, seed=0))
        lines = text.splitlines()
        assert lines[0].startswith("#samples ")
        assert lines[1] == "attribute\tfraction"
        assert lines[2].startswith("any\t1.000000")

    def test_clique_tsv_layout(self):
        g = complete_graph([f"i{k}" for k in range(7)])
        report = clique_report(g, None, trials=100, seed=0)
        lines = clique_report_tsv(report).splitlines()
        assert lines[1] == "k\toccurrence_probability\thomophily"
        assert [row.split("\t")[0] for row in lines[2:]] == ["2", "3", "4", "5"]
        assert all(row.split("\t")[2] == "null" for row in lines[2:])
