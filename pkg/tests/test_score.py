"""Recovery-scoring tests: labelings, projection, MCC, baselines."""

import logging
import pathlib

import numpy as np
import pytest
import scipy.stats
from sklearn.metrics import matthews_corrcoef

from hnet import score
from hnet.engine import EngineConfig
from hnet.errors import DimensionMismatch, UnknownVariable
from hnet.graph import Edge, NetworkGraph, Node
from hnet.score import (
    EdgeLabeling,
    convergence_curve,
    mcc,
    prefix_table,
    project_to_variables,
    random_baseline,
    truth_labeling,
)
from hnet.simulate import load_network

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "src/hnet/data"


def sprinkler():
    return load_network(FIXTURES / "sprinkler.json")


def labeling(variables, edges):
    v = len(variables)
    m = np.zeros((v, v), dtype=bool)
    for i, j in edges:
        m[i, j] = True
    return EdgeLabeling(variables=tuple(variables), matrix=m)


def cat_node(feature, label):
    nid = feature if label is None else f"{feature}={label}"
    return Node(id=nid, feature=feature, label=label, positives=10,
                fraction=0.5)


def make_graph(nodes, links, directed=True):
    edges = [Edge(source=s, target=t, weight=3.0, adjusted_log10_p=-3.0)
             for s, t in links]
    return NetworkGraph(nodes=nodes, edges=edges, directed=directed,
                        alpha=0.05, mtm="holm", n_rows=100)


# --- truth_labeling and EdgeLabeling -------------------------------------

def test_truth_labeling_sprinkler():
    t = truth_labeling(sprinkler())
    assert t.variables == ("Cloudy", "Sprinkler", "Rain", "Wet_Grass")
    expected = {(0, 1), (0, 2), (1, 3), (2, 3)}
    assert {tuple(x) for x in np.argwhere(t.matrix)} == expected
    assert t.edge_count("directed") == 4
    assert t.edge_count("undirected") == 4


def test_edge_count_collapses_reciprocal_pairs():
    l = labeling("abc", [(0, 1), (1, 0), (1, 2)])
    assert l.edge_count("directed") == 3
    assert l.edge_count("undirected") == 2


# --- project_to_variables -------------------------------------------------

def test_projection_directed_and_undirected():
    nodes = [cat_node("Cloudy", "True"), cat_node("Rain", "True")]
    g = make_graph(nodes, [("Cloudy=True", "Rain=True")])
    p = project_to_variables(g, sprinkler())
    assert {tuple(x) for x in np.argwhere(p.matrix)} == {(0, 2)}
    g.directed = False
    p = project_to_variables(g, sprinkler())
    assert {tuple(x) for x in np.argwhere(p.matrix)} == {(0, 2), (2, 0)}


def test_projection_true_only_filters_response_side():
    nodes = [cat_node("Cloudy", "False"), cat_node("Rain", "True")]
    g = make_graph(nodes, [("Cloudy=False", "Rain=True")])
    assert project_to_variables(g, sprinkler()).matrix.sum() == 0
    p = project_to_variables(g, sprinkler(), response_policy="all")
    assert p.matrix.sum() == 1


def test_projection_true_state_spellings():
    doc = {"nodes": [
        {"name": "A", "states": ["YES", "no"], "parents": [],
         "cpt": [[0.5, 0.5]]},
        {"name": "B", "states": ["1", "0"], "parents": ["A"],
         "cpt": [[0.5, 0.5], [0.5, 0.5]]},
    ]}
    net = load_network(doc)
    nodes = [cat_node("A", "YES"), cat_node("B", "0")]
    g = make_graph(nodes, [("A=YES", "B=0")])
    assert project_to_variables(g, net).matrix.sum() == 1
    g = make_graph(nodes[::-1], [("B=0", "A=YES")])
    assert project_to_variables(g, net).matrix.sum() == 0


def test_projection_numeric_response_is_never_filtered():
    nodes = [cat_node("Cloudy", None), cat_node("Rain", "True")]
    g = make_graph(nodes, [("Cloudy", "Rain=True")])
    assert project_to_variables(g, sprinkler()).matrix.sum() == 1


def test_projection_falls_back_when_no_true_states(caplog):
    doc = {"nodes": [
        {"name": "A", "states": ["LOW", "HIGH"], "parents": [],
         "cpt": [[0.5, 0.5]]},
        {"name": "B", "states": ["LOW", "HIGH"], "parents": ["A"],
         "cpt": [[0.5, 0.5], [0.5, 0.5]]},
    ]}
    net = load_network(doc)
    nodes = [cat_node("A", "LOW"), cat_node("B", "HIGH")]
    g = make_graph(nodes, [("A=LOW", "B=HIGH")])
    with caplog.at_level(logging.WARNING, logger="hnet.score"):
        p = project_to_variables(g, net)
    assert p.matrix.sum() == 1
    assert any("no true-state" in r.message for r in caplog.records)


def test_projection_splits_combination_features():
    nodes = [cat_node("Sprinkler&Rain", "True&True"),
             cat_node("Wet_Grass", "True")]
    g = make_graph(nodes, [("Sprinkler&Rain=True&True", "Wet_Grass=True")])
    p = project_to_variables(g, sprinkler())
    assert {tuple(x) for x in np.argwhere(p.matrix)} == {(1, 3), (2, 3)}


def test_projection_skips_self_pairs_from_combinations():
    nodes = [cat_node("Cloudy&Rain", "True&True"), cat_node("Rain", "True")]
    g = make_graph(nodes, [("Cloudy&Rain=True&True", "Rain=True")])
    p = project_to_variables(g, sprinkler())
    assert {tuple(x) for x in np.argwhere(p.matrix)} == {(0, 2)}


def test_projection_rejects_unknown_features():
    nodes = [cat_node("Cloudy", "True"), cat_node("Humidity", "True")]
    g = make_graph(nodes, [("Cloudy=True", "Humidity=True")])
    with pytest.raises(UnknownVariable):
        project_to_variables(g, sprinkler())


def test_projection_mixed_label_combination_needs_all_true():
    nodes = [cat_node("Sprinkler&Rain", "True&False"),
             cat_node("Wet_Grass", "True")]
    g = make_graph(nodes, [("Sprinkler&Rain=True&False", "Wet_Grass=True")])
    assert project_to_variables(g, sprinkler()).matrix.sum() == 0


# --- mcc ------------------------------------------------------------------

def test_mcc_hand_directed():
    truth = labeling("abc", [(0, 1), (1, 2)])
    pred = labeling("abc", [(0, 1), (0, 2)])
    s, p = mcc(pred, truth)
    # off-diagonal cells: TP=1 FP=1 FN=1 TN=3
    assert s == pytest.approx(0.25)
    assert p == pytest.approx(
        scipy.stats.hypergeom.sf(0, 6, 2, 2), rel=1e-12)


def test_mcc_hand_undirected():
    truth = labeling("abc", [(0, 1), (1, 2)])
    pred = labeling("abc", [(1, 0), (0, 2)])
    s, _ = mcc(pred, truth, mode="undirected")
    # pairs {01,02,12}: TP=1 FP=1 FN=1 TN=0
    assert s == pytest.approx(-0.5)


def test_mcc_perfect_and_inverse():
    truth = labeling("abcd", [(0, 1), (2, 3), (1, 3)])
    assert mcc(truth, truth)[0] == pytest.approx(1.0)
    inverse = EdgeLabeling(
        variables=truth.variables,
        matrix=~truth.matrix & ~np.eye(4, dtype=bool))
    assert mcc(inverse, truth)[0] == pytest.approx(-1.0)


def test_mcc_degenerate_scores_zero():
    truth = labeling("abc", [(0, 1)])
    empty = labeling("abc", [])
    assert mcc(empty, truth)[0] == 0.0
    full = EdgeLabeling(
        variables=truth.variables,
        matrix=~np.eye(3, dtype=bool))
    assert mcc(full, truth)[0] == 0.0


def test_mcc_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        mcc(labeling("abc", []), labeling("abcd", []))


@pytest.mark.filterwarnings("ignore:A single label was found")
def test_mcc_matches_sklearn_battery():
    rng = np.random.default_rng(17)
    for _ in range(200):
        v = int(rng.integers(3, 9))
        pm = rng.random((v, v)) < rng.uniform(0.1, 0.6)
        tm = rng.random((v, v)) < rng.uniform(0.1, 0.6)
        np.fill_diagonal(pm, False)
        np.fill_diagonal(tm, False)
        pred = EdgeLabeling(variables=tuple(range(v)), matrix=pm)
        truth = EdgeLabeling(variables=tuple(range(v)), matrix=tm)
        off = ~np.eye(v, dtype=bool)
        want = matthews_corrcoef(tm[off], pm[off])
        assert mcc(pred, truth)[0] == pytest.approx(want, abs=1e-12)
        iu = np.triu_indices(v, 1)
        want_u = matthews_corrcoef(
            (tm | tm.T)[iu], (pm | pm.T)[iu])
        assert mcc(pred, truth, "undirected")[0] == pytest.approx(
            want_u, abs=1e-12)


def test_mcc_is_symmetric_in_its_arguments():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = labeling("abcde", [tuple(x) for x in
                               rng.integers(0, 5, (6, 2)) if x[0] != x[1]])
        b = labeling("abcde", [tuple(x) for x in
                               rng.integers(0, 5, (6, 2)) if x[0] != x[1]])
        assert mcc(a, b)[0] == pytest.approx(mcc(b, a)[0])


# --- random_baseline ------------------------------------------------------

def test_random_baseline_is_seeded_and_centred():
    truth = truth_labeling(sprinkler())
    m1, se1, s1 = random_baseline(truth, 4, trials=50, seed=5)
    m2, _, s2 = random_baseline(truth, 4, trials=50, seed=5)
    assert m1 == m2 and np.array_equal(s1, s2)
    m3, _, _ = random_baseline(truth, 4, trials=50, seed=6)
    assert m1 != m3
    assert len(s1) == 50 and se1 > 0
    assert abs(m1) < 0.15


def test_random_baseline_rejects_oversized_requests():
    truth = truth_labeling(sprinkler())
    with pytest.raises(ValueError):
        random_baseline(truth, 13, mode="undirected")  # only C(4,2)=6 cells


# --- prefix_table and convergence ----------------------------------------

def test_prefix_table(titanic_table):
    sub = prefix_table(titanic_table, 100)
    assert sub.n_rows == 100
    assert sub.names == titanic_table.names
    assert sub.column("Sex").values == titanic_table.column("Sex").values[:100]
    whole = prefix_table(titanic_table, 10**6)
    assert whole.n_rows == titanic_table.n_rows


def test_convergence_curve_reaches_reference():
    rows = convergence_curve(sprinkler(), [100, 250, 500], 500, seed=2,
                             config=EngineConfig(y_min=5))
    assert [r["n"] for r in rows] == [100, 250, 500]
    ref = rows[0]["reference_edges"]
    assert all(r["reference_edges"] == ref for r in rows)
    assert rows[-1]["jaccard"] == 1.0
    assert rows[-1]["edges"] == ref
    assert all(0.0 <= r["jaccard"] <= 1.0 for r in rows)


def test_convergence_curve_rejects_bad_grid():
    with pytest.raises(ValueError):
        convergence_curve(sprinkler(), [100, 2000], 500, seed=2)
