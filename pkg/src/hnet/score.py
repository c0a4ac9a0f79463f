"""Recovery scoring: compare a detected graph against a reference network.

Category-level graphs are first collapsed to variable-level edge labelings;
agreement is summarised by the Matthews correlation over the off-diagonal
cells, with a hypergeometric enrichment p-value for the overlap.
"""

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatch, UnknownVariable

log = logging.getLogger(__name__)

TRUE_STATE_LABELS = frozenset({"true", "yes", "1"})

TRUE_ONLY = "true-only"
ALL_STATES = "all"

DIRECTED = "directed"
UNDIRECTED = "undirected"


@dataclass
class EdgeLabeling:
    """A boolean adjacency over a fixed variable order; diagonal is dead."""

    variables: tuple
    matrix: np.ndarray

    def edge_count(self, mode=DIRECTED):
        m = self.matrix
        if mode == UNDIRECTED:
            return int(np.triu(m | m.T, 1).sum())
        return int(m.sum())


def truth_labeling(net):
    """The reference arcs as an EdgeLabeling in network node order."""
    names = tuple(net.names)
    index = {n: k for k, n in enumerate(names)}
    m = np.zeros((len(names), len(names)), dtype=bool)
    for parent, child in net.arcs():
        m[index[parent], index[child]] = True
    return EdgeLabeling(variables=names, matrix=m)


def _is_true_state(label):
    return label.lower() in TRUE_STATE_LABELS


def project_to_variables(g, net, response_policy=TRUE_ONLY):
    """Collapse a category-level graph onto network variables.

    An ordered variable pair (u, v) is marked when any kept edge runs from
    a u-category to a v-category or to numeric feature v.  Under the
    'true-only' policy only edges whose response category is a true state
    (label in {true, yes, 1}, any case) count; if the network has no
    true-state labels at all the policy falls back to 'all' with a
    warning.
    """
    names = tuple(net.names)
    index = {n: k for k, n in enumerate(names)}
    policy = response_policy
    if policy == TRUE_ONLY:
        any_true = any(_is_true_state(s) for node in net.nodes
                       for s in node.states)
        if not any_true:
            log.warning(
                "network has no true-state labels; scoring all states")
            policy = ALL_STATES
    node_by_id = {n.id: n for n in g.nodes}
    m = np.zeros((len(names), len(names)), dtype=bool)
    for e in g.edges:
        src = node_by_id[e.source]
        tgt = node_by_id[e.target]
        if policy == TRUE_ONLY and src.label is not None:
            labels = src.label.split("&")
            if not all(_is_true_state(l) for l in labels):
                continue
        for fs in src.feature.split("&"):
            if fs not in index:
                raise UnknownVariable(
                    f"graph feature {fs!r} is not in the network")
            for ft in tgt.feature.split("&"):
                if ft not in index:
                    raise UnknownVariable(
                        f"graph feature {ft!r} is not in the network")
                if fs != ft:
                    m[index[fs], index[ft]] = True
                    if not g.directed:
                        m[index[ft], index[fs]] = True
    return EdgeLabeling(variables=names, matrix=m)


def mcc(predicted, truth, mode=DIRECTED):
    """Matthews correlation between two labelings, with enrichment p.

    Directed mode scores every ordered off-diagonal cell; undirected mode
    symmetrises both labelings first and scores unordered pairs.  Returns
    (mcc, p) where p is the hypergeometric upper tail of the overlap; an
    all-constant labeling scores 0 by convention.
    """
    if tuple(predicted.variables) != tuple(truth.variables):
        raise DimensionMismatch("labelings cover different variables")
    v = len(predicted.variables)
    if mode == UNDIRECTED:
        pm = predicted.matrix | predicted.matrix.T
        tm = truth.matrix | truth.matrix.T
        iu = np.triu_indices(v, 1)
        p = pm[iu]
        t = tm[iu]
    elif mode == DIRECTED:
        off = ~np.eye(v, dtype=bool)
        p = predicted.matrix[off]
        t = truth.matrix[off]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    tp = int((p & t).sum())
    fp = int((p & ~t).sum())
    fn = int((~p & t).sum())
    tn = int((~p & ~t).sum())
    num = tp * tn - fp * fn
    den = ((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)) ** 0.5
    score = 0.0 if den == 0 else num / den
    cells = tp + fp + fn + tn
    logp = kernels.hyp_logsf(cells, tp + fn, tp + fp, tp)
    return score, 10.0 ** logp


def random_baseline(truth, n_edges, trials=100, seed=0, mode=DIRECTED):
    """MCC of uniformly random edge sets of the same size.

    Returns (mean, standard error, scores).  Each trial draws n_edges
    distinct cells from the scored universe of the given mode.
    """
    v = len(truth.variables)
    rng = np.random.default_rng(seed)
    if mode == UNDIRECTED:
        iu = np.triu_indices(v, 1)
        universe = list(zip(iu[0], iu[1]))
    else:
        universe = [(i, j) for i in range(v) for j in range(v) if i != j]
    if n_edges > len(universe):
        raise ValueError("more edges requested than cells available")
    scores = np.empty(trials)
    for t in range(trials):
        pick = rng.choice(len(universe), size=n_edges, replace=False)
        m = np.zeros((v, v), dtype=bool)
        for k in pick:
            i, j = universe[k]
            m[i, j] = True
        labeling = EdgeLabeling(variables=truth.variables, matrix=m)
        scores[t] = mcc(labeling, truth, mode=mode)[0]
    mean = float(scores.mean())
    stderr = float(scores.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr, scores


def prefix_table(table, n):
    """The first n rows of a FeatureTable as a new table."""
    from .ingest import Column, FeatureTable
    cols = [Column(name=c.name, kind=c.kind, values=c.values[:n])
            for c in table.columns]
    return FeatureTable(columns=cols, n_rows=min(n, table.n_rows))


def convergence_curve(net, grid, reference_n, seed, config=None):
    """Detected-edge counts and overlap along growing prefixes of one draw.

    Samples reference_n rows once, then analyses the first n rows for each
    n in the grid.  Returns one row per grid point:
    {n, edges, reference_edges, jaccard} where edge sets are unordered
    category-level pairs of the symmetrised graph and jaccard measures
    overlap with the full-size reference run.
    """
    from . import engine
    from .graph import MAX, symmetrize
    from .simulate import forward_sample

    config = config or engine.EngineConfig()
    grid = sorted(set(int(n) for n in grid))
    if grid and grid[-1] > reference_n:
        raise ValueError("grid points must not exceed reference_n")
    table = forward_sample(net, reference_n, seed)

    def edge_set(g):
        und = symmetrize(g, MAX)
        return frozenset(frozenset((e.source, e.target))
                         for e in und.edges)

    ref_graph, _m, _r = engine.run(table, config)
    ref_edges = edge_set(ref_graph)
    rows = []
    for n in grid:
        sub = prefix_table(table, n)
        try:
            g, _matrix, _report = engine.run(sub, config)
            edges = edge_set(g)
        except Exception as exc:  # thin data: no category may survive
            log.info("n=%d: %s", n, exc)
            edges = frozenset()
        union = edges | ref_edges
        jac = (len(edges & ref_edges) / len(union)) if union else 1.0
        rows.append({
            "n": n,
            "edges": len(edges),
            "reference_edges": len(ref_edges),
            "jaccard": jac,
        })
    return rows
