"""End-to-end run: typed table -> tested pairs -> corrected matrix -> graph.

The hot path is the all-pairs category contingency counting (four matrix
products over the bit planes) followed by one batched tail evaluation,
optionally split across threads.  Chunks write disjoint slices of one
output array, so the result is identical for any thread count.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels, mtm
from .mtm import HOLM, PER_RESPONSE
from .combi import expand_combinations
from .errors import DegenerateSplit, NoTestsPerformed
from .graph import Node
from .ingest import IngestConfig, Kind, assign_types, one_hot_encode
from .stats import mann_whitney


@dataclass
class EngineConfig:
    y_min: int = 10
    k_max: int = 1
    max_candidates: int = 1_000_000
    mtm: str = HOLM
    family_scope: str = PER_RESPONSE
    alpha: float = 0.05
    threads: int = 1
    ingest: IngestConfig = field(default_factory=IngestConfig)

    def validate(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.y_min < 1:
            raise ValueError("y_min must be >= 1")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        return self


@dataclass
class RunReport:
    n_rows: int
    n_features: int
    n_discrete: int
    n_numeric: int
    n_raw_categories: int
    n_base_categories: int
    n_combinations: int
    n_model_features: int
    n_hypergeometric_tests: int
    n_rank_tests: int
    n_edges: int
    n_nodes: int
    backend: str
    timings: dict

    def format(self):
        lines = [
            f"rows                  {self.n_rows}",
            f"features              {self.n_features} "
            f"({self.n_discrete} discrete, {self.n_numeric} numeric)",
            f"raw categories        {self.n_raw_categories}",
            f"kept categories       {self.n_base_categories} "
            f"(+{self.n_combinations} combinations)",
            f"model features        {self.n_model_features}",
            f"hypergeometric tests  {self.n_hypergeometric_tests}",
            f"rank tests            {self.n_rank_tests}",
            f"edges                 {self.n_edges}",
            f"nodes                 {self.n_nodes}",
            f"kernel backend        {self.backend}",
            f"total seconds         {self.timings.get('total', 0.0):.3f}",
        ]
        return "\n".join(lines)


def _threaded_tail(N, K, n, x, threads):
    out = np.empty(N.shape[0], dtype=np.float64)
    if threads <= 1 or N.shape[0] < 4096:
        kernels.hyp_logsf_batch(N, K, n, x, out=out)
        return out
    bounds = np.linspace(0, N.shape[0], threads + 1).astype(np.int64)
    def work(a, b):
        kernels.hyp_logsf_batch(N[a:b], K[a:b], n[a:b], x[a:b],
                                out=out[a:b])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(work, bounds[t], bounds[t + 1])
                   for t in range(threads)]
        for f in futures:
            f.result()
    return out


def run(table, config=None):
    """Analyse a parsed table; returns (graph, matrix, report).

    The table may be untyped (fresh from parse_csv); types are assigned
    here so overrides in the config always take effect.
    """
    config = (config or EngineConfig()).validate()
    timings = {}
    t_start = time.perf_counter()

    t0 = time.perf_counter()
    typed = assign_types(table, config.ingest)
    timings["typing"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    encoded = one_hot_encode(typed, y_min=config.y_min)
    timings["encoding"] = time.perf_counter() - t0
    n_base = len(encoded.columns)

    t0 = time.perf_counter()
    expanded = expand_combinations(encoded, k_max=config.k_max,
                                   y_min=config.y_min,
                                   max_candidates=config.max_candidates)
    timings["combinations"] = time.perf_counter() - t0

    cats = expanded.columns
    C = len(cats)
    R = expanded.n_rows
    numerics = [c for c in typed.columns if c.kind is Kind.NUMERIC]

    t0 = time.perf_counter()
    bits = np.zeros((C, R), dtype=np.float64)
    pres = np.zeros((C, R), dtype=np.float64)
    for i, c in enumerate(cats):
        bits[i] = c.bits
        pres[i] = c.present
    N_mat = pres @ pres.T
    n_mat = bits @ pres.T
    K_mat = pres @ bits.T
    x_mat = bits @ bits.T
    parent_sets = [frozenset(c.parent_features) for c in cats]
    testable = np.ones((C, C), dtype=bool)
    for i in range(C):
        si = parent_sets[i]
        for j in range(i, C):
            if i == j or (si & parent_sets[j]):
                testable[i, j] = False
                testable[j, i] = False
    timings["counting"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    M = len(numerics)
    raw = np.full((C, C + M), np.nan)
    direction = np.zeros((C, C + M), dtype=np.int8)
    ii, jj = np.nonzero(testable)
    if ii.shape[0]:
        flat = _threaded_tail(
            np.rint(N_mat[ii, jj]).astype(np.int64),
            np.rint(K_mat[ii, jj]).astype(np.int64),
            np.rint(n_mat[ii, jj]).astype(np.int64),
            np.rint(x_mat[ii, jj]).astype(np.int64),
            config.threads)
        raw[ii, jj] = flat
    n_hyp = int(ii.shape[0])

    n_rank = 0
    numeric_values = {}
    for j, col in enumerate(numerics):
        vals = np.array([np.nan if v is None else v for v in col.values],
                        dtype=np.float64)
        numeric_values[col.name] = vals
        for i, cat in enumerate(cats):
            if col.name in parent_sets[i]:
                continue
            try:
                logp, tag = mann_whitney(vals, cat)
            except DegenerateSplit:
                continue
            raw[i, C + j] = logp
            direction[i, C + j] = 1 if tag == "higher" else -1
            n_rank += 1
    timings["testing"] = time.perf_counter() - t0

    row_ids = [c.name for c in cats]
    col_ids = row_ids + [c.name for c in numerics]
    node_meta = {}
    for c in cats:
        node_meta[c.name] = Node(
            id=c.name,
            feature="&".join(c.parent_features),
            label="&".join(c.labels),
            positives=c.positives,
            fraction=float(c.present.sum()) / R if R else 0.0,
        )
    for col in numerics:
        finite = int(np.isfinite(numeric_values[col.name]).sum())
        node_meta[col.name] = Node(
            id=col.name,
            feature=col.name,
            label=None,
            positives=finite,
            fraction=finite / R if R else 0.0,
        )

    matrix = mtm.AssociationMatrix(
        row_ids=row_ids, col_ids=col_ids, raw=raw, direction=direction,
        node_meta=node_meta, n_rows=R)

    t0 = time.perf_counter()
    if n_hyp == 0 and n_rank == 0:
        raise NoTestsPerformed(
            "no testable pair: need two features with kept categories, "
            "or one plus a numeric column")
    matrix = mtm.correct(matrix, method=config.mtm,
                         family_scope=config.family_scope)
    timings["correction"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    graph = mtm.edge_weights(matrix, alpha=config.alpha).validate()
    timings["graph"] = time.perf_counter() - t0
    timings["total"] = time.perf_counter() - t_start

    n_disc = sum(1 for c in typed.columns if c.kind is Kind.DISCRETE)
    report = RunReport(
        n_rows=R,
        n_features=len(typed.columns),
        n_discrete=n_disc,
        n_numeric=M,
        n_raw_categories=expanded.n_raw_categories,
        n_base_categories=n_base,
        n_combinations=C - n_base,
        n_model_features=C + M,
        n_hypergeometric_tests=n_hyp,
        n_rank_tests=n_rank,
        n_edges=len(graph.edges),
        n_nodes=len(graph.nodes),
        backend=kernels.backend_name(),
        timings=timings,
    )
    return graph, matrix, report
