"""Multiple-testing correction over the association matrix.

Adjustment happens in log10 space so a raw p of 1e-300 times a family of
a million tests never touches a linear float.  Families are either one
response row at a time (default) or the whole matrix.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import NoTestsPerformed, UnsupportedFormat
from .graph import Edge, NetworkGraph

HOLM = "holm"
BONFERRONI = "bonferroni"
BH = "bh"
METHODS = (HOLM, BONFERRONI, BH)

PER_RESPONSE = "per-response"
GLOBAL = "global"
SCOPES = (PER_RESPONSE, GLOBAL)


@dataclass
class AssociationMatrix:
    """Raw and adjusted log10 p-values for every tested pair.

    Rows are response categories; columns are candidate categories plus
    numeric features.  NaN marks untested cells (same parent feature, or
    degenerate numeric splits).  direction is +1/-1 for numeric columns
    whose members rank higher/lower, 0 elsewhere.  node_meta maps every
    row/column id to its Node so graph construction is self-contained.
    """

    row_ids: list
    col_ids: list
    raw: np.ndarray
    direction: np.ndarray
    node_meta: dict
    n_rows: int
    adjusted: np.ndarray = None
    method: str = None
    family_scope: str = None


def holm_log10(logp):
    """Step-down adjustment of one family of log10 p-values."""
    logp = np.asarray(logp, dtype=np.float64)
    m = logp.shape[0]
    if m == 0:
        return logp.copy()
    order = np.argsort(logp, kind="stable")
    mult = np.log10(np.arange(m, 0, -1, dtype=np.float64))
    stepped = np.maximum.accumulate(logp[order] + mult)
    out = np.empty_like(logp)
    out[order] = np.minimum(stepped, 0.0)
    return out


def bonferroni_log10(logp):
    logp = np.asarray(logp, dtype=np.float64)
    if logp.shape[0] == 0:
        return logp.copy()
    return np.minimum(logp + np.log10(logp.shape[0]), 0.0)


def bh_log10(logp):
    """Step-up false-discovery-rate adjustment of one family."""
    logp = np.asarray(logp, dtype=np.float64)
    m = logp.shape[0]
    if m == 0:
        return logp.copy()
    order = np.argsort(logp, kind="stable")
    ranks = np.arange(1, m + 1, dtype=np.float64)
    scaled = logp[order] + np.log10(m) - np.log10(ranks)
    stepped = np.minimum.accumulate(scaled[::-1])[::-1]
    out = np.empty_like(logp)
    out[order] = np.minimum(stepped, 0.0)
    return out


_CORRECTIONS = {HOLM: holm_log10, BONFERRONI: bonferroni_log10, BH: bh_log10}


def correct(matrix, method=HOLM, family_scope=PER_RESPONSE):
    """Return a copy of the matrix with the adjusted plane filled in."""
    if method not in _CORRECTIONS:
        raise UnsupportedFormat(
            f"unknown correction {method!r}; expected one of {', '.join(METHODS)}")
    if family_scope not in SCOPES:
        raise UnsupportedFormat(
            f"unknown family scope {family_scope!r}; "
            f"expected one of {', '.join(SCOPES)}")
    fn = _CORRECTIONS[method]
    raw = matrix.raw
    if not np.isfinite(raw).any():
        raise NoTestsPerformed("the matrix holds no tested pair")
    adjusted = np.full_like(raw, np.nan)
    if family_scope == GLOBAL:
        mask = ~np.isnan(raw)
        adjusted[mask] = fn(raw[mask])
    else:
        for i in range(raw.shape[0]):
            mask = ~np.isnan(raw[i])
            if mask.any():
                adjusted[i, mask] = fn(raw[i, mask])
    return replace(matrix, adjusted=adjusted, method=method,
                   family_scope=family_scope)


def edge_weights(matrix, alpha=0.05):
    """Keep the significant cells as a directed graph.

    An edge runs response -> candidate for every adjusted p <= alpha with
    weight -log10(adjusted p).  Nodes are the endpoints that carry at
    least one edge, in matrix order.
    """
    if matrix.adjusted is None:
        raise NoTestsPerformed("correct() the matrix before extracting edges")
    log_alpha = np.log10(alpha)
    adjusted = matrix.adjusted
    hits = np.argwhere(
        np.where(np.isnan(adjusted), 1.0, adjusted) <= log_alpha)
    edges = []
    incident = []
    seen = set()
    for i, j in hits:
        src = matrix.row_ids[i]
        tgt = matrix.col_ids[j]
        d = int(matrix.direction[i, j])
        edges.append(Edge(
            source=src,
            target=tgt,
            weight=float(-adjusted[i, j]),
            adjusted_log10_p=float(adjusted[i, j]),
            direction={1: "higher", -1: "lower"}.get(d),
        ))
        for nid in (src, tgt):
            if nid not in seen:
                seen.add(nid)
                incident.append(nid)
    order = []
    for nid in list(matrix.row_ids) + [c for c in matrix.col_ids
                                       if c not in set(matrix.row_ids)]:
        if nid in seen and nid not in order:
            order.append(nid)
    nodes = [matrix.node_meta[nid] for nid in order]
    return NetworkGraph(nodes=nodes, edges=edges, directed=True,
                        alpha=alpha, mtm=matrix.method, n_rows=matrix.n_rows)
