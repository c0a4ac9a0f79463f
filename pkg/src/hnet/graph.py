"""Graph model, symmetrisation and serialisation.

The JSON wire format is fixed and fully deterministic: same graph in,
same bytes out.  Adjacency CSV and GraphML are export-only.
"""

import csv
import io
import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .errors import GraphSchemaError, UnsupportedFormat

MAX = "max"
AND = "and"


@dataclass
class Node:
    id: str
    feature: str
    label: str | None
    positives: int
    fraction: float


@dataclass
class Edge:
    source: str
    target: str
    weight: float
    adjusted_log10_p: float
    direction: str | None = None


@dataclass
class NetworkGraph:
    nodes: list
    edges: list
    directed: bool
    alpha: float
    mtm: str
    n_rows: int

    def node(self, node_id):
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    @property
    def node_ids(self):
        return [n.id for n in self.nodes]

    def validate(self):
        ids = self.node_ids
        if len(set(ids)) != len(ids):
            raise GraphSchemaError("duplicate node ids")
        known = set(ids)
        floor = -math.log10(self.alpha) - 1e-9
        for e in self.edges:
            if e.source not in known or e.target not in known:
                raise GraphSchemaError(
                    f"edge {e.source}->{e.target} references unknown node")
            if e.source == e.target:
                raise GraphSchemaError(f"self loop on {e.source}")
            if e.weight < floor:
                raise GraphSchemaError(
                    f"edge {e.source}->{e.target} weight {e.weight} below "
                    f"significance floor")
        return self


def symmetrize(g, mode=MAX):
    """Collapse a directed graph onto undirected links.

    'max' keeps a link when either direction is significant; 'and' only
    when both are.  Either way the link carries the stronger weight.
    Undirected input passes through (every link counts as both
    directions), so the operation is idempotent.
    """
    if mode not in (MAX, AND):
        raise UnsupportedFormat(f"unknown symmetrisation mode: {mode!r}")
    order = {nid: k for k, nid in enumerate(g.node_ids)}
    pairs = {}
    for e in g.edges:
        a, b = order[e.source], order[e.target]
        key = (min(a, b), max(a, b))
        entry = pairs.setdefault(key, {"fwd": None, "rev": None,
                                       "direction": None})
        slot = "fwd" if a <= b else "rev"
        if entry[slot] is None or e.weight > entry[slot]:
            entry[slot] = e.weight
        if not g.directed:
            entry["fwd" if slot == "rev" else "rev"] = entry[slot]
        if e.direction is not None:
            entry["direction"] = e.direction
    edges = []
    for (a, b), entry in sorted(pairs.items()):
        have_fwd = entry["fwd"] is not None
        have_rev = entry["rev"] is not None
        if mode == AND and not (have_fwd and have_rev):
            continue
        weight = max(w for w in (entry["fwd"], entry["rev"])
                     if w is not None)
        edges.append(Edge(
            source=g.nodes[a].id,
            target=g.nodes[b].id,
            weight=weight,
            adjusted_log10_p=-weight,
            direction=entry["direction"],
        ))
    incident = set()
    for e in edges:
        incident.add(e.source)
        incident.add(e.target)
    nodes = [n for n in g.nodes if n.id in incident]
    return NetworkGraph(nodes=nodes, edges=edges, directed=False,
                        alpha=g.alpha, mtm=g.mtm, n_rows=g.n_rows)


# --- GraphJson ------------------------------------------------------------

def to_graph_json(g):
    """Serialise to the fixed JSON schema, byte-deterministically."""
    doc = {
        "nodes": [
            {"id": n.id, "feature": n.feature, "label": n.label,
             "positives": n.positives, "fraction": n.fraction}
            for n in g.nodes
        ],
        "edges": [
            {"source": e.source, "target": e.target, "weight": e.weight,
             "direction": e.direction}
            for e in g.edges
        ],
        "meta": {"alpha": g.alpha, "mtm": g.mtm, "n_rows": g.n_rows,
                 "directed": g.directed},
    }
    return (json.dumps(doc, ensure_ascii=False, separators=(",", ":"))
            + "\n").encode("utf-8")


def _need(obj, key, types, where):
    if key not in obj:
        raise GraphSchemaError(f"{where} is missing {key!r}")
    val = obj[key]
    if not isinstance(val, types):
        raise GraphSchemaError(f"{where} {key!r} has the wrong type")
    return val


def from_graph_json(data):
    """Parse and validate the JSON wire format back into a NetworkGraph."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GraphSchemaError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise GraphSchemaError("top level must be an object")
    for key in ("nodes", "edges", "meta"):
        if key not in doc:
            raise GraphSchemaError(f"top level is missing {key!r}")
    if not isinstance(doc["nodes"], list) or not isinstance(doc["edges"], list):
        raise GraphSchemaError("nodes and edges must be arrays")
    meta = doc["meta"]
    if not isinstance(meta, dict):
        raise GraphSchemaError("meta must be an object")
    alpha = _need(meta, "alpha", (int, float), "meta")
    mtm = _need(meta, "mtm", str, "meta")
    n_rows = _need(meta, "n_rows", int, "meta")
    directed = meta.get("directed", True)
    if not isinstance(directed, bool):
        raise GraphSchemaError("meta 'directed' must be a boolean")
    nodes = []
    for k, raw in enumerate(doc["nodes"]):
        if not isinstance(raw, dict):
            raise GraphSchemaError(f"node {k} must be an object")
        label = raw.get("label")
        if label is not None and not isinstance(label, str):
            raise GraphSchemaError(f"node {k} label must be string or null")
        nodes.append(Node(
            id=_need(raw, "id", str, f"node {k}"),
            feature=_need(raw, "feature", str, f"node {k}"),
            label=label,
            positives=_need(raw, "positives", int, f"node {k}"),
            fraction=float(_need(raw, "fraction", (int, float), f"node {k}")),
        ))
    known = {n.id for n in nodes}
    if len(known) != len(nodes):
        raise GraphSchemaError("duplicate node ids")
    edges = []
    for k, raw in enumerate(doc["edges"]):
        if not isinstance(raw, dict):
            raise GraphSchemaError(f"edge {k} must be an object")
        source = _need(raw, "source", str, f"edge {k}")
        target = _need(raw, "target", str, f"edge {k}")
        weight = float(_need(raw, "weight", (int, float), f"edge {k}"))
        direction = raw.get("direction")
        if direction not in (None, "higher", "lower"):
            raise GraphSchemaError(f"edge {k} has a bad direction tag")
        if source not in known or target not in known:
            raise GraphSchemaError(f"edge {k} references an unknown node")
        if source == target:
            raise GraphSchemaError(f"edge {k} is a self loop")
        if weight <= 0:
            raise GraphSchemaError(f"edge {k} has non-positive weight")
        edges.append(Edge(source=source, target=target, weight=weight,
                          adjusted_log10_p=-weight, direction=direction))
    return NetworkGraph(nodes=nodes, edges=edges, directed=directed,
                        alpha=float(alpha), mtm=mtm, n_rows=n_rows)


# --- adjacency ------------------------------------------------------------

def to_adjacency_csv(g):
    """Weighted adjacency matrix; rows and columns follow node order."""
    ids = g.node_ids
    index = {nid: k for k, nid in enumerate(ids)}
    m = [[0.0] * len(ids) for _ in ids]
    for e in g.edges:
        i, j = index[e.source], index[e.target]
        m[i][j] = e.weight
        if not g.directed:
            m[j][i] = e.weight
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + ids)
    for nid, row in zip(ids, m):
        w.writerow([nid] + [repr(v) if v else "0" for v in row])
    return buf.getvalue().encode("utf-8")


# --- graphml --------------------------------------------------------------

_GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def to_graphml(g):
    ET.register_namespace("", _GRAPHML_NS)
    root = ET.Element(f"{{{_GRAPHML_NS}}}graphml")
    keys = [
        ("d_feature", "node", "feature", "string"),
        ("d_label", "node", "label", "string"),
        ("d_positives", "node", "positives", "int"),
        ("d_fraction", "node", "fraction", "double"),
        ("d_weight", "edge", "weight", "double"),
        ("d_direction", "edge", "direction", "string"),
    ]
    for kid, dom, name, typ in keys:
        ET.SubElement(root, f"{{{_GRAPHML_NS}}}key", {
            "id": kid, "for": dom, "attr.name": name, "attr.type": typ})
    graph = ET.SubElement(root, f"{{{_GRAPHML_NS}}}graph", {
        "id": "G",
        "edgedefault": "directed" if g.directed else "undirected"})
    for n in g.nodes:
        el = ET.SubElement(graph, f"{{{_GRAPHML_NS}}}node", {"id": n.id})
        pairs = [("d_feature", n.feature), ("d_positives", str(n.positives)),
                 ("d_fraction", repr(n.fraction))]
        if n.label is not None:
            pairs.insert(1, ("d_label", n.label))
        for kid, text in pairs:
            d = ET.SubElement(el, f"{{{_GRAPHML_NS}}}data", {"key": kid})
            d.text = text
    for e in g.edges:
        el = ET.SubElement(graph, f"{{{_GRAPHML_NS}}}edge",
                           {"source": e.source, "target": e.target})
        d = ET.SubElement(el, f"{{{_GRAPHML_NS}}}data", {"key": "d_weight"})
        d.text = repr(e.weight)
        if e.direction is not None:
            d = ET.SubElement(el, f"{{{_GRAPHML_NS}}}data",
                              {"key": "d_direction"})
            d.text = e.direction
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


FORMATS = ("json", "adjacency", "graphml")


def export(g, fmt):
    """Serialise a graph in one of the named formats."""
    if fmt == "json":
        return to_graph_json(g)
    if fmt == "adjacency":
        return to_adjacency_csv(g)
    if fmt == "graphml":
        return to_graphml(g)
    raise UnsupportedFormat(
        f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
