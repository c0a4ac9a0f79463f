"""Forward sampling from small discrete conditional-probability networks.

Networks are JSON: a list of nodes, each with states, parents and a
conditional probability table.  CPT rows follow mixed-radix order over the
parent states with the FIRST parent varying slowest, i.e. row index =
sum(idx(parent_k) * prod(cards of parents after k)).
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    CyclicGraph,
    MalformedCpt,
    NetworkSchemaError,
    UnknownParent,
)
from .ingest import Column, FeatureTable, Kind


@dataclass
class CpdNode:
    name: str
    states: tuple
    parents: tuple
    cpt: np.ndarray  # (number of parent combinations, number of states)


@dataclass
class CpdNetwork:
    nodes: list

    @property
    def names(self):
        return [n.name for n in self.nodes]

    def node(self, name):
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(name)

    def arcs(self):
        """(parent, child) pairs in listing order."""
        out = []
        for n in self.nodes:
            for p in n.parents:
                out.append((p, n.name))
        return out

    def topological_order(self):
        """Kahn's ordering; ties broken by listing order."""
        index = {n.name: k for k, n in enumerate(self.nodes)}
        indeg = {n.name: len(n.parents) for n in self.nodes}
        children = {n.name: [] for n in self.nodes}
        for n in self.nodes:
            for p in n.parents:
                children[p].append(n.name)
        ready = sorted([n for n, d in indeg.items() if d == 0],
                       key=index.get)
        order = []
        while ready:
            cur = ready.pop(0)
            order.append(cur)
            changed = False
            for c in children[cur]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
                    changed = True
            if changed:
                ready.sort(key=index.get)
        if len(order) != len(self.nodes):
            raise CyclicGraph("the parent relation contains a cycle")
        return order


def _as_doc(source):
    if isinstance(source, dict):
        return source
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        with open(source, "rb") as fh:
            source = fh.read()
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        return json.loads(source)
    except (json.JSONDecodeError, TypeError) as exc:
        raise NetworkSchemaError(f"not a network definition: {exc}") from None


def load_network(source):
    """Parse and fully validate a network definition.

    Accepts a dict, JSON text/bytes, a path or a readable.  Raises
    UnknownParent, CyclicGraph or MalformedCpt on the matching defect and
    NetworkSchemaError on structural problems.
    """
    doc = _as_doc(source)
    if not isinstance(doc, dict) or "nodes" not in doc:
        raise NetworkSchemaError("top level must be an object with 'nodes'")
    raw_nodes = doc["nodes"]
    if not isinstance(raw_nodes, list) or not raw_nodes:
        raise NetworkSchemaError("'nodes' must be a non-empty array")
    parsed = []
    for k, raw in enumerate(raw_nodes):
        if not isinstance(raw, dict):
            raise NetworkSchemaError(f"node {k} must be an object")
        name = raw.get("name")
        if not isinstance(name, str) or not name:
            raise NetworkSchemaError(f"node {k} needs a non-empty name")
        states = raw.get("states")
        if (not isinstance(states, list) or not states
                or not all(isinstance(s, str) for s in states)
                or len(set(states)) != len(states)):
            raise NetworkSchemaError(
                f"node {name!r} needs a list of distinct state names")
        parents = raw.get("parents", [])
        if not isinstance(parents, list) or \
                not all(isinstance(p, str) for p in parents):
            raise NetworkSchemaError(f"node {name!r} has a bad parent list")
        cpt = raw.get("cpt")
        if not isinstance(cpt, list):
            raise NetworkSchemaError(f"node {name!r} needs a cpt")
        parsed.append((name, tuple(states), tuple(parents), cpt))
    names = [p[0] for p in parsed]
    if len(set(names)) != len(names):
        raise NetworkSchemaError("duplicate node names")
    known = set(names)
    for name, _states, parents, _cpt in parsed:
        for p in parents:
            if p not in known:
                raise UnknownParent(f"node {name!r} lists unknown parent {p!r}")
        if len(set(parents)) != len(parents):
            raise NetworkSchemaError(f"node {name!r} repeats a parent")

    cards = {name: len(states) for name, states, _p, _c in parsed}
    nodes = []
    for name, states, parents, cpt in parsed:
        expect_rows = 1
        for p in parents:
            expect_rows *= cards[p]
        try:
            table = np.asarray(cpt, dtype=np.float64)
        except ValueError:
            raise MalformedCpt(f"node {name!r}: cpt is not rectangular") \
                from None
        if table.ndim != 2 or table.shape != (expect_rows, len(states)):
            raise MalformedCpt(
                f"node {name!r}: cpt shape {table.shape} != "
                f"({expect_rows}, {len(states)})")
        if not np.isfinite(table).all() or (table < 0).any() or \
                (table > 1).any():
            raise MalformedCpt(
                f"node {name!r}: cpt entries must lie in [0, 1]")
        sums = table.sum(axis=1)
        if np.abs(sums - 1.0).max() > 1e-9:
            raise MalformedCpt(
                f"node {name!r}: cpt rows must sum to 1 "
                f"(worst deviation {np.abs(sums - 1.0).max():.2e})")
        nodes.append(CpdNode(name=name, states=states, parents=parents,
                             cpt=table))
    net = CpdNetwork(nodes=nodes)
    net.topological_order()  # raises CyclicGraph on a cycle
    return net


def forward_sample(net, n, seed):
    """Draw n joint samples; returns a FeatureTable of state-label columns.

    Nodes are sampled in topological order with one uniform draw per node
    per row from a single seeded generator, so output is a pure function
    of (network, n, seed).  Column order follows the network listing.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = np.random.default_rng(seed)
    state_idx = {}
    for name in net.topological_order():
        node = net.node(name)
        if node.parents:
            row = np.zeros(n, dtype=np.int64)
            stride = 1
            for p in reversed(node.parents):
                row += state_idx[p] * stride
                stride *= len(net.node(p).states)
            probs = node.cpt[row]
        else:
            probs = np.broadcast_to(node.cpt[0], (n, len(node.states)))
        cum = np.cumsum(probs, axis=1)
        u = rng.random(n)
        idx = (cum <= u[:, None]).sum(axis=1)
        state_idx[name] = np.minimum(idx, len(node.states) - 1)
    columns = []
    for node in net.nodes:
        states = np.array(node.states, dtype=object)
        vals = states[state_idx[node.name]].tolist() if n else []
        columns.append(Column(name=node.name, kind=Kind.DISCRETE,
                              values=vals))
    return FeatureTable(columns=columns, n_rows=n)
