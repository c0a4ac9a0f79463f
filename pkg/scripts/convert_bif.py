#!/usr/bin/env python3
"""Convert a discrete-variable BIF file into the JSON network format.

Usage: python scripts/convert_bif.py input.bif output.json

Probability rows are taken in their textual order, which in standard BIF
emissions enumerates parent combinations with the first parent varying
slowest — the same convention the sampler uses.  Per-row condition labels
are only checked for completeness (every block must list each parent
combination exactly once); some emitters permute them inconsistently, so
they are not trusted for ordering.
"""

import json
import re
import sys

VARIABLE = re.compile(
    r"variable\s+(\S+)\s*\{\s*type\s+discrete\s*\[\s*(\d+)\s*\]\s*"
    r"\{\s*([^}]*?)\s*\}\s*;\s*\}", re.S)
PROB_HEAD = re.compile(
    r"probability\s*\(\s*(\S+)\s*(?:\|\s*([^)]*?))?\s*\)\s*\{")
ROW = re.compile(r"\(\s*([^)]*?)\s*\)\s*([^;]*?);")
TABLE = re.compile(r"table\s+([^;]*?);")


def parse_bif(text):
    variables = {}
    order = []
    for m in VARIABLE.finditer(text):
        name, card, states = m.group(1), int(m.group(2)), m.group(3)
        states = [s.strip() for s in states.split(",")]
        if len(states) != card:
            raise SystemExit(f"{name}: {card} states declared, "
                             f"{len(states)} listed")
        variables[name] = states
        order.append(name)

    cpds = {}
    pos = 0
    while True:
        m = PROB_HEAD.search(text, pos)
        if not m:
            break
        child = m.group(1)
        parents = ([p.strip() for p in m.group(2).split(",")]
                   if m.group(2) else [])
        end = text.index("}", m.end())
        body = text[m.end():end]
        pos = end
        if parents:
            rows = []
            combos = []
            for rm in ROW.finditer(body):
                combos.append(tuple(s.strip() for s in rm.group(1).split(",")))
                rows.append([float(v) for v in rm.group(2).split(",")])
            expect = 1
            for p in parents:
                expect *= len(variables[p])
            if len(rows) != expect:
                raise SystemExit(
                    f"{child}: {len(rows)} rows, expected {expect}")
            if len(set(combos)) != len(combos):
                raise SystemExit(f"{child}: duplicate condition labels")
            for combo in combos:
                for p, s in zip(parents, combo):
                    if s not in variables[p]:
                        raise SystemExit(
                            f"{child}: label {s!r} is not a state of {p}")
        else:
            tm = TABLE.search(body)
            if not tm:
                raise SystemExit(f"{child}: no table row")
            rows = [[float(v) for v in tm.group(1).split(",")]]
        for row in rows:
            if len(row) != len(variables[child]):
                raise SystemExit(f"{child}: row width != state count")
        # BIF files round probabilities (e.g. three 0.33333333 entries), so
        # renormalise each row; the sampler requires exact unit rows.
        normed = []
        for row in rows:
            total = sum(row)
            if abs(total - 1.0) > 1e-3:
                raise SystemExit(f"{child}: row sums to {total}")
            normed.append([v / total for v in row])
        cpds[child] = (parents, normed)

    missing = [n for n in order if n not in cpds]
    if missing:
        raise SystemExit(f"no probability block for: {', '.join(missing)}")
    return {
        "nodes": [
            {
                "name": name,
                "states": variables[name],
                "parents": cpds[name][0],
                "cpt": cpds[name][1],
            }
            for name in order
        ]
    }


def main(argv):
    if len(argv) != 3:
        raise SystemExit(__doc__.strip().split("\n")[2])
    with open(argv[1], encoding="utf-8") as fh:
        doc = parse_bif(fh.read())
    with open(argv[2], "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    n_params = sum(len(n["cpt"]) * (len(n["states"]) - 1)
                   for n in doc["nodes"])
    n_arcs = sum(len(n["parents"]) for n in doc["nodes"])
    print(f"{argv[2]}: {len(doc['nodes'])} nodes, {n_arcs} arcs, "
          f"{n_params} free parameters")


if __name__ == "__main__":
    main(sys.argv)
