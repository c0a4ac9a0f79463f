import { afterEach, describe, expect, it, vi } from "vitest";
import { initViewer } from "../src/viewer";
import titanicDoc from "./fixtures/titanic-graph.json";

// The fixture is the analyzer's own output for the passenger-survival
// table (tests/data/titanic.csv), regenerated with:
//   hnet analyze --in tests/data/titanic.csv \
//     --out frontend/test/fixtures/titanic-graph.json

const RAW = JSON.stringify(titanicDoc);

afterEach(() => {
  document.body.innerHTML = "";
  vi.restoreAllMocks();
});

describe("analyzer output end to end", () => {
  it("renders every node and edge without console errors", () => {
    const errors = vi.spyOn(console, "error");
    const container = document.createElement("div");
    document.body.appendChild(container);
    const viewer = initViewer(container, RAW, { animate: false });

    expect(viewer.ok).toBe(true);
    expect(container.querySelector(".banner.error")).toBeNull();
    expect(container.querySelectorAll("g.node").length).toBe(titanicDoc.nodes.length);
    expect(container.querySelectorAll("g.edges line.edge").length).toBe(
      titanicDoc.edges.length,
    );
    for (const node of titanicDoc.nodes) {
      expect(container.querySelector(`g.node[data-id="${node.id}"]`)).not.toBeNull();
    }
    expect(errors).not.toHaveBeenCalled();
  });

  it("lays out feature categories as same-colored clusters", () => {
    const container = document.createElement("div");
    document.body.appendChild(container);
    initViewer(container, RAW, { animate: false });
    const byFeature = new Map<string, Set<string>>();
    for (const node of titanicDoc.nodes) {
      const fill = container
        .querySelector(`g.node[data-id="${node.id}"] circle`)!
        .getAttribute("fill")!;
      if (!byFeature.has(node.feature)) {
        byFeature.set(node.feature, new Set());
      }
      byFeature.get(node.feature)!.add(fill);
    }
    for (const fills of byFeature.values()) {
      expect(fills.size).toBe(1);
    }
  });

  it("focuses a hub's cluster on double-click", () => {
    const container = document.createElement("div");
    document.body.appendChild(container);
    initViewer(container, RAW, { animate: false });

    const degree = new Map<string, number>();
    for (const edge of titanicDoc.edges) {
      degree.set(edge.source, (degree.get(edge.source) ?? 0) + 1);
      degree.set(edge.target, (degree.get(edge.target) ?? 0) + 1);
    }
    const [hub, hubDegree] = [...degree.entries()].sort((a, b) => b[1] - a[1])[0];

    const group = container.querySelector(`g.node[data-id="${hub}"]`)!;
    group.dispatchEvent(new MouseEvent("dblclick", { bubbles: true }));
    expect(container.classList.contains("focused")).toBe(true);
    expect(container.querySelectorAll("g.node.highlight").length).toBeGreaterThan(2);
    expect(container.querySelectorAll("line.edge.highlight").length).toBe(hubDegree);
  });

  it("filters the real edge set exactly at any threshold", () => {
    const container = document.createElement("div");
    document.body.appendChild(container);
    const viewer = initViewer(container, RAW, { animate: false });

    const weights = titanicDoc.edges.map((e) => e.weight).sort((a, b) => a - b);
    const cut = (weights[weights.length >> 1] + weights[(weights.length >> 1) + 1]) / 2;
    viewer.setThreshold(cut);
    const expected = titanicDoc.edges.filter((e) => e.weight >= cut).length;
    expect(container.querySelectorAll("g.edges line.edge").length).toBe(expected);
    expect(expected).toBeGreaterThan(0);
    expect(expected).toBeLessThan(titanicDoc.edges.length);
  });
});
