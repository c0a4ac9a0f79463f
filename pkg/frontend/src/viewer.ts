/**
 * Interactive association-network viewer.
 *
 * Renders a graph document (one-hot category nodes, weighted association
 * edges, run metadata) as a force-directed SVG network with a weight
 * threshold slider, double-click focus highlighting, and per-node tooltips.
 * The module is dependency-free so the build can inline it, together with
 * its stylesheet, into a single self-contained HTML asset.
 */

export interface GraphNode {
  id: string;
  feature: string;
  label: string | null;
  positives: number;
  fraction: number;
}

export type EdgeDirection = "higher" | "lower" | null;

export interface GraphEdge {
  source: string;
  target: string;
  weight: number;
  direction: EdgeDirection;
}

export interface GraphMeta {
  alpha?: number;
  mtm?: string;
  n_rows?: number;
  directed?: boolean;
}

export interface Graph {
  nodes: GraphNode[];
  edges: GraphEdge[];
  meta: GraphMeta;
}

export interface ViewerOptions {
  /** Drive the layout from animation frames after the initial settle. */
  animate?: boolean;
  /** Synchronous simulation steps run before the first paint. */
  settleTicks?: number;
}

/** Raised when the embedded document does not conform to the graph schema. */
export class GraphDataError extends Error {}

const SVG_NS = "http://www.w3.org/2000/svg";

/** Layout world size; the SVG scales to its container via viewBox. */
const WORLD_WIDTH = 900;
const WORLD_HEIGHT = 600;

const NODE_RADIUS_MIN = 6;
const NODE_RADIUS_MAX = 16;
const EDGE_WIDTH_MIN = 1;
const EDGE_WIDTH_MAX = 4.5;

/** Categorical palette; features beyond the palette wrap around. */
const FEATURE_PALETTE = [
  "#4269d0", "#efb118", "#ff725c", "#6cc5b0", "#3ca951", "#ff8ab7",
  "#a463f2", "#97bbf5", "#9c6b4e", "#9498a0", "#cb6015", "#5c6068",
];

function fail(message: string): never {
  throw new GraphDataError(message);
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function asFiniteNumber(value: unknown, what: string): number {
  if (typeof value !== "number" || !isFinite(value)) {
    fail(`${what} must be a finite number`);
  }
  return value;
}

/**
 * Parse and validate a serialized graph document.
 *
 * Checks the structural rules the renderer relies on: unique string node
 * ids, edges that reference existing nodes, finite non-negative weights,
 * and direction tags limited to "higher"/"lower"/null.  Unknown extra
 * fields are ignored.
 */
export function parseGraph(raw: string): Graph {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch (exc) {
    fail(`embedded graph data is not valid JSON (${(exc as Error).message})`);
  }
  if (!isRecord(doc)) {
    fail("graph document must be a JSON object");
  }
  if (!Array.isArray(doc.nodes)) {
    fail('graph document is missing the "nodes" array');
  }
  if (!Array.isArray(doc.edges)) {
    fail('graph document is missing the "edges" array');
  }

  const ids = new Set<string>();
  const nodes: GraphNode[] = doc.nodes.map((entry, i) => {
    if (!isRecord(entry)) {
      fail(`node ${i} is not an object`);
    }
    if (typeof entry.id !== "string" || entry.id === "") {
      fail(`node ${i} is missing a string "id"`);
    }
    if (ids.has(entry.id)) {
      fail(`duplicate node id "${entry.id}"`);
    }
    ids.add(entry.id);
    if (typeof entry.feature !== "string") {
      fail(`node "${entry.id}" is missing a string "feature"`);
    }
    const label = entry.label === undefined ? null : entry.label;
    if (label !== null && typeof label !== "string") {
      fail(`node "${entry.id}" has a non-string "label"`);
    }
    const positives = asFiniteNumber(entry.positives, `node "${entry.id}" positives`);
    const fraction = asFiniteNumber(entry.fraction, `node "${entry.id}" fraction`);
    if (fraction < 0 || fraction > 1) {
      fail(`node "${entry.id}" fraction ${fraction} is outside [0, 1]`);
    }
    return { id: entry.id, feature: entry.feature, label, positives, fraction };
  });

  const edges: GraphEdge[] = doc.edges.map((entry, i) => {
    if (!isRecord(entry)) {
      fail(`edge ${i} is not an object`);
    }
    const { source, target } = entry;
    if (typeof source !== "string" || !ids.has(source)) {
      fail(`edge ${i} source "${String(source)}" is not a node id`);
    }
    if (typeof target !== "string" || !ids.has(target)) {
      fail(`edge ${i} target "${String(target)}" is not a node id`);
    }
    const weight = asFiniteNumber(entry.weight, `edge ${i} weight`);
    if (weight < 0) {
      fail(`edge ${i} weight ${weight} is negative`);
    }
    const direction = entry.direction === undefined ? null : entry.direction;
    if (direction !== null && direction !== "higher" && direction !== "lower") {
      fail(`edge ${i} direction must be "higher", "lower", or null`);
    }
    return { source, target, weight, direction };
  });

  const meta: GraphMeta = isRecord(doc.meta) ? (doc.meta as GraphMeta) : {};
  return { nodes, edges, meta };
}

/** Map each feature to a palette color, in order of first appearance. */
export function featureColors(nodes: GraphNode[]): Map<string, string> {
  const colors = new Map<string, string>();
  for (const node of nodes) {
    if (!colors.has(node.feature)) {
      colors.set(node.feature, FEATURE_PALETTE[colors.size % FEATURE_PALETTE.length]);
    }
  }
  return colors;
}

/** Node radius scales linearly with the fraction of available labels. */
export function nodeRadius(fraction: number): number {
  const f = Math.min(1, Math.max(0, fraction));
  return NODE_RADIUS_MIN + (NODE_RADIUS_MAX - NODE_RADIUS_MIN) * f;
}

/** Deterministic PRNG so reloading the page reproduces the same layout. */
function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

interface Body {
  x: number;
  y: number;
  vx: number;
  vy: number;
  r: number;
}

/**
 * Small force-directed layout: pairwise charge repulsion, spring
 * attraction along the currently visible edges, weak centering gravity,
 * and a collision pass that keeps nodes from overlapping.
 */
class Simulation {
  readonly bodies: Body[] = [];
  alpha = 1;

  private readonly index = new Map<string, number>();
  private springs: Array<[number, number]> = [];

  constructor(nodes: GraphNode[]) {
    const random = mulberry32(0x9e3779b9);
    const cx = WORLD_WIDTH / 2;
    const cy = WORLD_HEIGHT / 2;
    const ring = Math.min(WORLD_WIDTH, WORLD_HEIGHT) / 3;
    nodes.forEach((node, i) => {
      const angle = (2 * Math.PI * i) / Math.max(1, nodes.length);
      const wobble = 0.75 + 0.5 * random();
      this.index.set(node.id, i);
      this.bodies.push({
        x: cx + ring * wobble * Math.cos(angle),
        y: cy + ring * wobble * Math.sin(angle),
        vx: 0,
        vy: 0,
        r: nodeRadius(node.fraction),
      });
    });
  }

  bodyOf(id: string): Body {
    return this.bodies[this.index.get(id)!];
  }

  setSprings(edges: GraphEdge[]): void {
    this.springs = edges.map((e) => [this.index.get(e.source)!, this.index.get(e.target)!]);
  }

  reheat(alpha: number): void {
    this.alpha = Math.max(this.alpha, alpha);
  }

  get settled(): boolean {
    return this.alpha < 0.02;
  }

  tick(): void {
    const bodies = this.bodies;
    const n = bodies.length;
    const alpha = this.alpha;

    // Charge: every pair repels with an inverse-square falloff.
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const a = bodies[i];
        const b = bodies[j];
        let dx = b.x - a.x;
        let dy = b.y - a.y;
        let d2 = dx * dx + dy * dy;
        if (d2 < 1e-6) {
          dx = 0.1 * ((i % 3) - 1) || 0.1;
          dy = 0.1 * ((j % 3) - 1) || -0.1;
          d2 = dx * dx + dy * dy;
        }
        const push = (alpha * 1200) / d2;
        const d = Math.sqrt(d2);
        const fx = (dx / d) * push;
        const fy = (dy / d) * push;
        a.vx -= fx;
        a.vy -= fy;
        b.vx += fx;
        b.vy += fy;
      }
    }

    // Springs pull the endpoints of visible edges toward a rest length.
    const rest = 110;
    for (const [i, j] of this.springs) {
      const a = bodies[i];
      const b = bodies[j];
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const d = Math.sqrt(dx * dx + dy * dy) || 1;
      const pull = alpha * 0.06 * (d - rest);
      const fx = (dx / d) * pull;
      const fy = (dy / d) * pull;
      a.vx += fx;
      a.vy += fy;
      b.vx -= fx;
      b.vy -= fy;
    }

    // Weak gravity toward the center keeps components on screen.
    for (const body of bodies) {
      body.vx += alpha * 0.02 * (WORLD_WIDTH / 2 - body.x);
      body.vy += alpha * 0.02 * (WORLD_HEIGHT / 2 - body.y);
    }

    // Integrate with damping, then resolve overlaps directly.
    for (const body of bodies) {
      body.vx *= 0.6;
      body.vy *= 0.6;
      body.x += body.vx;
      body.y += body.vy;
    }
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const a = bodies[i];
        const b = bodies[j];
        const dx = b.x - a.x;
        const dy = b.y - a.y;
        const d = Math.sqrt(dx * dx + dy * dy) || 1e-3;
        const overlap = a.r + b.r + 4 - d;
        if (overlap > 0) {
          const shift = overlap / 2;
          a.x -= (dx / d) * shift;
          a.y -= (dy / d) * shift;
          b.x += (dx / d) * shift;
          b.y += (dy / d) * shift;
        }
      }
    }
    for (const body of bodies) {
      body.x = Math.min(WORLD_WIDTH - body.r - 2, Math.max(body.r + 2, body.x));
      body.y = Math.min(WORLD_HEIGHT - body.r - 2, Math.max(body.r + 2, body.y));
    }

    this.alpha *= 0.97;
  }
}

interface NodeView {
  node: GraphNode;
  group: SVGGElement;
  circle: SVGCircleElement;
}

interface EdgeView {
  edge: GraphEdge;
  line: SVGLineElement;
  visible: boolean;
}

let instanceCounter = 0;

/**
 * Viewer — owns the DOM subtree and the layout simulation.
 *
 * Construction never throws on bad input: schema violations surface as a
 * visible error banner and leave `ok` false, so the page is never blank.
 */
export class Viewer {
  readonly ok: boolean;
  readonly error: string | null;
  readonly graph: Graph | null;
  threshold = 0;

  private readonly container: HTMLElement;
  private readonly animate: boolean;
  private readonly instance: number;
  private sim!: Simulation;
  private nodeViews = new Map<string, NodeView>();
  private edgeViews: EdgeView[] = [];
  private edgesGroup!: SVGGElement;
  private thresholdValue!: HTMLElement;
  private tooltip!: HTMLElement;
  private focusedId: string | null = null;
  private frameRequested = false;

  constructor(container: HTMLElement, raw: string, options: ViewerOptions = {}) {
    this.container = container;
    this.animate = options.animate !== false;
    this.instance = ++instanceCounter;
    container.classList.add("hnet-viewer");
    container.textContent = "";

    const heading = document.createElement("h1");
    heading.textContent = "Association network";
    container.appendChild(heading);

    let graph: Graph;
    try {
      graph = parseGraph(raw);
    } catch (exc) {
      if (!(exc instanceof GraphDataError)) {
        throw exc;
      }
      this.ok = false;
      this.error = exc.message;
      this.graph = null;
      this.buildBanner("error", exc.message);
      return;
    }
    this.ok = true;
    this.error = null;
    this.graph = graph;

    this.buildToolbar(graph);
    if (graph.edges.length === 0) {
      this.buildBanner("notice", "no significant edges");
    }
    this.buildSvg(graph);
    this.buildTooltip();

    this.sim = new Simulation(graph.nodes);
    this.setThreshold(0, options.settleTicks ?? 60);
  }

  /**
   * Hide edges lighter than `threshold`, dim nodes left without a visible
   * edge, and let the layout re-settle on the remaining springs.
   */
  setThreshold(threshold: number, settleTicks = 15): void {
    if (!this.ok || this.graph === null) {
      return;
    }
    this.threshold = threshold;
    this.thresholdValue.textContent = formatWeight(threshold);

    const degree = new Map<string, number>();
    this.edgesGroup.textContent = "";
    for (const view of this.edgeViews) {
      view.visible = view.edge.weight >= threshold;
      if (view.visible) {
        this.edgesGroup.appendChild(view.line);
        degree.set(view.edge.source, (degree.get(view.edge.source) ?? 0) + 1);
        degree.set(view.edge.target, (degree.get(view.edge.target) ?? 0) + 1);
      }
    }
    for (const [id, view] of this.nodeViews) {
      view.group.classList.toggle("dimmed", (degree.get(id) ?? 0) === 0);
    }

    this.applyFocus();
    this.sim.setSprings(this.visibleEdges());
    this.sim.reheat(0.5);
    for (let i = 0; i < settleTicks; i++) {
      this.sim.tick();
    }
    this.paint();
    this.scheduleFrames();
  }

  /** Toggle focus on a node: double-clicking the focused node clears it. */
  toggleFocus(id: string): void {
    if (!this.ok || !this.nodeViews.has(id)) {
      return;
    }
    this.focusedId = this.focusedId === id ? null : id;
    this.applyFocus();
  }

  /** Advance the simulation synchronously (used by tests and the loop). */
  tick(steps = 1): void {
    if (!this.ok) {
      return;
    }
    for (let i = 0; i < steps; i++) {
      this.sim.tick();
    }
    this.paint();
  }

  private visibleEdges(): GraphEdge[] {
    return this.edgeViews.filter((v) => v.visible).map((v) => v.edge);
  }

  private buildBanner(kind: "error" | "notice", message: string): void {
    const banner = document.createElement("div");
    banner.className = `banner ${kind}`;
    banner.textContent = message;
    this.container.appendChild(banner);
  }

  private buildToolbar(graph: Graph): void {
    const toolbar = document.createElement("div");
    toolbar.className = "toolbar";

    const label = document.createElement("label");
    label.className = "threshold-label";
    label.appendChild(document.createTextNode("edge weight ≥ "));
    this.thresholdValue = document.createElement("span");
    this.thresholdValue.className = "threshold-value";
    this.thresholdValue.textContent = "0";
    label.appendChild(this.thresholdValue);
    toolbar.appendChild(label);

    const maxWeight = graph.edges.reduce((acc, e) => Math.max(acc, e.weight), 0);
    const slider = document.createElement("input");
    slider.type = "range";
    slider.className = "threshold-slider";
    slider.min = "0";
    slider.max = String(maxWeight);
    slider.step = "any";
    slider.value = "0";
    slider.disabled = graph.edges.length === 0;
    slider.addEventListener("input", () => {
      this.setThreshold(Number(slider.value));
    });
    toolbar.appendChild(slider);

    const summary = document.createElement("span");
    summary.className = "graph-summary";
    summary.textContent = describeGraph(graph);
    toolbar.appendChild(summary);

    this.container.appendChild(toolbar);
  }

  private buildSvg(graph: Graph): void {
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("class", "network");
    svg.setAttribute("viewBox", `0 0 ${WORLD_WIDTH} ${WORLD_HEIGHT}`);
    svg.setAttribute("preserveAspectRatio", "xMidYMid meet");

    const defs = document.createElementNS(SVG_NS, "defs");
    for (const direction of ["higher", "lower"] as const) {
      defs.appendChild(this.buildArrowMarker(direction));
    }
    svg.appendChild(defs);

    this.edgesGroup = document.createElementNS(SVG_NS, "g");
    this.edgesGroup.setAttribute("class", "edges");
    svg.appendChild(this.edgesGroup);

    const nodesGroup = document.createElementNS(SVG_NS, "g");
    nodesGroup.setAttribute("class", "nodes");
    svg.appendChild(nodesGroup);

    const maxWeight = graph.edges.reduce((acc, e) => Math.max(acc, e.weight), 0);
    for (const edge of graph.edges) {
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("class", "edge");
      line.setAttribute("data-source", edge.source);
      line.setAttribute("data-target", edge.target);
      line.setAttribute("data-weight", String(edge.weight));
      line.setAttribute("stroke-width", edgeWidth(edge.weight, maxWeight).toFixed(2));
      if (edge.direction !== null) {
        line.setAttribute("marker-end", `url(#${this.markerId(edge.direction)})`);
      }
      this.edgeViews.push({ edge, line, visible: true });
      this.edgesGroup.appendChild(line);
    }

    const colors = featureColors(graph.nodes);
    for (const node of graph.nodes) {
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("class", "node");
      group.setAttribute("data-id", node.id);

      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("r", nodeRadius(node.fraction).toFixed(2));
      circle.setAttribute("fill", colors.get(node.feature)!);
      group.appendChild(circle);

      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("dy", (-nodeRadius(node.fraction) - 4).toFixed(2));
      text.textContent = node.id;
      group.appendChild(text);

      group.addEventListener("dblclick", () => this.toggleFocus(node.id));
      group.addEventListener("mouseenter", (event) => this.showTooltip(node, event));
      group.addEventListener("mousemove", (event) => this.moveTooltip(event));
      group.addEventListener("mouseleave", () => this.hideTooltip());

      nodesGroup.appendChild(group);
      this.nodeViews.set(node.id, { node, group, circle });
    }

    this.container.appendChild(svg);
  }

  private markerId(direction: "higher" | "lower"): string {
    return `arrow-${direction}-${this.instance}`;
  }

  private buildArrowMarker(direction: "higher" | "lower"): SVGMarkerElement {
    const marker = document.createElementNS(SVG_NS, "marker");
    marker.setAttribute("id", this.markerId(direction));
    marker.setAttribute("class", `arrow arrow-${direction}`);
    marker.setAttribute("viewBox", "0 0 10 10");
    marker.setAttribute("refX", "9");
    marker.setAttribute("refY", "5");
    marker.setAttribute("markerWidth", "7");
    marker.setAttribute("markerHeight", "7");
    marker.setAttribute("orient", "auto-start-reverse");
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", "M 0 1 L 9 5 L 0 9 z");
    marker.appendChild(path);
    return marker;
  }

  private buildTooltip(): void {
    this.tooltip = document.createElement("div");
    this.tooltip.className = "tooltip";
    this.tooltip.hidden = true;
    this.container.appendChild(this.tooltip);
  }

  /**
   * Fill and show the tooltip: feature, label, positive count, share of
   * available labels, and the visible incident edges with their weights
   * (▲/▼ marks the direction tag of rank-test edges).
   */
  private showTooltip(node: GraphNode, event: MouseEvent): void {
    const tooltip = this.tooltip;
    tooltip.textContent = "";

    const title = document.createElement("div");
    title.className = "tooltip-title";
    title.textContent = node.id;
    tooltip.appendChild(title);

    const addLine = (text: string) => {
      const line = document.createElement("div");
      line.textContent = text;
      tooltip.appendChild(line);
    };
    addLine(`feature: ${node.feature}`);
    addLine(node.label === null ? "numeric column" : `label: ${node.label}`);
    addLine(`positives: ${node.positives}`);
    addLine(`available: ${(100 * node.fraction).toFixed(1)}%`);

    const incident = this.visibleEdges().filter(
      (e) => e.source === node.id || e.target === node.id,
    );
    if (incident.length > 0) {
      const header = document.createElement("div");
      header.className = "tooltip-edges";
      header.textContent = `edges (${incident.length}):`;
      tooltip.appendChild(header);
      for (const edge of incident) {
        const other = edge.source === node.id ? edge.target : edge.source;
        addLine(`  ${other}  ${formatWeight(edge.weight)}${directionGlyph(edge.direction)}`);
      }
    }

    tooltip.hidden = false;
    this.moveTooltip(event);
  }

  private moveTooltip(event: MouseEvent): void {
    this.tooltip.style.left = `${event.pageX + 14}px`;
    this.tooltip.style.top = `${event.pageY + 14}px`;
  }

  private hideTooltip(): void {
    this.tooltip.hidden = true;
  }

  /**
   * Apply the focus highlight: the focused node, its neighbors across the
   * currently visible edges, and those edges get `highlight`; everything
   * else is faded through the container's `focused` class.
   */
  private applyFocus(): void {
    const focused = this.focusedId;
    if (focused !== null && !this.nodeViews.has(focused)) {
      this.focusedId = null;
      return this.applyFocus();
    }
    this.container.classList.toggle("focused", focused !== null);

    const neighborhood = new Set<string>();
    if (focused !== null) {
      neighborhood.add(focused);
      for (const view of this.edgeViews) {
        const incident =
          view.visible && (view.edge.source === focused || view.edge.target === focused);
        view.line.classList.toggle("highlight", incident);
        if (incident) {
          neighborhood.add(view.edge.source);
          neighborhood.add(view.edge.target);
        }
      }
    } else {
      for (const view of this.edgeViews) {
        view.line.classList.remove("highlight");
      }
    }
    for (const [id, view] of this.nodeViews) {
      view.group.classList.toggle("highlight", focused !== null && neighborhood.has(id));
    }
  }

  private paint(): void {
    if (this.graph === null) {
      return;
    }
    for (const view of this.edgeViews) {
      const a = this.sim.bodyOf(view.edge.source);
      const b = this.sim.bodyOf(view.edge.target);
      view.line.setAttribute("x1", a.x.toFixed(1));
      view.line.setAttribute("y1", a.y.toFixed(1));
      view.line.setAttribute("x2", b.x.toFixed(1));
      view.line.setAttribute("y2", b.y.toFixed(1));
    }
    for (const [id, view] of this.nodeViews) {
      const body = this.sim.bodyOf(id);
      view.group.setAttribute("transform", `translate(${body.x.toFixed(1)},${body.y.toFixed(1)})`);
    }
  }

  private scheduleFrames(): void {
    if (!this.animate || this.frameRequested || this.sim.settled) {
      return;
    }
    const raf =
      typeof requestAnimationFrame === "function"
        ? requestAnimationFrame
        : (cb: FrameRequestCallback) => setTimeout(() => cb(0), 16) as unknown as number;
    this.frameRequested = true;
    raf(() => {
      this.frameRequested = false;
      if (!this.sim.settled) {
        this.tick();
        this.scheduleFrames();
      }
    });
  }
}

function describeGraph(graph: Graph): string {
  const parts = [`${graph.nodes.length} nodes, ${graph.edges.length} edges`];
  const meta = graph.meta;
  if (typeof meta.alpha === "number" && typeof meta.mtm === "string") {
    parts.push(`alpha ${meta.alpha}, ${meta.mtm}`);
  }
  if (typeof meta.n_rows === "number") {
    parts.push(`${meta.n_rows} rows`);
  }
  return parts.join(" — ");
}

function edgeWidth(weight: number, maxWeight: number): number {
  if (maxWeight <= 0) {
    return EDGE_WIDTH_MIN;
  }
  return EDGE_WIDTH_MIN + (EDGE_WIDTH_MAX - EDGE_WIDTH_MIN) * (weight / maxWeight);
}

function formatWeight(weight: number): string {
  return Number.isInteger(weight) ? String(weight) : weight.toFixed(1);
}

function directionGlyph(direction: EdgeDirection): string {
  if (direction === "higher") {
    return " ▲";
  }
  if (direction === "lower") {
    return " ▼";
  }
  return "";
}

/** Mount a viewer in `container` for the serialized graph `raw`. */
export function initViewer(
  container: HTMLElement,
  raw: string,
  options: ViewerOptions = {},
): Viewer {
  return new Viewer(container, raw, options);
}
