import type { MapData, Snapshot } from "./types.js";

// A tiny virtual node: render functions are pure so that re-rendering a
// fetched snapshot always yields the same structure (refresh determinism).

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: VNode[];
  text: string;
}

export function el(
  tag: string,
  attrs: Record<string, string> = {},
  children: VNode[] = [],
  text = "",
): VNode {
  return { tag, attrs, children, text };
}

export interface Cell {
  region: string;
  col: number;
  row: number;
}

/** Deterministic grid placement: row-major square grid in region order.
 * Only adjacency is known, so geometry is synthesized. */
export function gridLayout(map: MapData): Cell[] {
  const n = map.regions.length;
  const cols = Math.max(1, Math.ceil(Math.sqrt(n)));
  return map.regions.map((region, i) => ({
    region,
    col: i % cols,
    row: Math.floor(i / cols),
  }));
}

export interface ViewInput {
  snapshot: Snapshot;
  map: MapData;
  robot: string | null;
  blocked: string[];
  explanation: string[];
}

function banner(snapshot: Snapshot): VNode {
  const kids = [
    el("span", { class: "mode" }, [], snapshot.mode === "sandbox"
      ? "sandbox mode"
      : "adversarial mode"),
  ];
  if (snapshot.goal !== null) {
    kids.push(el("span", { class: "goal" }, [], snapshot.goal.text));
  }
  return el("div", { id: "banner" }, kids);
}

function sensors(snapshot: Snapshot): VNode {
  const badges = Object.keys(snapshot.pending_inputs)
    .sort()
    .map((name) =>
      el(
        "span",
        {
          class: snapshot.pending_inputs[name]
            ? "sensor on"
            : "sensor off",
          "data-sensor": name,
        },
        [],
        name,
      ),
    );
  return el("div", { id: "sensors" }, badges);
}

function mapGrid(input: ViewInput): VNode {
  const blocked = new Set(input.blocked);
  const cells = gridLayout(input.map).map((cell) => {
    const classes = ["region"];
    if (cell.region === input.robot) classes.push("robot");
    if (blocked.has(cell.region)) classes.push("blocked");
    return el(
      "div",
      {
        class: classes.join(" "),
        "data-region": cell.region,
        style: `grid-column:${cell.col + 1};grid-row:${cell.row + 1}`,
      },
      [],
      cell.region,
    );
  });
  return el("div", { id: "map" }, cells);
}

function actuators(input: ViewInput): VNode {
  const regionSet = new Set(input.map.regions);
  const toggles = Object.keys(input.snapshot.state)
    .filter(
      (n) => !regionSet.has(n) && !(n in input.snapshot.pending_inputs),
    )
    .sort()
    .map((name) =>
      el(
        "button",
        {
          class: input.snapshot.state[name]
            ? "actuator on"
            : "actuator off",
          "data-actuator": name,
        },
        [],
        name,
      ),
    );
  return el("div", { id: "actuators" }, toggles);
}

function history(snapshot: Snapshot): VNode {
  const rows = snapshot.history.map((entry, i) => {
    const moved = Object.entries(entry.move)
      .filter(([, v]) => v)
      .map(([n]) => n)
      .join(",");
    return el(
      "li",
      { class: `move ${entry.outcome}` },
      [],
      `${i + 1}: {${moved}} ${entry.outcome}`,
    );
  });
  return el("ol", { id: "history" }, rows);
}

/** The explanation panel holds the rejecting core statements verbatim,
 * one line per statement; text nodes carry the server bytes unchanged. */
function explanation(lines: string[]): VNode {
  return el(
    "div",
    { id: "explanation" },
    lines.map((line) => el("div", { class: "core-line" }, [], line)),
  );
}

export function renderSession(input: ViewInput): VNode {
  return el("div", { id: "app" }, [
    banner(input.snapshot),
    sensors(input.snapshot),
    mapGrid(input),
    actuators(input),
    history(input.snapshot),
    explanation(input.explanation),
  ]);
}

export function explanationTexts(view: VNode): string[] {
  const panel = view.children.find((c) => c.attrs["id"] === "explanation");
  if (!panel) return [];
  return panel.children.map((c) => c.text);
}

export function blockedRegionsOf(view: VNode): string[] {
  const grid = view.children.find((c) => c.attrs["id"] === "map");
  if (!grid) return [];
  return grid.children
    .filter((c) => c.attrs["class"].split(" ").includes("blocked"))
    .map((c) => c.attrs["data-region"]);
}

const ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
};

function escapeHtml(s: string): string {
  return s.replace(/[&<>"]/g, (ch) => ESCAPES[ch]);
}

export function toHtml(node: VNode): string {
  const attrs = Object.entries(node.attrs)
    .map(([k, v]) => ` ${k}="${escapeHtml(v)}"`)
    .join("");
  const inner =
    escapeHtml(node.text) + node.children.map(toHtml).join("");
  return `<${node.tag}${attrs}>${inner}</${node.tag}>`;
}

/** Materialize a virtual node with the real DOM (browser entry point). */
export function mount(node: VNode, doc: Document): HTMLElement {
  const elem = doc.createElement(node.tag);
  for (const [k, v] of Object.entries(node.attrs)) {
    elem.setAttribute(k, v);
  }
  if (node.text) elem.appendChild(doc.createTextNode(node.text));
  for (const child of node.children) {
    elem.appendChild(mount(child, doc));
  }
  return elem;
}
