import { describe, expect, it } from "vitest";

import {
  blockedRegionsOf,
  explanationTexts,
  gridLayout,
  renderSession,
  toHtml,
} from "../src/render.js";
import type { MapData, Snapshot } from "../src/types.js";

// Refresh determinism: rendering is a pure function of the fetched
// snapshot, so a reload that re-fetches the same session state must
// produce the identical DOM structure.

const map: MapData = {
  v: 1,
  regions: ["kitchen", "hall", "r1"],
  adjacency: [
    ["hall", "kitchen"],
    ["hall", "r1"],
  ],
};

function fixedSnapshot(): Snapshot {
  return {
    v: 1,
    state: {
      t_kitchen: true,
      t_hall: false,
      t_r1: false,
      kitchen: false,
      hall: false,
      r1: true,
    },
    pending_inputs: { t_kitchen: true, t_hall: false, t_r1: false },
    goal: { id: 8, text: "(kitchen & t_kitchen)" },
    history: [
      {
        state: { kitchen: false, hall: true, r1: false },
        move: { kitchen: false, hall: false, r1: true },
        outcome: "accepted",
      },
      {
        state: { kitchen: false, hall: false, r1: true },
        move: { kitchen: true, hall: false, r1: false },
        outcome: "rejected",
      },
    ],
    mode: "counterstrategy",
  };
}

function view() {
  return renderSession({
    snapshot: fixedSnapshot(),
    map,
    robot: "r1",
    blocked: ["kitchen"],
    explanation: ["!next(kitchen)"],
  });
}

describe("render determinism (B2)", () => {
  it("re-rendering the same snapshot yields an identical tree", () => {
    expect(view()).toEqual(view());
    expect(toHtml(view())).toBe(toHtml(view()));
  });

  it("a reload (JSON round-trip of the snapshot) changes nothing", () => {
    const refetched = JSON.parse(
      JSON.stringify(fixedSnapshot()),
    ) as Snapshot;
    const again = renderSession({
      snapshot: refetched,
      map: JSON.parse(JSON.stringify(map)) as MapData,
      robot: "r1",
      blocked: ["kitchen"],
      explanation: ["!next(kitchen)"],
    });
    expect(toHtml(again)).toBe(toHtml(view()));
  });
});

describe("view structure", () => {
  it("marks the robot and blocked cells", () => {
    const v = view();
    expect(blockedRegionsOf(v)).toEqual(["kitchen"]);
    const grid = v.children.find((c) => c.attrs["id"] === "map")!;
    const robot = grid.children.find((c) =>
      c.attrs["class"].includes("robot"),
    )!;
    expect(robot.attrs["data-region"]).toBe("r1");
  });

  it("explanation panel carries the core text verbatim", () => {
    expect(explanationTexts(view())).toEqual(["!next(kitchen)"]);
  });

  it("history lists every move with its outcome", () => {
    const v = view();
    const hist = v.children.find((c) => c.attrs["id"] === "history")!;
    expect(hist.children.map((c) => c.text)).toEqual([
      "1: {r1} accepted",
      "2: {kitchen} rejected",
    ]);
  });

  it("grid layout is deterministic and covers every region", () => {
    const cells = gridLayout(map);
    expect(cells).toEqual(gridLayout(map));
    expect(cells.map((c) => c.region)).toEqual(map.regions);
  });
});
