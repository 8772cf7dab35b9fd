import {
  GameClient,
  currentRegion,
  moveOutputs,
  preCheckMoves,
} from "./api.js";
import { mount, renderSession } from "./render.js";
import type { MapData, Snapshot } from "./types.js";

// Browser bootstrap. The only client-side state is the session id (kept
// in the URL hash so a refresh re-fetches and re-renders the same view).

const client = new GameClient("");

let sessionId = "";
let snapshot: Snapshot;
let map: MapData;
let explanationLines: string[] = [];

function toast(message: string): void {
  const box = document.createElement("div");
  box.className = "toast";
  box.textContent = message;
  document.body.appendChild(box);
  setTimeout(() => box.remove(), 4000);
}

async function redraw(): Promise<void> {
  const pre = await preCheckMoves(client, sessionId, snapshot, map);
  const view = renderSession({
    snapshot,
    map,
    robot: currentRegion(snapshot, map),
    blocked: pre.blocked,
    explanation: explanationLines,
  });
  const root = mount(view, document);
  const old = document.getElementById("app");
  if (old) old.replaceWith(root);
  else document.body.appendChild(root);

  for (const cell of root.querySelectorAll<HTMLElement>(".region")) {
    cell.addEventListener("click", () => {
      void submit({ region: cell.dataset["region"]! });
    });
  }
  for (const btn of root.querySelectorAll<HTMLElement>(".actuator")) {
    btn.addEventListener("click", () => {
      void submit({ toggle: btn.dataset["actuator"]! });
    });
  }
}

async function submit(action: { region?: string; toggle?: string }): Promise<void> {
  let outputs: Record<string, boolean>;
  if (action.region !== undefined) {
    outputs = moveOutputs(snapshot, map, action.region);
  } else {
    outputs = moveOutputs(
      snapshot,
      map,
      currentRegion(snapshot, map) ?? "",
    );
    outputs[action.toggle!] = !outputs[action.toggle!];
  }
  try {
    const res = await client.move(sessionId, outputs);
    if (res.snapshot) snapshot = res.snapshot;
    explanationLines = res.accepted
      ? []
      : (res.core ?? []).map((c) => c.text);
    await redraw();
  } catch (err) {
    toast(String(err));
  }
}

async function boot(): Promise<void> {
  try {
    const existing = window.location.hash.slice(1);
    if (existing) {
      sessionId = existing;
      snapshot = await client.getSession(sessionId);
    } else {
      const doc = await client.createSession();
      sessionId = doc.session_id;
      snapshot = doc.snapshot;
      window.location.hash = sessionId;
    }
    map = await client.getMap(sessionId);
    await redraw();
  } catch (err) {
    toast(String(err));
  }
}

void boot();
