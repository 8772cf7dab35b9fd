import type { MapData, MoveResponse, SessionDoc, Snapshot } from "./types.js";

/** Thin client for the game server. Every view change goes through the
 * server; the UI never duplicates adjudication logic. */
export class GameClient {
  constructor(private base: string = "") {}

  private async request<T>(
    path: string,
    init?: RequestInit,
    retryLeft = 1,
  ): Promise<T> {
    let resp: Response;
    try {
      resp = await fetch(this.base + path, init);
    } catch (err) {
      // network hiccup: retry once, then surface
      if (retryLeft > 0) return this.request<T>(path, init, retryLeft - 1);
      throw err;
    }
    if (!resp.ok) {
      const body = await resp.text();
      throw new Error(`${resp.status} on ${path}: ${body}`);
    }
    return (await resp.json()) as T;
  }

  createSession(spec?: string): Promise<SessionDoc> {
    return this.request("/api/session", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(spec === undefined ? {} : { spec }),
    });
  }

  getSession(id: string): Promise<Snapshot> {
    return this.request(`/api/session/${id}`);
  }

  getMap(id: string): Promise<MapData> {
    return this.request(`/api/map/${id}`);
  }

  move(
    id: string,
    outputs: Record<string, boolean>,
    dry = false,
  ): Promise<MoveResponse> {
    const qs = dry ? "?dry=true" : "";
    return this.request(`/api/session/${id}/move${qs}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ outputs }),
    });
  }
}

/** The region the robot currently occupies, if the spec has a map. */
export function currentRegion(
  snapshot: Snapshot,
  map: MapData,
): string | null {
  for (const r of map.regions) {
    if (snapshot.state[r]) return r;
  }
  return null;
}

/** Outputs for "move to region r, leave non-region actuators as they are". */
export function moveOutputs(
  snapshot: Snapshot,
  map: MapData,
  region: string,
): Record<string, boolean> {
  const regionSet = new Set(map.regions);
  const out: Record<string, boolean> = {};
  for (const [name, value] of Object.entries(snapshot.state)) {
    if (!(name in snapshot.pending_inputs)) {
      out[name] = regionSet.has(name) ? name === region : value;
    }
  }
  return out;
}

/** Regions reachable in one hop (plus staying put). */
export function candidateRegions(map: MapData, from: string | null): string[] {
  if (from === null) return [];
  const out = [from];
  for (const [a, b] of map.adjacency) {
    if (a === from) out.push(b);
    else if (b === from) out.push(a);
  }
  return out;
}

export interface PreCheck {
  blocked: string[];
  coreTexts: Record<string, string[]>;
}

/** Dry-run every candidate move; a region is greyed out iff the server
 * rejects it. Core texts are kept verbatim for the explanation panel. */
export async function preCheckMoves(
  client: GameClient,
  id: string,
  snapshot: Snapshot,
  map: MapData,
): Promise<PreCheck> {
  const from = currentRegion(snapshot, map);
  const blocked: string[] = [];
  const coreTexts: Record<string, string[]> = {};
  for (const region of candidateRegions(map, from)) {
    const res = await client.move(id, moveOutputs(snapshot, map, region), true);
    if (!res.accepted) {
      blocked.push(region);
      coreTexts[region] = (res.core ?? []).map((c) => c.text);
    }
  }
  return { blocked, coreTexts };
}
