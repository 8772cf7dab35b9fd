// Wire types for the game server's /api contract (schema v1).

export interface CoreStatement {
  id: number;
  text: string;
  span: [number, [number, number]];
}

export interface HistoryEntry {
  state: Record<string, boolean>;
  move: Record<string, boolean>;
  outcome: "accepted" | "rejected";
}

export interface Snapshot {
  v: number;
  state: Record<string, boolean>;
  pending_inputs: Record<string, boolean>;
  goal: { id: number; text: string } | null;
  history: HistoryEntry[];
  mode: "counterstrategy" | "sandbox";
}

export interface SessionDoc {
  session_id: string;
  snapshot: Snapshot;
  notes: string[];
}

export interface MoveResponse {
  accepted: boolean;
  snapshot: Snapshot | null;
  core: CoreStatement[] | null;
  notes: string[];
}

export interface MapData {
  v: number;
  regions: string[];
  adjacency: [string, string][];
}
