// Wire payloads, mirroring the session service JSON bit for bit.

export interface EntityRef {
  slot: string;
  value: string | null;
}

export interface DataRow {
  category: string;
  count: number;
}

export interface VizSpec {
  schema: string;
  id: string;
  plot_type: string;
  axes: { x: string | null; y: string };
  entities: EntityRef[];
  title: string;
  data: DataRow[];
  semantic_vector: number[];
  layout: { state: string; raised_at: number | null };
  created_at: number;
}

export interface ScreenPayload {
  specs: VizSpec[];
  layout: { order: string[] };
}

export interface TextRefPayload {
  begin: number;
  end: number;
  surface: string;
}

export interface ActionFramePayload {
  role: string;
  intent: string;
  tokens: string[];
  text_ref: TextRefPayload | null;
  gest_ref: boolean;
  gesture: { target_id: string; turn: number } | null;
  fillers: { surface: string; slot: string; value: string | null }[];
  referent_id: string | null;
  resolution_failed: boolean;
  response_text: string | null;
}

export interface SessionResponse {
  session_id: string;
  turn: number;
  config: { window: number | null; cutoff: number; vector_mode: string };
  screen: ScreenPayload;
}

export interface TurnResponse {
  kind: "agent_response" | "clarification";
  session_id: string;
  turn: number;
  payload: {
    user_frame: ActionFramePayload;
    agent_frame: ActionFramePayload;
    screen: ScreenPayload;
  };
}

export interface ScreenUpdateMessage {
  kind: "screen_update";
  session_id: string;
  turn: number;
  payload: ScreenPayload;
}
