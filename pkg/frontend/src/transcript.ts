import type { ActionFramePayload } from "./types.js";

function frameSummary(doc: Document, frame: ActionFramePayload): HTMLElement {
  const row = doc.createElement("div");
  row.className = `frame frame-${frame.role}`;
  const parts: string[] = [frame.intent];
  if (frame.text_ref) {
    parts.push(`ref "${frame.text_ref.surface}"${frame.gest_ref ? " + gesture" : ""}`);
  }
  if (frame.fillers.length > 0) {
    parts.push(frame.fillers.map((f) => `${f.surface}→${f.slot}`).join(", "));
  }
  if (frame.referent_id) {
    parts.push(`target ${frame.referent_id}`);
  }
  if (frame.resolution_failed) {
    parts.push("unresolved");
  }
  const meta = doc.createElement("span");
  meta.className = "frame-meta";
  meta.textContent = `${frame.role}: ${parts.join(" · ")}`;
  row.appendChild(meta);
  if (frame.role === "user" && frame.tokens.length > 0) {
    const text = doc.createElement("p");
    text.textContent = frame.tokens.join(" ");
    row.appendChild(text);
  }
  if (frame.response_text) {
    const text = doc.createElement("p");
    text.textContent = frame.response_text;
    row.appendChild(text);
  }
  return row;
}

/** Append the turn's user and agent frames to the transcript panel. */
export function appendTurn(
  doc: Document,
  panel: HTMLElement,
  turn: number,
  userFrame: ActionFramePayload,
  agentFrame: ActionFramePayload,
): void {
  const entry = doc.createElement("section");
  entry.className = "transcript-turn";
  entry.dataset.turn = String(turn);
  entry.appendChild(frameSummary(doc, userFrame));
  entry.appendChild(frameSummary(doc, agentFrame));
  panel.appendChild(entry);
}
