import { SessionClient, TransportError } from "./api.js";
import { renderScreen } from "./tiles.js";
import { appendTurn } from "./transcript.js";
import type { ScreenPayload, ScreenUpdateMessage } from "./types.js";

export interface AppOptions {
  doc: Document;
  root: HTMLElement;
  client: SessionClient;
  webSocketImpl?: typeof WebSocket;
}

const EMPTY_SCREEN: ScreenPayload = { specs: [], layout: { order: [] } };

/**
 * The large-screen client. UI state is (latest screen payload, pending
 * gesture selection, in-flight flag); render() derives the whole DOM from
 * it, so a refresh reproduces the identical grid. At most one turn is in
 * flight: input stays disabled until the response lands.
 */
export class ScreenApp {
  readonly doc: Document;
  readonly root: HTMLElement;
  readonly client: SessionClient;

  sessionId: string | null = null;
  screen: ScreenPayload = EMPTY_SCREEN;
  screenTurn = 0;
  pendingGesture: string | null = null;
  inflight = false;
  transportFailure = false;
  status = "";

  private unsubscribe: () => void = () => undefined;
  private readonly webSocketImpl?: typeof WebSocket;

  constructor(options: AppOptions) {
    this.doc = options.doc;
    this.root = options.root;
    this.client = options.client;
    this.webSocketImpl = options.webSocketImpl;
  }

  async start(): Promise<void> {
    const session = await this.client.createSession();
    this.sessionId = session.session_id;
    this.screen = session.screen;
    this.screenTurn = session.turn;
    this.status = `session ${session.session_id}`;
    this.buildShell();
    this.render();
    this.unsubscribe = this.client.subscribe(
      session.session_id,
      (message) => this.applyScreenUpdate(message),
      this.webSocketImpl,
    );
  }

  stop(): void {
    this.unsubscribe();
  }

  applyScreenUpdate(message: ScreenUpdateMessage): void {
    // pushes may race the POST response; never move backwards
    if (message.turn < this.screenTurn) {
      return;
    }
    this.screen = message.payload;
    this.screenTurn = message.turn;
    this.render();
  }

  private buildShell(): void {
    const doc = this.doc;
    this.root.innerHTML = "";

    const screenHost = doc.createElement("div");
    screenHost.id = "screen-host";
    this.root.appendChild(screenHost);

    const form = doc.createElement("form");
    form.id = "turn-form";
    const input = doc.createElement("input");
    input.id = "utterance";
    input.type = "text";
    input.placeholder = "e.g. can I see theft in the downtown area";
    const button = doc.createElement("button");
    button.id = "submit";
    button.type = "submit";
    button.textContent = "Send";
    form.appendChild(input);
    form.appendChild(button);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
    this.root.appendChild(form);

    const statusBar = doc.createElement("p");
    statusBar.id = "status";
    this.root.appendChild(statusBar);

    const transcript = doc.createElement("div");
    transcript.id = "transcript";
    this.root.appendChild(transcript);
  }

  private get input(): HTMLInputElement {
    return this.root.querySelector("#utterance") as HTMLInputElement;
  }

  render(): void {
    const host = this.root.querySelector("#screen-host");
    if (!host) {
      return;
    }
    host.innerHTML = "";
    host.appendChild(
      renderScreen(this.doc, this.screen, {
        selectedId: this.pendingGesture,
        onTileClick: (specId) => this.toggleGesture(specId),
      }),
    );
    const status = this.root.querySelector("#status") as HTMLElement;
    const parts = [this.status];
    if (this.pendingGesture) {
      parts.push(`pointing at ${this.pendingGesture}`);
    }
    if (this.inflight) {
      parts.push("thinking...");
    }
    if (this.transportFailure) {
      parts.push("connection failed, press Send to retry");
      status.classList.add("retry-banner");
    } else {
      status.classList.remove("retry-banner");
    }
    status.textContent = parts.filter(Boolean).join(" | ");
    const button = this.root.querySelector("#submit") as HTMLButtonElement;
    button.disabled = this.inflight;
    this.input.disabled = this.inflight;
  }

  /** Click-to-point: selecting a tile simulates a gesture at it. */
  toggleGesture(specId: string): void {
    this.pendingGesture = this.pendingGesture === specId ? null : specId;
    this.render();
  }

  async submit(): Promise<void> {
    const text = this.input.value.trim();
    if (!text || this.inflight || !this.sessionId) {
      return; // empty input never produces a request
    }
    const gesture = this.pendingGesture;
    this.inflight = true;
    this.transportFailure = false;
    this.render();
    try {
      const response = await this.client.postTurn(this.sessionId, text, gesture);
      this.screen = response.payload.screen;
      this.screenTurn = response.turn;
      this.pendingGesture = null;
      this.input.value = "";
      this.status =
        response.kind === "clarification"
          ? response.payload.agent_frame.response_text ?? "please clarify"
          : `turn ${response.turn} ok`;
      const transcript = this.root.querySelector("#transcript") as HTMLElement;
      appendTurn(this.doc, transcript, response.turn,
                 response.payload.user_frame, response.payload.agent_frame);
    } catch (err) {
      if (err instanceof TransportError && err.status === undefined) {
        this.transportFailure = true; // keep text and gesture for retry
      } else {
        this.status = err instanceof Error ? err.message : String(err);
      }
    } finally {
      this.inflight = false;
      this.render();
    }
  }
}
