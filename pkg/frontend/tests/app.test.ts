import { beforeEach, describe, expect, it } from "vitest";

import { SessionClient } from "../src/api.js";
import { ScreenApp } from "../src/app.js";
import type { ScreenPayload, TurnResponse } from "../src/types.js";
import { makeScreen, makeSpec } from "./helpers.js";

interface RecordedRequest {
  url: string;
  body: unknown;
}

function fakeResponse(payload: unknown): Response {
  return {
    ok: true,
    status: 200,
    json: async () => payload,
    text: async () => JSON.stringify(payload),
  } as unknown as Response;
}

function frame(role: string, overrides: Record<string, unknown> = {}) {
  return {
    role,
    intent: "CREATEVIS",
    tokens: role === "user" ? ["show", "me", "theft"] : [],
    text_ref: null,
    gest_ref: false,
    gesture: null,
    fillers: [],
    referent_id: null,
    resolution_failed: false,
    response_text: role === "agent" ? "Added visualization 01" : null,
    ...overrides,
  };
}

function turnResponse(turn: number, screen: ScreenPayload, kind = "agent_response"): TurnResponse {
  return {
    kind: kind as TurnResponse["kind"],
    session_id: "s-0001",
    turn,
    payload: {
      user_frame: frame("user") as TurnResponse["payload"]["user_frame"],
      agent_frame: frame("agent") as TurnResponse["payload"]["agent_frame"],
      screen,
    },
  };
}

class Harness {
  requests: RecordedRequest[] = [];
  queue: unknown[] = [];
  failNext = false;
  app: ScreenApp;

  constructor() {
    const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
      if (this.failNext) {
        this.failNext = false;
        throw new TypeError("network down");
      }
      this.requests.push({ url, body: init?.body ? JSON.parse(String(init.body)) : null });
      return fakeResponse(this.queue.shift());
    };
    const root = document.createElement("div");
    document.body.appendChild(root);
    this.app = new ScreenApp({
      doc: document,
      root,
      client: new SessionClient("http://test", fetchFn),
    });
  }

  async started(): Promise<ScreenApp> {
    this.queue.push({
      session_id: "s-0001",
      turn: 0,
      config: { window: null, cutoff: 0.2, vector_mode: "soft" },
      screen: makeScreen([]),
    });
    await this.app.start();
    return this.app;
  }

  input(): HTMLInputElement {
    return this.app.root.querySelector("#utterance") as HTMLInputElement;
  }
}

describe("ScreenApp", () => {
  let harness: Harness;

  beforeEach(() => {
    document.body.innerHTML = "";
    harness = new Harness();
  });

  it("starts with an empty grid", async () => {
    const app = await harness.started();
    expect(app.root.querySelectorAll(".tile")).toHaveLength(0);
    expect(app.root.querySelector(".screen-empty")).not.toBeNull();
  });

  it("submits text and renders the returned screen", async () => {
    const app = await harness.started();
    harness.queue.push(turnResponse(1, makeScreen([makeSpec({ id: "01" })])));
    harness.input().value = "show me theft";
    await app.submit();
    expect(harness.requests.at(-1)?.body).toEqual({ text: "show me theft", gesture_target: null });
    expect(app.root.querySelectorAll(".tile")).toHaveLength(1);
    expect(harness.input().value).toBe("");
    expect(app.root.querySelectorAll(".transcript-turn")).toHaveLength(1);
  });

  it("attaches the clicked tile id as the gesture target and clears it after", async () => {
    const app = await harness.started();
    harness.queue.push(turnResponse(1, makeScreen([makeSpec({ id: "01" })])));
    harness.input().value = "show me theft";
    await app.submit();

    (app.root.querySelector('[data-spec-id="01"]') as HTMLElement).click();
    expect(app.pendingGesture).toBe("01");
    expect(app.root.querySelectorAll(".tile.selected")).toHaveLength(1);

    harness.queue.push(turnResponse(2, makeScreen([])));
    harness.input().value = "close this graph";
    await app.submit();
    expect(harness.requests.at(-1)?.body).toEqual({
      text: "close this graph",
      gesture_target: "01",
    });
    expect(app.pendingGesture).toBeNull();
  });

  it("keeps at most one pending gesture selection", async () => {
    const app = await harness.started();
    harness.queue.push(turnResponse(1, makeScreen([makeSpec({ id: "01" }), makeSpec({ id: "02" })])));
    harness.input().value = "show me theft";
    await app.submit();
    (app.root.querySelector('[data-spec-id="01"]') as HTMLElement).click();
    (app.root.querySelector('[data-spec-id="02"]') as HTMLElement).click();
    expect(app.pendingGesture).toBe("02");
    expect(app.root.querySelectorAll(".tile.selected")).toHaveLength(1);
    (app.root.querySelector('[data-spec-id="02"]') as HTMLElement).click();
    expect(app.pendingGesture).toBeNull();
  });

  it("ignores empty input", async () => {
    const app = await harness.started();
    const before = harness.requests.length;
    harness.input().value = "   ";
    await app.submit();
    expect(harness.requests.length).toBe(before);
  });

  it("shows a retry banner on transport failure and keeps the text", async () => {
    const app = await harness.started();
    harness.failNext = true;
    harness.input().value = "show me theft";
    await app.submit();
    expect(app.transportFailure).toBe(true);
    expect(app.root.querySelector("#status")?.classList.contains("retry-banner")).toBe(true);
    expect(harness.input().value).toBe("show me theft");
    // retry succeeds and clears the banner
    harness.queue.push(turnResponse(1, makeScreen([makeSpec()])));
    await app.submit();
    expect(app.transportFailure).toBe(false);
    expect(app.root.querySelectorAll(".tile")).toHaveLength(1);
  });

  it("surfaces clarification responses in the status line", async () => {
    const app = await harness.started();
    const clarification = turnResponse(1, makeScreen([]), "clarification");
    clarification.payload.agent_frame.response_text = "Which visualization do you mean?";
    clarification.payload.agent_frame.resolution_failed = true;
    harness.queue.push(clarification);
    harness.input().value = "close that";
    await app.submit();
    expect(app.root.querySelector("#status")?.textContent).toContain("Which visualization");
  });

  it("re-rendering the same state reproduces the identical grid", async () => {
    const app = await harness.started();
    harness.queue.push(turnResponse(1, makeScreen([makeSpec({ id: "01" })])));
    harness.input().value = "show me theft";
    await app.submit();
    const first = (app.root.querySelector("#screen-host") as HTMLElement).innerHTML;
    app.render();
    const second = (app.root.querySelector("#screen-host") as HTMLElement).innerHTML;
    expect(second).toBe(first);
  });

  it("never applies stale screen pushes", async () => {
    const app = await harness.started();
    harness.queue.push(turnResponse(2, makeScreen([makeSpec({ id: "01" }), makeSpec({ id: "02" })])));
    harness.input().value = "show me theft";
    await app.submit();
    app.applyScreenUpdate({
      kind: "screen_update",
      session_id: "s-0001",
      turn: 1,
      payload: makeScreen([]),
    });
    expect(app.root.querySelectorAll(".tile")).toHaveLength(2);
  });
});
