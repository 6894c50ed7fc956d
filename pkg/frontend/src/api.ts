import type { ScreenUpdateMessage, SessionResponse, TurnResponse } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface SessionConfig {
  window?: number | string | null;
  cutoff?: number;
  vector_mode?: string;
}

export class TransportError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

/** Thin client over the session endpoints; fetch is injected for testability. */
export class SessionClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike,
  ) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new TransportError(`request failed: ${String(err)}`);
    }
    if (!response.ok) {
      throw new TransportError(await response.text(), response.status);
    }
    return (await response.json()) as T;
  }

  createSession(config: SessionConfig = {}): Promise<SessionResponse> {
    return this.post<SessionResponse>("/sessions", config);
  }

  postTurn(sessionId: string, text: string, gestureTarget: string | null = null): Promise<TurnResponse> {
    return this.post<TurnResponse>(`/sessions/${sessionId}/turns`, {
      text,
      gesture_target: gestureTarget,
    });
  }

  async getScreen(sessionId: string): Promise<ScreenUpdateMessage> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}/sessions/${sessionId}/screen`);
    } catch (err) {
      throw new TransportError(`request failed: ${String(err)}`);
    }
    if (!response.ok) {
      throw new TransportError(await response.text(), response.status);
    }
    return (await response.json()) as ScreenUpdateMessage;
  }

  /**
   * Push channel. Returns an unsubscribe function; does nothing unless a
   * WebSocket implementation is injected (the POST response already carries
   * the authoritative screen, so pushes are an enhancement).
   */
  subscribe(
    sessionId: string,
    onUpdate: (message: ScreenUpdateMessage) => void,
    webSocketImpl?: typeof WebSocket,
  ): () => void {
    const impl = webSocketImpl;
    if (!impl) {
      return () => undefined;
    }
    const wsBase = this.baseUrl.replace(/^http/, "ws");
    const socket = new impl(`${wsBase}/sessions/${sessionId}/subscribe`);
    socket.onmessage = (event: MessageEvent) => {
      try {
        onUpdate(JSON.parse(String(event.data)) as ScreenUpdateMessage);
      } catch {
        // malformed push frames are ignored; polling state stays correct
      }
    };
    return () => socket.close();
  }
}
