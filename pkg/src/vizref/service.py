"""HTTP + WebSocket service exposing live dialogue sessions.

Endpoints:
    POST /sessions                   create a session (optional config overrides)
    POST /sessions/{sid}/turns       submit an utterance (+ optional gesture target)
    GET  /sessions/{sid}/screen      current screen snapshot
    WS   /sessions/{sid}/subscribe   push channel: screen_update per completed turn

Wire payloads mirror the visualization-specification format bit-exactly.
Turns within one session are processed under a per-session lock, so
responses and pushed screen updates always reflect submission order;
sessions are independent.
"""
from __future__ import annotations

import asyncio
import itertools
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from .dialogue import DialogueEngine, EngineConfig, SessionState, TurnResult
from .errors import ConfigValidationError


class SessionRequest(BaseModel):
    window: int | str | None = None
    cutoff: float | None = None
    vector_mode: str | None = None


class TurnRequest(BaseModel):
    text: str
    gesture_target: str | None = None


def parse_window(value: int | str | None):
    """Accepts 0, 1, any int >= 0, or "inf"/"unlimited"/None for no limit."""
    if value is None or value in ("inf", "unlimited"):
        return None
    if isinstance(value, str):
        if not value.isdigit():
            raise ConfigValidationError(f"window must be an integer or 'inf', got {value!r}")
        value = int(value)
    return value


@dataclass
class _SessionRuntime:
    state: SessionState
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    subscribers: list = field(default_factory=list)


def _message(kind: str, session_id: str, turn: int, payload: dict) -> dict:
    return {"kind": kind, "session_id": session_id, "turn": turn, "payload": payload}


def build_app(engine: DialogueEngine, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="vizref session service")
    sessions: dict[str, _SessionRuntime] = {}
    counter = itertools.count(1)
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    def runtime_of(session_id: str) -> _SessionRuntime:
        runtime = sessions.get(session_id)
        if runtime is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return runtime

    async def broadcast(runtime: _SessionRuntime, message: dict) -> None:
        for queue in list(runtime.subscribers):
            await queue.put(message)

    @app.post("/sessions")
    async def create_session(body: SessionRequest | None = None) -> dict:
        body = body or SessionRequest()
        try:
            config = EngineConfig(
                window=parse_window(body.window) if body.window is not None else engine.config.window,
                cutoff=body.cutoff if body.cutoff is not None else engine.config.cutoff,
                vector_mode=body.vector_mode or engine.config.vector_mode,
            ).validate()
        except ConfigValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        session_id = f"s-{next(counter):04d}"
        runtime = _SessionRuntime(state=engine.new_state(config))
        sessions[session_id] = runtime
        screen = engine.screen_payload(runtime.state)
        await broadcast(runtime, _message("screen_update", session_id, 0, screen))
        return {"session_id": session_id, "turn": 0,
                "config": {"window": config.window, "cutoff": config.cutoff,
                           "vector_mode": config.vector_mode},
                "screen": screen}

    @app.post("/sessions/{session_id}/turns")
    async def post_turn(session_id: str, body: TurnRequest) -> dict:
        runtime = runtime_of(session_id)
        if not body.text or not body.text.strip():
            raise HTTPException(status_code=422, detail="utterance text must be non-empty")
        async with runtime.lock:
            result: TurnResult = engine.process_turn(runtime.state, body.text,
                                                     gesture_target=body.gesture_target)
            message = _message("screen_update", session_id, result.turn, result.screen)
            await broadcast(runtime, message)
        kind = "clarification" if result.clarification else "agent_response"
        return _message(kind, session_id, result.turn, {
            "user_frame": result.user_frame.to_payload(),
            "agent_frame": result.agent_frame.to_payload(),
            "screen": result.screen,
        })

    @app.get("/sessions/{session_id}/screen")
    async def get_screen(session_id: str) -> dict:
        runtime = runtime_of(session_id)
        return _message("screen_update", session_id, runtime.state.turn,
                        engine.screen_payload(runtime.state))

    @app.get("/sessions/{session_id}/transcript")
    async def get_transcript(session_id: str) -> dict:
        runtime = runtime_of(session_id)
        return {"session_id": session_id, "turns": runtime.state.transcript}

    @app.websocket("/sessions/{session_id}/subscribe")
    async def subscribe(websocket: WebSocket, session_id: str):
        runtime = sessions.get(session_id)
        if runtime is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        queue: asyncio.Queue = asyncio.Queue()
        runtime.subscribers.append(queue)
        try:
            await websocket.send_json(_message(
                "screen_update", session_id, runtime.state.turn,
                engine.screen_payload(runtime.state)))
            while True:
                message = await queue.get()
                await websocket.send_json(message)
        except WebSocketDisconnect:
            pass
        finally:
            runtime.subscribers.remove(queue)

    return app
