import json

import pytest
from fastapi.testclient import TestClient

from vizref.service import build_app


@pytest.fixture()
def client(engine):
    return TestClient(build_app(engine))


def create_session(client, **overrides):
    response = client.post("/sessions", json=overrides or None)
    assert response.status_code == 200
    return response.json()


class TestSessionLifecycle:
    def test_create_returns_empty_screen(self, client):
        body = create_session(client)
        assert body["screen"]["specs"] == []
        assert body["turn"] == 0

    def test_two_creates_have_distinct_ids(self, client):
        a = create_session(client)["session_id"]
        b = create_session(client)["session_id"]
        assert a != b

    def test_invalid_cutoff_is_validation_error(self, client):
        response = client.post("/sessions", json={"cutoff": 1.5})
        assert response.status_code == 422

    def test_malformed_window_is_validation_error(self, client):
        response = client.post("/sessions", json={"window": "sometimes"})
        assert response.status_code == 422
        response = client.post("/sessions", json={"window": 1})
        assert response.status_code == 200

    def test_unknown_session_is_not_found(self, client):
        assert client.get("/sessions/nope/screen").status_code == 404
        assert client.post("/sessions/nope/turns", json={"text": "hi"}).status_code == 404

    def test_empty_text_rejected(self, client):
        sid = create_session(client)["session_id"]
        response = client.post(f"/sessions/{sid}/turns", json={"text": "   "})
        assert response.status_code == 422


class TestTurns:
    def test_create_turn_adds_bar_chart(self, client):
        sid = create_session(client)["session_id"]
        response = client.post(f"/sessions/{sid}/turns",
                               json={"text": "can I see theft in the downtown area"})
        body = response.json()
        assert body["kind"] == "agent_response"
        specs = body["payload"]["screen"]["specs"]
        assert len(specs) == 1 and specs[0]["plot_type"] == "bar"

    def test_follow_up_reference_derives_line_chart(self, client):
        sid = create_session(client)["session_id"]
        client.post(f"/sessions/{sid}/turns",
                    json={"text": "can I see theft in the downtown area"})
        response = client.post(f"/sessions/{sid}/turns",
                               json={"text": "can you show that graph by day of the week?"})
        body = response.json()
        assert body["kind"] == "agent_response"
        specs = body["payload"]["screen"]["specs"]
        assert len(specs) == 2
        assert specs[1]["plot_type"] == "line"
        assert body["payload"]["agent_frame"]["referent_id"] == "01"

    def test_close_with_empty_screen_is_clarification(self, client):
        sid = create_session(client)["session_id"]
        response = client.post(f"/sessions/{sid}/turns", json={"text": "close that"})
        body = response.json()
        assert body["kind"] == "clarification"
        assert client.get(f"/sessions/{sid}/screen").json()["payload"]["specs"] == []

    def test_screen_state_after_create_and_close(self, client):
        sid = create_session(client)["session_id"]
        client.post(f"/sessions/{sid}/turns", json={"text": "show me battery by month"})
        client.post(f"/sessions/{sid}/turns",
                    json={"text": "close this graph", "gesture_target": "01"})
        screen = client.get(f"/sessions/{sid}/screen").json()["payload"]
        assert screen["specs"] == []

    def test_turns_are_ordered_per_session(self, client):
        sid = create_session(client)["session_id"]
        turns = []
        for text in ("show me theft", "show me battery", "okay thanks"):
            turns.append(client.post(f"/sessions/{sid}/turns", json={"text": text}).json()["turn"])
        assert turns == [1, 2, 3]


class TestPushChannel:
    def test_subscriber_receives_snapshot_then_updates(self, client):
        sid = create_session(client)["session_id"]
        with client.websocket_connect(f"/sessions/{sid}/subscribe") as ws:
            first = ws.receive_json()
            assert first["kind"] == "screen_update" and first["payload"]["specs"] == []
            client.post(f"/sessions/{sid}/turns", json={"text": "show me theft by month"})
            update = ws.receive_json()
            assert update["turn"] == 1
            assert [s["id"] for s in update["payload"]["specs"]] == ["01"]

    def test_unknown_session_socket_closes(self, client):
        with pytest.raises(Exception):
            with client.websocket_connect("/sessions/nope/subscribe") as ws:
                ws.receive_json()


class TestReplayability:
    def test_screen_reproducible_from_transcript(self, client, engine):
        sid = create_session(client)["session_id"]
        script = [
            ("can I see theft in the downtown area", None),
            ("can you show that graph by day of the week?", None),
            ("close this graph", "01"),
        ]
        for text, gesture in script:
            client.post(f"/sessions/{sid}/turns",
                        json={"text": text, "gesture_target": gesture})
        live = client.get(f"/sessions/{sid}/screen").json()["payload"]
        transcript = client.get(f"/sessions/{sid}/transcript").json()["turns"]

        state = engine.new_state()
        for turn in transcript:
            engine.process_turn(state, turn["text"], gesture_target=turn["gesture_target"])
        replayed = engine.screen_payload(state)
        assert json.dumps(replayed, sort_keys=True) == json.dumps(live, sort_keys=True)
