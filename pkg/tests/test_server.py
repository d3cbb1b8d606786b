"""Session service: bootstrap, action routing, streams, info hiding."""

import pytest
from fastapi.testclient import TestClient
from starlette.websockets import WebSocketDisconnect

from gathersix.agent import CONFIRM_TEXT, default_model
from gathersix.engine import Drop, Move, Pickup, Utter
from gathersix.model import save_model
from gathersix.regions import region_centroid
from gathersix.server import BadAction, create_app, parse_action_payload
from gathersix.transcripts import parse_transcript

CENTROID = region_centroid("top-left", 9, 7)


def _config():
    """Small fixed board: P1 spawns on three hearts, three more for P2."""
    key = f"{CENTROID[0]},{CENTROID[1]}"
    return {
        "width": 9, "height": 7,
        "deck": ["2H", "3H", "4H", "5H", "6H", "7H"],
        "layout": {
            "placements": {"8,6": ["2H", "3H", "4H"], key: ["5H", "6H", "7H"]},
            "positions": {"P1": [8, 6], "P2": [5, 4]},
        },
    }


def _create(client, opponent="agent", **body):
    payload = {"config": _config(), "opponent": opponent, "seed": 0, **body}
    resp = client.post("/sessions", json=payload)
    assert resp.status_code == 201, resp.text
    return resp.json()


def _act(client, sid, token, action, expect=200):
    resp = client.post(f"/sessions/{sid}/actions",
                       json={"token": token, "action": action})
    assert resp.status_code == expect, resp.text
    return resp.json()


def _utter(text):
    return {"kind": "utter", "text": text}


def _win_script(client, sid, token):
    """P1 gathers its three hearts and talks the agent into the other three."""
    for card in ("2H", "3H", "4H"):
        _act(client, sid, token, {"kind": "pickup", "card": card})
    _act(client, sid, token, _utter("i have 2h,3h,4h"))
    _act(client, sid, token, _utter("ok so we need to collect hearts then"))
    out = None
    for card in ("5h", "6h", "7h"):
        out = _act(client, sid, token,
                   _utter(f"the {card} is in the top left corner"))
    return out


# ── action payload decoding ─────────────────────────────────────────────────

def test_parse_action_payload():
    assert parse_action_payload({"kind": "move", "direction": "north"}) == \
        Move("north")
    assert parse_action_payload({"kind": "pickup", "card": "5h"}) == \
        Pickup(parse_action_payload({"kind": "drop", "card": "5H"}).card)
    assert parse_action_payload({"kind": "drop", "card": "qd"}) == \
        Drop(parse_action_payload({"kind": "pickup", "card": "QD"}).card)
    assert parse_action_payload({"kind": "utter", "text": "hi"}) == Utter("hi")


@pytest.mark.parametrize("payload", [
    None,
    [],
    {},
    {"kind": "teleport"},
    {"kind": "move"},
    {"kind": "move", "direction": "up"},
    {"kind": "pickup", "card": "notacard"},
    {"kind": "utter", "text": "   "},
    {"kind": "utter", "text": 7},
])
def test_parse_action_payload_rejects(payload):
    with pytest.raises(BadAction):
        parse_action_payload(payload)


# ── bootstrap ───────────────────────────────────────────────────────────────

def test_create_session_returns_seat_token():
    with TestClient(create_app()) as client:
        made = _create(client)
        assert made["player_id"] == "P1"
        assert made["token"]
        status = client.get(f"/sessions/{made['session_id']}").json()
        assert status["status"] == "active"
        assert status["opponent"] == "agent"


def test_create_rejects_bad_config_and_opponent():
    with TestClient(create_app()) as client:
        resp = client.post("/sessions", json={"config": {"width": 2}})
        assert resp.status_code == 400
        assert resp.json()["detail"]["code"] == "InvalidConfig"
        resp = client.post("/sessions", json={"config": {"deck": ["zz"]}})
        assert resp.status_code == 400
        resp = client.post("/sessions", json={"opponent": "cat"})
        assert resp.status_code == 400


def test_create_with_model_ref(tmp_path):
    path = tmp_path / "model.json"
    save_model(default_model(), path)
    with TestClient(create_app()) as client:
        made = _create(client, model_ref=str(path))
        assert made["opponent"] == "agent"
        resp = client.post("/sessions", json={
            "config": _config(), "model_ref": str(tmp_path / "missing.json")})
        assert resp.status_code == 404
        assert resp.json()["detail"]["code"] == "ModelNotFound"


def test_join_lifecycle():
    with TestClient(create_app()) as client:
        made = _create(client, opponent="human")
        sid = made["session_id"]
        joined = client.post(f"/sessions/{sid}/join").json()
        assert joined["player_id"] == "P2"
        assert joined["token"] != made["token"]
        assert client.post(f"/sessions/{sid}/join").status_code == 409
        agent_sid = _create(client)["session_id"]
        resp = client.post(f"/sessions/{agent_sid}/join")
        assert resp.status_code == 409
        assert resp.json()["detail"]["code"] == "SeatTaken"
        assert client.post("/sessions/nope/join").status_code == 404


def test_action_auth_and_validation():
    with TestClient(create_app()) as client:
        sid = _create(client)["session_id"]
        resp = client.post(f"/sessions/{sid}/actions",
                           json={"token": "forged", "action": _utter("hi")})
        assert resp.status_code == 403
        assert resp.json()["detail"]["code"] == "NotYourSeat"
        assert client.post("/sessions/ghost/actions",
                           json={"token": "x", "action": _utter("hi")}
                           ).status_code == 404


def test_engine_rejections_come_back_as_conflicts():
    with TestClient(create_app()) as client:
        made = _create(client)
        sid, token = made["session_id"], made["token"]
        resp = client.post(f"/sessions/{sid}/actions", json={
            "token": token, "action": {"kind": "pickup", "card": "AS"}})
        assert resp.status_code == 409
        assert resp.json()["detail"]["code"] == "NoSuchCardHere"
        resp = client.post(f"/sessions/{sid}/actions", json={
            "token": token, "action": {"kind": "teleport"}})
        assert resp.status_code == 422


# ── full game against the agent ─────────────────────────────────────────────

def test_agent_session_plays_to_win(tmp_path):
    with TestClient(create_app(transcript_dir=tmp_path)) as client:
        made = _create(client)
        sid, token = made["session_id"], made["token"]
        out = _win_script(client, sid, token)
        assert out["status"] == "over"

        status = client.get(f"/sessions/{sid}").json()
        assert status["status"] == "over"
        assert status["straight"] == ["2H", "3H", "4H", "5H", "6H", "7H"]

        # Closed sessions refuse further play.
        resp = client.post(f"/sessions/{sid}/actions",
                           json={"token": token, "action": _utter("gg")})
        assert resp.status_code == 409
        assert resp.json()["detail"]["code"] == "SessionClosed"

        # The finished game was persisted as a parseable transcript.
        raw = (tmp_path / f"{sid}.jsonl").read_text(encoding="utf-8")
        transcript = parse_transcript(raw)
        assert transcript.transcript_id == sid
        kinds = [ev.kind for ev in transcript.events]
        assert kinds.count("pickup") == 6
        texts = [ev.payload["text"] for ev in transcript.events
                 if ev.kind == "utterance"]
        assert texts.count(CONFIRM_TEXT) == 3


def test_same_seed_and_script_reproduce_the_game():
    with TestClient(create_app()) as client:
        events = []
        for _ in range(2):
            made = _create(client)
            _win_script(client, made["session_id"], made["token"])
            resp = client.get(f"/sessions/{made['session_id']}/transcript")
            events.append(resp.json()["events"])
        # board_init embeds the session id; everything after it must match.
        assert events[0][0]["payload"]["seed"] == events[1][0]["payload"]["seed"]
        assert events[0][1:] == events[1][1:]


# ── envelope streams ────────────────────────────────────────────────────────

def test_ws_rejects_bad_tokens():
    with TestClient(create_app()) as client:
        sid = _create(client)["session_id"]
        with pytest.raises(WebSocketDisconnect):
            with client.websocket_connect(
                    f"/sessions/{sid}/ws?token=wrong") as ws:
                ws.receive_json()


def test_ws_stream_order_and_resume():
    with TestClient(create_app()) as client:
        made = _create(client)
        sid, token = made["session_id"], made["token"]
        url = f"/sessions/{sid}/ws?token={token}"

        with client.websocket_connect(url) as ws:
            first = ws.receive_json()
            second = ws.receive_json()
        assert first["type"] == "welcome" and first["seq"] == 1
        assert first["payload"]["player_id"] == "P1"
        assert first["payload"]["pos"] == [8, 6]
        assert second["type"] == "view" and second["seq"] == 2
        cells = second["payload"]["cells"]
        assert {"pos": [8, 6], "cards": ["2H", "3H", "4H"], "walls": []} in cells

        _act(client, sid, token, _utter("hello over there"))

        # Resuming after seq 2 must yield seq 3 next, no gaps or repeats.
        with client.websocket_connect(url + "&last_seq=2") as ws:
            env = ws.receive_json()
        assert env["seq"] == 3
        assert env["type"] == "event"
        assert env["payload"]["kind"] == "utterance"
        assert env["payload"]["payload"]["text"] == "hello over there"


def test_ws_accepts_actions_and_reports_errors():
    with TestClient(create_app()) as client:
        made = _create(client)
        sid, token = made["session_id"], made["token"]
        with client.websocket_connect(
                f"/sessions/{sid}/ws?token={token}") as ws:
            ws.receive_json()
            ws.receive_json()
            ws.send_json({"type": "action", "payload": _utter("hi friend")})
            env = ws.receive_json()
            assert env["type"] == "event"
            assert env["payload"]["payload"]["text"] == "hi friend"
            ws.send_json({"type": "action",
                          "payload": {"kind": "pickup", "card": "AS"}})
            env = ws.receive_json()
            assert env["type"] == "error"
            assert env["payload"]["code"] == "NoSuchCardHere"


def test_streams_never_leak_partner_activity():
    with TestClient(create_app()) as client:
        made = _create(client, opponent="human")
        sid, p1 = made["session_id"], made["token"]
        p2 = client.post(f"/sessions/{sid}/join").json()["token"]

        _act(client, sid, p1, {"kind": "move", "direction": "west"})
        _act(client, sid, p2, {"kind": "move", "direction": "north"})
        _act(client, sid, p1, _utter("i have nothing"))
        _act(client, sid, p2, {"kind": "pickup", "card": "5H"}, expect=409)
        _act(client, sid, p2, _utter("same here"))
        _act(client, sid, p1, {"kind": "move", "direction": "west"})

        session = client.app.state.store.sessions[sid]
        radius = session.state.config.visibility_radius
        max_cells = (2 * radius + 1) ** 2
        for seat in ("P1", "P2"):
            box = session.outbox[seat]
            assert [env["seq"] for env in box] == list(range(1, len(box) + 1))
            for env in box:
                if env["type"] == "event":
                    ev = env["payload"]
                    assert ev["kind"] == "utterance" or ev["actor"] == seat
                elif env["type"] == "view":
                    assert len(env["payload"]["cells"]) <= max_cells
                    for cell in env["payload"]["cells"]:
                        assert set(cell) == {"pos", "cards", "walls"}
                elif env["type"] == "welcome":
                    assert env["payload"]["player_id"] == seat
