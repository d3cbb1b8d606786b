"""Live game sessions over HTTP + WebSocket.

Bootstrap is plain HTTP: creating or joining a session returns a bearer
token for one seat. Play then flows over a WebSocket per seat carrying
JSON envelopes ``{"type": ..., "seq": ..., "payload": ...}`` where ``seq``
is that seat's stream position (1-based). A client that reconnects with
``?last_seq=N`` resumes after N without gaps or duplicates.

Envelope types pushed to a seat:

* ``welcome``    {"player_id", "width", "height", "visibility_radius",
                  "move_budget", "opponent", "pos", "hand"}
* ``view``       {"cells": [{"pos": [x, y], "cards": ["5H"],
                  "walls": ["north"]}]} for the seat's own neighborhood
* ``event``      {"game_seq", "actor", "kind", "payload"} for the seat's
                  own moves/bumps/pickups/drops and every utterance
* ``error``      {"code", "message"} for rejected actions
* ``game_over``  {"straight": ["2H", ...]}

Clients send ``{"type": "action", "payload": {...}}`` with payload kinds
``move`` / ``pickup`` / ``drop`` / ``utter``; the same payloads work over
``POST /sessions/{sid}/actions``. A seat never receives the partner's
position, moves, or cells outside its own visibility radius.

When the opponent is the bundled agent it occupies seat P2 and is stepped
synchronously after each human action, so a fixed seed and action sequence
reproduce the same game. Finished games are written as transcript JSONL.
"""

from __future__ import annotations

import asyncio
import secrets
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware

from . import engine
from .agent import AgentRunner, default_model
from .cards import CardParseError, parse_card
from .engine import (Action, ActionError, Drop, GameConfig, InvalidConfig,
                     Move, Pickup, Utter)
from .model import LogRegModel, load_model
from .transcripts import save_transcript

OPPONENT_AGENT = "agent"
OPPONENT_HUMAN = "human"

ACTIVE = "active"
OVER = "over"

# Upper bound on agent actions run after one human action. Generous: a
# full board crossing plus detours fits well under it.
AGENT_STEP_CAP = 80

_EVENT_KINDS_OWN = ("move_to", "bump", "pickup", "drop")


class ServerError(Exception):
    """Base for session-service failures; maps onto an HTTP status."""

    status = 400
    code = "ServerError"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class SessionNotFound(ServerError):
    status = 404
    code = "SessionNotFound"


class ModelNotFound(ServerError):
    status = 404
    code = "ModelNotFound"


class NotYourSeat(ServerError):
    status = 403
    code = "NotYourSeat"


class SeatTaken(ServerError):
    status = 409
    code = "SeatTaken"


class SessionClosed(ServerError):
    status = 409
    code = "SessionClosed"


class BadAction(ServerError):
    status = 422
    code = "BadAction"


def parse_action_payload(payload) -> Action:
    """Decode a JSON action payload into an engine action."""
    if not isinstance(payload, dict):
        raise BadAction("action payload must be an object")
    kind = payload.get("kind")
    try:
        if kind == "move":
            return Move(direction=payload["direction"])
        if kind == "pickup":
            return Pickup(card=parse_card(payload["card"]))
        if kind == "drop":
            return Drop(card=parse_card(payload["card"]))
        if kind == "utter":
            text = payload["text"]
            if not isinstance(text, str) or not text.strip():
                raise BadAction("utterance text must be a non-empty string")
            return Utter(text=text)
    except BadAction:
        raise
    except (KeyError, ValueError, CardParseError) as e:
        raise BadAction(f"bad {kind} action: {e}") from e
    raise BadAction(f"unknown action kind {kind!r}")


def cells_to_json(cells) -> list[dict]:
    return [
        {"pos": list(c.pos), "cards": [str(card) for card in c.cards],
         "walls": list(c.walls)}
        for c in cells
    ]


class Session:
    """One live game: engine state, two seats, per-seat event streams.

    All mutation happens under ``lock``; ``changed`` wakes the websocket
    pumps after new envelopes are appended.
    """

    def __init__(self, session_id: str, config: GameConfig, seed: int,
                 opponent: str, model: Optional[LogRegModel]):
        self.id = session_id
        self.opponent = opponent
        self.state = engine.new_game(config, seed, transcript_id=session_id)
        self.status = ACTIVE
        self.winning_straight: Optional[list[str]] = None
        self.tokens: dict[str, str] = {"P1": secrets.token_hex(16)}
        self.outbox: dict[str, list[dict]] = {"P1": [], "P2": []}
        self.lock = asyncio.Lock()
        self.changed = asyncio.Condition()
        self.agent: Optional[AgentRunner] = None
        if opponent == OPPONENT_AGENT:
            self.agent = AgentRunner(
                "P2", model=model or default_model(),
                width=config.width, height=config.height)
            self.agent.pos = self.state.players["P2"].pos
            self.agent.update_view(
                cells_to_json(engine.visible_neighborhood(self.state, "P2")))
        self._emit_welcome("P1")
        self._emit_welcome("P2")
        self._emit_view("P1")
        self._emit_view("P2")

    # -- seat bookkeeping ---------------------------------------------

    def seat_of(self, token: str) -> str:
        for seat, tok in self.tokens.items():
            if secrets.compare_digest(tok, token):
                return seat
        raise NotYourSeat("token does not map to a seat in this session")

    def join(self) -> tuple[str, str]:
        if self.opponent == OPPONENT_AGENT:
            raise SeatTaken("P2 is played by the agent")
        if "P2" in self.tokens:
            raise SeatTaken("P2 already joined")
        token = secrets.token_hex(16)
        self.tokens["P2"] = token
        return "P2", token

    # -- envelope streams ---------------------------------------------

    def _emit(self, seat: str, type_: str, payload: dict) -> None:
        box = self.outbox[seat]
        box.append({"type": type_, "seq": len(box) + 1, "payload": payload})

    def _emit_welcome(self, seat: str) -> None:
        cfg = self.state.config
        player = self.state.players[seat]
        self._emit(seat, "welcome", {
            "session_id": self.id,
            "player_id": seat,
            "width": cfg.width,
            "height": cfg.height,
            "visibility_radius": cfg.visibility_radius,
            "move_budget": cfg.move_budget,
            "opponent": self.opponent,
            "pos": list(player.pos),
            "hand": sorted(str(c) for c in player.hand),
        })

    def _emit_view(self, seat: str) -> None:
        cells = engine.visible_neighborhood(self.state, seat)
        self._emit(seat, "view", {"cells": cells_to_json(cells)})

    def _emit_event(self, seat: str, ev) -> None:
        self._emit(seat, "event", {
            "game_seq": ev.seq, "actor": ev.actor,
            "kind": ev.kind, "payload": ev.payload,
        })

    def _broadcast(self, ev) -> None:
        """Fan one game event out, hiding each seat's partner activity."""
        for seat in ("P1", "P2"):
            if ev.kind == "utterance" or (
                    ev.actor == seat and ev.kind in _EVENT_KINDS_OWN):
                self._emit_event(seat, ev)

    # -- game stepping --------------------------------------------------

    def apply(self, seat: str, action: Action) -> list:
        """Apply one action for a seat; returns the new game events."""
        if self.status != ACTIVE:
            raise SessionClosed("the game is over")
        before = len(self.state.event_log)
        self.state = engine.apply_action(self.state, seat, action)
        new_events = list(self.state.event_log[before:])
        for ev in new_events:
            self._broadcast(ev)
            if self.agent is not None and (
                    ev.kind == "utterance" or ev.actor == self.agent.player_id):
                self.agent.observe_event(ev.actor, ev.kind, ev.payload)
        if not isinstance(action, Utter):
            self._emit_view(seat)
            if self.agent is not None and seat == self.agent.player_id:
                self.agent.update_view(cells_to_json(
                    engine.visible_neighborhood(self.state, seat)))
        straight = engine.check_win(self.state)
        if straight is not None:
            self.status = OVER
            self.winning_straight = [str(c) for c in straight.cards]
            for s in ("P1", "P2"):
                self._emit(s, "game_over", {"straight": self.winning_straight})
        return new_events

    def step_agent(self) -> None:
        """Drain the agent's queued actions, stopping at the cap or the end."""
        if self.agent is None:
            return
        for _ in range(AGENT_STEP_CAP):
            if self.status != ACTIVE:
                return
            action = self.agent.next_action()
            if action is None:
                return
            try:
                self.apply(self.agent.player_id, action)
            except ActionError as e:
                self.agent.on_action_error(type(e).__name__)

    async def submit(self, seat: str, action: Action) -> int:
        """Serialized entry point: apply, step the agent, wake streams."""
        async with self.lock:
            n = len(self.apply(seat, action))
            self.step_agent()
        async with self.changed:
            self.changed.notify_all()
        return n


class SessionStore:
    def __init__(self, transcript_dir: Optional[Path] = None):
        self.sessions: dict[str, Session] = {}
        self.transcript_dir = transcript_dir

    def create(self, config: GameConfig, seed: int, opponent: str,
               model_ref: Optional[str]) -> Session:
        if opponent not in (OPPONENT_AGENT, OPPONENT_HUMAN):
            raise InvalidConfig(f"opponent must be agent or human, got {opponent!r}")
        model = None
        if opponent == OPPONENT_AGENT and model_ref is not None:
            if not Path(model_ref).is_file():
                raise ModelNotFound(f"no model file at {model_ref}")
            model = load_model(model_ref)
        session_id = secrets.token_hex(8)
        while session_id in self.sessions:
            session_id = secrets.token_hex(8)
        session = Session(session_id, config, seed, opponent, model)
        self.sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise SessionNotFound(f"no session {session_id}") from None

    def persist(self, session: Session) -> Optional[Path]:
        if self.transcript_dir is None:
            return None
        self.transcript_dir.mkdir(parents=True, exist_ok=True)
        path = self.transcript_dir / f"{session.id}.jsonl"
        save_transcript(session.state.transcript(), path)
        return path


def create_app(transcript_dir=None) -> FastAPI:
    """Build the session-service app; state lives in ``app.state.store``."""
    app = FastAPI(title="gathersix session service")
    # Auth is per-seat bearer tokens, so a statically hosted browser client
    # on another origin is fine.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])
    store = SessionStore(Path(transcript_dir) if transcript_dir else None)
    app.state.store = store

    def _http_error(e: ServerError) -> HTTPException:
        return HTTPException(
            status_code=e.status, detail={"code": e.code, "message": e.message})

    @app.post("/sessions", status_code=201)
    async def create_session(body: dict):
        opponent = body.get("opponent", OPPONENT_AGENT)
        try:
            config = GameConfig.from_json(body.get("config") or {})
            engine.validate_config(config)
            seed = int(body.get("seed", secrets.randbits(31)))
            session = store.create(config, seed, opponent, body.get("model_ref"))
        except InvalidConfig as e:
            raise HTTPException(
                status_code=400,
                detail={"code": "InvalidConfig", "message": str(e)})
        except (CardParseError, KeyError, TypeError, ValueError) as e:
            raise HTTPException(
                status_code=400,
                detail={"code": "InvalidConfig", "message": f"bad config: {e}"})
        except ServerError as e:
            raise _http_error(e)
        return {"session_id": session.id, "player_id": "P1",
                "token": session.tokens["P1"], "opponent": opponent}

    @app.post("/sessions/{session_id}/join")
    async def join_session(session_id: str):
        try:
            session = store.get(session_id)
            async with session.lock:
                seat, token = session.join()
        except ServerError as e:
            raise _http_error(e)
        return {"session_id": session.id, "player_id": seat, "token": token}

    @app.get("/sessions/{session_id}")
    async def session_status(session_id: str):
        try:
            session = store.get(session_id)
        except ServerError as e:
            raise _http_error(e)
        return {
            "session_id": session.id,
            "status": session.status,
            "opponent": session.opponent,
            "seats_filled": sorted(session.tokens),
            "straight": session.winning_straight,
        }

    @app.get("/sessions/{session_id}/transcript")
    async def session_transcript(session_id: str):
        try:
            session = store.get(session_id)
        except ServerError as e:
            raise _http_error(e)
        return {"events": [ev.to_json() for ev in session.state.event_log]}

    @app.post("/sessions/{session_id}/actions")
    async def submit_action(session_id: str, body: dict):
        try:
            session = store.get(session_id)
            seat = session.seat_of(str(body.get("token", "")))
            action = parse_action_payload(body.get("action"))
            applied = await session.submit(seat, action)
        except ActionError as e:
            raise HTTPException(
                status_code=409,
                detail={"code": type(e).__name__, "message": str(e)})
        except ServerError as e:
            raise _http_error(e)
        if session.status == OVER:
            store.persist(session)
        return {"ok": True, "events_applied": applied,
                "status": session.status}

    @app.websocket("/sessions/{session_id}/ws")
    async def session_ws(ws: WebSocket, session_id: str, token: str = "",
                         last_seq: int = 0):
        try:
            session = store.get(session_id)
            seat = session.seat_of(token)
        except ServerError:
            await ws.close(code=4404)
            return
        await ws.accept()

        async def pump() -> None:
            sent = last_seq
            while True:
                async with session.changed:
                    await session.changed.wait_for(
                        lambda: len(session.outbox[seat]) > sent)
                    batch = session.outbox[seat][sent:]
                    sent = len(session.outbox[seat])
                for env in batch:
                    await ws.send_json(env)

        async def receive() -> None:
            while True:
                msg = await ws.receive_json()
                if msg.get("type") != "action":
                    continue
                try:
                    action = parse_action_payload(msg.get("payload"))
                    await session.submit(seat, action)
                except (ActionError, ServerError) as e:
                    code = (e.code if isinstance(e, ServerError)
                            else type(e).__name__)
                    async with session.lock:
                        session._emit(seat, "error",
                                      {"code": code, "message": str(e)})
                    async with session.changed:
                        session.changed.notify_all()
                if session.status == OVER:
                    store.persist(session)

        tasks = [asyncio.create_task(pump()), asyncio.create_task(receive())]
        try:
            done, pending = await asyncio.wait(
                tasks, return_when=asyncio.FIRST_COMPLETED)
            for t in pending:
                t.cancel()
            for t in done:
                exc = t.exception()
                if exc is not None and not isinstance(
                        exc, (WebSocketDisconnect, RuntimeError)):
                    raise exc
        except WebSocketDisconnect:
            pass
        finally:
            for t in tasks:
                t.cancel()

    return app
