"""HTTP + WebSocket API over sessions.

Command execution runs in the request threadpool while subscribers stream
the session's ordered event log over WebSocket; idle sessions emit periodic
heartbeat state events.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from ..errors import CompileError, MapError, ProtocolError
from ..planner import external_backend_from_env
from ..rl import Checkpoint
from ..skills import SkillConfig
from ..world import load_world_file
from .bench import make_navigator
from .metrics import metrics_report, rows_from_records
from .session import Session


@dataclass
class ServerDefaults:
    map_path: str = ""
    backend: str = "rule"  # "rule" | "llm"
    navigator: str = "fallback"
    checkpoint_path: str | None = None
    pacing: float = 1.0
    voice_latency: float = 0.0
    prompt_template_path: str | None = None
    skill_cfg: SkillConfig = field(default_factory=SkillConfig)


class CreateSessionRequest(BaseModel):
    map: str | None = None
    backend: str | None = None
    navigator: str | None = None
    checkpoint: str | None = None
    pacing: float | None = None


class CommandRequest(BaseModel):
    text: str


def _build_session(defaults: ServerDefaults, req: CreateSessionRequest) -> Session:
    map_path = req.map or defaults.map_path
    if not map_path or not Path(map_path).exists():
        raise HTTPException(status_code=404, detail=f"map file not found: {map_path!r}")
    try:
        world = load_world_file(map_path)
    except MapError as exc:
        raise HTTPException(status_code=400, detail=f"map: {exc}") from exc
    backend_kind = req.backend or defaults.backend
    backend = None  # Session defaults to the rule backend bound to its world
    if backend_kind == "llm":
        backend = external_backend_from_env()
    elif backend_kind != "rule":
        raise HTTPException(status_code=400, detail=f"backend: unknown kind {backend_kind!r}")
    nav_kind = req.navigator or defaults.navigator
    checkpoint = None
    chk_path = req.checkpoint or defaults.checkpoint_path
    if nav_kind == "policy":
        if not chk_path or not Path(chk_path).exists():
            raise HTTPException(status_code=404, detail=f"checkpoint not found: {chk_path!r}")
        checkpoint = Checkpoint.load(chk_path)
    try:
        navigator = make_navigator(nav_kind, defaults.skill_cfg, checkpoint)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return Session(
        world,
        backend=backend,
        navigator=navigator,
        skill_cfg=defaults.skill_cfg,
        voice_latency=defaults.voice_latency,
        pacing=req.pacing if req.pacing is not None else defaults.pacing,
        prompt_template_path=defaults.prompt_template_path,
    )


def create_app(defaults: ServerDefaults | None = None) -> FastAPI:
    defaults = defaults or ServerDefaults()
    app = FastAPI(title="robotiq", version="0.1.0")
    sessions: dict[str, Session] = {}
    app.state.sessions = sessions
    app.state.defaults = defaults

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        session = _build_session(defaults, req)
        sessions[session.id] = session
        return {"id": session.id, "state": session.state_payload(),
                "world": session.static_world(),
                "catalog": session.catalog.entries}

    @app.post("/sessions/{session_id}/command")
    def submit_command(session_id: str, req: CommandRequest):
        session = get_session(session_id)
        try:
            records = session.submit_command(req.text)
        except CompileError as exc:
            raise HTTPException(
                status_code=400,
                detail={"stage": exc.stage, "message": str(exc), "violations": exc.violations},
            ) from exc
        except ProtocolError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return {"records": [r.to_dict() for r in records]}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        session = get_session(session_id)
        return {"state": session.state_payload(), "world": session.static_world(),
                "seq": session.last_seq}

    @app.get("/sessions/{session_id}/metrics")
    def get_metrics(session_id: str):
        session = get_session(session_id)
        report = metrics_report(rows_from_records(session.records))
        return {"report": report.to_dict(),
                "records": [r.to_dict() for r in session.records]}

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        get_session(session_id)
        del sessions[session_id]
        return {"ok": True}

    @app.websocket("/sessions/{session_id}/events")
    async def events(ws: WebSocket, session_id: str, from_seq: int = 0):
        import asyncio

        session = sessions.get(session_id)
        if session is None:
            await ws.close(code=4404)
            return
        await ws.accept()
        cursor = from_seq
        try:
            while True:
                batch = await asyncio.to_thread(session.wait_events, cursor, 0.5)
                if not batch:
                    await asyncio.to_thread(session.heartbeat_state)
                    batch = session.events_after(cursor)
                for event in batch:
                    await ws.send_json(event.to_dict())
                    cursor = event.seq
        except (WebSocketDisconnect, RuntimeError):
            return

    return app
