"""Session orchestration: compile commands, execute step-wise, stream events.

Two clock domains: robot execution runs on the runtime's simulated clock
(the 30 s per-step budget is deterministic), while external-backend compile
latency is wall clock. For the deterministic rule backend the recorded
t_llm is just the configured voice-latency offset, keeping bench output
byte-reproducible.
"""

from __future__ import annotations

import itertools
import math
import threading
import time
import uuid
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..errors import CompileError, ProtocolError, RobotIQError
from ..planner import (
    FunctionCatalog,
    RuleBasedBackend,
    RuleGrammar,
    build_catalog,
    compile_command,
)
from ..skills import FallbackNavigator, SkillConfig, SkillRuntime, SkillStatus
from ..world import Pose2D, WorldMap, scan

DISPLAY_RAYS = 25


@dataclass(frozen=True)
class TaskRecord:
    task: str
    t_llm: float
    t_robot: float
    success: bool
    t_total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "t_total", self.t_llm + self.t_robot)

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "t_llm": self.t_llm,
            "t_robot": self.t_robot,
            "t_total": self.t_total,
            "success": self.success,
        }


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    type: str
    t_sim: float
    payload: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "type": self.type, "t_sim": self.t_sim, "payload": self.payload}


class Session:
    """One robot, one world copy, one in-flight plan at a time."""

    def __init__(
        self,
        world: WorldMap,
        backend=None,
        navigator=None,
        skill_cfg: SkillConfig | None = None,
        voice_latency: float = 0.0,
        start_pose: Pose2D | None = None,
        seed: int | None = None,
        pacing: float = 0.0,
        session_id: str | None = None,
        max_events: int = 50_000,
        prompt_template_path: str | None = None,
    ):
        self.id = session_id or uuid.uuid4().hex[:12]
        cfg = skill_cfg or SkillConfig()
        self.runtime = SkillRuntime(
            world, cfg, navigator=navigator or FallbackNavigator(cfg),
            seed=seed, start_pose=start_pose,
        )
        self.catalog: FunctionCatalog = build_catalog(self.runtime.world)
        self.grammar = RuleGrammar(self.catalog, self.runtime.world)
        self.backend = backend or RuleBasedBackend(self.grammar)
        self.voice_latency = voice_latency
        self.pacing = pacing
        self._template = None
        if prompt_template_path is not None:
            from ..planner import load_template

            self._template = load_template(prompt_template_path)
        self.records: list[TaskRecord] = []
        self.events: deque[SessionEvent] = deque(maxlen=max_events)
        self._seq = itertools.count(1)
        self.last_seq = 0
        self._cond = threading.Condition()
        self._busy = threading.Lock()
        self._last_state_wall = 0.0
        self.runtime.tick_listeners.append(self._on_tick)
        self.emit("state", self.state_payload())

    # -- events ------------------------------------------------------------

    def emit(self, type_: str, payload: dict) -> SessionEvent:
        with self._cond:
            event = SessionEvent(
                seq=next(self._seq), type=type_, t_sim=self.runtime.clock, payload=payload
            )
            self.events.append(event)
            self.last_seq = event.seq
            if type_ == "state":
                self._last_state_wall = time.monotonic()
            self._cond.notify_all()
        return event

    def events_after(self, after_seq: int) -> list[SessionEvent]:
        with self._cond:
            return [e for e in self.events if e.seq > after_seq]

    def wait_events(self, after_seq: int, timeout: float) -> list[SessionEvent]:
        with self._cond:
            self._cond.wait_for(lambda: self.last_seq > after_seq, timeout=timeout)
            return [e for e in self.events if e.seq > after_seq]

    def heartbeat_state(self, min_interval: float = 0.5) -> None:
        """Idle keep-alive: at most one synthetic state event per interval."""
        if time.monotonic() - self._last_state_wall >= min_interval:
            self.emit("state", self.state_payload())

    def _on_tick(self, snapshot: dict) -> None:
        self.emit("state", self.state_payload(snapshot))
        if self.pacing > 0:
            time.sleep(self.runtime.cfg.control_dt * self.pacing)

    # -- state -------------------------------------------------------------

    def state_payload(self, snapshot: dict | None = None) -> dict:
        rt = self.runtime
        snap = snapshot or rt.snapshot()
        pose = Pose2D(*snap["pose"])
        angles = pose.theta + np.linspace(-math.pi / 2, math.pi / 2, DISPLAY_RAYS)
        ranges = scan(rt.world, pose, angles, 0.0, 3.5)
        return {
            **snap,
            "lidar": {"angles_relative": np.linspace(-math.pi / 2, math.pi / 2, DISPLAY_RAYS).tolist(),
                      "ranges": [round(float(r), 4) for r in ranges]},
            "items": {
                name: {"pose": [it.pose.x, it.pose.y, it.pose.theta], "held": it.held}
                for name, it in rt.world.items.items()
            },
        }

    def static_world(self) -> dict:
        w = self.runtime.world
        obstacles = []
        for ob in w.obstacles:
            kind = type(ob).__name__.lower()
            if kind == "circle":
                obstacles.append({"type": "circle", "center": list(ob.center), "radius": ob.radius})
            elif kind == "segment":
                obstacles.append({"type": "segment", "p1": list(ob.p1), "p2": list(ob.p2)})
            else:
                obstacles.append({"type": "rect", "min": list(ob.min_corner), "max": list(ob.max_corner)})
        return {
            "bounds": {"min": list(w.bounds.min_corner), "max": list(w.bounds.max_corner)},
            "obstacles": obstacles,
            "markers": [{"id": m.id, "pose": [m.pose.x, m.pose.y, m.pose.theta]} for m in w.markers],
            "locations": {k: list(v) for k, v in w.locations.items()},
        }

    # -- command execution ---------------------------------------------------

    def _execute_step(self, step) -> tuple[bool, float, str | None]:
        """Run one skill call; (success, simulated duration, failure reason)."""
        rt = self.runtime
        fn, args = step.fn, step.args
        try:
            if fn == "go_to":
                res = rt.go_to(args["location"])
            elif fn == "approach":
                res = rt.approach(args["marker_id"], args["x"])
            elif fn == "leave":
                res = rt.leave(args["x"])
            elif fn == "pick":
                res = rt.pick(args["item"])
            elif fn == "place":
                res = rt.place(args["item"])
            elif fn == "get_position":
                xy = rt.get_position(args["name"])
                self.emit("position", {"name": args["name"], "xy": list(xy)})
                return True, 0.0, None
            else:  # unreachable for validated plans
                return False, 0.0, f"no binding for {fn}"
        except RobotIQError as exc:
            return False, 0.0, str(exc)
        return res.status is SkillStatus.SUCCESS, res.duration, res.reason

    def submit_command(self, text: str) -> list[TaskRecord]:
        """Compile, then execute steps under the per-step timeout budget.

        Failed steps record t_robot = 0 and abort the remainder of the plan.
        Compile failures raise CompileError after emitting an error event.
        """
        if not self._busy.acquire(blocking=False):
            raise ProtocolError("a plan is already in flight for this session")
        try:
            try:
                result = compile_command(
                    text, self.backend, self.catalog, self.runtime.world,
                    template=self._template,
                )
            except CompileError as exc:
                self.emit("error", {"stage": exc.stage, "message": str(exc),
                                    "violations": exc.violations})
                raise
            if isinstance(self.backend, RuleBasedBackend):
                t_llm = self.voice_latency  # deterministic clock domain
            else:
                t_llm = self.voice_latency + result.t_llm
            plan = result.plan
            self.emit("plan", {
                "command": text,
                "steps": [s.to_dict() for s in plan.steps],
                "t_llm": t_llm,
                "backend": plan.provenance.backend_id,
                "retries": plan.provenance.retries,
            })
            new_records: list[TaskRecord] = []
            for i, step in enumerate(plan.steps):
                label = f"step{i + 1}:{step.fn}"
                self.emit("step_started", {"index": i, "task": label, **step.to_dict()})
                ok, duration, reason = self._execute_step(step)
                record = TaskRecord(
                    task=label,
                    t_llm=t_llm if i == 0 else 0.0,
                    t_robot=duration if ok else 0.0,
                    success=ok,
                )
                new_records.append(record)
                self.emit("step_finished", {"index": i, "task": label,
                                            "record": record.to_dict(), "reason": reason})
                if not ok:
                    self.emit("error", {"stage": "execute", "message":
                                        f"{label} failed: {reason}; aborting remaining steps"})
                    break
            self.records.extend(new_records)
            return new_records
        finally:
            self._busy.release()
