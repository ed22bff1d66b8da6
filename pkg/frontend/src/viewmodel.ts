// Session view state. Pure (no DOM, no network): events in, render state out.
//
// Event sequence numbers must increase by exactly one; anything else flips
// `needsResync` and the offending event is dropped so stale or reordered
// data can never corrupt what is on screen. The owner is expected to
// re-fetch /state and resume the stream from the last good seq.

import type {
  ActivePlan,
  ChecklistStep,
  PlanStep,
  SessionEvent,
  StatePayload,
  TaskRecord,
  WorldStatic,
} from "./types.js";

export type Connection = "connecting" | "connected" | "error";

export interface LogEntry {
  kind: "command" | "info" | "error" | "record";
  text: string;
}

const STALE_AFTER_MS = 1000;

export class ViewModel {
  connection: Connection = "connecting";
  world: WorldStatic | null = null;
  robot: StatePayload | null = null;
  plan: ActivePlan | null = null;
  records: TaskRecord[] = [];
  log: LogEntry[] = [];
  lastSeq = 0;
  needsResync = false;
  resyncCount = 0;
  private lastStateAt = 0;

  constructor(private now: () => number = () => Date.now()) {}

  setConnection(c: Connection): void {
    this.connection = c;
  }

  setWorld(world: WorldStatic): void {
    this.world = world;
  }

  /** Full snapshot after a resync; resets the sequence cursor. */
  applySnapshot(state: StatePayload, seq: number): void {
    this.robot = state;
    this.lastSeq = seq;
    this.needsResync = false;
    this.lastStateAt = this.now();
  }

  stale(): boolean {
    return this.lastStateAt > 0 && this.now() - this.lastStateAt > STALE_AFTER_MS;
  }

  /** Target of the active go_to step, if any (drawn as the goal ring). */
  activeGoal(): [number, number] | null {
    const step = this.plan?.steps.find((s) => s.status === "active");
    if (!step || step.fn !== "go_to" || !this.world) return null;
    const name = String(step.args["location"] ?? "");
    return this.world.locations[name] ?? null;
  }

  applyEvent(event: SessionEvent): void {
    if (event.seq !== this.lastSeq + 1) {
      // Out-of-order or gapped stream: never apply, ask for a resync.
      this.needsResync = true;
      this.resyncCount += 1;
      return;
    }
    this.lastSeq = event.seq;
    switch (event.type) {
      case "state":
        this.robot = event.payload as unknown as StatePayload;
        this.lastStateAt = this.now();
        break;
      case "plan": {
        const steps = (event.payload["steps"] as PlanStep[]) ?? [];
        this.plan = {
          command: String(event.payload["command"] ?? ""),
          t_llm: Number(event.payload["t_llm"] ?? 0),
          steps: steps.map((s): ChecklistStep => ({ ...s, status: "pending" })),
        };
        this.log.push({ kind: "info", text: `plan: ${steps.map((s) => s.fn).join(" -> ")}` });
        break;
      }
      case "step_started": {
        const idx = Number(event.payload["index"]);
        const step = this.plan?.steps[idx];
        if (step) step.status = "active";
        break;
      }
      case "step_finished": {
        const idx = Number(event.payload["index"]);
        const record = event.payload["record"] as TaskRecord;
        const step = this.plan?.steps[idx];
        if (step) {
          step.status = record.success ? "done" : "failed";
          step.record = record;
        }
        this.records.push(record);
        this.log.push({
          kind: "record",
          text: `${record.task}: ${record.success ? "ok" : "FAILED"} ` +
            `t_total=${record.t_total.toFixed(2)}s`,
        });
        break;
      }
      case "error":
        this.log.push({ kind: "error", text: String(event.payload["message"] ?? "error") });
        break;
      case "position":
        this.log.push({
          kind: "info",
          text: `${event.payload["name"]} is at ${JSON.stringify(event.payload["xy"])}`,
        });
        break;
    }
  }

  planComplete(): boolean {
    return !!this.plan && this.plan.steps.every((s) => s.status === "done");
  }

  /** Per-task aggregates for the metrics panel. */
  metricsByTask(): Map<string, { count: number; meanLlm: number; meanRobot: number; meanTotal: number; successRate: number }> {
    const groups = new Map<string, TaskRecord[]>();
    for (const r of this.records) {
      const list = groups.get(r.task) ?? [];
      list.push(r);
      groups.set(r.task, list);
    }
    const out = new Map();
    for (const [task, list] of groups) {
      const n = list.length;
      out.set(task, {
        count: n,
        meanLlm: list.reduce((a, r) => a + r.t_llm, 0) / n,
        meanRobot: list.reduce((a, r) => a + r.t_robot, 0) / n,
        meanTotal: list.reduce((a, r) => a + r.t_total, 0) / n,
        successRate: list.filter((r) => r.success).length / n,
      });
    }
    return out;
  }
}
