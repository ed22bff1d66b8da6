// Wire schema of the robotiq service (HTTP + WebSocket payloads).

export interface TaskRecord {
  task: string;
  t_llm: number;
  t_robot: number;
  t_total: number;
  success: boolean;
}

export interface LidarScan {
  angles_relative: number[];
  ranges: number[];
}

export interface ItemState {
  pose: [number, number, number];
  held: boolean;
}

export interface StatePayload {
  t: number;
  pose: [number, number, number];
  arm: string;
  gripper_opening: number;
  held_item: string | null;
  lidar: LidarScan;
  items: Record<string, ItemState>;
}

export type Obstacle =
  | { type: "circle"; center: [number, number]; radius: number }
  | { type: "segment"; p1: [number, number]; p2: [number, number] }
  | { type: "rect"; min: [number, number]; max: [number, number] };

export interface WorldStatic {
  bounds: { min: [number, number]; max: [number, number] };
  obstacles: Obstacle[];
  markers: { id: number; pose: [number, number, number] }[];
  locations: Record<string, [number, number]>;
}

export interface PlanStep {
  fn: string;
  args: Record<string, unknown>;
}

export interface SessionEvent {
  seq: number;
  type: "state" | "plan" | "step_started" | "step_finished" | "error" | "position";
  t_sim: number;
  payload: Record<string, unknown>;
}

export type StepStatus = "pending" | "active" | "done" | "failed";

export interface ChecklistStep extends PlanStep {
  status: StepStatus;
  record?: TaskRecord;
}

export interface ActivePlan {
  command: string;
  t_llm: number;
  steps: ChecklistStep[];
}
