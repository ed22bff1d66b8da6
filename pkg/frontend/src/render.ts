// Canvas drawing of the world and robot from the current view model.

import { fitViewport, metersToPixels, worldToPixel } from "./transform.js";
import type { ViewModel } from "./viewmodel.js";

const COLORS = {
  bounds: "#3b4252",
  obstacle: "#6b7089",
  marker: "#e5c07b",
  item: "#98c379",
  itemHeld: "#56b6c2",
  robot: "#61afef",
  lidar: "rgba(97, 175, 239, 0.25)",
  goal: "#c678dd",
  location: "#7f848e",
};

export function renderWorld(canvas: HTMLCanvasElement, vm: ViewModel): void {
  const ctx = canvas.getContext("2d");
  if (!ctx || !vm.world) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const w = vm.world;
  const vp = fitViewport(w.bounds.min, w.bounds.max, width, height);
  const toPx = (x: number, y: number) => worldToPixel(vp, x, y);

  // bounds
  ctx.strokeStyle = COLORS.bounds;
  ctx.lineWidth = 2;
  const [bx0, by0] = toPx(w.bounds.min[0], w.bounds.max[1]);
  ctx.strokeRect(bx0, by0, metersToPixels(vp, w.bounds.max[0] - w.bounds.min[0]),
                 metersToPixels(vp, w.bounds.max[1] - w.bounds.min[1]));

  // locations
  ctx.fillStyle = COLORS.location;
  ctx.font = "11px sans-serif";
  for (const [name, xy] of Object.entries(w.locations)) {
    const [px, py] = toPx(xy[0], xy[1]);
    ctx.beginPath();
    ctx.arc(px, py, 3, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillText(name, px + 5, py - 5);
  }

  // obstacles
  ctx.fillStyle = COLORS.obstacle;
  ctx.strokeStyle = COLORS.obstacle;
  ctx.lineWidth = 3;
  for (const ob of w.obstacles) {
    if (ob.type === "circle") {
      const [px, py] = toPx(ob.center[0], ob.center[1]);
      ctx.beginPath();
      ctx.arc(px, py, metersToPixels(vp, ob.radius), 0, 2 * Math.PI);
      ctx.fill();
    } else if (ob.type === "segment") {
      const [x1, y1] = toPx(ob.p1[0], ob.p1[1]);
      const [x2, y2] = toPx(ob.p2[0], ob.p2[1]);
      ctx.beginPath();
      ctx.moveTo(x1, y1);
      ctx.lineTo(x2, y2);
      ctx.stroke();
    } else {
      const [px, py] = toPx(ob.min[0], ob.max[1]);
      ctx.fillRect(px, py, metersToPixels(vp, ob.max[0] - ob.min[0]),
                   metersToPixels(vp, ob.max[1] - ob.min[1]));
    }
  }

  // markers
  ctx.fillStyle = COLORS.marker;
  for (const m of w.markers) {
    const [px, py] = toPx(m.pose[0], m.pose[1]);
    ctx.fillRect(px - 4, py - 4, 8, 8);
    ctx.fillText(String(m.id), px + 6, py + 4);
  }

  // goal ring for an active go_to
  const goal = vm.activeGoal();
  if (goal) {
    ctx.strokeStyle = COLORS.goal;
    ctx.lineWidth = 2;
    const [px, py] = toPx(goal[0], goal[1]);
    ctx.beginPath();
    ctx.arc(px, py, metersToPixels(vp, 0.2), 0, 2 * Math.PI);
    ctx.stroke();
  }

  const robot = vm.robot;
  if (!robot) return;
  const [rx, ry, rth] = robot.pose;

  // lidar rays (fading with range)
  for (let i = 0; i < robot.lidar.ranges.length; i++) {
    const angle = rth + robot.lidar.angles_relative[i];
    const range = robot.lidar.ranges[i];
    const [px, py] = toPx(rx, ry);
    const [qx, qy] = toPx(rx + range * Math.cos(angle), ry + range * Math.sin(angle));
    ctx.strokeStyle = COLORS.lidar;
    ctx.lineWidth = 1;
    ctx.globalAlpha = Math.max(0.15, 1 - range / 3.5);
    ctx.beginPath();
    ctx.moveTo(px, py);
    ctx.lineTo(qx, qy);
    ctx.stroke();
  }
  ctx.globalAlpha = 1;

  // items (held item rides the robot)
  for (const [name, item] of Object.entries(robot.items)) {
    ctx.fillStyle = item.held ? COLORS.itemHeld : COLORS.item;
    const [px, py] = toPx(item.pose[0], item.pose[1]);
    ctx.beginPath();
    ctx.arc(px, py, 4, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillText(name, px + 6, py + 10);
  }

  // robot triangle
  const size = metersToPixels(vp, 0.22);
  const [cx, cy] = toPx(rx, ry);
  ctx.fillStyle = COLORS.robot;
  ctx.beginPath();
  const tip = [cx + size * Math.cos(-rth), cy + size * Math.sin(-rth)];
  const left = [cx + size * Math.cos(-rth + 2.5), cy + size * Math.sin(-rth + 2.5)];
  const right = [cx + size * Math.cos(-rth - 2.5), cy + size * Math.sin(-rth - 2.5)];
  ctx.moveTo(tip[0], tip[1]);
  ctx.lineTo(left[0], left[1]);
  ctx.lineTo(right[0], right[1]);
  ctx.closePath();
  ctx.fill();
}
