// Session page wiring: create a session, stream events, render, send commands.

import { Api, ApiError } from "./api.js";
import { EventStream } from "./events.js";
import { renderWorld } from "./render.js";
import { ViewModel } from "./viewmodel.js";

function baseUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return (
    params.get("service") ??
    (window as unknown as { ROBOTIQ_BASE?: string }).ROBOTIQ_BASE ??
    window.location.origin
  );
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function start(): Promise<void> {
  const api = new Api(baseUrl());
  const vm = new ViewModel();
  const canvas = el<HTMLCanvasElement>("world");
  const banner = el<HTMLDivElement>("banner");
  const logBox = el<HTMLDivElement>("log");
  const planBox = el<HTMLDivElement>("plan");
  const metricsBox = el<HTMLDivElement>("metrics");
  const input = el<HTMLInputElement>("command");
  const sendBtn = el<HTMLButtonElement>("send");

  let sessionId = "";

  function renderPanel(): void {
    banner.textContent =
      vm.connection === "connected"
        ? vm.stale()
          ? "connected (stale data)"
          : "connected"
        : vm.connection === "connecting"
          ? "connecting..."
          : "service unreachable, retrying...";
    banner.className = `banner ${vm.connection}${vm.stale() ? " stale" : ""}`;

    planBox.innerHTML = "";
    if (vm.plan) {
      const title = document.createElement("div");
      title.className = "plan-title";
      title.textContent = `"${vm.plan.command}" (t_llm ${vm.plan.t_llm.toFixed(3)}s)`;
      planBox.appendChild(title);
      for (const step of vm.plan.steps) {
        const row = document.createElement("div");
        row.className = `step ${step.status}`;
        const glyph = { pending: "○", active: "◐", done: "●", failed: "✗" }[step.status];
        row.textContent = `${glyph} ${step.fn}(${Object.values(step.args).join(", ")})`;
        planBox.appendChild(row);
      }
    }

    const rows = [
      "<tr><th>task</th><th>n</th><th>t_llm</th><th>t_robot</th><th>t_total</th><th>ok</th></tr>",
    ];
    for (const [task, s] of vm.metricsByTask()) {
      rows.push(
        `<tr><td>${task}</td><td>${s.count}</td><td>${s.meanLlm.toFixed(3)}</td>` +
          `<td>${s.meanRobot.toFixed(2)}</td><td>${s.meanTotal.toFixed(2)}</td>` +
          `<td>${(s.successRate * 100).toFixed(0)}%</td></tr>`,
      );
    }
    metricsBox.innerHTML = `<table>${rows.join("")}</table>`;

    logBox.innerHTML = vm.log
      .slice(-40)
      .map((e) => `<div class="log-${e.kind}">${e.text}</div>`)
      .join("");
    logBox.scrollTop = logBox.scrollHeight;
  }

  function frame(): void {
    renderWorld(canvas, vm);
    renderPanel();
    requestAnimationFrame(frame);
  }

  async function resync(): Promise<number> {
    const snap = await api.fetchState(sessionId);
    vm.setWorld(snap.world);
    vm.applySnapshot(snap.state, snap.seq);
    return snap.seq;
  }

  try {
    const created = await api.createSession();
    sessionId = created.id;
    vm.setWorld(created.world);
    vm.setConnection("connected");
  } catch (err) {
    vm.setConnection("error");
    vm.log.push({ kind: "error", text: String(err) });
    setTimeout(start, 2000);
    frame();
    return;
  }

  const stream = new EventStream((fromSeq) => api.websocketUrl(sessionId, fromSeq), {
    onEvent: (e) => vm.applyEvent(e),
    onStatus: (up) => vm.setConnection(up ? "connected" : "error"),
    resync,
    needsResync: () => vm.needsResync,
    lastSeq: () => vm.lastSeq,
  });
  stream.start();

  async function send(): Promise<void> {
    const text = input.value.trim();
    if (!text) return;
    vm.log.push({ kind: "command", text: `> ${text}` });
    input.value = "";
    sendBtn.disabled = true;
    try {
      await api.sendCommand(sessionId, text);
    } catch (err) {
      const detail = err instanceof ApiError ? err.message : String(err);
      vm.log.push({ kind: "error", text: detail });
      input.value = text; // preserve the command for editing
    } finally {
      sendBtn.disabled = false;
    }
  }

  sendBtn.addEventListener("click", () => void send());
  input.addEventListener("keydown", (e) => {
    if (e.key === "Enter") void send();
  });

  frame();
}

void start();
