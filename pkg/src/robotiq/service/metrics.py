"""Aggregation of task records into the timing/success report.

Means include failed trials exactly as recorded (failed t_robot = 0), which
biases them low by construction; the CDF runs over t_total of every record.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .session import TaskRecord


@dataclass(frozen=True)
class TaskStats:
    count: int
    mean_t_llm: float
    mean_t_robot: float
    mean_t_total: float
    success_rate: float


@dataclass
class MetricsReport:
    per_task: dict[str, TaskStats] = field(default_factory=dict)
    cdf: list[tuple[float, float]] = field(default_factory=list)
    trial_count: int = 0
    record_count: int = 0

    def to_dict(self) -> dict:
        return {
            "trial_count": self.trial_count,
            "record_count": self.record_count,
            "per_task": {
                k: {
                    "count": s.count,
                    "mean_t_llm": s.mean_t_llm,
                    "mean_t_robot": s.mean_t_robot,
                    "mean_t_total": s.mean_t_total,
                    "success_rate": s.success_rate,
                }
                for k, s in self.per_task.items()
            },
            "cdf": [[t, f] for t, f in self.cdf],
        }


def rows_from_records(records: list[TaskRecord], trial: int = 0) -> list[dict]:
    return [{"trial": trial, **r.to_dict()} for r in records]


def metrics_report(rows: list[dict]) -> MetricsReport:
    """Aggregate bench rows ({trial, task, t_llm, t_robot, t_total, success})."""
    if not rows:
        return MetricsReport()
    tasks: dict[str, list[dict]] = {}
    for row in rows:
        tasks.setdefault(row["task"], []).append(row)
    per_task = {}
    for task, group in tasks.items():
        n = len(group)
        per_task[task] = TaskStats(
            count=n,
            mean_t_llm=sum(r["t_llm"] for r in group) / n,
            mean_t_robot=sum(r["t_robot"] for r in group) / n,
            mean_t_total=sum(r["t_total"] for r in group) / n,
            success_rate=sum(1 for r in group if r["success"]) / n,
        )
    totals = sorted(r["t_total"] for r in rows)
    m = len(totals)
    cdf: list[tuple[float, float]] = []
    for i, t in enumerate(totals):
        if i + 1 < m and totals[i + 1] == t:
            continue  # collapse duplicates into one step
        cdf.append((t, (i + 1) / m))
    return MetricsReport(
        per_task=per_task,
        cdf=cdf,
        trial_count=len({r["trial"] for r in rows}),
        record_count=m,
    )


def write_metrics_csv(rows: list[dict], fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(["trial", "task", "t_llm", "t_robot", "t_total", "success"])
    for r in rows:
        writer.writerow([
            r["trial"], r["task"], repr(float(r["t_llm"])), repr(float(r["t_robot"])),
            repr(float(r["t_total"])), "true" if r["success"] else "false",
        ])


def write_cdf_csv(report: MetricsReport, fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(["t_total", "cum_fraction"])
    for t, f in report.cdf:
        writer.writerow([repr(float(t)), repr(float(f))])
