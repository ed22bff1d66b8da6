"""Interactive text loop: type commands, watch task records come back."""

from __future__ import annotations

from ..errors import CompileError, RobotIQError
from ..world import load_world_file
from .metrics import metrics_report, rows_from_records
from .session import Session

HELP = """\
Type a command for the robot (e.g. "bring the bottle of water to the human").
  :state     robot and item state
  :metrics   session timing/success summary
  :help      this text
  :quit      exit
"""


def run_repl(map_path: str, backend=None, navigator=None, input_fn=input, print_fn=print) -> None:
    world = load_world_file(map_path)
    session = Session(world, backend=backend, navigator=navigator)
    print_fn(f"session {session.id} on {map_path}")
    print_fn(HELP)
    while True:
        try:
            line = input_fn("robotiq> ").strip()
        except (EOFError, KeyboardInterrupt):
            print_fn("")
            return
        if not line:
            continue
        if line in (":quit", ":q", "quit", "exit"):
            return
        if line == ":help":
            print_fn(HELP)
            continue
        if line == ":state":
            print_fn(session.state_payload())
            continue
        if line == ":metrics":
            report = metrics_report(rows_from_records(session.records))
            for task, s in report.per_task.items():
                print_fn(f"  {task}: success {s.success_rate:.0%}, "
                         f"mean t_total {s.mean_t_total:.2f}s over {s.count}")
            continue
        try:
            records = session.submit_command(line)
        except CompileError as exc:
            print_fn(f"  compile failed at stage '{exc.stage}': {exc}")
            continue
        except RobotIQError as exc:
            print_fn(f"  error: {exc}")
            continue
        for r in records:
            mark = "ok " if r.success else "FAIL"
            print_fn(f"  [{mark}] {r.task}: t_llm={r.t_llm:.3f}s "
                     f"t_robot={r.t_robot:.2f}s t_total={r.t_total:.2f}s")
