import io
import json

import pytest

from robotiq.errors import CompileError, ProtocolError
from robotiq.service import (
    Session,
    TaskRecord,
    metrics_report,
    run_bench,
    write_cdf_csv,
    write_metrics_csv,
)
from robotiq.world import load_world_file


def make_session(world, **kw):
    from robotiq.skills import NoiseSpec, SkillConfig

    kw.setdefault("skill_cfg", SkillConfig(noise=NoiseSpec(0.0, 0.0)))
    kw.setdefault("seed", 0)
    return Session(world, **kw)


class TestTaskRecord:
    def test_total_identity(self):
        r = TaskRecord(task="t", t_llm=0.125, t_robot=4.5, success=True)
        assert r.t_total == r.t_llm + r.t_robot

    def test_failed_zero_robot_by_convention(self):
        r = TaskRecord(task="t", t_llm=0.5, t_robot=0.0, success=False)
        assert r.t_total == 0.5


class TestSession:
    def test_ready_after_create(self, demo_world):
        s = make_session(demo_world)
        payload = s.state_payload()
        assert payload["arm"] == "home"
        assert "bottle_of_water" in payload["items"]
        assert s.events[0].type == "state"

    def test_two_sessions_independent(self, demo_world):
        a = make_session(demo_world)
        b = make_session(demo_world)
        a.submit_command("go to the kitchen")
        assert a.runtime.state.pose != b.runtime.state.pose
        a.runtime.world.items["bottle_of_water"].held = True
        assert not b.runtime.world.items["bottle_of_water"].held

    def test_single_command_record(self, demo_world):
        s = make_session(demo_world)
        records = s.submit_command("Go to the kitchen")
        assert len(records) == 1
        r = records[0]
        assert r.success
        assert r.task == "step1:go_to"
        assert r.t_total == r.t_llm + r.t_robot
        assert r.t_robot > 0

    def test_five_step_home_service(self, demo_world):
        s = make_session(demo_world)
        records = s.submit_command("bring the bottle of water to the human")
        assert [r.task.split(":")[1] for r in records] == [
            "go_to", "pick", "leave", "go_to", "place",
        ]
        assert all(r.success for r in records)
        assert all(r.t_total == r.t_llm + r.t_robot for r in records)
        # compile time is attributed to the first step only
        assert all(r.t_llm == 0.0 for r in records[1:])

    def test_walled_target_fails_with_zero_t_robot(self, tmp_path):
        doc = {
            "bounds": {"min": [0, 0], "max": [6, 5]},
            "start": [1.0, 1.0, 0.0],
            "obstacles": [
                {"type": "segment", "p1": [4.4, 3.4], "p2": [5.6, 3.4]},
                {"type": "segment", "p1": [4.4, 3.4], "p2": [4.4, 4.6]},
                {"type": "segment", "p1": [5.6, 3.4], "p2": [5.6, 4.6]},
                {"type": "segment", "p1": [4.4, 4.6], "p2": [5.6, 4.6]},
            ],
            "locations": {"vault": [5.0, 4.0]},
        }
        path = tmp_path / "walled.json"
        path.write_text(json.dumps(doc))
        world = load_world_file(path)
        s = make_session(world)
        records = s.submit_command("go to the vault")
        assert len(records) == 1
        assert records[0].success is False
        assert records[0].t_robot == 0.0

    def test_failed_step_aborts_remaining(self, demo_world):
        s = make_session(demo_world)
        # pick fails (not at the bottle), so the trailing leave must not run
        records = s.submit_command("pick the bottle of water and leave 0.3")
        assert [r.success for r in records] == [False]
        types = [e.type for e in s.events]
        assert types.count("step_started") == 1

    def test_compile_error_emits_error_event(self, demo_world):
        s = make_session(demo_world)
        with pytest.raises(CompileError):
            s.submit_command("dance wildly")
        assert s.events_after(0)[-1].type == "error"
        assert s.records == []

    def test_event_ordering_plan_before_steps(self, demo_world):
        s = make_session(demo_world)
        s.submit_command("go to the kitchen")
        types = [e.type for e in s.events]
        assert types.index("plan") < types.index("step_started")
        assert types.index("step_started") < types.index("step_finished")
        seqs = [e.seq for e in s.events]
        assert seqs == sorted(seqs)
        assert len(set(seqs)) == len(seqs)

    def test_two_subscribers_identical_streams(self, demo_world):
        s = make_session(demo_world)
        s.submit_command("go to the kitchen")
        a = [e.to_dict() for e in s.events_after(0)]
        b = [e.to_dict() for e in s.events_after(0)]
        assert a == b

    def test_state_events_at_sim_display_rate(self, demo_world):
        s = make_session(demo_world)
        s.submit_command("go to the kitchen")
        states = [e for e in s.events if e.type == "state" and e.t_sim > 0]
        t_sims = [e.t_sim for e in states]
        gaps = [b - a for a, b in zip(t_sims, t_sims[1:])]
        assert gaps and max(gaps) <= 0.1 + 1e-9  # >= 10 Hz simulated

    def test_busy_guard(self, demo_world):
        s = make_session(demo_world)
        s._busy.acquire()
        try:
            with pytest.raises(ProtocolError):
                s.submit_command("go to the kitchen")
        finally:
            s._busy.release()


class TestMetricsReport:
    def synthetic_rows(self):
        # Hand-checked: task A over 3 trials (1 failure), task B over 2.
        rows = [
            {"trial": 0, "task": "A", "t_llm": 1.0, "t_robot": 2.0, "t_total": 3.0, "success": True},
            {"trial": 1, "task": "A", "t_llm": 0.5, "t_robot": 4.0, "t_total": 4.5, "success": True},
            {"trial": 2, "task": "A", "t_llm": 0.3, "t_robot": 0.0, "t_total": 0.3, "success": False},
            {"trial": 0, "task": "B", "t_llm": 0.0, "t_robot": 6.0, "t_total": 6.0, "success": True},
            {"trial": 1, "task": "B", "t_llm": 0.0, "t_robot": 6.0, "t_total": 6.0, "success": True},
        ]
        return rows

    def test_hand_computed_means(self):
        report = metrics_report(self.synthetic_rows())
        a = report.per_task["A"]
        assert a.count == 3
        assert a.mean_t_llm == pytest.approx((1.0 + 0.5 + 0.3) / 3)
        assert a.mean_t_robot == pytest.approx(2.0)
        assert a.mean_t_total == pytest.approx((3.0 + 4.5 + 0.3) / 3)
        assert a.success_rate == pytest.approx(2 / 3)
        assert report.trial_count == 3
        assert report.record_count == 5

    def test_single_record(self):
        report = metrics_report([
            {"trial": 0, "task": "go", "t_llm": 1.0, "t_robot": 2.0, "t_total": 3.0, "success": True}
        ])
        s = report.per_task["go"]
        assert (s.mean_t_llm, s.mean_t_robot, s.mean_t_total) == (1.0, 2.0, 3.0)
        assert s.success_rate == 1.0

    def test_empty_input(self):
        report = metrics_report([])
        assert report.per_task == {}
        assert report.cdf == []
        assert report.record_count == 0

    def test_cdf_duplicates_single_step(self):
        rows = [
            {"trial": 0, "task": "A", "t_llm": 0, "t_robot": 5.0, "t_total": 5.0, "success": True},
            {"trial": 1, "task": "A", "t_llm": 0, "t_robot": 5.0, "t_total": 5.0, "success": True},
        ]
        report = metrics_report(rows)
        assert report.cdf == [(5.0, 1.0)]

    def test_cdf_monotone_ends_at_one(self):
        report = metrics_report(self.synthetic_rows())
        fracs = [f for _, f in report.cdf]
        assert fracs == sorted(fracs)
        assert fracs[-1] == 1.0

    def test_rows_round_trip_through_csv(self):
        rows = self.synthetic_rows()
        buf = io.StringIO()
        write_metrics_csv(rows, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "trial,task,t_llm,t_robot,t_total,success"
        assert len(lines) == 6


class TestRunBench:
    def test_single_trial_all_success(self, demo_world):
        report, rows = run_bench(demo_world, ["go to the kitchen"], trials=1, seed=0)
        assert report.per_task["step1:go_to"].success_rate == 1.0
        assert rows[0]["trial"] == 0

    def test_deterministic_csv(self, demo_world):
        def render():
            report, rows = run_bench(
                demo_world, ["bring the bottle of water to the human"], trials=5, seed=7
            )
            m, c = io.StringIO(), io.StringIO()
            write_metrics_csv(rows, m)
            write_cdf_csv(report, c)
            return m.getvalue().encode(), c.getvalue().encode()

        assert render() == render()

    def test_compile_failure_recorded_not_raised(self, demo_world):
        report, rows = run_bench(demo_world, ["dance wildly"], trials=2, seed=0)
        assert all(not r["success"] for r in rows)
        assert all(r["task"] == "compile:parse" for r in rows)

    def test_trials_validated(self, demo_world):
        with pytest.raises(ValueError):
            run_bench(demo_world, ["go to the kitchen"], trials=0, seed=0)
