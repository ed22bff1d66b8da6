import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from robotiq.service import ServerDefaults, create_app
from robotiq.skills import NoiseSpec, SkillConfig

MAPS = Path(__file__).resolve().parents[1] / "src" / "robotiq" / "maps"


@pytest.fixture()
def client():
    defaults = ServerDefaults(
        map_path=str(MAPS / "demo_home.json"),
        pacing=0.0,
        skill_cfg=SkillConfig(noise=NoiseSpec(0.0, 0.0)),
    )
    app = create_app(defaults)
    with TestClient(app) as tc:
        yield tc


def create_session(client, **body):
    resp = client.post("/sessions", json=body)
    assert resp.status_code == 200, resp.text
    return resp.json()


class TestSessionsAPI:
    def test_create_returns_state_and_world(self, client):
        data = create_session(client)
        assert data["state"]["arm"] == "home"
        assert data["world"]["bounds"]["max"] == [4.0, 3.0]
        assert any(e["name"] == "go_to" for e in data["catalog"])

    def test_bad_map_404(self, client):
        resp = client.post("/sessions", json={"map": "/nope/missing.json"})
        assert resp.status_code == 404

    def test_command_roundtrip(self, client):
        sid = create_session(client)["id"]
        resp = client.post(f"/sessions/{sid}/command", json={"text": "go to the kitchen"})
        assert resp.status_code == 200
        records = resp.json()["records"]
        assert len(records) == 1 and records[0]["success"]
        assert records[0]["t_total"] == records[0]["t_llm"] + records[0]["t_robot"]

    def test_unparseable_command_400(self, client):
        sid = create_session(client)["id"]
        resp = client.post(f"/sessions/{sid}/command", json={"text": "dance wildly"})
        assert resp.status_code == 400
        assert resp.json()["detail"]["stage"] == "parse"

    def test_state_endpoint(self, client):
        sid = create_session(client)["id"]
        resp = client.get(f"/sessions/{sid}/state")
        assert resp.status_code == 200
        body = resp.json()
        assert "lidar" in body["state"]
        assert len(body["state"]["lidar"]["ranges"]) == 25

    def test_metrics_endpoint(self, client):
        sid = create_session(client)["id"]
        client.post(f"/sessions/{sid}/command", json={"text": "go to the kitchen"})
        resp = client.get(f"/sessions/{sid}/metrics")
        report = resp.json()["report"]
        assert report["per_task"]["step1:go_to"]["success_rate"] == 1.0
        assert report["cdf"][-1][1] == 1.0

    def test_delete(self, client):
        sid = create_session(client)["id"]
        assert client.delete(f"/sessions/{sid}").status_code == 200
        assert client.get(f"/sessions/{sid}/state").status_code == 404

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/state").status_code == 404
        assert client.post("/sessions/nope/command", json={"text": "hi"}).status_code == 404


class TestEventStream:
    def test_events_stream_plan_then_steps(self, client):
        sid = create_session(client)["id"]
        client.post(f"/sessions/{sid}/command", json={"text": "go to the kitchen"})
        with client.websocket_connect(f"/sessions/{sid}/events") as ws:
            seen = []
            while True:
                event = ws.receive_json()
                seen.append(event)
                if event["type"] == "step_finished":
                    break
            types = [e["type"] for e in seen]
            assert "plan" in types
            assert types.index("plan") < types.index("step_started")
            seqs = [e["seq"] for e in seen]
            assert seqs == sorted(seqs)

    def test_from_seq_resume(self, client):
        sid = create_session(client)["id"]
        client.post(f"/sessions/{sid}/command", json={"text": "go to the kitchen"})
        with client.websocket_connect(f"/sessions/{sid}/events") as ws:
            first = ws.receive_json()
        with client.websocket_connect(f"/sessions/{sid}/events?from_seq={first['seq']}") as ws:
            nxt = ws.receive_json()
            assert nxt["seq"] == first["seq"] + 1

    def test_idle_session_heartbeats(self, client):
        sid = create_session(client)["id"]
        with client.websocket_connect(f"/sessions/{sid}/events") as ws:
            a = ws.receive_json()  # replayed initial state
            b = ws.receive_json()  # heartbeat
            assert a["type"] == "state"
            assert b["type"] == "state"
            assert b["seq"] > a["seq"]

    def test_two_subscribers_identical(self, client):
        sid = create_session(client)["id"]
        client.post(f"/sessions/{sid}/command", json={"text": "go to the kitchen"})
        def read_n(n):
            out = []
            with client.websocket_connect(f"/sessions/{sid}/events") as ws:
                for _ in range(n):
                    out.append(ws.receive_json())
            return out
        assert read_n(10) == read_n(10)
