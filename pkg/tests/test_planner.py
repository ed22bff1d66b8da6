import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path

import pytest

from robotiq.errors import BackendError, CompileError, ExtractionError, UnparseableCommandError
from robotiq.planner import (
    ExternalBackend,
    Plan,
    RuleBasedBackend,
    RuleGrammar,
    SkillCall,
    build_catalog,
    build_prompt,
    call_backend,
    compile_command,
    extract_plan,
    validate_plan,
)
FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture()
def catalog(demo_world):
    return build_catalog(demo_world)


@pytest.fixture()
def grammar(demo_world, catalog):
    return RuleGrammar(catalog, demo_world)


class TestGrammar:
    def test_go_to_kitchen(self, grammar):
        assert grammar.parse_command("Go to the kitchen") == [
            SkillCall("go_to", {"location": "kitchen"})
        ]

    def test_navigate_towards(self, grammar):
        assert grammar.parse_command("Navigate towards the human") == [
            SkillCall("go_to", {"location": "human"})
        ]

    def test_pick_bottle(self, grammar):
        assert grammar.parse_command("Pick the bottle of water") == [
            SkillCall("pick", {"item": "bottle_of_water"})
        ]

    def test_place_near(self, grammar):
        assert grammar.parse_command("Place the bottle of water near the human") == [
            SkillCall("place", {"item": "bottle_of_water"})
        ]

    def test_leave_area(self, grammar):
        assert grammar.parse_command("Leave the kitchen area") == [
            SkillCall("leave", {"x": 0.3})
        ]

    def test_leave_with_distance(self, grammar):
        assert grammar.parse_command("leave 0.5 m") == [SkillCall("leave", {"x": 0.5})]

    def test_approach_marker(self, grammar):
        assert grammar.parse_command("approach marker 1 at 0.4 m") == [
            SkillCall("approach", {"marker_id": 1, "x": 0.4})
        ]

    def test_where_is(self, grammar):
        assert grammar.parse_command("where is the kitchen?") == [
            SkillCall("get_position", {"name": "kitchen"})
        ]

    def test_unknown_verb(self, grammar):
        with pytest.raises(UnparseableCommandError) as exc:
            grammar.parse_command("dance wildly")
        assert "go to" in str(exc.value)

    def test_conjunctions(self, grammar):
        steps = grammar.parse_command("go to the kitchen, pick the bottle of water and leave")
        assert [s.fn for s in steps] == ["go_to", "pick", "leave"]

    def test_bring_expands_to_home_service_plan(self, grammar):
        steps = grammar.parse_command("bring the bottle of water to the human")
        assert [s.fn for s in steps] == ["go_to", "pick", "leave", "go_to", "place"]
        assert steps[0].args == {"location": "kitchen"}  # nearest location to the item
        assert steps[1].args == {"item": "bottle_of_water"}
        assert steps[3].args == {"location": "human"}

    def test_every_catalog_function_reachable(self, grammar, catalog):
        sentences = [
            "go to the kitchen",
            "pick the bottle of water",
            "place the bottle of water",
            "approach marker 1 at 0.5 m",
            "leave 0.3",
            "where is the kitchen",
        ]
        produced = set()
        for s in sentences:
            produced |= {c.fn for c in grammar.parse_command(s)}
        assert produced >= {e["name"] for e in catalog.entries}

    def test_determinism(self, grammar):
        a = grammar.parse_command("bring the bottle of water to the human")
        b = grammar.parse_command("bring the bottle of water to the human")
        assert a == b


class TestBuildPrompt:
    def test_contains_signature(self, catalog):
        prompt = build_prompt(catalog, "go to the kitchen")
        assert '"name": "go_to"' in prompt
        assert "go to the kitchen" in prompt
        assert "kitchen" in prompt

    def test_empty_catalog_still_well_formed(self, demo_world):
        empty = build_catalog(demo_world, entries=[])
        prompt = build_prompt(empty, "go somewhere")
        assert "(no functions available)" in prompt

    def test_byte_stable(self, catalog):
        a = build_prompt(catalog, "pick the bottle of water", "robot at (2, 1.5)")
        b = build_prompt(catalog, "pick the bottle of water", "robot at (2, 1.5)")
        assert a.encode() == b.encode()


class TestExtractPlan:
    def test_bare_array(self):
        plan = extract_plan('[{"fn": "go_to", "args": {"location": "kitchen"}}]')
        assert plan.steps == [SkillCall("go_to", {"location": "kitchen"})]

    def test_fenced_with_prose(self):
        raw = (
            "Sure! Here is the plan you asked for:\n"
            "```json\n"
            '[{"fn": "pick", "args": {"item": "bottle_of_water"}}]\n'
            "```\n"
            "Let me know if you need anything else."
        )
        plan = extract_plan(raw)
        assert plan.steps[0].fn == "pick"
        assert plan.provenance.raw_output == raw

    def test_object_with_plan_key(self):
        plan = extract_plan('{"plan": [{"fn": "leave", "args": {"x": 0.3}}]}')
        assert plan.steps[0].fn == "leave"

    def test_prose_only_rejected(self):
        with pytest.raises(ExtractionError):
            extract_plan("I cannot help with that request.")

    def test_leading_json_noise(self):
        raw = 'The answer is 42. [{"fn": "go_to", "args": {"location": "kitchen"}}] done'
        assert extract_plan(raw).steps[0].fn == "go_to"


class TestValidatePlan:
    def load_fixtures(self):
        with open(FIXTURES / "adversarial_plans.json", "r", encoding="utf-8") as fh:
            return json.load(fh)

    def test_home_service_plan_accepted(self, catalog, demo_world):
        fx = self.load_fixtures()
        plan = Plan(steps=[SkillCall(s["fn"], s["args"]) for s in fx["accept"]["steps"]])
        report = validate_plan(plan, catalog, demo_world)
        assert report.accepted, report.describe()

    def test_all_adversarial_rejected_with_rule(self, catalog, demo_world):
        fx = self.load_fixtures()
        assert len(fx["reject"]) == 25
        for case in fx["reject"]:
            plan = Plan(steps=[SkillCall(s["fn"], s["args"]) for s in case["steps"]])
            report = validate_plan(plan, catalog, demo_world)
            assert not report.accepted, case["name"]
            rules = {v.rule for v in report.violations}
            assert case["rule"] in rules, (case["name"], rules)

    def test_normalized_references_accept(self, catalog, demo_world):
        plan = Plan(steps=[SkillCall("pick", {"item": "Bottle of Water"})])
        assert validate_plan(plan, catalog, demo_world).accepted


class _StubHandler(BaseHTTPRequestHandler):
    script: list = []
    delay: float = 0.0
    calls: list = []

    def do_POST(self):
        import time as _time

        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length) or b"{}")
        type(self).calls.append(body)
        if self.delay:
            _time.sleep(self.delay)
        content = self.script.pop(0) if self.script else "[]"
        payload = json.dumps(
            {"choices": [{"message": {"role": "assistant", "content": content}}]}
        ).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture()
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    _StubHandler.script = []
    _StubHandler.delay = 0.0
    _StubHandler.calls = []
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server, _StubHandler
    server.shutdown()
    thread.join(timeout=2)


class TestBackends:
    def test_rule_backend_emits_canonical_json(self, grammar):
        backend = RuleBasedBackend(grammar)
        raw, elapsed = call_backend(backend, "", user_text="go to the kitchen")
        assert json.loads(raw) == [{"fn": "go_to", "args": {"location": "kitchen"}}]
        assert elapsed >= 0.0

    def test_external_returns_content_verbatim(self, stub_server):
        server, handler = stub_server
        handler.script = ['[{"fn": "leave", "args": {"x": 0.3}}]']
        backend = ExternalBackend(endpoint=f"http://127.0.0.1:{server.server_port}")
        raw, elapsed = call_backend(backend, "prompt text")
        assert raw == '[{"fn": "leave", "args": {"x": 0.3}}]'
        assert handler.calls[0]["messages"][0]["content"] == "prompt text"

    def test_external_timeout(self, stub_server):
        server, handler = stub_server
        handler.delay = 0.5
        backend = ExternalBackend(endpoint=f"http://127.0.0.1:{server.server_port}", timeout=0.001)
        with pytest.raises(BackendError):
            call_backend(backend, "prompt")

    def test_unreachable_endpoint(self):
        backend = ExternalBackend(endpoint="http://127.0.0.1:1/nothing", timeout=0.2)
        with pytest.raises(BackendError):
            call_backend(backend, "prompt")


class TestBackendEnvConfig:
    def test_external_backend_from_env(self, monkeypatch):
        from robotiq.planner import external_backend_from_env

        monkeypatch.setenv("ROBOTIQ_LLM_ENDPOINT", "http://example.test/v1/chat")
        monkeypatch.setenv("ROBOTIQ_LLM_MODEL", "tiny")
        monkeypatch.setenv("ROBOTIQ_LLM_TOKEN", "sekrit")
        backend = external_backend_from_env(timeout=5.0)
        assert backend.endpoint == "http://example.test/v1/chat"
        assert backend.model == "tiny"
        assert backend.token == "sekrit"
        assert backend.timeout == 5.0

    def test_missing_endpoint_raises(self, monkeypatch):
        from robotiq.planner import external_backend_from_env

        monkeypatch.delenv("ROBOTIQ_LLM_ENDPOINT", raising=False)
        with pytest.raises(BackendError):
            external_backend_from_env()


class TestCompile:
    def test_rule_based_compile(self, grammar, catalog, demo_world):
        backend = RuleBasedBackend(grammar)
        result = compile_command("Go to the kitchen", backend, catalog, demo_world)
        assert [s.fn for s in result.plan.steps] == ["go_to"]
        assert result.t_llm < 0.05
        assert result.plan.provenance.backend_id == "rule"

    def test_rule_based_parse_error(self, grammar, catalog, demo_world):
        backend = RuleBasedBackend(grammar)
        with pytest.raises(CompileError) as exc:
            compile_command("dance wildly", backend, catalog, demo_world)
        assert exc.value.stage == "parse"

    def test_rule_based_invalid_plan_no_retry(self, grammar, catalog, demo_world):
        backend = RuleBasedBackend(grammar)
        with pytest.raises(CompileError) as exc:
            compile_command("go to the garage", backend, catalog, demo_world)
        assert exc.value.stage == "validate"

    def test_external_retry_then_valid(self, stub_server, catalog, demo_world):
        server, handler = stub_server
        handler.script = [
            '[{"fn": "warp", "args": {}}]',
            '[{"fn": "go_to", "args": {"location": "kitchen"}}]',
        ]
        backend = ExternalBackend(endpoint=f"http://127.0.0.1:{server.server_port}")
        result = compile_command("go to the kitchen", backend, catalog, demo_world)
        assert result.plan.provenance.retries == 1
        assert len(handler.calls) == 2
        assert "rejected" in handler.calls[1]["messages"][0]["content"]

    def test_external_garbage_fails_after_retry(self, stub_server, catalog, demo_world):
        server, handler = stub_server
        handler.script = ['[{"fn": "warp", "args": {}}]', '[{"fn": "warp", "args": {}}]']
        backend = ExternalBackend(endpoint=f"http://127.0.0.1:{server.server_port}")
        with pytest.raises(CompileError) as exc:
            compile_command("go to the kitchen", backend, catalog, demo_world)
        assert exc.value.stage == "validate"
        assert exc.value.violations

    def test_external_prose_extract_error(self, stub_server, catalog, demo_world):
        server, handler = stub_server
        handler.script = ["no plan here", "still no plan"]
        backend = ExternalBackend(endpoint=f"http://127.0.0.1:{server.server_port}")
        with pytest.raises(CompileError) as exc:
            compile_command("go to the kitchen", backend, catalog, demo_world)
        assert exc.value.stage == "extract"

    def test_custom_template_file(self, stub_server, catalog, demo_world, tmp_path):
        server, handler = stub_server
        handler.script = ['[{"fn": "go_to", "args": {"location": "kitchen"}}]']
        tpl = tmp_path / "tpl.txt"
        tpl.write_text("CUSTOM HEADER\n<<CATALOG>>\nCommand: <<COMMAND>>\n")
        backend = ExternalBackend(endpoint=f"http://127.0.0.1:{server.server_port}")
        from robotiq.planner import load_template

        result = compile_command("go to the kitchen", backend, catalog, demo_world,
                                 template=load_template(tpl))
        assert result.plan.steps[0].fn == "go_to"
        assert handler.calls[0]["messages"][0]["content"].startswith("CUSTOM HEADER")
