from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path

import pytest

from citykit.instances import InstanceId
from citykit.planner import (
    InstancePlan,
    LlmPlannerBackend,
    MalformedReplyError,
    PlanningState,
    ReplayTransport,
    RecordingTransport,
    function_distribution,
)
from citykit.planner.transport import AuthFailureError, HttpChatTransport, PlannerTimeoutError
from test_planner import RESIDENTIAL, make_dossier

FIXTURE = Path(__file__).parent / "fixtures" / "planner_replies.jsonl"

VALID_PLAN = {
    "primary_function": "commercial",
    "secondary_function": "store",
    "size_class": "mid_rise",
    "style": "modern",
    "reasoning": "close to a road",
}


def chat_response(content: str) -> dict:
    return {"choices": [{"message": {"role": "assistant", "content": content}}]}


class ScriptedTransport:
    def __init__(self, contents):
        self.contents = list(contents)
        self.calls = 0

    def __call__(self, payload: dict) -> dict:
        self.calls += 1
        return chat_response(self.contents.pop(0))


class TestParsing:
    def test_valid_plan_passthrough(self):
        transport = ScriptedTransport([json.dumps(VALID_PLAN)])
        backend = LlmPlannerBackend(transport)
        plan = backend.plan_instance(make_dossier(0, 900.0), {}, RESIDENTIAL, None)
        assert plan.primary_function == "commercial"
        assert plan.secondary_function == "store"
        assert transport.calls == 1

    def test_prose_then_valid_takes_three_requests(self):
        transport = ScriptedTransport(
            ["I think this should be a shop.", "no JSON here either", json.dumps(VALID_PLAN)]
        )
        backend = LlmPlannerBackend(transport)
        plan = backend.plan_instance(make_dossier(0, 900.0), {}, RESIDENTIAL, None)
        assert plan.primary_function == "commercial"
        assert transport.calls == 3

    def test_malformed_after_retries(self):
        transport = ScriptedTransport(["nope", "still nope", "never json"])
        backend = LlmPlannerBackend(transport)
        with pytest.raises(MalformedReplyError):
            backend.plan_instance(make_dossier(0, 900.0), {}, RESIDENTIAL, None)
        assert transport.calls == 3

    def test_invalid_function_maps_to_other_after_retries(self):
        bad = dict(VALID_PLAN, primary_function="megamall")
        transport = ScriptedTransport([json.dumps(bad)] * 3)
        backend = LlmPlannerBackend(transport)
        plan = backend.plan_instance(make_dossier(0, 900.0), {}, RESIDENTIAL, None)
        assert plan.primary_function == "other"
        assert transport.calls == 3

    def test_keep_reply_returns_prior(self):
        prior = InstancePlan(
            InstanceId(2, 0), "residential", "apartments", "low_rise", "brick", "old reasons"
        )
        transport = ScriptedTransport([json.dumps({"keep": True})])
        backend = LlmPlannerBackend(transport)
        plan = backend.plan_instance(make_dossier(0, 900.0), {}, RESIDENTIAL, prior)
        assert plan is prior

    def test_code_fenced_json_parses(self):
        transport = ScriptedTransport(["```json\n" + json.dumps(VALID_PLAN) + "\n```"])
        backend = LlmPlannerBackend(transport)
        plan = backend.plan_instance(make_dossier(0, 900.0), {}, RESIDENTIAL, None)
        assert plan.primary_function == "commercial"

    def test_prior_and_neighbors_serialized_into_request(self):
        captured = {}

        def transport(payload):
            captured.update(payload)
            return chat_response(json.dumps(VALID_PLAN))

        prior = InstancePlan(
            InstanceId(2, 0), "residential", "apartments", "low_rise", "brick", "old reasons"
        )
        neighbor = InstancePlan(
            InstanceId(2, 1), "commercial", "store", "mid_rise", "glass", "n"
        )
        backend = LlmPlannerBackend(transport)
        backend.plan_instance(
            make_dossier(0, 900.0), {InstanceId(2, 1): neighbor}, RESIDENTIAL, prior
        )
        user = captured["messages"][1]["content"]
        body = json.loads(user)
        assert body["previous_plan"]["reasoning"] == "old reasons"
        assert body["neighbor_plans"][0]["primary_function"] == "commercial"
        assert body["district_directive"] == "residential district"


class TestFixtureReplay:
    def test_twenty_recorded_replies_all_parse(self):
        transport = ReplayTransport(FIXTURE)
        backend = LlmPlannerBackend(transport)
        state = PlanningState()
        for i in range(20):
            plan = backend.plan_instance(make_dossier(i, 300.0 + 137.0 * i), {}, RESIDENTIAL, None)
            state.plans[plan.id] = plan
        assert len(state.plans) == 20
        dist = function_distribution(state)
        assert sum(dist.values()) == pytest.approx(1.0)
        assert dist.get("residential", 0) > 0.3

    def test_record_then_replay_round_trip(self, tmp_path):
        path = tmp_path / "recorded.jsonl"
        inner = ScriptedTransport([json.dumps(VALID_PLAN)] * 2)
        recording = RecordingTransport(inner, path)
        backend = LlmPlannerBackend(recording)
        first = backend.plan_instance(make_dossier(0, 900.0), {}, RESIDENTIAL, None)
        backend.plan_instance(make_dossier(1, 900.0), {}, RESIDENTIAL, None)

        replay = ReplayTransport(path)
        replayed_backend = LlmPlannerBackend(replay)
        again = replayed_backend.plan_instance(make_dossier(0, 900.0), {}, RESIDENTIAL, None)
        assert again == first

    def test_replay_exhaustion_raises_timeout(self, tmp_path):
        path = tmp_path / "short.jsonl"
        path.write_text(
            json.dumps({"request": {}, "response": chat_response(json.dumps(VALID_PLAN))}) + "\n"
        )
        backend = LlmPlannerBackend(ReplayTransport(path))
        backend.plan_instance(make_dossier(0, 900.0), {}, RESIDENTIAL, None)
        with pytest.raises(PlannerTimeoutError):
            backend.plan_instance(make_dossier(1, 900.0), {}, RESIDENTIAL, None)


class _AuthHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        self.rfile.read(int(self.headers["Content-Length"]))
        self.send_response(401)
        self.end_headers()
        self.wfile.write(b"unauthorized")

    def log_message(self, *args):
        pass


class TestHttpTransport:
    def test_auth_failure(self):
        server = HTTPServer(("127.0.0.1", 0), _AuthHandler)
        threading.Thread(target=server.serve_forever, daemon=True).start()
        try:
            transport = HttpChatTransport(f"http://127.0.0.1:{server.server_port}/v1/chat")
            with pytest.raises(AuthFailureError):
                transport({"model": "m", "messages": []})
        finally:
            server.shutdown()

    def test_unreachable_endpoint_times_out(self):
        transport = HttpChatTransport("http://127.0.0.1:1/v1/chat", timeout_s=0.2)
        with pytest.raises(PlannerTimeoutError):
            transport({"model": "m", "messages": []})
