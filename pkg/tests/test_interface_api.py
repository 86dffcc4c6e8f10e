import pytest
from fastapi.testclient import TestClient

from protorail import Engine, Store
from protorail.api import create_app

from helpers import load_fixture, replay_case_b


@pytest.fixture
def client(engine, fixed_clock):
    return TestClient(create_app(engine))


def seeded_colliding_session(client, sid="api-g"):
    body = {
        "protocol": "ghosty",
        "id": sid,
        "theme": "t",
        "fragments": [
            {"id": f"f{i}", "text": f"observation {i}", "domain_tag": tag, "source_kind": "observation"}
            for i, tag in enumerate(["alpha", "beta", "gamma"], start=1)
        ],
    }
    assert client.post("/sessions", json=body).json()["ok"]
    client.post(f"/sessions/{sid}/steps/advance", json={})
    for i in range(1, 4):
        response = client.post(
            f"/sessions/{sid}/steps/ghost",
            json={
                "fragment_id": f"f{i}",
                "structural_description": f"a mechanism {i} that converts pressure into release",
                "checklist": {
                    "uses_verbs": True,
                    "includes_emotion": True,
                    "cross_domain_comprehensible": True,
                    "reversibility_pass": True,
                },
            },
        )
        assert response.json()["ok"]
    return sid


class TestEnvelope:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body == {"ok": True, "data": {"status": "up"}}

    def test_rating_out_of_range_names_field_path(self, client):
        sid = seeded_colliding_session(client)
        client.post(f"/sessions/{sid}/steps/collision",
                    json={"pair": ["f1", "f3"], "score": "electric", "rationale": "r"})
        client.post(f"/sessions/{sid}/steps/collision",
                    json={"pair": ["f1", "f2"], "score": "boring"})
        client.post(f"/sessions/{sid}/steps/collision",
                    json={"pair": ["f2", "f3"], "score": "boring"})
        response = client.post(
            f"/sessions/{sid}/steps/vision",
            json={
                "collision_id": "f1:f3",
                "name": "n", "one_line": "o", "emotion": "e",
                "cinematic_image": "i", "why_now": "w",
                "ratings": {"novelty": 6, "feasibility": 4, "resonance": 4, "timing": 4},
            },
        )
        assert response.status_code == 400
        body = response.json()
        assert body["ok"] is False
        assert body["error"]["code"] == "rating_out_of_range"
        assert body["error"]["field_path"] == "ratings.novelty"

    def test_malformed_body_is_bad_request(self, client):
        response = client.post(
            "/sessions", content=b"{not json", headers={"content-type": "application/json"}
        )
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "bad_request"

    def test_unknown_session_404(self, client):
        response = client.get("/sessions/nope")
        assert response.status_code == 404
        assert response.json()["error"]["code"] == "unknown_session"

    def test_wrong_phase_code_matches_core(self, client):
        sid = seeded_colliding_session(client, "api-g2")
        response = client.post(f"/sessions/{sid}/steps/complete", json={})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "wrong_phase"


class TestGates:
    def test_gate_view_after_full_matrix(self, client):
        sid = seeded_colliding_session(client, "api-g3")
        client.post(f"/sessions/{sid}/steps/collision",
                    json={"pair": ["f1", "f3"], "score": "electric", "rationale": "r"})
        client.post(f"/sessions/{sid}/steps/collision",
                    json={"pair": ["f1", "f2"], "score": "electric", "rationale": "r"})
        client.post(f"/sessions/{sid}/steps/collision",
                    json={"pair": ["f2", "f3"], "score": "electric", "rationale": "r"})
        gates = client.get(f"/sessions/{sid}/gates").json()["data"]
        assert gates["collision_gate"]["kind"] == "advance"
        assert sorted(gates["collision_gate"]["electric"]) == ["f1:f2", "f1:f3", "f2:f3"]
        assert gates["collision_gate"]["electric_inflation"] is True
        assert gates["pending_pairs"] == []

    def test_pending_pairs_counted_mid_matrix(self, client):
        sid = seeded_colliding_session(client, "api-g4")
        client.post(f"/sessions/{sid}/steps/collision",
                    json={"pair": ["f1", "f2"], "score": "boring"})
        gates = client.get(f"/sessions/{sid}/gates").json()["data"]
        assert gates["pairs_total"] == 3
        assert gates["pairs_scored"] == 1
        assert len(gates["pending_pairs"]) == 2


class TestIdempotencyAndRestart:
    def test_duplicate_pair_rejected_state_unchanged(self, client):
        sid = seeded_colliding_session(client, "api-g5")
        ok = client.post(f"/sessions/{sid}/steps/collision",
                         json={"pair": ["f1", "f2"], "score": "boring"})
        assert ok.json()["ok"]
        before = client.get(f"/sessions/{sid}").json()["data"]
        again = client.post(f"/sessions/{sid}/steps/collision",
                            json={"pair": ["f1", "f2"], "score": "boring"})
        assert again.status_code == 400
        assert again.json()["error"]["code"] == "duplicate_pair"
        after = client.get(f"/sessions/{sid}").json()["data"]
        assert before == after

    def test_restart_replays_identical_views(self, client, store, fixed_clock):
        sid = seeded_colliding_session(client, "api-g6")
        view = client.get(f"/sessions/{sid}").json()["data"]
        fresh_engine = Engine(Store(store.path))
        fresh_client = TestClient(create_app(fresh_engine))
        replayed = fresh_client.get(f"/sessions/{sid}").json()["data"]
        assert replayed == view


class TestPredictionsAndRubric:
    def test_prediction_lifecycle(self, client):
        created = client.post("/predictions", json={
            "id": "p1",
            "theme_key": "agent-ecosystem",
            "statement": "consolidation happens",
            "horizon": {"start": "2026-01-01", "end": "2028-12-31"},
        })
        assert created.json()["ok"]
        evaluated = client.post("/predictions/p1/evaluation", json={"outcome": "partial"})
        body = evaluated.json()["data"]
        assert body["outcome"] == "partial"
        assert body["summary"] == {"hit": 0, "miss": 0, "partial": 1}
        again = client.post("/predictions/p1/evaluation", json={"outcome": "hit"})
        assert again.status_code == 400
        assert again.json()["error"]["code"] == "already_evaluated"

    def test_rubric_endpoint(self, client):
        doc = load_fixture("rubric_case_d_treatment.json")
        response = client.post("/rubric", json={
            "target_ref": doc["target_ref"],
            "scores": doc["scores"],
            "labels": doc["labels"],
        })
        assert response.json()["data"]["total"] == 74


class TestHistoryEndpoint:
    def test_history_diff_over_http(self, client):
        for sid, strength in [("h1", "weak"), ("h2", "strong")]:
            client.post("/sessions", json={"protocol": "precog", "id": sid, "theme_key": "ht"})
            for key in ("k1", "k2", "k3"):
                client.post(f"/sessions/{sid}/steps/signal", json={
                    "key": key,
                    "description": "a signal",
                    "evidence": [{"claim": "c", "source": "s"}],
                    "strength": strength if key == "k1" else "emerging",
                    "direction": "stable",
                    "confidence": "verified",
                    "source_kind": "behavioral",
                })
        diff = client.get("/themes/ht/history/diff").json()["data"]
        assert diff["available"] is True
        by_key = {d["signal_key"]: d for d in diff["deltas"]}
        assert by_key["k1"]["classification"] == "strengthened"
        assert not by_key["k2"]["priority"]

    def test_single_session_theme_reports_unavailable(self, client):
        client.post("/sessions", json={"protocol": "precog", "id": "only", "theme_key": "solo"})
        diff = client.get("/themes/solo/history/diff").json()["data"]
        assert diff["available"] is False
        assert diff["sessions_found"] == 1


class TestAppWiring:
    def test_default_app_builds_from_environment(self, tmp_path, monkeypatch):
        from protorail.api import default_app
        from protorail.config import STORE_ENV

        monkeypatch.setenv(STORE_ENV, str(tmp_path / "env-store.jsonl"))
        app_client = TestClient(default_app())
        assert app_client.get("/health").json()["ok"] is True
        created = app_client.post(
            "/sessions", json={"protocol": "precog", "id": "env1", "theme_key": "t"}
        )
        assert created.json()["ok"] is True
        assert (tmp_path / "env-store.jsonl").exists()


class TestCaseBOverHttp:
    def test_full_replay_reaches_expected_judgments(self, client, engine):
        class HttpDriver:
            def create(self, body):
                response = client.post("/sessions", json=body)
                assert response.json()["ok"], response.text
                return response.json()["data"]

            def step(self, session_id, name, body):
                response = client.post(f"/sessions/{session_id}/steps/{name}", json=body)
                assert response.json()["ok"], response.text
                return response.json()["data"]

        final = replay_case_b(HttpDriver())
        expected = load_fixture("case_b.json")["expected"]
        judgments = [e["judgment"]["overall"] for e in final["grid_evaluations"]]
        escalations = [
            e["judgment"]["escalated_contrarian_required"] for e in final["grid_evaluations"]
        ]
        assert judgments == expected["judgments"]
        assert escalations == expected["escalations"]
        ghosty = client.get("/sessions/case-b-ghosty").json()["data"]
        assert len(ghosty["collisions"]) == expected["pairs"]
        assert len(ghosty["gate"]["electric"]) == expected["electric"]
        assert ghosty["status"] == "completed"
        confidences = {f["id"]: f["confidence"] for f in ghosty["fragments"]}
        for cid, expected_confidence in expected["fragment_confidence"].items():
            assert confidences[cid] == expected_confidence
