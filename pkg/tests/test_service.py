from fractions import Fraction

import pytest
from fastapi.testclient import TestClient

from seqctl.cost import CostSpec
from seqctl.limit import (GridConfig, LimitPolicyStrategy, classify_region,
                          iterate_to_fixpoint)
from seqctl.problem import TestingProblem
from seqctl.service import create_app
from seqctl.strategy import Session

from conftest import coin2_model


@pytest.fixture(scope="module")
def setup():
    problem = TestingProblem(coin2_model(), CostSpec(5, 5))
    policy = iterate_to_fixpoint(problem, GridConfig.from_bounds(1e-4, 1e4, 2001, 1e-9))
    strategy = LimitPolicyStrategy(policy)
    app = create_app(problem, strategy, classify_region(policy), policy.pathological)
    return problem, strategy, TestClient(app)


def test_meta_exposes_model_cost_region(setup):
    problem, _, client = setup
    meta = client.get("/v1/meta").json()
    assert meta["model"] == problem.model.to_json_dict()
    assert meta["cost"]["lambda0"] == "5"
    assert meta["region"]["kind"] == "INTERVAL"
    assert meta["pathological"] is False
    assert meta["strategy"]["kind"] == "LimitPolicyStrategy"


def test_session_lifecycle(setup):
    _, _, client = setup
    created = client.post("/v1/sessions", json={})
    assert created.status_code == 201
    view = created.json()
    assert (view["stage"], view["z"], view["stopped"]) == (0, "1", False)
    assert view["recommended_control"] == "a"
    sid = view["id"]

    observed = client.post(f"/v1/sessions/{sid}/observe", json={"outcome": "1"})
    assert observed.status_code == 200
    view = observed.json()
    assert (view["stage"], view["z"], view["stopped"]) == (1, "3/2", True)
    assert view["decision"] == "REJECT_H0"
    assert [h["outcome"] for h in view["history"]] == ["1"]

    again = client.post(f"/v1/sessions/{sid}/observe", json={"outcome": "0"})
    assert again.status_code == 409
    assert again.json()["code"] == "SESSION_FINISHED"

    export = client.get(f"/v1/sessions/{sid}/export").json()
    assert export["id"] == sid
    assert export["state"]["z"] == "3/2"
    assert export["fingerprint"]


def test_session_errors(setup):
    _, _, client = setup
    assert client.get("/v1/sessions/zzz").status_code == 404
    assert client.post("/v1/sessions/zzz/observe", json={"outcome": "1"}).status_code == 404
    sid = client.post("/v1/sessions", json={}).json()["id"]
    bad = client.post(f"/v1/sessions/{sid}/observe", json={"outcome": "9"})
    assert bad.status_code == 400 and bad.json()["code"] == "UNKNOWN_ID"
    malformed = client.post(f"/v1/sessions/{sid}/observe", json={"wrong": 1})
    assert malformed.status_code == 400 and malformed.json()["code"] == "BAD_REQUEST"


def test_sessions_are_independent(setup):
    _, _, client = setup
    a = client.post("/v1/sessions", json={}).json()["id"]
    b = client.post("/v1/sessions", json={}).json()["id"]
    client.post(f"/v1/sessions/{a}/observe", json={"outcome": "1"})
    view_b = client.get(f"/v1/sessions/{b}").json()
    assert view_b["stage"] == 0 and view_b["stopped"] is False


def test_service_matches_pure_engine(setup):
    """Any request sequence leaves the service in the state the in-process
    session engine reaches with the same observations."""
    problem, strategy, client = setup
    sid = client.post("/v1/sessions", json={}).json()["id"]
    engine = Session(problem.model, problem.cost, strategy)
    for outcome in ["0", "0", "1"]:
        response = client.post(f"/v1/sessions/{sid}/observe", json={"outcome": outcome})
        if response.status_code == 409:
            break
        engine.advance(outcome)
        view = response.json()
        pure = engine.state.to_json_dict()
        assert {k: view[k] for k in pure} == pure
