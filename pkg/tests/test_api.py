import pytest
from fastapi.testclient import TestClient

from pragmex.api import create_app
from pragmex.config import ServerConfig, demo_domain
from pragmex.service import SessionService

TARGET = "[01]+0+"


@pytest.fixture()
def client():
    service = SessionService(demo_domain(), ServerConfig())
    return TestClient(create_app(service))


def make_session(client, **overrides):
    body = {"ui_mode": "positive_only", "robot": "green", "seed": 0, "target": TARGET}
    body.update(overrides)
    resp = client.post("/sessions", json=body)
    assert resp.status_code == 201, resp.text
    return resp.json()


def test_healthz(client):
    resp = client.get("/healthz")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert body["domain"]["num_concepts"] == 4


def test_create_session_view(client):
    view = make_session(client)
    assert view["ui_mode"] == "positive_only"
    assert view["robot"] == "green"
    assert view["status"] == "active"
    assert view["target"] == TARGET
    assert "then" in view["target_explanation"]
    assert view["examples"] == []
    assert view["posterior_size"] == 4
    assert "listener" not in view


def test_create_session_validation(client):
    resp = client.post("/sessions", json={"ui_mode": "sideways", "robot": "green"})
    assert resp.status_code == 400
    assert resp.json()["code"] == "InvalidArgument"

    resp = client.post("/sessions", json={"robot": "green"})
    assert resp.status_code == 400
    assert resp.json()["code"] == "InvalidArgument"

    resp = client.post(
        "/sessions", json={"ui_mode": "positive_only", "robot": "green", "target": "0{3}"}
    )
    assert resp.status_code == 400
    assert resp.json()["code"] == "UnknownConcept"


def test_get_session_and_unknown_id(client):
    view = make_session(client)
    again = client.get(f"/sessions/{view['id']}")
    assert again.status_code == 200
    assert again.json() == view

    missing = client.get("/sessions/doesnotexist")
    assert missing.status_code == 404
    assert missing.json()["code"] == "NotFound"


def test_solved_flow_over_http(client):
    view = make_session(client)
    sid = view["id"]
    r1 = client.post(f"/sessions/{sid}/examples", json={"string": "0000", "sign": "+"})
    assert r1.status_code == 200
    assert r1.json() == {"guess": "1*0+1*", "solved": False, "posterior_size": 3}
    r2 = client.post(f"/sessions/{sid}/examples", json={"string": "0010"})
    assert r2.json() == {"guess": TARGET, "solved": True, "posterior_size": 2}
    assert client.get(f"/sessions/{sid}").json()["status"] == "solved"


def test_add_example_error_codes(client):
    sid = make_session(client)["id"]
    cases = [
        ({"string": "0012"}, "InvalidString"),
        ({"string": ""}, "InvalidString"),
        ({"string": "11"}, "UnknownUtterance"),
        ({"string": "1100", "sign": "-"}, "SignNotAllowed"),
        ({"string": "1100", "sign": "?"}, "InvalidArgument"),
    ]
    for body, code in cases:
        resp = client.post(f"/sessions/{sid}/examples", json=body)
        assert resp.status_code == 400, body
        assert resp.json()["code"] == code, body

    assert client.post(f"/sessions/{sid}/examples", json={"string": "0000"}).status_code == 200
    dup = client.post(f"/sessions/{sid}/examples", json={"string": "0000"})
    assert dup.status_code == 400
    assert dup.json()["code"] == "DuplicateExample"


def test_inconsistent_spec_code(client):
    sid = make_session(client, ui_mode="positive_negative", seed=0)["id"]
    resp = client.post(
        f"/sessions/{sid}/examples", json={"string": "1100", "sign": "-"}
    )
    assert resp.status_code == 400
    assert resp.json()["code"] == "InconsistentSpec"


def test_remove_example_over_http(client):
    sid = make_session(client)["id"]
    client.post(f"/sessions/{sid}/examples", json={"string": "0000"})
    client.post(f"/sessions/{sid}/examples", json={"string": "0010"})
    resp = client.request(
        "DELETE", f"/sessions/{sid}/examples", json={"string": "0010"}
    )
    assert resp.status_code == 200
    assert resp.json()["guess"] == "1*0+1*"

    absent = client.request(
        "DELETE", f"/sessions/{sid}/examples", json={"string": "0010"}
    )
    assert absent.status_code == 400  # not the 404 reserved for unknown sessions
    assert absent.json()["code"] == "NotFound"


def test_guess_endpoint_idempotent(client):
    sid = make_session(client)["id"]
    client.post(f"/sessions/{sid}/examples", json={"string": "0000"})
    first = client.post(f"/sessions/{sid}/guess").json()
    second = client.post(f"/sessions/{sid}/guess").json()
    assert first == second == {"guess": "1*0+1*", "solved": False, "posterior_size": 3}


def test_abandon_endpoint(client):
    sid = make_session(client)["id"]
    resp = client.post(f"/sessions/{sid}/abandon")
    assert resp.status_code == 200
    assert resp.json()["status"] == "abandoned"
    again = client.post(f"/sessions/{sid}/abandon")
    assert again.status_code == 400
    assert again.json()["code"] == "InvalidState"


def test_operations_on_unknown_session_are_404(client):
    for method, path, body in [
        ("post", "/sessions/nope/examples", {"string": "0000"}),
        ("delete", "/sessions/nope/examples", {"string": "0000"}),
        ("post", "/sessions/nope/guess", None),
        ("post", "/sessions/nope/abandon", None),
    ]:
        resp = client.request(method.upper(), path, json=body)
        assert resp.status_code == 404, path
        assert resp.json()["code"] == "NotFound"


def test_cors_headers_present(client):
    resp = client.get("/healthz", headers={"Origin": "http://localhost:5173"})
    assert resp.headers.get("access-control-allow-origin") == "*"
