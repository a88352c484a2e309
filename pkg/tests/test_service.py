import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from simverify.holistic import AssessorConfig, MockTransport
from simverify.maps import dumps_json_grid
from simverify.pipeline import Assessor
from simverify.service import create_app
from simverify.synth import SyntheticSpec, generate


@pytest.fixture
def client():
    return TestClient(create_app())


def test_healthz(client):
    r = client.get("/healthz")
    assert r.status_code == 200 and r.json()["status"] == "ok"


def test_constant_map_rejected(client):
    r = client.post("/verify", content=dumps_json_grid(np.full((5, 5), 2.0)))
    assert r.status_code == 200
    body = r.json()
    assert body["final"] is False and body["quantitative"] is False and body["holistic"] is None
    assert set(body) >= {"scores", "quantitative", "holistic", "final", "rationale"}


def test_concentrated_map_accepted(client):
    m, _ = generate(SyntheticSpec("concentrated", seed=2))
    assert client.post("/verify", content=dumps_json_grid(m)).json()["final"] is True


@pytest.mark.parametrize("body", ["{not json", '{"height": 2, "width": 2, "data": [1]}', "[]", ""])
def test_malformed_body(client, body):
    r = client.post("/verify", content=body)
    assert r.status_code == 400
    assert "error" in r.json()


def test_identical_requests_identical_bytes(client):
    m, _ = generate(SyntheticSpec("scattered", seed=5))
    body = dumps_json_grid(m)
    first = client.post("/verify", content=body).content
    assert all(client.post("/verify", content=body).content == first for _ in range(5))


def test_unavailable_assessor_degrades():
    app = create_app(assessor=Assessor(AssessorConfig(max_retries=1), MockTransport([{"error": "down"}], cycle=True)))
    r = TestClient(app).post("/verify", content=dumps_json_grid(np.full((4, 4), 1.0)))
    body = r.json()
    assert r.status_code == 200
    assert body["holistic"]["decision"] == "unavailable"
    assert body["final"] is False
    assert "fallback" in body["rationale"]
