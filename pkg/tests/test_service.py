"""HTTP service endpoints."""
from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from bvfrob import __version__
from bvfrob.corpus import NEGATIVE, POSITIVE, load_doc
from bvfrob.service import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_health(client):
    res = client.get("/health")
    assert res.status_code == 200
    assert res.json() == {"status": "ok", "version": __version__}


def test_corpus_list(client):
    res = client.get("/v1/corpus")
    assert res.status_code == 200
    body = res.json()
    assert body["positive"] == list(POSITIVE)
    assert body["negative"] == list(NEGATIVE)


def test_corpus_document(client):
    res = client.get("/v1/corpus/torus2")
    assert res.status_code == 200
    assert res.json() == load_doc("torus2")


def test_corpus_document_unknown(client):
    res = client.get("/v1/corpus/moebius")
    assert res.status_code == 404


def test_validate_by_instance(client):
    res = client.post("/v1/validate", json={"instance": "torus2"})
    assert res.status_code == 200
    report = res.json()["report"]
    assert report["passed"] is True
    assert report["stage"] == "validation"


def test_validate_by_document(client):
    res = client.post("/v1/validate", json={"document": load_doc("torus3")})
    assert res.status_code == 200
    assert res.json()["report"]["passed"] is True


def test_mathematical_failure_is_200(client):
    res = client.post("/v1/pipeline",
                      json={"instance": "filiform_nonpoisson"})
    assert res.status_code == 200
    report = res.json()["report"]
    assert report["passed"] is False
    assert report["failed_stage"] == "validation"


def test_document_and_instance_conflict(client):
    res = client.post("/v1/validate", json={"instance": "torus2",
                                            "document": load_doc("torus2")})
    assert res.status_code == 400


def test_neither_document_nor_instance(client):
    res = client.post("/v1/validate", json={})
    assert res.status_code == 400


def test_unknown_instance_404(client):
    res = client.post("/v1/validate", json={"instance": "moebius"})
    assert res.status_code == 404


def test_malformed_document_400(client):
    res = client.post("/v1/validate", json={"document": {"schema": "x"}})
    assert res.status_code == 400
    assert "unsupported schema" in res.json()["detail"]


def test_invalid_knob_rejected_by_schema(client):
    res = client.post("/v1/qme", json={"instance": "torus2", "tau_order": 0})
    assert res.status_code == 422


def test_parameter_provenance_over_http(client):
    res = client.post("/v1/retract",
                      json={"instance": "torus2", "seed": 11, "kmax": 5})
    assert res.status_code == 200
    params = res.json()["report"]["parameters"]
    assert params["kmax"] == {"value": 5, "source": "request"}
    assert params["tau_order"]["source"] == "default"
    assert params["inner_product"] == "seeded(11)"


def test_qme_order_knob(client):
    res = client.post("/v1/qme", json={"instance": "heisenberg_jacobi",
                                       "tau_order": 3})
    assert res.status_code == 200
    report = res.json()["report"]
    assert report["passed"] is True
    assert report["order"] == 3


def test_frobenius_endpoint(client):
    res = client.post("/v1/frobenius", json={"instance": "koszul_pair"})
    assert res.status_code == 200
    report = res.json()["report"]
    assert report["passed"] is True
    assert report["potential"] == {"s0*s0*s1": "1/2"}


def test_obstructed_instance_reports_error_payload(client):
    res = client.post("/v1/qme", json={"instance": "theta_pair"})
    assert res.status_code == 200
    report = res.json()["report"]
    assert report["passed"] is False
    assert report["error"]["kind"] == "obstruction"


def test_pipeline_deterministic_over_http(client):
    a = client.post("/v1/pipeline", json={"instance": "torus2"})
    b = client.post("/v1/pipeline", json={"instance": "torus2"})
    assert a.content == b.content
