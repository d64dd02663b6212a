"""End-to-end pipeline runs over the bundled instances."""
from __future__ import annotations

import json

import pytest

from bvfrob.corpus import load_doc
from bvfrob.pipeline import (
    DEFAULT_HBAR_ORDER,
    DEFAULT_KMAX,
    DEFAULT_TAU_ORDER,
    STAGES,
    handle,
)

from conftest import ALL, NEGATIVE, POSITIVE

EXPECTED_FAILED_STAGE = {
    "filiform_nonpoisson": "validation",
    "theta_pair": "degeneration",
    "heisenberg_jacobi_badip": "cyclic",
}


@pytest.mark.parametrize("name", ALL)
def test_pipeline_verdicts_match_expected(name):
    doc = load_doc(name)
    report = handle("pipeline", doc)
    assert report["passed"] is (name in POSITIVE)
    assert report["instance"] == name
    assert report["schema"] == "bv-report/1"
    assert report["failed_stage"] == EXPECTED_FAILED_STAGE.get(name)


@pytest.mark.parametrize("name", POSITIVE)
def test_pipeline_runs_every_stage_on_passing_instances(name):
    report = handle("pipeline", load_doc(name))
    assert [st["stage"] for st in report["stages"]] == list(STAGES)
    assert all(st["passed"] for st in report["stages"])


@pytest.mark.parametrize("name", NEGATIVE)
def test_pipeline_stops_at_first_failure(name):
    report = handle("pipeline", load_doc(name))
    stages = report["stages"]
    assert stages[-1]["stage"] == EXPECTED_FAILED_STAGE[name]
    assert not stages[-1]["passed"]
    assert all(st["passed"] for st in stages[:-1])


def test_pipeline_reports_are_deterministic():
    one = handle("pipeline", load_doc("heisenberg_jacobi"))
    two = handle("pipeline", load_doc("heisenberg_jacobi"))
    assert json.dumps(one, sort_keys=True) == json.dumps(two, sort_keys=True)


def test_parameter_provenance_defaults():
    report = handle("pipeline", load_doc("torus2"))
    params = report["parameters"]
    assert params["tau_order"] == {"value": DEFAULT_TAU_ORDER,
                                   "source": "default"}
    assert params["hbar_order"] == {"value": DEFAULT_HBAR_ORDER,
                                    "source": "default"}
    assert params["kmax"] == {"value": DEFAULT_KMAX, "source": "default"}
    # every bundled document carries its own pairing block
    assert params["inner_product"] == "document"


def test_parameter_provenance_explicit():
    report = handle("pipeline", load_doc("torus2"), tau_order=3, seed=5,
                    explicit=frozenset({"tau_order", "seed"}))
    params = report["parameters"]
    assert params["tau_order"] == {"value": 3, "source": "request"}
    assert params["hbar_order"]["source"] == "default"
    assert params["inner_product"] == "seeded(5)"


def test_single_stage_reports_carry_context():
    rep = handle("retract", load_doc("torus3"))
    assert rep["stage"] == "retract"
    assert rep["instance"] == "torus3"
    assert rep["passed"] is True
    assert set(rep["parameters"]) == {"tau_order", "hbar_order", "kmax",
                                      "inner_product"}


def test_cohomology_stage_shape():
    rep = handle("cohomology", load_doc("torus2"))
    assert rep["stage"] == "cohomology"
    assert rep["passed"] is True
    assert rep["betti"] == {"0": 1, "1": 2, "2": 1}


def test_qme_stage_respects_orders():
    rep = handle("qme", load_doc("heisenberg_jacobi"), tau_order=3,
                 explicit=frozenset({"tau_order"}))
    assert rep["passed"] is True and rep["solved"] is True
    assert rep["order"] == 3
    assert rep["parameters"]["tau_order"] == {"value": 3, "source": "request"}


def test_unknown_stage_rejected():
    with pytest.raises(KeyError):
        handle("spectral", load_doc("torus2"))


def test_frobenius_stage_failure_reported_not_raised():
    rep = handle("frobenius", load_doc("theta_pair"))
    assert rep["passed"] is False
    assert rep["solved"] is False
    assert rep["error"]["kind"] == "obstruction"
    assert rep["error"]["order"] == 2


@pytest.mark.parametrize("name", NEGATIVE)
def test_single_stage_failure_matches_pipeline(name):
    stage = EXPECTED_FAILED_STAGE[name]
    rep = handle(stage, load_doc(name))
    assert rep["passed"] is False
