from __future__ import annotations

import pytest
from oracle_dense import betti_numbers, first_failure_dense, validate_dense

from bvfrob import corpus, first_failure, validate_all
from bvfrob.bv import operator_order, validate_algebra, validate_bv
from bvfrob.cyclic import validate_cyclic
from bvfrob.descriptions import perturb_algebra
from conftest import ALL, NEGATIVE, POSITIVE

# (instance, kind, seed) -> name of the check the perturbation must break.
# mult and delta perturbations break a validator check; trace perturbations
# break the trace-degree check of the cyclic stage.
PERTURBATIONS = [
    ("torus2", "mult", 0, "unit_neutral"),
    ("torus2", "delta", 0, "differential_kills_unit"),
    ("torus2", "trace", 0, "trace_degree"),
    ("heisenberg_jacobi", "mult", 1, "graded_commutativity"),
    ("heisenberg_jacobi", "delta", 0, "operator_orders"),
    ("heisenberg_jacobi", "trace", 1, "trace_degree"),
    ("koszul_pair", "mult", 0, "unit_neutral"),
    ("koszul_pair", "delta", 0, "differential_squares_to_zero"),
    ("koszul_pair", "trace", 1, "trace_degree"),
]


@pytest.mark.parametrize("name", ALL)
def test_corpus_verdict_matches_expected(loaded, name):
    A, _, doc = loaded[name]
    rep = validate_all(A)
    assert rep["passed"] is doc["expected"]["valid"]
    assert first_failure(rep) == doc["expected"]["first_failure"]


@pytest.mark.parametrize("name", ALL)
def test_dense_oracle_agrees(loaded, name):
    A, _, _ = loaded[name]
    main = validate_all(A)
    dense = validate_dense(A)
    assert dense["passed"] == main["passed"]
    assert first_failure_dense(dense) == first_failure(main)
    assert ([c["name"] for c in dense["checks"]]
            == [c["name"] for c in main["checks"]])


@pytest.mark.parametrize("name", POSITIVE)
def test_positive_instances_pass_both_layers(loaded, name):
    A, _, _ = loaded[name]
    assert validate_algebra(A)["passed"]
    assert validate_bv(A)["passed"]
    assert validate_cyclic(A)["passed"]


def test_filiform_fails_only_square_zero(loaded):
    A, _, _ = loaded["filiform_nonpoisson"]
    rep = validate_all(A)
    failing = [c["name"] for c in rep["checks"] if not c["passed"]]
    assert failing == ["square_zero_family"]


@pytest.mark.parametrize("name,kind,seed,expected", PERTURBATIONS)
def test_perturbation_breaks_intended_check(loaded, name, kind, seed,
                                            expected):
    A, _, _ = loaded[name]
    B, info = perturb_algebra(A, kind, seed)
    assert info["kind"] == kind and info["seed"] == seed
    if kind == "trace":
        rep = validate_cyclic(B)
        assert first_failure(rep) == expected
        # the algebra itself is untouched, so the validator still passes and
        # the dense oracle agrees on that verdict
        assert validate_all(B)["passed"]
        assert validate_dense(B)["passed"]
    else:
        rep = validate_all(B)
        assert first_failure(rep) == expected
        dense = validate_dense(B)
        assert first_failure_dense(dense) == expected


@pytest.mark.parametrize("name", POSITIVE + ["theta_pair"])
def test_operator_orders_are_sharp(loaded, name):
    A, _, _ = loaded[name]
    for k, f in sorted(A.deltas.items()):
        assert operator_order(f, A, k + 1) <= k + 1


@pytest.mark.parametrize("name,expected", [
    ("torus2", {0: 1, 1: 2, 2: 1}),
    ("torus3", {0: 1, 1: 3, 2: 3, 3: 1}),
    ("heisenberg_jacobi", {0: 1, 1: 2, 2: 2, 3: 1}),
    ("heisenberg_poisson", {0: 1, 1: 2, 2: 2, 3: 1}),
    ("koszul_pair", {0: 1, 3: 1}),
])
def test_betti_numbers_dense(loaded, name, expected):
    A, _, _ = loaded[name]
    assert betti_numbers(A) == expected


@pytest.mark.parametrize("name", NEGATIVE)
def test_negatives_fail_their_stage(loaded, name):
    _, _, doc = loaded[name]
    assert doc["expected"]["failed_stage"] in ("validation", "degeneration",
                                               "cyclic")
