"""Deterministic report rendering."""
from __future__ import annotations

from fractions import Fraction

import pytest

from bvfrob.reports import render, render_json, render_markdown, to_jsonable


def test_to_jsonable_fractions_become_exact_strings():
    assert to_jsonable(Fraction(3, 4)) == "3/4"
    assert to_jsonable(Fraction(-5)) == "-5"
    assert to_jsonable({"x": Fraction(1, 2)}) == {"x": "1/2"}
    assert to_jsonable([Fraction(0), (Fraction(2),)]) == ["0", ["2"]]


def test_to_jsonable_primitives_pass_through():
    assert to_jsonable(True) is True
    assert to_jsonable(None) is None
    assert to_jsonable(7) == 7
    assert to_jsonable("name") == "name"
    assert to_jsonable({"k": [1, "a", False]}) == {"k": [1, "a", False]}


def test_to_jsonable_integral_floats_become_ints():
    out = to_jsonable(3.0)
    assert out == 3 and isinstance(out, int)


def test_to_jsonable_rejects_lossy_values():
    with pytest.raises(TypeError, match="non-integral float"):
        to_jsonable(0.5)
    with pytest.raises(TypeError, match="cannot render"):
        to_jsonable({1, 2})


def test_to_jsonable_stringifies_keys():
    assert to_jsonable({2: "a", "b": 1}) == {"2": "a", "b": 1}


def test_render_json_sorted_and_stable():
    report = {"zeta": 1, "alpha": {"b": Fraction(1, 3), "a": True}}
    text = render_json(report)
    assert text == render_json(report)
    assert text.index('"alpha"') < text.index('"zeta"')
    assert '"1/3"' in text
    assert text.endswith("\n")


def test_render_markdown_check_rows():
    report = {
        "instance": "torus2",
        "passed": False,
        "checks": [
            {"name": "unit_neutral", "passed": True, "detail": ""},
            {"name": "associativity", "passed": False, "detail": "at (1, 2)"},
        ],
    }
    text = render_markdown(report)
    assert text.startswith("# torus2\n")
    assert "- unit_neutral: pass" in text
    assert "- associativity: FAIL (at (1, 2))" in text
    assert "- passed: FAIL" in text
    assert render_markdown(report) == text


def test_render_markdown_pipeline_shape():
    report = {
        "stage": "pipeline",
        "passed": False,
        "failed_stage": "validation",
        "stages": [
            {"stage": "validation", "passed": False,
             "checks": [{"name": "leibniz", "passed": False, "detail": "x"}]},
        ],
    }
    text = render_markdown(report)
    assert "Overall: **FAIL** (failed at validation)" in text
    assert "## validation — FAIL" in text
    assert "- leibniz: FAIL (x)" in text


def test_render_dispatch():
    report = {"passed": True}
    assert render(report, "json") == render_json(report)
    assert render(report, "markdown") == render_markdown(report)
    with pytest.raises(ValueError, match="unknown format"):
        render(report, "yaml")
