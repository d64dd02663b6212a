"""Reading and writing algebra documents, and the seeded perturbations."""
from __future__ import annotations

import json
from fractions import Fraction

import pytest

from bvfrob.corpus import load_doc
from bvfrob.descriptions import (
    SCHEMA,
    InputError,
    algebra_from_doc,
    algebra_to_doc,
    inner_product_from_doc,
    load_document,
    parse_scalar,
    perturb_algebra,
    scalar_str,
)
from bvfrob.exterior import WedgeBasis
from bvfrob.retract import InnerProduct

from conftest import ALL


def same_map(f, g) -> bool:
    return f.degree == g.degree and f.cols == g.cols


def same_algebra(a, b) -> bool:
    return (a.space.labels == b.space.labels
            and a.space.degrees == b.space.degrees
            and a.unit == b.unit
            and a.mult == b.mult
            and same_map(a.d, b.d)
            and sorted(a.deltas) == sorted(b.deltas)
            and all(same_map(a.deltas[k], b.deltas[k]) for k in a.deltas)
            and same_map(a.trace, b.trace)
            and a.top_degree == b.top_degree)


# -- round trips ----------------------------------------------------------------

@pytest.mark.parametrize("name", ALL)
def test_document_round_trip(name, loaded):
    A, _, _ = loaded[name]
    doc = algebra_to_doc(A, name=name)
    assert doc["schema"] == SCHEMA
    assert doc["model"]["kind"] == "tables"
    B = algebra_from_doc(doc)
    assert same_algebra(A, B)
    # the document survives JSON serialization
    C = algebra_from_doc(json.loads(json.dumps(doc)))
    assert same_algebra(A, C)


def test_lie_documents_expand_to_tables(loaded):
    # bundled multivector-model documents parse to the same algebra as their
    # expanded table form
    doc = load_doc("heisenberg_jacobi")
    assert doc["model"]["kind"] == "lie"
    A = algebra_from_doc(doc)
    B = algebra_from_doc(algebra_to_doc(A))
    assert same_algebra(A, B)


def test_scalar_round_trip():
    for text in ("3/4", "-2", "0", "12/7"):
        assert scalar_str(parse_scalar(text)) == str(Fraction(text))
    assert parse_scalar(5) == Fraction(5)


# -- rejection paths --------------------------------------------------------------

BAD_DOCUMENTS = [
    ("not an object", "must be a JSON object"),
    ({}, "unsupported schema"),
    ({"schema": SCHEMA}, "no model object"),
    ({"schema": SCHEMA, "model": {"kind": "mystery"}}, "unknown model kind"),
]


@pytest.mark.parametrize("doc,fragment", BAD_DOCUMENTS)
def test_malformed_documents_rejected(doc, fragment):
    with pytest.raises(InputError, match=fragment):
        algebra_from_doc(doc)


def tables_doc(**overrides):
    base = algebra_to_doc(algebra_from_doc(load_doc("torus2")))
    base["model"].update(overrides)
    return base


BAD_TABLES = [
    (dict(degrees=[0]), "different lengths"),
    (dict(labels=[], degrees=[], unit=[], mult=[], d=[], deltas=[], trace=[],
          top_degree=0), "empty basis"),
    (dict(unit=[]), "unit vector is zero"),
    (dict(unit=[[0, "1/0"]]), "bad rational scalar"),
    (dict(unit=[[99, "1"]]), "out of range"),
    (dict(mult=[[0, 0]]), "bad product entry"),
    (dict(mult=[[0, 99, []]]), "out of range"),
    (dict(deltas=[[0, []]]), "must be >= 1"),
    (dict(trace=[[0, "1", "extra"]]), "bad trace entry"),
]


@pytest.mark.parametrize("overrides,fragment", BAD_TABLES)
def test_malformed_tables_rejected(overrides, fragment):
    with pytest.raises(InputError, match=fragment):
        algebra_from_doc(tables_doc(**overrides))


def test_missing_tables_key_rejected():
    doc = tables_doc()
    del doc["model"]["unit"]
    with pytest.raises(InputError, match="missing 'unit'"):
        algebra_from_doc(doc)


def lie_doc_with(**overrides):
    doc = json.loads(json.dumps(load_doc("heisenberg_jacobi")))
    doc["model"].update(overrides)
    return doc


BAD_LIE = [
    (dict(generators=["x", "x"]), "distinct"),
    (dict(brackets=[["x", "x", [["y", "1"]]]]), "unknown generator"),
    (dict(brackets=[["e1", "e1", [["e2", "1"]]]]), "must vanish"),
    (dict(brackets=[["e1"]]), "bad bracket entry"),
    (dict(multivectors=[[0, []]]), "must be >= 1"),
    (dict(multivectors=[[1, [["1"]]]]), "bad multivector term"),
    (dict(multivectors=[[1, [["e1", ["e2"]]]]]), "bad rational scalar"),
]


@pytest.mark.parametrize("overrides,fragment", BAD_LIE)
def test_malformed_lie_models_rejected(overrides, fragment):
    with pytest.raises(InputError, match=fragment):
        algebra_from_doc(lie_doc_with(**overrides))


# -- inner product blocks ----------------------------------------------------------

def test_inner_product_default_is_orthonormal():
    wb = WedgeBasis(["a", "b"])
    ip = inner_product_from_doc(None, wb.space)
    assert ip.blocks == InnerProduct.orthonormal(wb.space).blocks


def test_inner_product_seeded_deterministic():
    wb = WedgeBasis(["a", "b"])
    one = inner_product_from_doc({"kind": "seeded", "seed": 7}, wb.space)
    two = inner_product_from_doc({"kind": "seeded", "seed": 7}, wb.space)
    other = inner_product_from_doc({"kind": "seeded", "seed": 8}, wb.space)
    assert one.blocks == two.blocks == InnerProduct.seeded(wb.space, 7).blocks
    assert one.blocks != other.blocks


def test_inner_product_gram_entries():
    wb = WedgeBasis(["a"])
    ip = inner_product_from_doc(
        {"kind": "gram", "entries": [[0, 0, "2"], [1, 1, "3/2"]]}, wb.space)
    assert ip.blocks[0] == [[Fraction(2)]]
    assert ip.blocks[1] == [[Fraction(3, 2)]]


def test_inner_product_rejections():
    wb = WedgeBasis(["a"])
    with pytest.raises(InputError, match="JSON object"):
        inner_product_from_doc("diag", wb.space)
    with pytest.raises(InputError, match="unknown inner product"):
        inner_product_from_doc({"kind": "weird"}, wb.space)
    with pytest.raises(InputError, match="bad gram entry"):
        inner_product_from_doc({"kind": "gram", "entries": [[0, 0]]}, wb.space)
    with pytest.raises(InputError, match="out of range"):
        inner_product_from_doc({"kind": "gram", "entries": [[0, 9, "1"]]},
                               wb.space)
    with pytest.raises(InputError, match="different degrees"):
        inner_product_from_doc({"kind": "gram", "entries": [[0, 1, "1"]]},
                               wb.space)


# -- document files ----------------------------------------------------------------

def test_load_document_round_trip(tmp_path):
    doc = load_doc("torus2")
    path = tmp_path / "torus2.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert load_document(str(path)) == doc


def test_load_document_rejections(tmp_path):
    with pytest.raises(InputError, match="cannot read"):
        load_document(str(tmp_path / "absent.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(InputError, match="not valid JSON"):
        load_document(str(bad))
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(InputError, match="JSON object"):
        load_document(str(arr))


# -- seeded perturbations -----------------------------------------------------------

@pytest.mark.parametrize("kind", ["mult", "delta", "trace"])
def test_perturbation_deterministic(kind, loaded):
    A, _, _ = loaded["torus2"]
    B1, info1 = perturb_algebra(A, kind, 3)
    B2, info2 = perturb_algebra(A, kind, 3)
    assert info1 == info2
    assert same_algebra(B1, B2)
    assert not same_algebra(A, B1)
    assert info1["kind"] == kind and info1["seed"] == 3
    assert all(isinstance(lbl, str) for lbl in info1["slot"])


def test_perturbation_changes_one_table(loaded):
    A, _, _ = loaded["torus2"]
    B, _ = perturb_algebra(A, "mult", 0)
    assert B.mult != A.mult
    assert same_map(A.d, B.d) and same_map(A.trace, B.trace)
    C, _ = perturb_algebra(A, "trace", 0)
    assert C.mult == A.mult and not same_map(A.trace, C.trace)


def test_perturbation_unknown_kind(loaded):
    A, _, _ = loaded["torus2"]
    with pytest.raises(InputError, match="unknown perturbation"):
        perturb_algebra(A, "swap", 0)
