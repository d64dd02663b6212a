"""Serialization of algebra inputs: the ``bv-algebra/1`` document format.

A document is a JSON object::

    {
      "schema": "bv-algebra/1",
      "name": "...",                         # optional
      "description": "...",                  # optional free text
      "model": { "kind": "tables" | "lie", ... },
      "inner_product": { "kind": "orthonormal" }          # optional; or
                       { "kind": "gram", "entries": [[i, j, "c"], ...] }
                       { "kind": "seeded", "seed": 7 }
    }

``tables`` models list everything explicitly (all scalars are exact rational
strings, vectors are ``[[index, "p/q"], ...]`` pair lists, maps are
column-sparse ``[[source, [[target, "p/q"], ...]], ...]``)::

    { "kind": "tables", "labels": [...], "degrees": [...], "top_degree": n,
      "unit": [[0, "1"]], "mult": [[i, j, [[k, "c"], ...]], ...],
      "d": [...], "deltas": [[k, [...]], ...], "trace": [[j, "c"], ...] }

``lie`` models describe a finite-dimensional Lie algebra with multivectors;
the exterior-algebra model, its differential and the contraction operators
are generated::

    { "kind": "lie", "generators": ["e1", ...],
      "brackets": [["e1", "e2", [["e3", "1"]]], ...],
      "multivectors": [[1, [["1", ["e1", "e2"]]]], ...] }
"""
from __future__ import annotations

import json
import random
from fractions import Fraction
from typing import Mapping, Sequence

from .bv import BVAlgebra
from .exterior import ce_model
from .grading import SCALAR_SPACE, GradedMap, GradedSpace, Vec
from .retract import InnerProduct

SCHEMA = "bv-algebra/1"


class InputError(ValueError):
    """Raised when a document cannot be turned into an algebra."""


def parse_scalar(s) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational scalar {s!r}: {exc}") from None


def scalar_str(c: Fraction) -> str:
    return str(Fraction(c))


# -- vectors and maps ------------------------------------------------------------


def vec_to_pairs(v: Mapping) -> list:
    return [[int(i), scalar_str(c)] for i, c in sorted(v.items()) if c]


def pairs_to_vec(pairs, dim: int) -> Vec:
    out: Vec = {}
    for item in pairs:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise InputError(f"bad vector entry {item!r}")
        i, c = item
        i = int(i)
        if not 0 <= i < dim:
            raise InputError(f"vector index {i} out of range 0..{dim - 1}")
        val = parse_scalar(c)
        if val:
            out[i] = out.get(i, Fraction(0)) + val
    return {i: c for i, c in out.items() if c}


def map_to_cols(f: GradedMap) -> list:
    return [[int(j), vec_to_pairs(col)]
            for j, col in sorted(f.cols.items()) if col]


def cols_to_map(cols, source: GradedSpace, target: GradedSpace,
                degree: int) -> GradedMap:
    data: dict[int, Vec] = {}
    for item in cols:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise InputError(f"bad map column {item!r}")
        j, pairs = item
        j = int(j)
        if not 0 <= j < source.dim:
            raise InputError(f"map column {j} out of range 0..{source.dim - 1}")
        v = pairs_to_vec(pairs, target.dim)
        if v:
            data[j] = v
    return GradedMap(source, target, int(degree), data)


# -- documents -> algebras -------------------------------------------------------


def _tables_model(model: Mapping) -> BVAlgebra:
    for key in ("labels", "degrees", "top_degree", "unit", "mult", "trace"):
        if key not in model:
            raise InputError(f"tables model is missing {key!r}")
    labels = tuple(str(x) for x in model["labels"])
    degrees = tuple(int(x) for x in model["degrees"])
    if len(labels) != len(degrees):
        raise InputError("labels and degrees have different lengths")
    if not labels:
        raise InputError("the model has an empty basis")
    space = GradedSpace(labels, degrees)
    n = int(model["top_degree"])
    unit = pairs_to_vec(model["unit"], space.dim)
    if not unit:
        raise InputError("the unit vector is zero")

    mult: dict[tuple[int, int], Vec] = {}
    for item in model["mult"]:
        if not isinstance(item, (list, tuple)) or len(item) != 3:
            raise InputError(f"bad product entry {item!r}")
        i, j, pairs = item
        i, j = int(i), int(j)
        if not (0 <= i < space.dim and 0 <= j < space.dim):
            raise InputError(f"product indices ({i}, {j}) out of range")
        v = pairs_to_vec(pairs, space.dim)
        if v:
            mult[(i, j)] = v

    d = cols_to_map(model.get("d", []), space, space, 1)
    deltas: dict[int, GradedMap] = {}
    for item in model.get("deltas", []):
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise InputError(f"bad operator entry {item!r}")
        k, cols = item
        k = int(k)
        if k < 1:
            raise InputError(f"operator index {k} must be >= 1")
        deltas[k] = cols_to_map(cols, space, space, 1 - 2 * k)

    trace_cols = []
    for item in model["trace"]:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise InputError(f"bad trace entry {item!r}")
        j, c = item
        trace_cols.append([j, [[0, c]]])
    trace = cols_to_map(trace_cols, space, SCALAR_SPACE, -n)
    return BVAlgebra(space, unit, mult, d, deltas, trace, n)


def _lie_model(model: Mapping) -> BVAlgebra:
    for key in ("generators",):
        if key not in model:
            raise InputError(f"lie model is missing {key!r}")
    gens = [str(g) for g in model["generators"]]
    if len(set(gens)) != len(gens) or not gens:
        raise InputError("generator names must be nonempty and distinct")
    index = {g: i for i, g in enumerate(gens)}

    def gen(name) -> int:
        if name not in index:
            raise InputError(f"unknown generator {name!r}")
        return index[name]

    brackets: dict[tuple[int, int], dict[int, Fraction]] = {}
    for item in model.get("brackets", []):
        if not isinstance(item, (list, tuple)) or len(item) != 3:
            raise InputError(f"bad bracket entry {item!r}")
        x, y, comps = item
        i, j = gen(x), gen(y)
        if i == j:
            raise InputError(f"bracket [{x}, {x}] must vanish")
        tgt = brackets.setdefault((i, j), {})
        for pair in comps:
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise InputError(f"bad bracket component {pair!r}")
            z, c = pair
            k = gen(z)
            tgt[k] = tgt.get(k, Fraction(0)) + parse_scalar(c)

    multivectors: dict[int, list[tuple[Fraction, tuple[int, ...]]]] = {}
    for item in model.get("multivectors", []):
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise InputError(f"bad multivector entry {item!r}")
        k, terms = item
        k = int(k)
        if k < 1:
            raise InputError(f"operator index {k} must be >= 1")
        words = []
        for term in terms:
            if not isinstance(term, (list, tuple)) or len(term) != 2:
                raise InputError(f"bad multivector term {term!r}")
            c, word = term
            words.append((parse_scalar(c), tuple(gen(w) for w in word)))
        multivectors[k] = words

    try:
        return ce_model(gens, brackets, multivectors)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def algebra_from_doc(doc: Mapping) -> BVAlgebra:
    if not isinstance(doc, Mapping):
        raise InputError("document must be a JSON object")
    if doc.get("schema") != SCHEMA:
        raise InputError(f"unsupported schema {doc.get('schema')!r}; "
                         f"expected {SCHEMA!r}")
    model = doc.get("model")
    if not isinstance(model, Mapping):
        raise InputError("document has no model object")
    kind = model.get("kind")
    if kind == "tables":
        return _tables_model(model)
    if kind == "lie":
        return _lie_model(model)
    raise InputError(f"unknown model kind {kind!r}")


def inner_product_from_doc(doc, space: GradedSpace) -> InnerProduct:
    """Inner product named by the document (or by a CLI override block)."""
    if doc is None:
        return InnerProduct.orthonormal(space)
    if not isinstance(doc, Mapping):
        raise InputError("inner_product must be a JSON object")
    kind = doc.get("kind", "orthonormal")
    if kind == "orthonormal":
        return InnerProduct.orthonormal(space)
    if kind == "seeded":
        return InnerProduct.seeded(space, int(doc.get("seed", 0)))
    if kind == "gram":
        entries: dict[tuple[int, int], Fraction] = {}
        for item in doc.get("entries", []):
            if not isinstance(item, (list, tuple)) or len(item) != 3:
                raise InputError(f"bad gram entry {item!r}")
            i, j, c = item
            i, j = int(i), int(j)
            if not (0 <= i < space.dim and 0 <= j < space.dim):
                raise InputError(f"gram indices ({i}, {j}) out of range")
            entries[(i, j)] = parse_scalar(c)
        try:
            return InnerProduct.from_entries(space, entries)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    raise InputError(f"unknown inner product kind {kind!r}")


def load_document(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path} does not hold a JSON object")
    return doc


# -- algebras -> documents -------------------------------------------------------


def algebra_to_doc(A: BVAlgebra, name: str = "", description: str = "",
                   inner_product=None, expected=None) -> dict:
    model = {
        "kind": "tables",
        "labels": list(A.space.labels),
        "degrees": list(A.space.degrees),
        "top_degree": A.top_degree,
        "unit": vec_to_pairs(A.unit),
        "mult": [[i, j, vec_to_pairs(v)]
                 for (i, j), v in sorted(A.mult.items())],
        "d": map_to_cols(A.d),
        "deltas": [[k, map_to_cols(f)] for k, f in sorted(A.deltas.items())],
        "trace": [[j, scalar_str(col[0])]
                  for j, col in sorted(A.trace.cols.items()) if col.get(0)],
    }
    doc = {"schema": SCHEMA, "model": model}
    if name:
        doc["name"] = name
    if description:
        doc["description"] = description
    if inner_product is not None:
        doc["inner_product"] = inner_product
    if expected is not None:
        doc["expected"] = expected
    return doc


def lie_doc(name: str, description: str, generators: Sequence[str],
            brackets: Sequence, multivectors: Sequence,
            inner_product=None, expected=None) -> dict:
    doc = {
        "schema": SCHEMA,
        "name": name,
        "description": description,
        "model": {
            "kind": "lie",
            "generators": list(generators),
            "brackets": [list(b) for b in brackets],
            "multivectors": [list(m) for m in multivectors],
        },
    }
    if inner_product is not None:
        doc["inner_product"] = inner_product
    if expected is not None:
        doc["expected"] = expected
    return doc


# -- seeded single-entry perturbations --------------------------------------------


def perturb_algebra(A: BVAlgebra, kind: str, seed: int) -> tuple[BVAlgebra, dict]:
    """Return a copy of the algebra with one structure entry bumped by 1.

    ``kind`` selects the table ("mult", "delta" or "trace"); the slot is drawn
    deterministically from the seed.  Product and operator slots respect the
    grading, so a perturbed instance fails a genuinely algebraic check rather
    than a bookkeeping one; trace slots are drawn away from the top degree, so
    the trace stops being a top-degree functional.
    """
    rng = random.Random((kind, seed).__repr__())
    S = A.space
    one = Fraction(1)

    if kind == "mult":
        slots = [(i, j, k)
                 for i in range(S.dim) for j in range(S.dim)
                 for k in range(S.dim)
                 if S.degrees[k] == S.degrees[i] + S.degrees[j]]
        if not slots:
            raise InputError("no graded product slot to perturb")
        i, j, k = slots[rng.randrange(len(slots))]
        mult = {key: dict(v) for key, v in A.mult.items()}
        col = mult.setdefault((i, j), {})
        col[k] = col.get(k, Fraction(0)) + one
        B = BVAlgebra(S, A.unit, mult, A.d, A.deltas, A.trace, A.top_degree)
        info = {"kind": kind, "seed": seed,
                "slot": [S.labels[i], S.labels[j], S.labels[k]]}
        return B, info

    if kind == "delta":
        if A.deltas:
            k = sorted(A.deltas)[rng.randrange(len(A.deltas))]
            base, deg = A.deltas[k], 1 - 2 * k
        else:
            k, base, deg = 0, A.d, 1
        slots = [(j, i)
                 for j in range(S.dim) for i in range(S.dim)
                 if S.degrees[i] == S.degrees[j] + deg]
        if not slots:
            raise InputError("no graded operator slot to perturb")
        j, i = slots[rng.randrange(len(slots))]
        cols = {c: dict(v) for c, v in base.cols.items()}
        col = cols.setdefault(j, {})
        col[i] = col.get(i, Fraction(0)) + one
        f = GradedMap(S, S, deg, cols)
        if k == 0:
            B = BVAlgebra(S, A.unit, A.mult, f, A.deltas, A.trace,
                          A.top_degree)
        else:
            deltas = dict(A.deltas)
            deltas[k] = f
            B = BVAlgebra(S, A.unit, A.mult, A.d, deltas, A.trace,
                          A.top_degree)
        info = {"kind": kind, "seed": seed, "operator": k,
                "slot": [S.labels[j], S.labels[i]]}
        return B, info

    if kind == "trace":
        slots = [j for j in range(S.dim) if S.degrees[j] != A.top_degree]
        if not slots:
            slots = list(range(S.dim))
        j = slots[rng.randrange(len(slots))]
        cols = {c: dict(v) for c, v in A.trace.cols.items()}
        col = cols.setdefault(j, {})
        col[0] = col.get(0, Fraction(0)) + one
        trace = GradedMap(S, A.trace.target, A.trace.degree, cols)
        B = BVAlgebra(S, A.unit, A.mult, A.d, A.deltas, trace, A.top_degree)
        info = {"kind": kind, "seed": seed, "slot": [S.labels[j]]}
        return B, info

    raise InputError(f"unknown perturbation kind {kind!r}")
