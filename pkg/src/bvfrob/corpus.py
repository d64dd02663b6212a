"""Bundled example algebras, both passing and failing ones.

Each instance is stored as a ``bv-algebra/1`` JSON document under
``bvfrob/data`` together with an ``expected`` block recording the verdicts it
is supposed to produce.  The builder functions here are the source of those
files; ``python -m bvfrob.corpus`` rewrites them.
"""
from __future__ import annotations

import json
from importlib import resources

from .bv import BVAlgebra
from .descriptions import (InputError, algebra_from_doc, inner_product_from_doc,
                           lie_doc)
from .retract import InnerProduct

POSITIVE = ("torus2", "torus3", "heisenberg_poisson", "heisenberg_jacobi",
            "koszul_pair")
NEGATIVE = ("filiform_nonpoisson", "theta_pair", "heisenberg_jacobi_badip")
ALL = POSITIVE + NEGATIVE


def _torus(name: str, gens: list[str], classes: int) -> dict:
    return lie_doc(
        name,
        f"Exterior algebra on {len(gens)} odd generators with zero "
        "differential and no higher operators; every element is a class.",
        gens, [], [],
        inner_product={"kind": "orthonormal"},
        expected={"valid": True, "first_failure": None, "degenerates": True,
                  "classes": classes, "h_compatible": True,
                  "failed_stage": None},
    )


def build_torus2() -> dict:
    return _torus("torus2", ["e1", "e2"], 4)


def build_torus3() -> dict:
    return _torus("torus3", ["e1", "e2", "e3"], 8)


def build_heisenberg_poisson() -> dict:
    return lie_doc(
        "heisenberg_poisson",
        "Heisenberg Lie algebra [e1,e2] = e3 with the closed bivector "
        "e1^e3; the induced order-1 operator vanishes identically.",
        ["e1", "e2", "e3"],
        [["e1", "e2", [["e3", "1"]]]],
        [[1, [["1", ["e1", "e3"]]]]],
        inner_product={"kind": "orthonormal"},
        expected={"valid": True, "first_failure": None, "degenerates": True,
                  "classes": 6, "h_compatible": True, "failed_stage": None},
    )


def build_heisenberg_jacobi() -> dict:
    return lie_doc(
        "heisenberg_jacobi",
        "Heisenberg Lie algebra [e1,e2] = e3 with the bivector e1^e2, whose "
        "failure of closedness is absorbed by the order-2 operator coming "
        "from the trivector e1^e2^e3.  Carries genuine corrections at every "
        "stage, so it exercises the whole pipeline.",
        ["e1", "e2", "e3"],
        [["e1", "e2", [["e3", "1"]]]],
        [[1, [["1", ["e1", "e2"]]]],
         [2, [["1", ["e1", "e2", "e3"]]]]],
        inner_product={"kind": "orthonormal"},
        expected={"valid": True, "first_failure": None, "degenerates": True,
                  "classes": 6, "h_compatible": True, "failed_stage": None},
    )


def build_koszul_pair() -> dict:
    return {
        "schema": "bv-algebra/1",
        "name": "koszul_pair",
        "description": "Four-dimensional model 1, x, y = dx, xy with "
                       "x odd and both squares zero; the classes are 1 "
                       "and the top element.",
        "model": {
            "kind": "tables",
            "labels": ["1", "x", "y", "xy"],
            "degrees": [0, 1, 2, 3],
            "top_degree": 3,
            "unit": [[0, "1"]],
            "mult": [
                [0, 0, [[0, "1"]]],
                [0, 1, [[1, "1"]]],
                [0, 2, [[2, "1"]]],
                [0, 3, [[3, "1"]]],
                [1, 0, [[1, "1"]]],
                [1, 2, [[3, "1"]]],
                [2, 0, [[2, "1"]]],
                [2, 1, [[3, "1"]]],
                [3, 0, [[3, "1"]]],
            ],
            "d": [[1, [[2, "1"]]]],
            "deltas": [],
            "trace": [[3, "1"]],
        },
        "inner_product": {"kind": "orthonormal"},
        "expected": {"valid": True, "first_failure": None,
                     "degenerates": True, "classes": 2,
                     "h_compatible": True, "failed_stage": None},
    }


def build_filiform_nonpoisson() -> dict:
    return lie_doc(
        "filiform_nonpoisson",
        "Filiform Lie algebra [e1,e2] = e3, [e1,e3] = e4 with the "
        "non-Poisson bivector e1^e2: the square of the order-1 operator "
        "does not vanish, so the square-zero family fails at total order 2.",
        ["e1", "e2", "e3", "e4"],
        [["e1", "e2", [["e3", "1"]]],
         ["e1", "e3", [["e4", "1"]]]],
        [[1, [["1", ["e1", "e2"]]]]],
        inner_product={"kind": "orthonormal"},
        expected={"valid": False, "first_failure": "square_zero_family",
                  "degenerates": None, "classes": None,
                  "h_compatible": None, "failed_stage": "validation"},
    )


def build_theta_pair() -> dict:
    return {
        "schema": "bv-algebra/1",
        "name": "theta_pair",
        "description": "Square-zero generators u (degree 1) and v (degree 2) "
                       "with zero differential and the order-2 operator "
                       "reading off the top coefficient.  A valid cyclic "
                       "input whose transferred operator at order 2 is "
                       "nonzero, so the spectral sequence does not "
                       "degenerate and the master equation is obstructed.",
        "model": {
            "kind": "tables",
            "labels": ["1", "u", "v", "uv"],
            "degrees": [0, 1, 2, 3],
            "top_degree": 3,
            "unit": [[0, "1"]],
            "mult": [
                [0, 0, [[0, "1"]]],
                [0, 1, [[1, "1"]]],
                [0, 2, [[2, "1"]]],
                [0, 3, [[3, "1"]]],
                [1, 0, [[1, "1"]]],
                [1, 2, [[3, "1"]]],
                [2, 0, [[2, "1"]]],
                [2, 1, [[3, "1"]]],
                [3, 0, [[3, "1"]]],
            ],
            "d": [],
            "deltas": [[2, [[3, [[0, "1"]]]]]],
            "trace": [[3, "1"]],
        },
        "inner_product": {"kind": "orthonormal"},
        "expected": {"valid": True, "first_failure": None,
                     "degenerates": False, "classes": 4,
                     "h_compatible": True, "failed_stage": "degeneration"},
    }


def build_heisenberg_jacobi_badip() -> dict:
    doc = build_heisenberg_jacobi()
    doc["name"] = "heisenberg_jacobi_badip"
    doc["description"] = ("The heisenberg_jacobi data with a positive "
                          "definite inner product mixing e2 and e3; the "
                          "homotopy it produces is not compatible with the "
                          "trace pairing.")
    # identity everywhere except the degree-1 block, which mixes e2 and e3.
    entries = [[i, i, "1"] for i in range(8)]
    entries += [[2, 3, "1/2"], [3, 2, "1/2"]]
    doc["inner_product"] = {"kind": "gram", "entries": entries}
    doc["expected"] = {"valid": True, "first_failure": None,
                       "degenerates": True, "classes": 6,
                       "h_compatible": False, "failed_stage": "cyclic"}
    return doc


BUILDERS = {
    "torus2": build_torus2,
    "torus3": build_torus3,
    "heisenberg_poisson": build_heisenberg_poisson,
    "heisenberg_jacobi": build_heisenberg_jacobi,
    "koszul_pair": build_koszul_pair,
    "filiform_nonpoisson": build_filiform_nonpoisson,
    "theta_pair": build_theta_pair,
    "heisenberg_jacobi_badip": build_heisenberg_jacobi_badip,
}


def names() -> tuple[str, ...]:
    return ALL


def load_doc(name: str) -> dict:
    if name not in BUILDERS:
        raise InputError(f"unknown bundled instance {name!r}; "
                         f"choose from {', '.join(ALL)}")
    path = resources.files("bvfrob").joinpath("data").joinpath(f"{name}.json")
    with path.open("r", encoding="utf-8") as fh:
        return json.load(fh)


def load(name: str) -> tuple[BVAlgebra, InnerProduct, dict]:
    doc = load_doc(name)
    A = algebra_from_doc(doc)
    ip = inner_product_from_doc(doc.get("inner_product"), A.space)
    return A, ip, doc


def regenerate(target_dir: str) -> list[str]:
    import os

    os.makedirs(target_dir, exist_ok=True)
    written = []
    for name, build in BUILDERS.items():
        path = os.path.join(target_dir, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(build(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    return written


if __name__ == "__main__":
    import os

    here = os.path.dirname(os.path.abspath(__file__))
    for p in regenerate(os.path.join(here, "data")):
        print(p)
