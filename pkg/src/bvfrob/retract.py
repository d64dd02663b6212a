"""Homotopy retract of a complex onto its cohomology via harmonic theory.

Given a positive-definite degree-preserving inner product, the adjoint
differential, Laplacian, harmonic subspace, Green operator and homotopy are
all exact rational constructions:

    d* = G^{-1} d^T G   (per degree block)
    L  = d d* + d* d
    harmonic = ker L,   projector P orthogonal onto it
    Green = (L + P)^{-1} (id - P),   h = -d* Green

The retract (iota, p, h) then satisfies, exactly:

    p iota = id,   h d + d h = iota p - id,
    h h = 0,  h iota = 0,  p h = 0,  d iota = 0,  p d = 0.

The harmonic basis is ordered by (degree, elimination order) and normalized so
that the unit of the algebra, when it is harmonic, is the first basis vector.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Mapping, Sequence

from .grading import GradedMap, GradedSpace, Vec, vec_degree
from .linalg import (
    invert_block,
    kernel_of_map,
    principal_minors_positive,
    rank,
    rref,
    solve,
)

ZERO = Fraction(0)
ONE = Fraction(1)


class InnerProduct:
    """Symmetric positive-definite pairing preserving the grading."""

    __slots__ = ("space", "blocks")

    def __init__(self, space: GradedSpace,
                 blocks: Mapping[int, Sequence[Sequence[Fraction]]]):
        self.space = space
        self.blocks = {int(d): [[Fraction(x) for x in row] for row in rows]
                       for d, rows in blocks.items()}

    @classmethod
    def orthonormal(cls, space: GradedSpace) -> "InnerProduct":
        blocks = {}
        for d in space.all_degrees():
            n = len(space.indices_of_degree(d))
            blocks[d] = [[ONE if i == j else ZERO for j in range(n)]
                         for i in range(n)]
        return cls(space, blocks)

    @classmethod
    def from_entries(cls, space: GradedSpace,
                     entries: Mapping[tuple[int, int], Fraction]) -> "InnerProduct":
        """Build from global-index entries; off-block entries are rejected."""
        blocks = {}
        pos = {}
        for d in space.all_degrees():
            idx = space.indices_of_degree(d)
            for r, i in enumerate(idx):
                pos[i] = (d, r)
            n = len(idx)
            blocks[d] = [[ZERO] * n for _ in range(n)]
        for (i, j), val in entries.items():
            val = Fraction(val)
            if not val:
                continue
            di, ri = pos[i]
            dj, rj = pos[j]
            if di != dj:
                raise ValueError(
                    f"inner product pairs different degrees: {i}, {j}")
            blocks[di][ri][rj] = val
        return cls(space, blocks)

    @classmethod
    def seeded(cls, space: GradedSpace, seed: int) -> "InnerProduct":
        """Deterministic random positive-definite pairing: M^T D M per block,
        with M unitriangular and D a positive diagonal."""
        rng = random.Random(seed)
        blocks = {}
        for d in space.all_degrees():
            n = len(space.indices_of_degree(d))
            m = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
            for i in range(n):
                for j in range(i + 1, n):
                    m[i][j] = Fraction(rng.randint(-2, 2), rng.randint(1, 3))
            diag = [Fraction(rng.randint(1, 4)) for _ in range(n)]
            gram = [[sum(m[k][i] * diag[k] * m[k][j] for k in range(n))
                     for j in range(n)] for i in range(n)]
            blocks[d] = gram
        return cls(space, blocks)

    # -- access ----------------------------------------------------------------

    def _positions(self) -> dict[int, tuple[int, int]]:
        pos = {}
        for d in self.space.all_degrees():
            for r, i in enumerate(self.space.indices_of_degree(d)):
                pos[i] = (d, r)
        return pos

    def gram_map(self) -> GradedMap:
        cols: dict[int, Vec] = {}
        for d, rows in self.blocks.items():
            idx = self.space.indices_of_degree(d)
            for c, j in enumerate(idx):
                col = {idx[r]: rows[r][c] for r in range(len(idx)) if rows[r][c]}
                if col:
                    cols[j] = col
        return GradedMap(self.space, self.space, 0, cols)

    def gram_inverse_map(self) -> GradedMap:
        cols: dict[int, Vec] = {}
        for d, rows in self.blocks.items():
            idx = self.space.indices_of_degree(d)
            if not idx:
                continue
            inv = invert_block(rows)
            for c, j in enumerate(idx):
                col = {idx[r]: inv[r][c] for r in range(len(idx)) if inv[r][c]}
                if col:
                    cols[j] = col
        return GradedMap(self.space, self.space, 0, cols)

    def pairing(self, u: Mapping, v: Mapping) -> Fraction:
        gv = self.gram_map().apply(v)
        return sum((c * gv.get(i, ZERO) for i, c in u.items()), ZERO)

    def validate(self) -> dict:
        checks = []
        bad = ""
        for d, rows in sorted(self.blocks.items()):
            n = len(rows)
            for i in range(n):
                for j in range(n):
                    if rows[i][j] != rows[j][i]:
                        bad = f"asymmetric block in degree {d}"
                        break
                if bad:
                    break
            if bad:
                break
        checks.append({"name": "symmetric", "passed": not bad, "detail": bad})
        bad = ""
        for d, rows in sorted(self.blocks.items()):
            if rows and not principal_minors_positive(rows):
                bad = f"block in degree {d} is not positive definite"
                break
        checks.append({"name": "positive_definite", "passed": not bad,
                       "detail": bad})
        return {"passed": all(c["passed"] for c in checks), "checks": checks}

    def adjoint(self, f: GradedMap) -> GradedMap:
        """Adjoint with respect to the pairing: G^{-1} f^T G."""
        if f.source != self.space or f.target != self.space:
            raise ValueError("adjoint needs an endomorphism of the paired space")
        return self.gram_inverse_map().compose(
            f.transpose()).compose(self.gram_map())


def block_inverse(f: GradedMap) -> GradedMap:
    """Inverse of a degree-0 endomorphism, block by degree."""
    if f.degree != 0 or f.source != f.target:
        raise ValueError("block inversion needs a degree-0 endomorphism")
    S = f.source
    cols: dict[int, Vec] = {}
    for d in S.all_degrees():
        idx = S.indices_of_degree(d)
        n = len(idx)
        dense = [[f.cols.get(idx[c], {}).get(idx[r], ZERO) for c in range(n)]
                 for r in range(n)]
        inv = invert_block(dense)
        for c in range(n):
            col = {idx[r]: inv[r][c] for r in range(n) if inv[r][c]}
            if col:
                cols[idx[c]] = col
    return GradedMap(S, S, 0, cols)


class Retract:
    """Inclusion, projection and homotopy of a complex onto its cohomology."""

    __slots__ = ("space", "classes", "iota", "p", "h",
                 "dstar", "laplacian", "green", "projector", "vectors")

    def __init__(self, space, classes, iota, p, h,
                 dstar, laplacian, green, projector, vectors):
        self.space = space
        self.classes = classes
        self.iota = iota
        self.p = p
        self.h = h
        self.dstar = dstar
        self.laplacian = laplacian
        self.green = green
        self.projector = projector
        self.vectors = vectors

    @property
    def rank(self) -> int:
        return self.classes.dim


def harmonic_basis(L: GradedMap, space: GradedSpace) -> list[Vec]:
    vectors = kernel_of_map(L)
    def key(v: Vec):
        deg = vec_degree(space, v)
        return (deg if deg is not None else 0, min(v))
    return sorted(vectors, key=key)


def _unit_first(vectors: list[Vec], unit: Vec, space: GradedSpace) -> tuple[list[Vec], bool]:
    """Re-basis the degree-0 harmonic block so the unit comes first."""
    deg0 = [v for v in vectors if vec_degree(space, v) == 0]
    rest = [v for v in vectors if vec_degree(space, v) != 0]
    if not deg0:
        return vectors, False
    # unit must lie in the degree-0 harmonic span
    rows = [{r: v.get(i, ZERO) for r, v in enumerate(deg0) if v.get(i)}
            for i in range(space.dim)]
    rhs = [unit.get(i, ZERO) for i in range(space.dim)]
    coords = solve(rows, rhs)
    if coords is None:
        return vectors, False
    # keep those original vectors that stay independent after the unit
    chosen: list[Vec] = [dict(unit)]
    stacked = [dict(unit)]
    for v in deg0:
        trial = stacked + [v]
        red, _ = rref([{i: w.get(i, ZERO) for i in range(space.dim) if w.get(i)}
                       for w in trial])
        if len(red) == len(trial):
            chosen.append(v)
            stacked.append(v)
        if len(chosen) == len(deg0):
            break
    out = chosen + rest
    # stable sort: inside each degree the constructed order is preserved
    out.sort(key=lambda v: vec_degree(space, v))
    return out, True


def build_retract(A, ip: InnerProduct) -> tuple[Retract, dict]:
    """Construct the harmonic retract; returns (retract, diagnostics)."""
    S = A.space
    d = A.d
    dstar = ip.adjoint(d)
    L = d.compose(dstar).add(dstar.compose(d))
    vectors = harmonic_basis(L, S)
    vectors, unit_ok = _unit_first(vectors, A.unit, S)

    labels = [f"a{r}" for r in range(len(vectors))]
    degrees = [vec_degree(S, v) for v in vectors]
    H = GradedSpace(labels, degrees)

    iota = GradedMap(H, S, 0, {r: dict(v) for r, v in enumerate(vectors)})

    # orthogonal projection onto the harmonic subspace
    m0 = [[ip.pairing(vectors[r], vectors[s]) for s in range(len(vectors))]
          for r in range(len(vectors))]
    minv = invert_block(m0) if vectors else []
    gram = ip.gram_map()
    pcols: dict[int, Vec] = {}
    for j in range(S.dim):
        gj = gram.apply(S.basis_vector(j))
        raw = [sum((vectors[s].get(i, ZERO) * c for i, c in gj.items()), ZERO)
               for s in range(len(vectors))]
        col = {}
        for r in range(len(vectors)):
            val = sum(minv[r][s] * raw[s] for s in range(len(vectors)))
            if val:
                col[r] = val
        if col:
            pcols[j] = col
    p = GradedMap(S, H, 0, pcols)

    projector = iota.compose(p)
    ident = GradedMap.identity(S)
    green = block_inverse(L.add(projector)).compose(ident.sub(projector))
    h = dstar.compose(green).scale(Fraction(-1))

    retract = Retract(S, H, iota, p, h, dstar, L, green, projector, vectors)
    diagnostics = {"unit_harmonic": unit_ok, "rank": H.dim}
    return retract, diagnostics


def verify_retract(A, R: Retract) -> dict:
    """Exact checks of every retract identity."""
    S = A.space
    d = A.d
    ident_h = GradedMap.identity(R.classes)
    ident = GradedMap.identity(S)
    checks = []

    def add(name, f: GradedMap, expect: GradedMap | None = None):
        ok = f == expect if expect is not None else f.is_zero()
        checks.append({"name": name, "passed": ok, "detail": ""})

    add("p_iota_identity", R.p.compose(R.iota), ident_h)
    lhs = R.h.compose(d).add(d.compose(R.h))
    rhs = R.iota.compose(R.p).sub(ident)
    checks.append({"name": "homotopy_identity", "passed": lhs == rhs,
                   "detail": ""})
    add("h_squared_zero", R.h.compose(R.h))
    add("h_iota_zero", R.h.compose(R.iota))
    add("p_h_zero", R.p.compose(R.h))
    add("d_iota_zero", d.compose(R.iota))
    add("p_d_zero", R.p.compose(d))
    return {"passed": all(c["passed"] for c in checks), "checks": checks}


def betti_numbers(A) -> dict[int, int]:
    """Ranks of cohomology from kernels and images of d, degree by degree."""
    S = A.space
    d = A.d
    out: dict[int, int] = {}
    for q in S.all_degrees():
        idx = S.indices_of_degree(q)
        nxt = S.indices_of_degree(q + 1)
        prv = S.indices_of_degree(q - 1)
        rows_q = [{c: d.cols.get(j, {}).get(i, ZERO)
                   for c, j in enumerate(idx) if d.cols.get(j, {}).get(i)}
                  for i in nxt]
        rows_p = [{c: d.cols.get(j, {}).get(i, ZERO)
                   for c, j in enumerate(prv) if d.cols.get(j, {}).get(i)}
                  for i in idx]
        rank_q = rank(rows_q)
        rank_p = rank(rows_p)
        out[q] = len(idx) - rank_q - rank_p
    return out


def cohomology_report(A, ip: InnerProduct) -> dict:
    """Betti numbers with the harmonic cross-check."""
    R, diag = build_retract(A, ip)
    betti = betti_numbers(A)
    harmonic: dict[int, int] = {}
    for v in R.vectors:
        q = vec_degree(A.space, v)
        harmonic[q] = harmonic.get(q, 0) + 1
    agree = all(betti.get(q, 0) == harmonic.get(q, 0)
                for q in set(betti) | set(harmonic))
    return {
        "betti": {str(q): betti[q] for q in sorted(betti)},
        "harmonic": {str(q): harmonic[q] for q in sorted(harmonic)},
        "hodge_isomorphism": agree,
        "rank": R.rank,
        "unit_harmonic": diag["unit_harmonic"],
        "representatives": [
            {"label": R.classes.labels[r], "degree": R.classes.degrees[r]}
            for r in range(R.classes.dim)
        ],
    }
