"""Graded vector spaces, Koszul signs and sparse graded maps over exact rationals.

All scalars are `fractions.Fraction`; there is no floating point anywhere in this
package.  Vectors are sparse dicts mapping basis index to a nonzero Fraction.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Scalar = Fraction
Vec = dict  # index -> Fraction, zero entries never stored

ZERO = Fraction(0)
ONE = Fraction(1)


def as_scalar(value) -> Fraction:
    """Parse a scalar from int, Fraction or a 'p/q' string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact scalar: {value!r}")


def format_scalar(x: Fraction) -> str:
    return str(x)


def koszul_sign(permutation: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign picked up when graded symbols x_0..x_{r-1} are reordered.

    `permutation[s]` is the original position of the symbol placed at slot s.
    Each transposition of two adjacent odd symbols contributes a factor -1.
    """
    perm = list(permutation)
    if sorted(perm) != list(range(len(degrees))):
        raise ValueError("not a permutation")
    count = 0
    for s in range(len(perm)):
        for t in range(s + 1, len(perm)):
            if perm[s] > perm[t] and degrees[perm[s]] % 2 and degrees[perm[t]] % 2:
                count += 1
    return -1 if count % 2 else 1


class GradedSpace:
    """Finite ordered basis with integer degrees."""

    __slots__ = ("labels", "degrees", "index", "_by_degree")

    def __init__(self, labels: Iterable[str], degrees: Iterable[int]):
        self.labels = tuple(labels)
        self.degrees = tuple(int(d) for d in degrees)
        if len(self.labels) != len(self.degrees):
            raise ValueError("labels and degrees differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate basis labels")
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        by_degree: dict[int, list[int]] = {}
        for i, d in enumerate(self.degrees):
            by_degree.setdefault(d, []).append(i)
        self._by_degree = {d: tuple(ix) for d, ix in by_degree.items()}

    @property
    def dim(self) -> int:
        return len(self.labels)

    def degree_span(self) -> tuple[int, int]:
        """(min, max) basis degree; (0, 0) for the zero space."""
        if not self.degrees:
            return (0, 0)
        return (min(self.degrees), max(self.degrees))

    def all_degrees(self) -> tuple[int, ...]:
        return tuple(sorted(self._by_degree))

    def indices_of_degree(self, d: int) -> tuple[int, ...]:
        return self._by_degree.get(d, ())

    def basis_vector(self, i: int) -> Vec:
        return {i: ONE}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GradedSpace)
            and self.labels == other.labels
            and self.degrees == other.degrees
        )

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self.labels, self.degrees))

    def __repr__(self):
        return f"GradedSpace(dim={self.dim}, degrees={sorted(set(self.degrees))})"


# scalars live in a one-dimensional degree-0 space so that scalar-valued series
# reuse the vector-series machinery unchanged
SCALAR_SPACE = GradedSpace(("k",), (0,))


def scalar_vec(x: Fraction) -> Vec:
    x = as_scalar(x)
    return {} if x == 0 else {0: x}


def vec_add(u: Mapping, v: Mapping) -> Vec:
    out = dict(u)
    for i, c in v.items():
        s = out.get(i, ZERO) + c
        if s:
            out[i] = s
        else:
            out.pop(i, None)
    return out


def vec_sub(u: Mapping, v: Mapping) -> Vec:
    out = dict(u)
    for i, c in v.items():
        s = out.get(i, ZERO) - c
        if s:
            out[i] = s
        else:
            out.pop(i, None)
    return out


def vec_scale(c: Fraction, v: Mapping) -> Vec:
    if not c:
        return {}
    return {i: c * x for i, x in v.items()}


def vec_eq(u: Mapping, v: Mapping) -> bool:
    return dict(u) == dict(v)


def vec_degree(space: GradedSpace, v: Mapping) -> int | None:
    """Degree of a homogeneous vector, None for zero; raises if mixed."""
    deg = None
    for i in v:
        d = space.degrees[i]
        if deg is None:
            deg = d
        elif d != deg:
            raise ValueError(f"inhomogeneous vector: degrees {deg} and {d}")
    return deg


def vec_format(space: GradedSpace, v: Mapping) -> str:
    if not v:
        return "0"
    parts = []
    for i in sorted(v):
        c = v[i]
        parts.append(f"{format_scalar(c)}*{space.labels[i]}")
    return " + ".join(parts)


class GradedMap:
    """Sparse degree-homogeneous linear map between graded spaces.

    Stored column-wise: `cols[j]` is the image of basis vector j as a sparse
    vector in the target.  Entries may only connect basis elements with
    deg(target) = deg(source) + degree; `check_degrees` enforces this.
    """

    __slots__ = ("source", "target", "degree", "cols")

    def __init__(self, source: GradedSpace, target: GradedSpace, degree: int,
                 cols: Mapping[int, Mapping] | None = None):
        self.source = source
        self.target = target
        self.degree = int(degree)
        self.cols: dict[int, Vec] = {}
        if cols:
            for j, col in cols.items():
                clean = {i: c for i, c in col.items() if c}
                if clean:
                    self.cols[j] = clean

    @classmethod
    def zero(cls, source: GradedSpace, target: GradedSpace, degree: int) -> "GradedMap":
        return cls(source, target, degree)

    @classmethod
    def identity(cls, space: GradedSpace) -> "GradedMap":
        return cls(space, space, 0, {j: {j: ONE} for j in range(space.dim)})

    @classmethod
    def from_entries(cls, source: GradedSpace, target: GradedSpace, degree: int,
                     entries: Iterable[tuple[int, int, Fraction]]) -> "GradedMap":
        """entries: iterable of (target_index, source_index, value)."""
        cols: dict[int, Vec] = {}
        for ti, sj, val in entries:
            val = as_scalar(val)
            if not val:
                continue
            col = cols.setdefault(sj, {})
            col[ti] = col.get(ti, ZERO) + val
        return cls(source, target, degree, cols)

    def check_degrees(self) -> None:
        for j, col in self.cols.items():
            want = self.source.degrees[j] + self.degree
            for i in col:
                if self.target.degrees[i] != want:
                    raise ValueError(
                        f"entry ({self.target.labels[i]}, {self.source.labels[j]}) "
                        f"violates degree {self.degree}"
                    )

    def apply(self, v: Mapping) -> Vec:
        out: Vec = {}
        for j, c in v.items():
            col = self.cols.get(j)
            if not col:
                continue
            for i, a in col.items():
                s = out.get(i, ZERO) + c * a
                if s:
                    out[i] = s
                else:
                    del out[i]
        return out

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self ∘ other."""
        if other.target != self.source:
            raise ValueError("composition mismatch")
        cols = {}
        for j, col in other.cols.items():
            img = self.apply(col)
            if img:
                cols[j] = img
        return GradedMap(other.source, self.target, self.degree + other.degree, cols)

    def add(self, other: "GradedMap") -> "GradedMap":
        self._check_same_shape(other)
        cols = {j: dict(col) for j, col in self.cols.items()}
        for j, col in other.cols.items():
            merged = vec_add(cols.get(j, {}), col)
            if merged:
                cols[j] = merged
            else:
                cols.pop(j, None)
        return GradedMap(self.source, self.target, self.degree, cols)

    def sub(self, other: "GradedMap") -> "GradedMap":
        return self.add(other.scale(Fraction(-1)))

    def scale(self, c: Fraction) -> "GradedMap":
        if not c:
            return GradedMap.zero(self.source, self.target, self.degree)
        return GradedMap(self.source, self.target, self.degree,
                         {j: vec_scale(c, col) for j, col in self.cols.items()})

    def neg(self) -> "GradedMap":
        return self.scale(Fraction(-1))

    def is_zero(self) -> bool:
        return not self.cols

    def entries(self) -> list[tuple[int, int, Fraction]]:
        out = []
        for j in sorted(self.cols):
            for i in sorted(self.cols[j]):
                out.append((i, j, self.cols[j][i]))
        return out

    def transpose(self) -> "GradedMap":
        cols: dict[int, Vec] = {}
        for j, col in self.cols.items():
            for i, c in col.items():
                cols.setdefault(i, {})[j] = c
        return GradedMap(self.target, self.source, -self.degree, cols)

    def _check_same_shape(self, other: "GradedMap") -> None:
        if (other.source != self.source or other.target != self.target
                or other.degree != self.degree):
            raise ValueError("graded map shape mismatch")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GradedMap)
            and self.source == other.source
            and self.target == other.target
            and self.degree == other.degree
            and self.cols == other.cols
        )

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self):
        return (f"GradedMap(deg={self.degree}, nnz="
                f"{sum(len(c) for c in self.cols.values())})")
