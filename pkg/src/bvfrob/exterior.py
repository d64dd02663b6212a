"""Exterior algebras on odd degree-1 generators and models built from them.

The wedge basis of Lambda(e_1..e_n) is indexed by strictly increasing index
tuples ordered by (length, lexicographic), so basis blocks come out sorted by
degree.  On top of this the module provides:

* the wedge product with inversion-count signs,
* interior contraction by vectors and by higher multivectors, where the
  contraction by a decomposable word acts right-to-left:
  the first vector of the word is contracted first,
* derivations extended from generator images (used for the differential
  induced by Lie structure constants: d e_k = - sum c^k_ij e_i e_j),
* the top-degree trace and the adjointness sign of contractions against it,
* `ce_model`, packaging all of the above into a `BVAlgebra` whose first
  higher operator is the commutator of a bivector contraction with d and
  whose order-k operator (k >= 2) is contraction by a (2k-1)-vector.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .bv import BVAlgebra
from .grading import SCALAR_SPACE, GradedMap, GradedSpace, Vec, vec_add, vec_scale

ONE = Fraction(1)


def normalize_word(word: Sequence[int]):
    """Sort a generator word, tracking the sign; None if an index repeats."""
    w = list(word)
    sign = 1
    for i in range(1, len(w)):
        j = i
        while j > 0 and w[j - 1] > w[j]:
            w[j - 1], w[j] = w[j], w[j - 1]
            sign = -sign
            j -= 1
    for i in range(len(w) - 1):
        if w[i] == w[i + 1]:
            return None
    return sign, tuple(w)


def merge_disjoint(t1: tuple, t2: tuple):
    """Wedge of two sorted monomials: (sign, merged) or None on overlap."""
    out: list[int] = []
    sign = 1
    i, j = 0, 0
    while i < len(t1) and j < len(t2):
        if t1[i] == t2[j]:
            return None
        if t1[i] < t2[j]:
            out.append(t1[i])
            i += 1
        else:
            if (len(t1) - i) % 2:
                sign = -sign
            out.append(t2[j])
            j += 1
    out.extend(t1[i:])
    out.extend(t2[j:])
    return sign, tuple(out)


class WedgeBasis:
    """Wedge monomial basis of the exterior algebra on named generators."""

    __slots__ = ("names", "space", "tuples", "index")

    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)
        n = len(self.names)
        tuples: list[tuple] = []
        for size in range(n + 1):
            tuples.extend(combinations(range(n), size))
        self.tuples = tuples
        self.index = {t: i for i, t in enumerate(tuples)}
        labels = ["1" if not t else "^".join(self.names[i] for i in t)
                  for t in tuples]
        self.space = GradedSpace(labels, [len(t) for t in tuples])

    @property
    def n(self) -> int:
        return len(self.names)

    def unit(self) -> Vec:
        return {self.index[()]: ONE}

    def top_index(self) -> int:
        return self.index[tuple(range(self.n))]

    def monomial(self, word: Sequence[int]) -> Vec:
        norm = normalize_word(word)
        if norm is None:
            return {}
        sign, t = norm
        return {self.index[t]: Fraction(sign)}

    def wedge(self, u: Mapping, v: Mapping) -> Vec:
        out: Vec = {}
        for i, ci in u.items():
            t1 = self.tuples[i]
            for j, cj in v.items():
                m = merge_disjoint(t1, self.tuples[j])
                if m is None:
                    continue
                sign, t = m
                k = self.index[t]
                val = out.get(k, Fraction(0)) + sign * ci * cj
                if val:
                    out[k] = val
                else:
                    out.pop(k, None)
        return out

    def mult_table(self) -> dict[tuple[int, int], Vec]:
        table: dict[tuple[int, int], Vec] = {}
        for i, t1 in enumerate(self.tuples):
            for j, t2 in enumerate(self.tuples):
                m = merge_disjoint(t1, t2)
                if m is None:
                    continue
                sign, t = m
                table[(i, j)] = {self.index[t]: Fraction(sign)}
        return table

    def trace_map(self) -> GradedMap:
        """Functional reading off the top-monomial coefficient."""
        top = self.top_index()
        return GradedMap(self.space, SCALAR_SPACE, -self.n, {top: {0: ONE}})

    def contraction_vector(self, g: int) -> GradedMap:
        """Interior product with generator g: odd derivation, degree -1."""
        cols: dict[int, Vec] = {}
        for j, t in enumerate(self.tuples):
            if g not in t:
                continue
            pos = t.index(g)
            reduced = t[:pos] + t[pos + 1:]
            sign = -1 if pos % 2 else 1
            cols[j] = {self.index[reduced]: Fraction(sign)}
        return GradedMap(self.space, self.space, -1, cols)

    def contraction_word(self, word: Sequence[int]) -> GradedMap:
        """Contraction by a decomposable multivector word.

        The first listed vector acts first:
        contraction(v1 ^ ... ^ vk) = c(vk) o ... o c(v1).
        """
        acc = GradedMap.identity(self.space)
        for g in word:
            acc = self.contraction_vector(g).compose(acc)
        return acc

    def contraction_multivector(self, terms: Sequence[tuple[Fraction, Sequence[int]]],
                                arity: int) -> GradedMap:
        """Sum of word contractions; every word must have the given length."""
        acc = GradedMap.zero(self.space, self.space, -arity)
        for coeff, word in terms:
            if len(word) != arity:
                raise ValueError(f"word {tuple(word)} does not have length {arity}")
            acc = acc.add(self.contraction_word(word).scale(Fraction(coeff)))
        return acc

    def derivation(self, images: Sequence[Vec], degree: int) -> GradedMap:
        """Odd derivation determined by generator images (degree must be odd)."""
        if degree % 2 == 0:
            raise ValueError("only odd derivations are extended here")
        cols: dict[int, Vec] = {}
        for j, t in enumerate(self.tuples):
            acc: Vec = {}
            for pos in range(len(t)):
                img = images[t[pos]]
                if not img:
                    continue
                left = {self.index[t[:pos]]: ONE}
                right = {self.index[t[pos + 1:]]: ONE}
                piece = self.wedge(left, self.wedge(img, right))
                if pos % 2:
                    piece = vec_scale(Fraction(-1), piece)
                acc = vec_add(acc, piece)
            if acc:
                cols[j] = acc
        return GradedMap(self.space, self.space, degree, cols)


def lie_differential(wb: WedgeBasis,
                     brackets: Mapping[tuple[int, int], Mapping[int, Fraction]]
                     ) -> GradedMap:
    """Differential with d e_k = - sum_{i<j} c^k_ij e_i e_j."""
    images: list[Vec] = [{} for _ in range(wb.n)]
    for (i, j), comps in brackets.items():
        if i == j:
            raise ValueError("bracket of a generator with itself must vanish")
        if i > j:
            i, j = j, i
            comps = {k: -Fraction(c) for k, c in comps.items()}
        pair = wb.monomial((i, j))
        for k, c in comps.items():
            images[k] = vec_add(images[k],
                                vec_scale(-Fraction(c), pair))
    return wb.derivation(images, 1)


def contraction_sign_identity(wb: WedgeBasis, word: Sequence[int]) -> bool:
    """Adjointness of a length-k contraction against the top trace.

    Checks trace((w . a) ^ b) = (-1)^{k(|a|+1)} trace(a ^ (w . b)) on all
    basis pairs.
    """
    op = wb.contraction_word(word)
    k = len(word)
    tr = wb.trace_map()
    for ai, ta in enumerate(wb.tuples):
        da = len(ta)
        a = {ai: ONE}
        wa = op.apply(a)
        sign = Fraction(-1 if (k * (da + 1)) % 2 else 1)
        for bi in range(wb.space.dim):
            b = {bi: ONE}
            lhs = tr.apply(wb.wedge(wa, b)).get(0, Fraction(0))
            rhs = sign * tr.apply(wb.wedge(a, op.apply(b))).get(0, Fraction(0))
            if lhs != rhs:
                return False
    return True


def ce_model(names: Sequence[str],
             brackets: Mapping[tuple[int, int], Mapping[int, Fraction]],
             multivectors: Mapping[int, Sequence[tuple[Fraction, Sequence[int]]]]
             ) -> BVAlgebra:
    """Exterior-algebra model of a Lie structure with contraction operators.

    `multivectors[k]` holds the words of the (2k-1)-vector driving the order-k
    operator.  For k = 1 the operator is the commutator of the bivector
    contraction with d; for k >= 2 it is the plain contraction.
    """
    wb = WedgeBasis(names)
    d = lie_differential(wb, brackets)
    deltas: dict[int, GradedMap] = {}
    for k, terms in multivectors.items():
        k = int(k)
        if k < 1:
            raise ValueError("operator index must be >= 1")
        arity = 2 * k - 1 if k >= 2 else 2
        contraction = wb.contraction_multivector(list(terms), arity)
        if k == 1:
            deltas[1] = contraction.compose(d).sub(d.compose(contraction))
        else:
            deltas[k] = contraction
    return BVAlgebra(wb.space, wb.unit(), wb.mult_table(), d, deltas,
                     wb.trace_map(), wb.n)


def wedge_basis_of(A: BVAlgebra) -> WedgeBasis | None:
    """Recover the generator names when the space looks like a wedge basis."""
    labels = A.space.labels
    if not labels or labels[0] != "1":
        return None
    gens = [lab for lab, deg in zip(labels, A.space.degrees) if deg == 1]
    if not gens:
        return None
    wb = WedgeBasis(gens)
    if wb.space == A.space:
        return wb
    return None
