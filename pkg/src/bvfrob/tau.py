"""Graded polynomials in formal deformation variables.

A `TauSeries` is a finite sum of terms ``c . m`` where ``m`` is a monomial in
graded variables and ``c`` is a `VSeries` coefficient written on the LEFT of
the monomial.  Monomials are sorted index tuples; odd variables square to
zero; reordering picks up Koszul signs from the variable degrees.

The coefficient-left convention fixes every sign rule:

* product:      (c1.m1)(c2.m2) = (-1)^{|m1||c2|} (c1 c2).(m1 m2)
* derivative:   @_i(c.m) = (-1)^{|t_i||c|} c . @_i(m), with @_i removing one
  occurrence of variable i and the sign (-1)^{|t_i| * (degrees before it)}
* operators act on coefficients directly, with no monomial sign.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .grading import SCALAR_SPACE, GradedSpace, Vec, vec_scale
from .series import INF, OperatorSeries, VSeries

Monomial = tuple
EMPTY: Monomial = ()


class TauSystem:
    """Named graded variables for a deformation problem."""

    __slots__ = ("names", "degrees")

    def __init__(self, names: Sequence[str], degrees: Sequence[int]):
        if len(names) != len(degrees):
            raise ValueError("names and degrees must align")
        self.names = tuple(names)
        self.degrees = tuple(int(d) for d in degrees)

    @property
    def count(self) -> int:
        return len(self.names)

    def is_odd(self, i: int) -> bool:
        return self.degrees[i] % 2 == 1

    def monomial_degree(self, m: Monomial) -> int:
        return sum(self.degrees[i] for i in m)

    def monomial_name(self, m: Monomial) -> str:
        if not m:
            return "1"
        return "*".join(self.names[i] for i in m)

    def __eq__(self, other):
        return (isinstance(other, TauSystem) and self.names == other.names
                and self.degrees == other.degrees)

    def __hash__(self):
        return hash((self.names, self.degrees))


def merge_monomials(degrees: Sequence[int], m1: Monomial, m2: Monomial):
    """Sorted merge with Koszul sign; None when an odd variable repeats."""
    sign = 1
    out: list[int] = []
    i, j = 0, 0
    odd_suffix = [0] * (len(m1) + 1)
    for k in range(len(m1) - 1, -1, -1):
        odd_suffix[k] = odd_suffix[k + 1] + (degrees[m1[k]] % 2)
    while i < len(m1) and j < len(m2):
        if m1[i] <= m2[j]:
            out.append(m1[i])
            i += 1
        else:
            v = m2[j]
            if degrees[v] % 2 and odd_suffix[i] % 2:
                sign = -sign
            out.append(v)
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    for k in range(len(out) - 1):
        if out[k] == out[k + 1] and degrees[out[k]] % 2:
            return None
    return sign, tuple(out)


def derive_monomial(degrees: Sequence[int], m: Monomial, i: int):
    """Left derivative of a monomial: (scalar, reduced monomial) or None."""
    total = Fraction(0)
    reduced = None
    prefix_parity = 0
    for s, v in enumerate(m):
        if v == i:
            sgn = -1 if (degrees[i] % 2 and prefix_parity % 2) else 1
            total += sgn
            if reduced is None:
                reduced = m[:s] + m[s + 1:]
        prefix_parity += degrees[v] % 2
    if reduced is None or total == 0:
        return None
    return total, reduced


def monomial_sort_key(m: Monomial):
    return (len(m), m)


class TauSeries:
    """Finite sum of VSeries coefficients times variable monomials."""

    __slots__ = ("system", "space", "degree", "terms")

    def __init__(self, system: TauSystem, space: GradedSpace, degree: int,
                 terms: Mapping[Monomial, VSeries] | None = None):
        self.system = system
        self.space = space
        self.degree = int(degree)
        stored: dict[Monomial, VSeries] = {}
        for m, c in (terms or {}).items():
            key = tuple(m)
            if c.space != space:
                raise ValueError("coefficient lives in the wrong space")
            want = self.degree - system.monomial_degree(key)
            if c.degree != want:
                raise ValueError(
                    f"coefficient of {key} has degree {c.degree}, expected {want}")
            if c.certified_zero():
                continue
            stored[key] = c
        self.terms = stored

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, system: TauSystem, space: GradedSpace, degree: int) -> "TauSeries":
        return cls(system, space, degree, {})

    @classmethod
    def variable(cls, system: TauSystem, space: GradedSpace, i: int,
                 coefficient: VSeries) -> "TauSeries":
        """The single term ``coefficient . t_i``."""
        return cls(system, space, coefficient.degree + system.degrees[i],
                   {(i,): coefficient})

    @classmethod
    def constant(cls, system: TauSystem, coefficient: VSeries) -> "TauSeries":
        return cls(system, coefficient.space, coefficient.degree,
                   {EMPTY: coefficient})

    # -- access ---------------------------------------------------------------

    def coefficient(self, m: Monomial) -> VSeries:
        key = tuple(m)
        if key in self.terms:
            return self.terms[key]
        return VSeries.zero(self.space,
                            self.degree - self.system.monomial_degree(key))

    def monomials(self) -> list[Monomial]:
        return sorted(self.terms, key=monomial_sort_key)

    def max_order(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def certified_zero(self) -> bool:
        return all(c.certified_zero() for c in self.terms.values())

    def trusted_zero(self) -> bool:
        return all(c.trusted_zero() for c in self.terms.values())

    # -- linear structure -----------------------------------------------------

    def _require_same_frame(self, other: "TauSeries") -> None:
        if (self.system != other.system or self.space != other.space
                or self.degree != other.degree):
            raise ValueError("tau series frame mismatch")

    def add(self, other: "TauSeries") -> "TauSeries":
        self._require_same_frame(other)
        terms: dict[Monomial, VSeries] = {}
        for m in set(self.terms) | set(other.terms):
            s = self.coefficient(m).add(other.coefficient(m))
            terms[m] = s
        return TauSeries(self.system, self.space, self.degree, terms)

    def sub(self, other: "TauSeries") -> "TauSeries":
        return self.add(other.scale(Fraction(-1)))

    def scale(self, c: Fraction) -> "TauSeries":
        return TauSeries(self.system, self.space, self.degree,
                         {m: v.scale(c) for m, v in self.terms.items()})

    def shift(self, s: int) -> "TauSeries":
        """Multiply every coefficient by the s-th power of the parameter."""
        return TauSeries(self.system, self.space, self.degree + 2 * s,
                         {m: v.shift(s) for m, v in self.terms.items()})

    def bar(self) -> "TauSeries":
        return TauSeries(self.system, self.space, self.degree,
                         {m: v.bar() for m, v in self.terms.items()})

    def truncate_order(self, n: int) -> "TauSeries":
        return TauSeries(self.system, self.space, self.degree,
                         {m: v for m, v in self.terms.items() if len(m) <= n})

    def order_part(self, n: int) -> "TauSeries":
        return TauSeries(self.system, self.space, self.degree,
                         {m: v for m, v in self.terms.items() if len(m) == n})

    def map_coefficients(self, f: Callable[[VSeries], VSeries],
                         degree_shift: int = 0,
                         space: GradedSpace | None = None) -> "TauSeries":
        return TauSeries(self.system, space or self.space,
                         self.degree + degree_shift,
                         {m: f(v) for m, v in self.terms.items()})

    # -- multiplicative structure ----------------------------------------------

    def combine(self, other: "TauSeries",
                bilinear: Callable[[Mapping, Mapping], Mapping],
                target: GradedSpace, max_order: float = INF,
                degree_shift: int = 0) -> "TauSeries":
        """Generic graded product with a coefficient-level bilinear map.

        `degree_shift` is the degree of the bilinear map itself (nonzero for
        pairings that land in scalars).
        """
        if self.system != other.system:
            raise ValueError("tau systems differ")
        degrees = self.system.degrees
        degree = self.degree + other.degree + degree_shift
        terms: dict[Monomial, VSeries] = {}
        for m1, c1 in self.terms.items():
            d1 = self.system.monomial_degree(m1)
            for m2, c2 in other.terms.items():
                if len(m1) + len(m2) > max_order:
                    continue
                merged = merge_monomials(degrees, m1, m2)
                if merged is None:
                    continue
                sgn, m = merged
                if d1 % 2 and c2.degree % 2:
                    sgn = -sgn
                prod = c1.convolve(c2, bilinear, target,
                                   c1.degree + c2.degree + degree_shift)
                if sgn < 0:
                    prod = prod.scale(Fraction(-1))
                if m in terms:
                    terms[m] = terms[m].add(prod)
                else:
                    terms[m] = prod
        return TauSeries(self.system, target, degree, terms)

    def scalar_combine(self, other: "TauSeries") -> "TauSeries":
        """Product where one factor has scalar coefficients."""
        if self.space == SCALAR_SPACE:
            def bil(s, v):
                c = s.get(0)
                return vec_scale(c, v) if c else {}
            return self.combine(other, bil, other.space)
        if other.space != SCALAR_SPACE:
            raise ValueError("one factor must have scalar coefficients")

        def bil(v, s):
            c = s.get(0)
            return vec_scale(c, v) if c else {}
        return self.combine(other, bil, self.space)

    def derivative(self, i: int) -> "TauSeries":
        degrees = self.system.degrees
        vdeg = degrees[i]
        terms: dict[Monomial, VSeries] = {}
        for m, c in self.terms.items():
            der = derive_monomial(degrees, m, i)
            if der is None:
                continue
            factor, reduced = der
            if vdeg % 2 and c.degree % 2:
                factor = -factor
            piece = c.scale(Fraction(factor))
            if reduced in terms:
                terms[reduced] = terms[reduced].add(piece)
            else:
                terms[reduced] = piece
        return TauSeries(self.system, self.space, self.degree - vdeg, terms)

    def apply_operator(self, op: OperatorSeries) -> "TauSeries":
        """Apply an operator series to every coefficient (no monomial sign)."""
        if op.source != self.space:
            raise ValueError("operator source mismatch")
        return TauSeries(self.system, op.target, self.degree + op.wdegree,
                         {m: op.apply(c) for m, c in self.terms.items()})

    def exp(self, unit: Vec, bilinear, max_order: int) -> "TauSeries":
        """Exponential by powers; requires degree 0 and no constant term."""
        if self.degree != 0:
            raise ValueError("exponential needs a degree-0 argument")
        if EMPTY in self.terms:
            raise ValueError("exponential needs a vanishing constant term")
        one = TauSeries.constant(self.system,
                                 VSeries.constant(self.space, unit, degree=0))
        acc = one
        power = one
        for l in range(1, max_order + 1):
            power = power.combine(self, bilinear, self.space,
                                  max_order=max_order).scale(Fraction(1, l))
            if not power.terms:
                break
            acc = acc.add(power)
        return acc

    def substitute(self, assignments: Sequence["TauSeries"],
                   target_system: TauSystem, max_order: float = INF) -> "TauSeries":
        """Replace variable i by the scalar-coefficient series assignments[i].

        Each assignment must carry scalar coefficients and have the same total
        degree as the variable it replaces.
        """
        if len(assignments) != self.system.count:
            raise ValueError("one assignment per variable required")
        for i, s in enumerate(assignments):
            if s.space != SCALAR_SPACE:
                raise ValueError("assignments must have scalar coefficients")
            if s.system != target_system:
                raise ValueError("assignments live in the wrong system")
            if s.degree != self.system.degrees[i]:
                raise ValueError(
                    f"assignment {i} has degree {s.degree}, "
                    f"expected {self.system.degrees[i]}")
        cache: dict[Monomial, TauSeries] = {}

        def scalar_bil(a, b):
            x = a.get(0)
            y = b.get(0)
            return {0: x * y} if x and y else {}

        def image(m: Monomial) -> TauSeries:
            if m in cache:
                return cache[m]
            if not m:
                out = TauSeries.constant(
                    target_system,
                    VSeries.constant(SCALAR_SPACE, {0: Fraction(1)}, degree=0))
            else:
                out = image(m[:-1]).combine(assignments[m[-1]], scalar_bil,
                                            SCALAR_SPACE, max_order=max_order)
            cache[m] = out
            return out

        result = TauSeries.zero(target_system, self.space, self.degree)
        for m, c in self.terms.items():
            img = image(m)
            spread = TauSeries(target_system, self.space,
                               c.degree + img.degree,
                               {mm: c.scalar_convolve(sv)
                                for mm, sv in img.terms.items()})
            result = result.add(spread)
        return result

    def __repr__(self):
        return (f"TauSeries(deg={self.degree}, "
                f"monomials={len(self.terms)}, order<={self.max_order()})")
