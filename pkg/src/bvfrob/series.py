"""Formal series in the weight-2 parameter with exact trusted windows.

Two kinds of series appear in the pipeline:

* `VSeries` — Laurent series whose coefficients are homogeneous vectors in one
  graded space.  A series of total degree D stores the coefficient of the k-th
  power in the degree D-2k slice.
* `OperatorSeries` — series of graded maps with nonnegative exponents.

Every series carries a trusted window.  `lo` is structural (the series is
exactly zero below it), `hi` is the last exponent whose coefficient is known;
reading beyond `hi` raises `WindowError` unless homogeneity forces the
coefficient to vanish.  Because all pipeline series are homogeneous and all
spaces are finite dimensional, coefficients outside a finite exponent range are
forced to zero, which lets windows widen to "exact" (hi = infinity) whenever the
stored range covers the whole possible support.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .grading import (
    SCALAR_SPACE,
    ZERO,
    GradedMap,
    GradedSpace,
    Vec,
    vec_add,
    vec_degree,
    vec_scale,
)

INF = math.inf


class WindowError(RuntimeError):
    """Read of a Laurent coefficient outside the trusted window."""


def forced_exponent_range(space: GradedSpace, degree: int) -> tuple[float, float]:
    """Exponent range outside which homogeneous coefficients must vanish."""
    dmin, dmax = space.degree_span()
    lo = math.ceil(Fraction(degree - dmax, 2))
    hi = math.floor(Fraction(degree - dmin, 2))
    return (lo, hi)


class VSeries:
    """Laurent series with homogeneous vector coefficients."""

    __slots__ = ("space", "degree", "lo", "hi", "coeffs")

    def __init__(self, space: GradedSpace, degree: int,
                 coeffs: Mapping[int, Mapping] | None = None,
                 lo: int = 0, hi: float = INF):
        self.space = space
        self.degree = int(degree)
        flo, fhi = forced_exponent_range(space, self.degree)
        self.lo = max(int(lo), flo)
        stored: dict[int, Vec] = {}
        for e, v in (coeffs or {}).items():
            clean = {i: c for i, c in v.items() if c}
            if not clean:
                continue
            if e > hi or e < self.lo:
                raise ValueError(f"coefficient at exponent {e} outside window")
            d = vec_degree(space, clean)
            if d != self.degree - 2 * e:
                raise ValueError(
                    f"coefficient at exponent {e} has degree {d}, "
                    f"expected {self.degree - 2 * e}")
            stored[e] = clean
        self.coeffs = stored
        # widen: if the trusted range covers the whole possible support the
        # series is known exactly
        if hi >= fhi:
            self.hi = INF
        else:
            self.hi = hi
        if not self.coeffs and self.hi == INF:
            self.lo = flo

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, space: GradedSpace, degree: int) -> "VSeries":
        return cls(space, degree, {}, lo=0, hi=INF)

    @classmethod
    def constant(cls, space: GradedSpace, v: Mapping, degree: int | None = None) -> "VSeries":
        d = vec_degree(space, v)
        if degree is None:
            if d is None:
                raise ValueError("degree required for zero constant")
            degree = d
        if d is not None and d != degree:
            raise ValueError("constant has wrong degree")
        return cls(space, degree, {0: dict(v)} if v else {}, lo=0, hi=INF)

    # -- window bookkeeping --------------------------------------------------

    def forced_range(self) -> tuple[float, float]:
        return forced_exponent_range(self.space, self.degree)

    def coeff(self, e: int) -> Vec:
        if e in self.coeffs:
            return self.coeffs[e]
        if e < self.lo or e <= self.hi:
            return {}
        _, fhi = self.forced_range()
        if e > fhi:
            return {}
        raise WindowError(
            f"coefficient at exponent {e} is outside the trusted window "
            f"(trusted through {self.hi})")

    def exponents(self) -> list[int]:
        return sorted(self.coeffs)

    def is_exact(self) -> bool:
        return self.hi == INF

    def certified_zero(self) -> bool:
        """True when the series is exactly zero (not merely zero where trusted)."""
        return not self.coeffs and self.hi == INF

    def trusted_zero(self) -> bool:
        return not self.coeffs

    # -- arithmetic ----------------------------------------------------------

    def _require_same_frame(self, other: "VSeries") -> None:
        if self.space != other.space or self.degree != other.degree:
            raise ValueError("series frame mismatch (space or degree)")

    def add(self, other: "VSeries") -> "VSeries":
        self._require_same_frame(other)
        lo = min(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        coeffs: dict[int, Vec] = {}
        for e in set(self.coeffs) | set(other.coeffs):
            if e > hi:
                continue
            v = vec_add(self.coeffs.get(e, {}), other.coeffs.get(e, {}))
            if v:
                coeffs[e] = v
        return VSeries(self.space, self.degree, coeffs, lo=lo, hi=hi)

    def sub(self, other: "VSeries") -> "VSeries":
        return self.add(other.scale(Fraction(-1)))

    def scale(self, c: Fraction) -> "VSeries":
        if not c:
            return VSeries(self.space, self.degree, {}, lo=self.lo, hi=self.hi)
        return VSeries(self.space, self.degree,
                       {e: vec_scale(c, v) for e, v in self.coeffs.items()},
                       lo=self.lo, hi=self.hi)

    def shift(self, s: int) -> "VSeries":
        """Multiply by the s-th power of the formal parameter (degree +2s)."""
        return VSeries(self.space, self.degree + 2 * s,
                       {e + s: v for e, v in self.coeffs.items()},
                       lo=self.lo + s,
                       hi=self.hi + s if self.hi != INF else INF)

    def bar(self) -> "VSeries":
        """Parameter sign flip: negate odd-exponent coefficients."""
        return VSeries(self.space, self.degree,
                       {e: (vec_scale(Fraction(-1), v) if e % 2 else v)
                        for e, v in self.coeffs.items()},
                       lo=self.lo, hi=self.hi)

    def truncate(self, hi: float) -> "VSeries":
        coeffs = {e: v for e, v in self.coeffs.items() if e <= hi}
        return VSeries(self.space, self.degree, coeffs, lo=self.lo,
                       hi=min(self.hi, hi))

    def nonneg_part(self) -> "VSeries":
        return VSeries(self.space, self.degree,
                       {e: v for e, v in self.coeffs.items() if e >= 0},
                       lo=0, hi=self.hi)

    def neg_part(self) -> "VSeries":
        """Strictly negative exponents; exact once trust reaches exponent -1."""
        coeffs = {e: v for e, v in self.coeffs.items() if e < 0}
        hi = INF if self.hi >= -1 else self.hi
        return VSeries(self.space, self.degree, coeffs, lo=self.lo, hi=hi)

    def convolve(self, other: "VSeries",
                 bilinear: Callable[[Mapping, Mapping], Mapping],
                 target: GradedSpace, degree: int) -> "VSeries":
        """Cauchy product with coefficient-level bilinear map.

        Trust narrows to min(hi1 + lo2, lo1 + hi2): beyond that, unknown
        coefficients of one factor could contribute.
        """
        lo = self.lo + other.lo
        hi = min(self.hi + other.lo, self.lo + other.hi)
        _, fhi = forced_exponent_range(target, degree)
        top = min(hi, fhi)
        coeffs: dict[int, Vec] = {}
        for e1, v1 in self.coeffs.items():
            for e2, v2 in other.coeffs.items():
                e = e1 + e2
                if e > top:
                    continue
                w = bilinear(v1, v2)
                if w:
                    prev = coeffs.get(e)
                    coeffs[e] = vec_add(prev, w) if prev else dict(w)
        coeffs = {e: v for e, v in coeffs.items() if v}
        return VSeries(target, degree, coeffs, lo=lo, hi=hi)

    def scalar_convolve(self, other: "VSeries") -> "VSeries":
        """Multiply by a scalar-valued series (either operand scalar)."""
        if self.space == SCALAR_SPACE:
            def bil(s, v):
                return vec_scale(s.get(0, ZERO), v)
            return self.convolve(other, bil, other.space, self.degree + other.degree)
        if other.space != SCALAR_SPACE:
            raise ValueError("one operand must be scalar-valued")

        def bil(v, s):
            return vec_scale(s.get(0, ZERO), v)
        return self.convolve(other, bil, self.space, self.degree + other.degree)

    def eq_trusted(self, other: "VSeries") -> bool:
        """Equality on the intersection of trusted windows."""
        self._require_same_frame(other)
        hi = min(self.hi, other.hi)
        _, fhi = self.forced_range()
        for e in range(int(self.forced_range()[0]), int(min(hi, fhi)) + 1):
            if self.coeff(e) != other.coeff(e):
                return False
        return True

    def __repr__(self):
        return (f"VSeries(deg={self.degree}, exps={self.exponents()}, "
                f"hi={'inf' if self.hi == INF else self.hi})")


def scalar_series(values: Mapping[int, Fraction], degree: int,
                  lo: int = 0, hi: float = INF) -> VSeries:
    coeffs = {e: {0: Fraction(v)} for e, v in values.items() if v}
    return VSeries(SCALAR_SPACE, degree, coeffs, lo=lo, hi=hi)


class OperatorSeries:
    """Nonnegative-exponent series of graded maps.

    `wdegree` is the weighted degree: the coefficient at exponent m is a map of
    degree wdegree - 2m.  `hi` is the trusted order (INF = exact).
    """

    __slots__ = ("source", "target", "wdegree", "coeffs", "hi")

    def __init__(self, source: GradedSpace, target: GradedSpace, wdegree: int,
                 coeffs: Sequence[GradedMap], hi: float = INF):
        self.source = source
        self.target = target
        self.wdegree = int(wdegree)
        fhi = self.forced_hi(source, target, self.wdegree)
        clean = list(coeffs)
        for m, f in enumerate(clean):
            if f.source != source or f.target != target:
                raise ValueError("coefficient map has wrong spaces")
            if f.degree != self.wdegree - 2 * m:
                raise ValueError(
                    f"coefficient {m} has degree {f.degree}, "
                    f"expected {self.wdegree - 2 * m}")
        while clean and clean[-1].is_zero():
            clean.pop()
        self.coeffs = clean
        # once the trusted order covers the whole possible support the series
        # is known exactly
        self.hi = INF if hi >= fhi else hi
        if len(self.coeffs) - 1 > self.hi:
            raise ValueError("stored coefficients beyond trusted order")

    @staticmethod
    def forced_hi(source: GradedSpace, target: GradedSpace, wdegree: int) -> float:
        smin, smax = source.degree_span()
        tmin, tmax = target.degree_span()
        # a map of degree wdegree-2m can be nonzero only if some source degree
        # plus that lands in the target range
        return math.floor(Fraction(wdegree + smax - tmin, 2))

    @classmethod
    def identity(cls, space: GradedSpace) -> "OperatorSeries":
        return cls(space, space, 0, [GradedMap.identity(space)])

    @classmethod
    def single(cls, f: GradedMap, order: int = 0) -> "OperatorSeries":
        wdeg = f.degree + 2 * order
        pads = [GradedMap.zero(f.source, f.target, wdeg - 2 * m)
                for m in range(order)]
        return cls(f.source, f.target, wdeg, pads + [f])

    def coeff(self, m: int) -> GradedMap:
        if m < 0:
            raise ValueError("operator series have nonnegative exponents")
        if m < len(self.coeffs):
            return self.coeffs[m]
        if m <= self.hi or m > self.forced_hi(self.source, self.target, self.wdegree):
            return GradedMap.zero(self.source, self.target, self.wdegree - 2 * m)
        raise WindowError(f"operator coefficient {m} beyond trusted order {self.hi}")

    def order_span(self) -> int:
        """Largest exponent that can carry a nonzero coefficient."""
        fhi = self.forced_hi(self.source, self.target, self.wdegree)
        return int(min(self.hi, max(fhi, -1)))

    def is_exact(self) -> bool:
        return self.hi == INF

    def add(self, other: "OperatorSeries") -> "OperatorSeries":
        if (self.source != other.source or self.target != other.target
                or self.wdegree != other.wdegree):
            raise ValueError("operator series shape mismatch")
        hi = min(self.hi, other.hi)
        top = min(hi, self.forced_hi(self.source, self.target, self.wdegree))
        coeffs = [self.coeff(m).add(other.coeff(m)) for m in range(int(top) + 1)] \
            if top >= 0 else []
        return OperatorSeries(self.source, self.target, self.wdegree, coeffs, hi=hi)

    def sub(self, other: "OperatorSeries") -> "OperatorSeries":
        return self.add(other.scale(Fraction(-1)))

    def scale(self, c: Fraction) -> "OperatorSeries":
        return OperatorSeries(self.source, self.target, self.wdegree,
                              [f.scale(c) for f in self.coeffs], hi=self.hi)

    def compose(self, other: "OperatorSeries") -> "OperatorSeries":
        """self ∘ other, trusted through min of the operand windows."""
        if other.target != self.source:
            raise ValueError("operator series composition mismatch")
        wdeg = self.wdegree + other.wdegree
        hi = min(self.hi, other.hi)
        top = min(hi, self.forced_hi(other.source, self.target, wdeg))
        coeffs = []
        for m in range(int(top) + 1) if top >= 0 else []:
            acc = GradedMap.zero(other.source, self.target, wdeg - 2 * m)
            for i in range(m + 1):
                f = self.coeff(i)
                g = other.coeff(m - i)
                if f.is_zero() or g.is_zero():
                    continue
                acc = acc.add(f.compose(g))
            coeffs.append(acc)
        return OperatorSeries(other.source, self.target, wdeg, coeffs, hi=hi)

    def apply(self, x: VSeries) -> VSeries:
        if x.space != self.source:
            raise ValueError("operator series applied to wrong space")
        degree = x.degree + self.wdegree
        lo = x.lo
        hi = min(self.hi + x.lo, x.hi)
        _, fhi = forced_exponent_range(self.target, degree)
        top = min(hi, fhi)
        coeffs: dict[int, Vec] = {}
        span = self.order_span()
        for m in range(0, span + 1):
            f = self.coeff(m)
            if f.is_zero():
                continue
            for e, v in x.coeffs.items():
                ee = e + m
                if ee > top:
                    continue
                w = f.apply(v)
                if w:
                    prev = coeffs.get(ee)
                    coeffs[ee] = vec_add(prev, w) if prev else w
        coeffs = {e: v for e, v in coeffs.items() if v}
        return VSeries(self.target, degree, coeffs, lo=lo, hi=hi)

    def truncate(self, order: float) -> "OperatorSeries":
        """Restrict trust to the given order (no-op when it covers the
        whole forced support)."""
        if order >= self.hi:
            return self
        top = min(int(order), len(self.coeffs) - 1)
        return OperatorSeries(self.source, self.target, self.wdegree,
                              self.coeffs[:top + 1], hi=order)

    def eq_mod(self, other: "OperatorSeries", order: int) -> bool:
        """Coefficient-wise equality through the given order (window-guarded)."""
        for m in range(order + 1):
            if self.coeff(m) != other.coeff(m):
                return False
        return True

    def is_zero_mod(self, order: int) -> bool:
        for m in range(order + 1):
            if not self.coeff(m).is_zero():
                return False
        return True

    def __repr__(self):
        return (f"OperatorSeries(wdeg={self.wdegree}, len={len(self.coeffs)}, "
                f"hi={'inf' if self.hi == INF else self.hi})")
