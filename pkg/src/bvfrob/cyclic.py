"""Trace pairings: cyclic compatibility, perfectness, and good bases.

The trace pairs elements by (x, y) = Tr(x y).  The axioms checked here:

* Tr vanishes on exact elements (Tr o d = 0) and has pure degree -n.
* Each order-k operator is (anti)self-adjoint for the pairing with the sign
  (Delta_k x, y) = (-1)^{|x|+k+1} (x, Delta_k y); the differential is the
  k = 0 case.
* The induced pairing of harmonic representatives is perfect between
  complementary degrees q and n-q.

For series arguments the twisted pairing K(x, y) pairs x against y with the
formal parameter negated in y.  A basis of classes is *good* when K of any two
splitting-map images is concentrated in parameter-degree zero; homogeneity
concentrates each K value at the single exponent (|a_i|+|a_j|-n)/2, so the
verdict is exact at every order.  Compatibility of the homotopy with the
pairing, (h x, y) = (-1)^{|x|} (x, h y), is the sufficient condition tested
alongside.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .bv import BVAlgebra
from .grading import SCALAR_SPACE, Vec
from .linalg import invert_block
from .retract import Retract
from .series import VSeries

ZERO = Fraction(0)


def validate_cyclic(A: BVAlgebra) -> dict:
    S = A.space
    checks = []

    bad = ""
    if A.trace.degree != -A.top_degree:
        bad = (f"trace has degree {A.trace.degree}, "
               f"expected {-A.top_degree}")
    else:
        try:
            A.trace.check_degrees()
        except ValueError as exc:
            bad = str(exc)
    checks.append({"name": "trace_degree", "passed": not bad, "detail": bad})

    td = A.trace.compose(A.d)
    checks.append({"name": "trace_kills_exact", "passed": td.is_zero(),
                   "detail": "" if td.is_zero() else "Tr(d(x)) != 0"})

    operators = {0: A.d}
    operators.update(A.deltas)
    bad = ""
    for k, op in sorted(operators.items()):
        for i in range(S.dim):
            ei = S.basis_vector(i)
            oi = op.apply(ei)
            sign = Fraction(-1 if (S.degrees[i] + k + 1) % 2 else 1)
            for j in range(S.dim):
                ej = S.basis_vector(j)
                lhs = A.pair(oi, ej)
                rhs = sign * A.pair(ei, op.apply(ej))
                if lhs != rhs:
                    bad = (f"operator {k} breaks the pairing sign on "
                           f"({S.labels[i]}, {S.labels[j]})")
                    break
            if bad:
                break
        if bad:
            break
    checks.append({"name": "operator_pairing_signs", "passed": not bad,
                   "detail": bad})

    return {"passed": all(c["passed"] for c in checks), "checks": checks}


def class_pairing_matrix(A: BVAlgebra, R: Retract) -> list[list[Fraction]]:
    """g(i, j) = Tr(iota(a_i) iota(a_j)) on the harmonic basis."""
    reps = [R.iota.apply(R.classes.basis_vector(r))
            for r in range(R.classes.dim)]
    return [[A.pair(u, v) for v in reps] for u in reps]


def perfect_pairing_report(A: BVAlgebra, R: Retract) -> dict:
    """The class pairing must be perfect between degrees q and n - q."""
    H = R.classes
    n = A.top_degree
    g = class_pairing_matrix(A, R)
    problems = []
    for q in sorted(set(H.degrees)):
        rows_q = [r for r in range(H.dim) if H.degrees[r] == q]
        cols_q = [r for r in range(H.dim) if H.degrees[r] == n - q]
        if len(rows_q) != len(cols_q):
            problems.append(f"rank {len(rows_q)} in degree {q} vs "
                            f"rank {len(cols_q)} in degree {n - q}")
            continue
        block = [[g[i][j] for j in cols_q] for i in rows_q]
        if block:
            try:
                invert_block(block)
            except ValueError:
                problems.append(f"degenerate block between degrees "
                                f"{q} and {n - q}")
    return {"passed": not problems, "problems": problems}


def h_compatibility_report(A: BVAlgebra, R: Retract) -> dict:
    """(h x, y) = (-1)^{|x|} (x, h y) over all basis pairs."""
    S = A.space
    h = R.h
    failures = []
    for i in range(S.dim):
        ei = S.basis_vector(i)
        hi = h.apply(ei)
        sign = Fraction(-1 if S.degrees[i] % 2 else 1)
        for j in range(S.dim):
            ej = S.basis_vector(j)
            lhs = A.pair(hi, ej)
            rhs = sign * A.pair(ei, h.apply(ej))
            if lhs != rhs:
                failures.append([S.labels[i], S.labels[j],
                                 str(lhs), str(rhs)])
    return {"passed": not failures, "failures": failures[:6]}


def series_pairing(A: BVAlgebra, x: VSeries, y: VSeries) -> VSeries:
    """Scalar series Tr(x y) with coefficient-wise trace."""
    def bil(u: Vec, v: Vec) -> Vec:
        return A.trace.apply(A.multiply(u, v))
    return x.convolve(y, bil, SCALAR_SPACE,
                      x.degree + y.degree + A.trace.degree)


def twisted_pairing(A: BVAlgebra, x: VSeries, y: VSeries) -> VSeries:
    """K(x, y): pair x against y with the parameter negated in y."""
    return series_pairing(A, x, y.bar())


def good_basis_report(A: BVAlgebra, R: Retract,
                      alphas: Sequence[VSeries]) -> dict:
    """The twisted pairing of splitting images must sit in degree zero."""
    failures = []
    exact = True
    values = []
    for i, x in enumerate(alphas):
        for j, y in enumerate(alphas):
            k = twisted_pairing(A, x, y)
            exact = exact and k.is_exact()
            for e in k.exponents():
                c = k.coeff(e).get(0, ZERO)
                if not c:
                    continue
                if e == 0:
                    values.append([i, j, str(c)])
                else:
                    failures.append([i, j, e, str(c)])
    return {
        "passed": not failures,
        "exact": exact,
        "constant_values": values,
        "failures": failures[:8],
    }
