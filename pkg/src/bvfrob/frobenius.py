"""Extraction of a formal Frobenius structure from a solved master equation.

Pipeline (all exact, each step truncated to the variable order it is valid
through; N is the solved order, Nf = N - 2 the structure order):

1. J = classes(parameter * (exp(Gamma/parameter) - 1)); its component along
   class i, at parameter-degree zero and nonnegative powers, is the flat
   coordinate T^i(t) = t_i + higher.
2. T is inverted as a formal change of variables; Gamma, rewritten in the
   flat variables, gives the frame sections sigma_j = classes(d_j Gamma~ . E~).
3. The products  classes((h d_i d_j Gamma~ + d_i Gamma~ d_j Gamma~) E~)
   are expanded in the frame by a triangular recursion (sigma is the identity
   at variable order 0); the expansion coefficients live in nonnegative
   parameter powers, a strictly negative remainder being allowed and recorded.
   Whether the coefficients are parameter-free is checked, never assumed.
4. The parameter-degree-zero coefficients A^k_ij(s), the constant metric
   g(i,j) = Tr(iota a_i . iota a_j) and the tensor c_ijk = sum_l A^l_ij g(l,k)
   must satisfy: unit row = identity, graded commutativity, associativity of
   the deformed product (WDVV), total graded symmetry of c, and c must be the
   third derivative of a potential of pure degree 6 - n, found by an exact
   overdetermined linear solve (inconsistency = integrability failure).
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Mapping, Sequence

from .bv import BVAlgebra
from .cyclic import class_pairing_matrix
from .degeneration import TransferCalculus
from .grading import SCALAR_SPACE, Vec
from .linalg import solve
from .qme import QMESolution
from .retract import Retract
from .series import INF, OperatorSeries, VSeries
from .tau import (
    EMPTY,
    Monomial,
    TauSeries,
    TauSystem,
    derive_monomial,
    merge_monomials,
    monomial_sort_key,
)

ZERO = Fraction(0)
ONE = Fraction(1)

Poly = dict  # monomial tuple -> Fraction


# -- plain graded polynomials (parameter-free scalars) ---------------------------


def poly_add(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for m, c in q.items():
        s = out.get(m, ZERO) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def poly_scale(c: Fraction, p: Poly) -> Poly:
    if not c:
        return {}
    return {m: c * v for m, v in p.items()}


def poly_mul(degrees: Sequence[int], p: Poly, q: Poly,
             max_order: float = INF) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            if len(m1) + len(m2) > max_order:
                continue
            merged = merge_monomials(degrees, m1, m2)
            if merged is None:
                continue
            sgn, m = merged
            s = out.get(m, ZERO) + sgn * c1 * c2
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def poly_derive(degrees: Sequence[int], p: Poly, i: int) -> Poly:
    out: Poly = {}
    for m, c in p.items():
        der = derive_monomial(degrees, m, i)
        if der is None:
            continue
        factor, reduced = der
        s = out.get(reduced, ZERO) + Fraction(factor) * c
        if s:
            out[reduced] = s
        else:
            out.pop(reduced, None)
    return out


def poly_truncate(p: Poly, order: int) -> Poly:
    return {m: c for m, c in p.items() if len(m) <= order}


# -- series component helpers ------------------------------------------------------


def vector_components(X: TauSeries, classes) -> list[TauSeries]:
    """Split a class-valued polynomial series into scalar component series."""
    out = []
    for k in range(classes.dim):
        terms = {}
        for m, c in X.terms.items():
            comp = {e: {0: v[k]} for e, v in c.coeffs.items() if k in v}
            if comp or c.hi != INF:
                terms[m] = VSeries(SCALAR_SPACE, c.degree - classes.degrees[k],
                                   comp, lo=min(c.lo, 0), hi=c.hi)
        out.append(TauSeries(X.system, SCALAR_SPACE,
                             X.degree - classes.degrees[k], terms))
    return out


def hbar_zero_part(ts: TauSeries) -> TauSeries:
    """Keep only the parameter-degree-zero coefficient of every term."""
    def pick(c: VSeries) -> VSeries:
        kept = {0: c.coeffs[0]} if 0 in c.coeffs else {}
        return VSeries(c.space, c.degree, kept, lo=0, hi=c.hi)
    return ts.map_coefficients(pick)


def nonneg_part(ts: TauSeries) -> TauSeries:
    return ts.map_coefficients(lambda c: c.nonneg_part())


def scalar_poly(ts: TauSeries) -> Poly:
    """Parameter-degree-zero content of a scalar series as a plain polynomial."""
    if ts.space != SCALAR_SPACE:
        raise ValueError("scalar series expected")
    out: Poly = {}
    for m, c in ts.terms.items():
        v = c.coeffs.get(0, {}).get(0, ZERO)
        if v:
            out[m] = v
    return out


def is_hbar_free(ts: TauSeries) -> bool:
    return all(set(c.coeffs) <= {0} for c in ts.terms.values())


def variable_series(system: TauSystem, i: int) -> TauSeries:
    """The scalar series consisting of the bare variable i."""
    unit = VSeries.constant(SCALAR_SPACE, {0: ONE}, degree=0)
    return TauSeries.variable(system, SCALAR_SPACE, i, unit)


def section_derivative(ts: TauSeries, j: int) -> TauSeries:
    """Left derivative conjugated by the variable parity.

    The plain left derivative crosses an odd coefficient on odd classes and
    hands back the negated generator; conjugating keeps the frame equal to
    the identity at the origin.
    """
    out = ts.derivative(j)
    if ts.system.degrees[j] % 2:
        out = out.scale(Fraction(-1))
    return out


# -- flat coordinates ------------------------------------------------------------


def flat_coordinates(A: BVAlgebra, R: Retract, sol: QMESolution,
                     pprime: OperatorSeries) -> dict:
    """J-components, flat coordinates T, and the inverse change of variables."""
    N = sol.tau_order
    system = sol.system
    H = R.classes

    E = sol.gamma.shift(-1).exp(A.unit, A.multiply, N)
    unit_term = TauSeries.constant(
        system, VSeries(A.space, 2, {1: dict(A.unit)}))
    j_chain = E.shift(1).sub(unit_term)
    J = j_chain.apply_operator(pprime).truncate_order(N)
    comps = vector_components(J, H)

    flat_system = TauSystem([f"s{r}" for r in range(H.dim)], system.degrees)

    T = [hbar_zero_part(nonneg_part(c)) for c in comps]
    j_nonneg_hbar_free = all(is_hbar_free(nonneg_part(c)) for c in comps)

    # invert T = id + higher by fixed-point iteration
    higher = [T[i].sub(variable_series(system, i)) for i in range(H.dim)]
    F = [variable_series(flat_system, i) for i in range(H.dim)]
    for _ in range(max(N - 1, 0)):
        F = [variable_series(flat_system, i).sub(
                higher[i].substitute(F, flat_system, max_order=N))
             for i in range(H.dim)]
    F = [f.truncate_order(N) for f in F]

    forward = all(
        T[i].substitute(F, flat_system, max_order=N)
            .sub(variable_series(flat_system, i)).trusted_zero()
        for i in range(H.dim))
    backward = all(
        F[i].substitute(T, system, max_order=N)
            .sub(variable_series(system, i)).trusted_zero()
        for i in range(H.dim))

    return {
        "system": system,
        "flat_system": flat_system,
        "J": J,
        "T": T,
        "inverse": F,
        "round_trip_forward": forward,
        "round_trip_backward": backward,
        "j_nonneg_hbar_free": j_nonneg_hbar_free,
    }


# -- frame decomposition -----------------------------------------------------------


def decompose_in_frame(X: TauSeries, sigmas: Sequence[TauSeries],
                       classes, order: int) -> dict:
    """Expand X = sum_k c_k sigma_k + (strictly negative parameter powers).

    Triangular in the variable order because sigma is the identity frame at
    order 0.  Coefficients keep their nonnegative parameter dependence;
    parameter-freeness is reported, not assumed.
    """
    flat = X.system
    coeffs = [TauSeries.zero(flat, SCALAR_SPACE,
                             X.degree - classes.degrees[k])
              for k in range(classes.dim)]
    rem = X
    for r in range(order + 1):
        part = rem.order_part(r)
        for m in part.monomials():
            c = part.terms[m]
            for k in range(classes.dim):
                comp = {e: {0: v[k]} for e, v in c.coeffs.items() if k in v}
                if not comp:
                    continue
                y = VSeries(SCALAR_SPACE, c.degree - classes.degrees[k],
                            comp, lo=min(c.lo, 0), hi=c.hi)
                ynn = y.nonneg_part()
                if ynn.trusted_zero():
                    continue
                # the product convention puts the coefficient on the left, so
                # recover the coefficient with the same sign the product emits
                if flat.monomial_degree(m) % 2 and sigmas[k].degree % 2:
                    ynn = ynn.scale(Fraction(-1))
                piece = TauSeries(flat, SCALAR_SPACE,
                                  coeffs[k].degree, {m: ynn})
                coeffs[k] = coeffs[k].add(piece)
                correction = piece.scalar_combine(sigmas[k]).truncate_order(order)
                rem = rem.sub(correction)
    leftover_ok = True
    for c in rem.truncate_order(order).terms.values():
        if any(e >= 0 for e in c.coeffs):
            leftover_ok = False
            break
    hfree = all(is_hbar_free(c) for c in coeffs)
    return {"coefficients": coeffs, "closed": leftover_ok, "hbar_free": hfree}


# -- the full structure -------------------------------------------------------------


class FrobeniusStructure:
    __slots__ = ("system", "flat_system", "order", "tau_order",
                 "flat", "gamma_flat", "sigmas", "atilde", "structure",
                 "hbar_free", "frame_closed", "metric", "c_tensor",
                 "potential", "potential_consistent", "unit_index",
                 "top_degree")

    def __init__(self, **kw):
        for name in self.__slots__:
            setattr(self, name, kw[name])


def build_frobenius(A: BVAlgebra, R: Retract, sol: QMESolution,
                    tc: TransferCalculus | None = None,
                    order: int | None = None) -> FrobeniusStructure:
    tc = tc or TransferCalculus(A, R)
    N = sol.tau_order
    nf = order if order is not None else max(N - 2, 0)
    H = R.classes
    pprime = tc.p_prime_series().truncate(sol.hbar_order)

    flat = flat_coordinates(A, R, sol, pprime)
    flat_system = flat["flat_system"]
    F = flat["inverse"]

    gamma_flat = sol.gamma.substitute(F, flat_system, max_order=N).truncate_order(N)
    E_flat = gamma_flat.shift(-1).exp(A.unit, A.multiply, N)

    dgamma = [section_derivative(gamma_flat, j).truncate_order(N - 1)
              for j in range(H.dim)]

    sigmas = []
    for j in range(H.dim):
        raw = dgamma[j].combine(E_flat, A.multiply, A.space,
                                max_order=N - 1)
        sigmas.append(raw.apply_operator(pprime).truncate_order(N - 1))

    atilde: dict[tuple[int, int], list[TauSeries]] = {}
    structure: dict[tuple[int, int], list[Poly]] = {}
    hbar_free = True
    frame_closed = True
    for i in range(H.dim):
        for j in range(H.dim):
            second = section_derivative(dgamma[j], i).shift(1).truncate_order(nf)
            prod = dgamma[i].combine(dgamma[j], A.multiply, A.space,
                                     max_order=nf)
            inner = second.add(prod)
            x = inner.combine(E_flat, A.multiply, A.space, max_order=nf)
            x = x.apply_operator(pprime).truncate_order(nf)
            dec = decompose_in_frame(x, sigmas, H, nf)
            atilde[(i, j)] = dec["coefficients"]
            structure[(i, j)] = [scalar_poly(hbar_zero_part(c))
                                 for c in dec["coefficients"]]
            hbar_free = hbar_free and dec["hbar_free"]
            frame_closed = frame_closed and dec["closed"]

    metric = class_pairing_matrix(A, R)

    c_tensor: dict[tuple[int, int, int], Poly] = {}
    for (i, j), rows in structure.items():
        for k in range(H.dim):
            acc: Poly = {}
            for l in range(H.dim):
                glk = metric[l][k]
                if glk:
                    acc = poly_add(acc, poly_scale(glk, rows[l]))
            c_tensor[(i, j, k)] = acc

    potential, consistent = _solve_potential(
        flat_system, c_tensor, A.top_degree, nf)

    return FrobeniusStructure(
        system=sol.system, flat_system=flat_system, order=nf, tau_order=N,
        flat=flat, gamma_flat=gamma_flat, sigmas=sigmas, atilde=atilde,
        structure=structure, hbar_free=hbar_free, frame_closed=frame_closed,
        metric=metric, c_tensor=c_tensor, potential=potential,
        potential_consistent=consistent, unit_index=sol.unit_index,
        top_degree=A.top_degree)


def _solve_potential(flat_system: TauSystem,
                     c_tensor: Mapping[tuple[int, int, int], Poly],
                     top_degree: int, order: int) -> tuple[Poly, bool]:
    """Exact overdetermined solve of d_i d_j d_k Phi = c_ijk.

    Phi is a parameter-free polynomial of pure degree 6 - top_degree whose
    monomials have variable order between 3 and order + 3; lower orders are
    normalized away.  Returns ({}, False) when the system is inconsistent.
    """
    degrees = flat_system.degrees
    mu = flat_system.count
    target = 6 - top_degree

    monos: list[Monomial] = []
    for size in range(3, order + 4):
        for m in combinations_with_replacement(range(mu), size):
            if sum(degrees[i] for i in m) != target:
                continue
            if any(m[r] == m[r + 1] and degrees[m[r]] % 2
                   for r in range(len(m) - 1)):
                continue
            monos.append(m)
    monos.sort(key=monomial_sort_key)
    col_of = {m: c for c, m in enumerate(monos)}

    # equation rows are keyed (i, j, k, mm): derivatives taken in the order
    # i, then j, then k, exactly as the verification pass recomputes them
    entries: dict[tuple, dict[int, Fraction]] = {}
    for col, m in enumerate(monos):
        support = sorted(set(m))
        for i in support:
            di = poly_derive(degrees, {m: ONE}, i)
            if not di:
                continue
            for j in support:
                dij = poly_derive(degrees, di, j)
                if not dij:
                    continue
                for k in support:
                    dijk = poly_derive(degrees, dij, k)
                    for mm, val in dijk.items():
                        if len(mm) > order:
                            continue
                        row = entries.setdefault((i, j, k, mm), {})
                        s = row.get(col, ZERO) + val
                        if s:
                            row[col] = s
                        else:
                            row.pop(col, None)
    rowkeys = set(entries)
    for (i, j, k), poly in c_tensor.items():
        for mm, val in poly.items():
            if val and len(mm) <= order:
                rowkeys.add((i, j, k, mm))

    ordered = sorted(rowkeys)
    rows = []
    rhs = []
    for key in ordered:
        i, j, k, mm = key
        rows.append(entries.get(key, {}))
        rhs.append(c_tensor.get((i, j, k), {}).get(mm, ZERO))
    sol_vec = solve(rows, rhs)
    if sol_vec is None:
        return {}, False
    phi: Poly = {}
    for m, c in col_of.items():
        v = sol_vec.get(c, ZERO)
        if v:
            phi[m] = v
    return phi, True


# -- verification --------------------------------------------------------------------


def _poly_eq_mod(p: Poly, q: Poly, order: int) -> bool:
    return poly_truncate(poly_add(p, poly_scale(Fraction(-1), q)), order) == {}


def verify_frobenius(A: BVAlgebra, R: Retract, sol: QMESolution,
                     fs: FrobeniusStructure) -> dict:
    H = R.classes
    degrees = fs.flat_system.degrees
    nf = fs.order
    mu = H.dim
    checks = []

    def record(name, passed, detail=""):
        checks.append({"name": name, "passed": bool(passed), "detail": detail})

    record("flat_round_trip",
           fs.flat["round_trip_forward"] and fs.flat["round_trip_backward"])
    record("frame_decomposition_closed", fs.frame_closed)
    record("structure_constants_parameter_free", fs.hbar_free)

    u = fs.unit_index
    ok = u is not None
    if ok:
        for j in range(mu):
            rows = fs.structure[(u, j)]
            for k in range(mu):
                want = {EMPTY: ONE} if k == j else {}
                if poly_truncate(rows[k], nf) != want:
                    ok = False
    record("unit_axiom", ok)

    ok = True
    for i in range(mu):
        for j in range(mu):
            sign = Fraction(-1 if (degrees[i] % 2 and degrees[j] % 2) else 1)
            for k in range(mu):
                lhs = fs.structure[(i, j)][k]
                rhs = poly_scale(sign, fs.structure[(j, i)][k])
                if not _poly_eq_mod(lhs, rhs, nf):
                    ok = False
    record("graded_commutativity", ok)

    ok = True
    for i in range(mu):
        for j in range(mu):
            for k in range(mu):
                for m in range(mu):
                    lhs: Poly = {}
                    for l in range(mu):
                        lhs = poly_add(lhs, poly_mul(
                            degrees, fs.structure[(i, j)][l],
                            fs.structure[(l, k)][m], max_order=nf))
                    rhs: Poly = {}
                    for l in range(mu):
                        sign_exp = degrees[i] % 2 and (
                            degrees[j] + degrees[k] + degrees[l]) % 2
                        term = poly_mul(degrees, fs.structure[(j, k)][l],
                                        fs.structure[(i, l)][m], max_order=nf)
                        rhs = poly_add(rhs, poly_scale(
                            Fraction(-1 if sign_exp else 1), term))
                    if not _poly_eq_mod(lhs, rhs, nf):
                        ok = False
    record("associativity_wdvv", ok)

    ok = True
    for i in range(mu):
        for j in range(mu):
            for k in range(mu):
                base = fs.c_tensor[(i, j, k)]
                sjk = Fraction(-1 if (degrees[j] % 2 and degrees[k] % 2) else 1)
                if not _poly_eq_mod(fs.c_tensor[(i, k, j)],
                                    poly_scale(sjk, base), nf):
                    ok = False
                sij = Fraction(-1 if (degrees[i] % 2 and degrees[j] % 2) else 1)
                if not _poly_eq_mod(fs.c_tensor[(j, i, k)],
                                    poly_scale(sij, base), nf):
                    ok = False
    record("pairing_totally_symmetric", ok)

    record("potential_exists", fs.potential_consistent)
    ok = fs.potential_consistent
    if ok:
        for i in range(mu):
            di = poly_derive(degrees, fs.potential, i)
            for j in range(mu):
                dij = poly_derive(degrees, di, j)
                for k in range(mu):
                    dijk = poly_derive(degrees, dij, k)
                    if not _poly_eq_mod(dijk, fs.c_tensor[(i, j, k)], nf):
                        ok = False
    record("potential_third_derivatives", ok)

    return {"passed": all(c["passed"] for c in checks), "checks": checks}


def zero_point_check(A: BVAlgebra, R: Retract, fs: FrobeniusStructure) -> dict:
    """c_ijk at the origin must equal Tr of the triple product of
    representatives, computed through an independent code path."""
    H = R.classes
    reps = [R.iota.apply(H.basis_vector(r)) for r in range(H.dim)]
    failures = []
    for i in range(H.dim):
        for j in range(H.dim):
            pij = A.multiply(reps[i], reps[j])
            for k in range(H.dim):
                direct = A.trace.apply(
                    A.multiply(pij, reps[k])).get(0, ZERO)
                extracted = fs.c_tensor[(i, j, k)].get(EMPTY, ZERO)
                if direct != extracted:
                    failures.append([i, j, k, str(direct), str(extracted)])
    return {"passed": not failures, "failures": failures[:6]}


def flatness_pairing_report(A: BVAlgebra, fs: FrobeniusStructure,
                            order: int | None = None) -> dict:
    """The twisted pairing of the frame sections must be constant.

    In the flat variables the sections d_iGamma exp(Gamma/parameter) pair
    to their value at the origin; any dependence on the variables means
    the metric was not flattened.  (In the raw variables the pairing is
    genuinely variable whenever the coordinate change has corrections, so
    the check only makes sense after the change of variables.)
    """
    N = fs.tau_order
    top = order if order is not None else max(N - 1, 0)
    gamma = fs.gamma_flat
    E = gamma.shift(-1).exp(A.unit, A.multiply, N)
    sections = [section_derivative(gamma, i).truncate_order(top)
                .combine(E, A.multiply, A.space, max_order=top)
                for i in range(fs.flat_system.count)]

    def pair_bil(u: Vec, v: Vec) -> Vec:
        return A.trace.apply(A.multiply(u, v))

    ok = True
    failures: list[list] = []
    for i, x in enumerate(sections):
        for j, y in enumerate(sections):
            f = x.combine(y.bar(), pair_bil, SCALAR_SPACE, max_order=top,
                          degree_shift=A.trace.degree)
            dependent = f.truncate_order(top).sub(f.order_part(0))
            if not dependent.trusted_zero():
                ok = False
                if len(failures) < 4:
                    failures.append([i, j])
    return {"passed": ok, "order": top, "failures": failures}
