"""End-to-end gated pipeline and the per-stage handlers shared by the CLI
and the HTTP service.

Every handler takes a ``bv-algebra/1`` document (plus knobs) and returns a
plain JSON-ready dict with a top-level ``passed`` flag.  The pipeline runs
the stages in order — validation, retract, degeneration, cyclic, goodbasis,
qme, frobenius — and stops at the first failing gate, which is how the
failing examples report *where* they break rather than crashing later.
"""
from __future__ import annotations

from .bv import BVAlgebra, first_failure, validate_all
from .cyclic import (good_basis_report, h_compatibility_report,
                     perfect_pairing_report, validate_cyclic)
from .degeneration import (TransferCalculus, closed_image_check,
                           degeneration_report, perturbed_retract_report,
                           splitting_map, verify_splitting)
from .descriptions import algebra_from_doc, inner_product_from_doc
from .frobenius import (build_frobenius, flatness_pairing_report,
                        verify_frobenius, zero_point_check)
from .qme import NegativePowerError, ObstructionError, solve_qme, verify_qme
from .reports import to_jsonable
from .retract import InnerProduct, Retract, build_retract, cohomology_report, verify_retract
from .series import INF

DEFAULT_TAU_ORDER = 4
DEFAULT_HBAR_ORDER = 6
DEFAULT_KMAX = 6

STAGES = ("validation", "retract", "degeneration", "cyclic", "goodbasis",
          "qme", "frobenius")


class Context:
    """Algebra + inner product + knobs, resolved once per request."""

    def __init__(self, doc: dict, *, seed: int | None = None,
                 tau_order: int = DEFAULT_TAU_ORDER,
                 hbar_order: int | None = DEFAULT_HBAR_ORDER,
                 kmax: int = DEFAULT_KMAX,
                 explicit: frozenset[str] = frozenset()):
        self.doc = doc
        self.algebra = algebra_from_doc(doc)
        if seed is not None:
            self.ip = InnerProduct.seeded(self.algebra.space, seed)
        else:
            self.ip = inner_product_from_doc(doc.get("inner_product"),
                                             self.algebra.space)
        self.seed = seed
        self.tau_order = int(tau_order)
        self.hbar_order = None if hbar_order is None else int(hbar_order)
        self.kmax = int(kmax)
        self.explicit = frozenset(explicit)
        self._retract: Retract | None = None
        self._tc: TransferCalculus | None = None

    @property
    def name(self) -> str:
        return str(self.doc.get("name", ""))

    def parameters(self) -> dict:
        out = {}
        for knob in ("tau_order", "hbar_order", "kmax"):
            out[knob] = {"value": getattr(self, knob),
                         "source": ("request" if knob in self.explicit
                                    else "default")}
        if self.seed is not None:
            out["inner_product"] = f"seeded({self.seed})"
        elif self.doc.get("inner_product") is not None:
            out["inner_product"] = "document"
        else:
            out["inner_product"] = "orthonormal"
        return out

    def retract(self) -> tuple[Retract, dict]:
        if self._retract is None:
            self._retract, self._retract_info = build_retract(
                self.algebra, self.ip)
        return self._retract, self._retract_info

    def transfer(self) -> TransferCalculus:
        if self._tc is None:
            self._tc = TransferCalculus(self.algebra, self.retract()[0])
        return self._tc

    def hbar_cap(self):
        return INF if self.hbar_order is None else self.hbar_order


# -- stages ----------------------------------------------------------------------


def stage_validation(ctx: Context) -> dict:
    rep = validate_all(ctx.algebra)
    return {"stage": "validation", "passed": rep["passed"],
            "checks": rep["checks"], "first_failure": first_failure(rep)}


def stage_retract(ctx: Context) -> dict:
    ipv = ctx.ip.validate()
    R, info = ctx.retract()
    ver = verify_retract(ctx.algebra, R)
    coh = cohomology_report(ctx.algebra, ctx.ip)
    passed = (ipv["passed"] and ver["passed"] and info["unit_harmonic"]
              and coh["hodge_isomorphism"])
    return {"stage": "retract", "passed": passed,
            "inner_product": ipv, "identities": ver["checks"],
            "unit_harmonic": info["unit_harmonic"], "rank": info["rank"],
            "cohomology": coh}


def stage_degeneration(ctx: Context) -> dict:
    A = ctx.algebra
    R, _ = ctx.retract()
    deg = degeneration_report(A, R)
    closed = closed_image_check(A, R, ctx.kmax)
    split = verify_splitting(A, R, ctx.kmax)
    pert = perturbed_retract_report(A, R)
    unconditional = {"perturbed_homotopy_identity",
                     "perturbed_projection_splitting_identity",
                     "perturbed_homotopy_squares_to_zero",
                     "perturbed_homotopy_kills_splitting",
                     "perturbed_projection_kills_homotopy"}
    pert_ok = all(c["passed"] for c in pert["checks"]
                  if c["name"] in unconditional)
    passed = (deg["degenerates"] and closed["passed"] and split["passed"]
              and pert_ok)
    return {"stage": "degeneration", "passed": passed,
            "transferred_operators": deg, "closed_image": closed,
            "splitting": split["checks"], "perturbed_retract": pert["checks"]}


def stage_cyclic(ctx: Context) -> dict:
    A = ctx.algebra
    R, _ = ctx.retract()
    cyc = validate_cyclic(A)
    perfect = perfect_pairing_report(A, R)
    hc = h_compatibility_report(A, R)
    passed = cyc["passed"] and perfect["passed"] and hc["passed"]
    return {"stage": "cyclic", "passed": passed, "checks": cyc["checks"],
            "perfect_pairing": perfect, "h_compatibility": hc}


def stage_goodbasis(ctx: Context) -> dict:
    A = ctx.algebra
    R, _ = ctx.retract()
    alphas = splitting_map(A, R, ctx.transfer())
    rep = good_basis_report(A, R, alphas)
    return {"stage": "goodbasis", "passed": rep["passed"],
            "concentrated": rep["passed"], "exact": rep["exact"],
            "constant_values": rep["constant_values"],
            "failures": rep["failures"]}


def _solver_error(exc) -> dict:
    if isinstance(exc, ObstructionError):
        return {"kind": "obstruction", "order": exc.order,
                "witnesses": exc.witnesses}
    return {"kind": "negative_power", "order": exc.order,
            "monomial": exc.monomial, "exponent": exc.exponent}


def stage_qme(ctx: Context) -> dict:
    A = ctx.algebra
    R, _ = ctx.retract()
    try:
        sol = solve_qme(A, R, ctx.tau_order, tc=ctx.transfer(),
                        hbar_order=ctx.hbar_cap())
    except (ObstructionError, NegativePowerError) as exc:
        return {"stage": "qme", "passed": False, "solved": False,
                "error": _solver_error(exc)}
    ver = verify_qme(A, R, sol)
    sizes = {str(n): len(g.terms) for n, g in sorted(sol.corrections.items())}
    ctx.solution = sol
    return {"stage": "qme", "passed": ver["passed"], "solved": True,
            "order": sol.tau_order, "correction_terms": sizes,
            "checks": ver["checks"]}


def stage_frobenius(ctx: Context) -> dict:
    A = ctx.algebra
    R, _ = ctx.retract()
    sol = getattr(ctx, "solution", None)
    if sol is None:
        try:
            sol = solve_qme(A, R, ctx.tau_order, tc=ctx.transfer(),
                            hbar_order=ctx.hbar_cap())
        except (ObstructionError, NegativePowerError) as exc:
            return {"stage": "frobenius", "passed": False, "solved": False,
                    "error": _solver_error(exc)}
    fs = build_frobenius(A, R, sol, ctx.transfer())
    ver = verify_frobenius(A, R, sol, fs)
    zp = zero_point_check(A, R, fs)
    flat = flatness_pairing_report(A, fs)
    passed = ver["passed"] and zp["passed"] and flat["passed"]
    potential = {fs.flat_system.monomial_name(m): str(c)
                 for m, c in sorted(fs.potential.items())}
    metric = [[str(x) for x in row] for row in fs.metric]
    return {"stage": "frobenius", "passed": passed, "order": fs.order,
            "checks": ver["checks"], "zero_point": zp,
            "flatness_surrogate": flat, "metric": metric,
            "potential": potential,
            "potential_degree": 6 - fs.top_degree}


_STAGE_FUNCS = {
    "validation": stage_validation,
    "retract": stage_retract,
    "degeneration": stage_degeneration,
    "cyclic": stage_cyclic,
    "goodbasis": stage_goodbasis,
    "qme": stage_qme,
    "frobenius": stage_frobenius,
}


def run_stage(name: str, ctx: Context) -> dict:
    return to_jsonable(_STAGE_FUNCS[name](ctx))


def run_pipeline(ctx: Context) -> dict:
    stages = []
    failed = None
    for name in STAGES:
        rep = run_stage(name, ctx)
        stages.append(rep)
        if not rep["passed"]:
            failed = name
            break
    return to_jsonable({
        "schema": "bv-report/1",
        "instance": ctx.name,
        "parameters": ctx.parameters(),
        "stages": stages,
        "passed": failed is None,
        "failed_stage": failed,
    })


# -- entry points used by both the CLI and the service -----------------------------


def handle(stage: str, doc: dict, *, seed: int | None = None,
           tau_order: int = DEFAULT_TAU_ORDER,
           hbar_order: int | None = DEFAULT_HBAR_ORDER,
           kmax: int = DEFAULT_KMAX,
           explicit: frozenset[str] = frozenset()) -> dict:
    """Run one stage (or the whole pipeline) against a document.

    ``explicit`` names the knobs the caller actually supplied, so reports
    can say whether each truncation order came from the request or from a
    default.
    """
    ctx = Context(doc, seed=seed, tau_order=tau_order,
                  hbar_order=hbar_order, kmax=kmax, explicit=explicit)
    if stage == "pipeline":
        return run_pipeline(ctx)
    if stage == "cohomology":
        rep = to_jsonable(cohomology_report(ctx.algebra, ctx.ip))
        rep["stage"] = "cohomology"
        rep["passed"] = bool(rep["hodge_isomorphism"])
        return rep
    if stage not in _STAGE_FUNCS:
        raise KeyError(stage)
    rep = run_stage(stage, ctx)
    rep["instance"] = ctx.name
    rep["parameters"] = ctx.parameters()
    return rep
