"""Evaluate a surface definition over its sample and run the requested checks."""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from dao.report import CheckResult, PointReport, Report, to_plain
from models.errors import CoefficientUndefined, HypothesisNotMet, OutsideDomain, SurfaceCheckError
from models.geometry import PointState
from models.models import Backend, CheckName, CheckStatus, DirectionKind, Verdict
from services import classify
from services.exprjet import value_at
from services.forms import V, XI, gauge_residuals, identity_residuals, induced_fields
from services.frame import frame_residuals, spans_ambient
from services.sections import (
    degenerate_equivalences,
    degenerate_section,
    h_parallel_residuals,
    l_values,
    nondegenerate_section,
    radical_plane_coefficients,
    radical_plane_residual,
    radical_shape_residual,
    screen_plane_residuals,
    tangential_acceleration,
)
from services.trace import backend_agreement, trace_curve

logger = logging.getLogger(__name__)

GAUGE_FACTORS = (0.5, 2.0, -3.0)
DEGENERATE, NONDEGENERATE = DirectionKind.degenerate.value, DirectionKind.nondegenerate.value
KINDS = (DEGENERATE, NONDEGENERATE)
FORM_NAMES = ("D1", "D2", "E1", "A_N", "A_u", "A_xi_star", "rho1", "rho2", "eps1", "u1")
AGREEMENT_KEYS = ("d1", "d2", "d3", "kappa_sq")


# per-point evaluation

def _class_data(frame, pkg, g, tol):
    try:
        gauss = classify.gauss_identity_residuals(frame, pkg, tol)
    except HypothesisNotMet as e:
        gauss = {"hypothesis": str(e)}
    return {
        "geodesic": classify.geodesic_residual(frame, pkg),
        "umbilical": classify.umbilical_fit(frame, pkg),
        "minimal": classify.minimal_residual(frame, pkg),
        "irrotational": classify.irrotational_residual(frame, pkg),
        "tangency": classify.radical_tangency_residual(frame, pkg, g),
        "conformal": classify.conformal_fit(frame, pkg, tol),
        "null_curvature": classify.null_sectional_curvature_of(frame, pkg),
        "gauss": gauss,
    }


def _plane_coefficients(fields, deg, tol):
    try:
        return radical_plane_coefficients(fields, deg, tol)
    except CoefficientUndefined as e:
        return {"undefined": str(e)}


def _gauge_data(config, M, g, p, backend, fields, pkg, tol):
    out = {}
    for alpha in GAUGE_FACTORS:
        scaled = induced_fields(M, g, p, config.frame_options(backend, gauge=alpha))
        out[str(alpha)] = {
            "residuals": gauge_residuals(pkg, fields.frame, scaled.package(), scaled.frame, alpha, g),
            "planar": {
                DEGENERATE: degenerate_section(scaled, tol).planar,
                NONDEGENERATE: nondegenerate_section(scaled, tol).planar,
            },
        }
    return out


def _relative_delta(a, b):
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b))) / max(1.0, float(np.linalg.norm(a)))


def _fd_data(config, M, g, p, pkg, sections):
    fd_tol = config.tolerance.fd
    fields = induced_fields(M, g, p, config.frame_options(Backend.fd))
    fd_pkg = fields.package()
    fd_sections = {
        DEGENERATE: degenerate_section(fields, fd_tol, negligible=fd_tol),
        NONDEGENERATE: nondegenerate_section(fields, fd_tol, negligible=fd_tol),
    }
    return {
        "forms": {
            name: float(np.max(np.abs(np.asarray(getattr(pkg, name)) - np.asarray(getattr(fd_pkg, name)))))
            for name in FORM_NAMES
        },
        "sections": {
            kind: {
                order: _relative_delta(getattr(sections[kind], order), getattr(fd_sections[kind], order))
                for order in ("d1", "d2", "d3")
            }
            for kind in KINDS
        },
        "planar": {kind: [sections[kind].planar, fd_sections[kind].planar] for kind in KINDS},
    }


def _trace_data(config, M, g, p, fields, sections, trace):
    frame = fields.frame.at_base()
    out = {}
    for kind, key, w in ((DEGENERATE, "xi", frame.xi), (NONDEGENERATE, "v", frame.v)):
        try:
            curve = trace_curve(M, g, p, w, h=config.run.trace_step, frame=fields.frame)
        except SurfaceCheckError as e:
            out[kind] = {"error": f"{type(e).__name__}: {e}"}
            continue
        entry = {
            "agreement": backend_agreement(sections[kind], curve, g, frame.eps),
            "constraint_residual": curve.constraint_residual,
        }
        if trace == key:
            entry["curve"] = curve.as_dict()
        out[kind] = entry
    return out


def evaluate_point(config, p, backend, tol, checks, trace=None, deep=False):
    """Everything the checks need at one sample point; domain failures are recorded, not raised."""
    M, g = config.immersion_model(), config.metric()
    state = PointState(point=tuple(float(x) for x in p))
    try:
        if not M.contains(state.point):
            raise OutsideDomain(f"{state.point} lies outside the domain box {[list(d) for d in M.domain]}")
        fields = induced_fields(M, g, p, config.frame_options(backend))
        frame, pkg = fields.frame.at_base(), fields.package()
        deg, nd = degenerate_section(fields, tol), nondegenerate_section(fields, tol)
        sections = {DEGENERATE: deg, NONDEGENERATE: nd}
        data = {
            "frame": {**frame.as_dict(), "residuals": frame_residuals(frame, g), "spans": spans_ambient(frame)},
            "package": pkg.as_dict(),
            "identities": identity_residuals(pkg, frame, g),
            "sections": {kind: jet.as_dict() for kind, jet in sections.items()},
            "radical_plane": radical_plane_residual(fields, tol),
            "screen_plane": screen_plane_residuals(fields, nd, tol),
            "h_parallel": h_parallel_residuals(fields, tol),
            "tangential_acceleration": {
                DEGENERATE: tangential_acceleration(fields, XI),
                NONDEGENERATE: tangential_acceleration(fields, V),
            },
            "L": l_values(fields),
            "radical_shape": radical_shape_residual(fields),
            "screen_acceleration": float(np.linalg.norm(pkg.nabla_star[V] * frame.v)),
            "equivalences": degenerate_equivalences(fields, deg, tol),
            "plane_coefficients": _plane_coefficients(fields, deg, tol),
            "classes": _class_data(frame, pkg, g, tol),
        }
        if CheckName.gauge in checks:
            data["gauge"] = _gauge_data(config, M, g, p, backend, fields, pkg, tol)
        if CheckName.backend_fd in checks:
            data["backend_fd"] = _fd_data(config, M, g, p, pkg, sections)
        if CheckName.backend_trace in checks or trace:
            data["backend_trace"] = _trace_data(config, M, g, p, fields, sections, trace)
        if deep:
            data["terms"] = {
                kind: {**jet.terms, "direct": list(jet.direct), "flow": list(jet.flow), "drift": jet.drift}
                for kind, jet in sections.items()
            }
        state.frame, state.package, state.sections, state.data = frame, pkg, sections, data
    except SurfaceCheckError as e:
        logger.warning("point %s: %s", state.point, e)
        state.error = f"{type(e).__name__}: {e}"
    return state


# checks

@dataclass
class Outcome:
    holds: Optional[bool]
    residual: Optional[float] = None
    verdict: Optional[Verdict] = None
    failures: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)


@dataclass
class CheckContext:
    M: object
    g: object
    states: list
    tol: float
    agreement: float
    backend: Backend
    claims: dict = field(default_factory=dict)

    @property
    def sample(self):
        return [s.point for s in self.states]

    @property
    def packages(self):
        return [(s.frame, s.package) for s in self.states]


def _worst(values):
    values = list(values)
    return max(values) if values else 0.0


def _pointwise(states, value, tol, eligible=None):
    """Holds when ``value(state) < tol`` at every eligible state."""
    chosen = [s for s in states if eligible is None or eligible(s)]
    values = [(s, float(value(s))) for s in chosen]
    failures = [list(s.point) for s, x in values if not x < tol]
    return Outcome(
        holds=not failures,
        residual=_worst(x for _, x in values),
        failures=failures,
        detail={"eligible": len(chosen)},
    )


def _verdict(outcome):
    outcome.verdict = Verdict.true if outcome.holds else Verdict.false
    return outcome


def _frame(ctx):
    outcome = _pointwise(ctx.states, lambda s: max(s.data["frame"]["residuals"].values()), ctx.tol)
    degenerate_frames = [list(s.point) for s in ctx.states if not s.data["frame"]["spans"]]
    outcome.failures += degenerate_frames
    outcome.holds = outcome.holds and not degenerate_frames
    return outcome


def _identities(ctx):
    outcome = _pointwise(ctx.states, lambda s: max(s.data["identities"].values()), ctx.tol)
    names = {}
    for s in ctx.states:
        for name, value in s.data["identities"].items():
            names[name] = max(names.get(name, 0.0), value)
    outcome.detail["worst"] = names
    return outcome


def _planar(kind):
    def check(ctx):
        failures = [list(s.point) for s in ctx.states if not s.sections[kind].planar]
        return _verdict(Outcome(
            holds=not failures,
            residual=_worst(s.sections[kind].planarity_residual for s in ctx.states),
            failures=failures,
        ))
    return check


def _agreement(states, kind, residual, tol, eligible=None):
    """Points where the residual verdict disagrees with the planarity verdict."""
    chosen = [s for s in states if eligible is None or eligible(s)]
    failures = [list(s.point) for s in chosen if (residual(s) < tol) != s.sections[kind].planar]
    return Outcome(
        holds=not failures,
        residual=_worst(residual(s) for s in chosen),
        failures=failures,
        detail={"eligible": len(chosen), "planar": sum(1 for s in chosen if s.sections[kind].planar)},
    )


def _flow_disagreements(states, kind, residual, tol):
    """Points where the residual verdict disagrees with the planarity of the frame field's flow line."""
    return [list(s.point) for s in states if (residual(s) < tol) != (s.sections[kind].flow_residual < tol)]


def _theorem_degenerate(ctx):
    def residual(s):
        return s.data["radical_plane"]

    outcome = _agreement(ctx.states, DEGENERATE, residual, ctx.tol)
    outcome.detail["flow_disagreements"] = _flow_disagreements(ctx.states, DEGENERATE, residual, ctx.tol)
    return outcome


def _theorem_nondegenerate(ctx):
    def residual(s):
        return s.data["screen_plane"]["residual"]

    outcome = _agreement(ctx.states, NONDEGENERATE, residual, ctx.tol)
    outcome.detail["flow_disagreements"] = _flow_disagreements(ctx.states, NONDEGENERATE, residual, ctx.tol)
    outcome.detail["bivector"] = _worst(s.data["screen_plane"]["bivector"] for s in ctx.states)
    return outcome


def _geodesic_arc(kind, tol):
    def eligible(s):
        first, second = s.data["tangential_acceleration"][kind]
        return first < tol and second < tol
    return eligible


def _geodesic_h(ctx):
    parts = {
        kind: _agreement(ctx.states, kind, lambda s, k=kind: s.data["h_parallel"][k], ctx.tol,
                         eligible=_geodesic_arc(kind, ctx.tol))
        for kind in KINDS
    }
    return Outcome(
        holds=all(p.holds for p in parts.values()),
        residual=max(p.residual for p in parts.values()),
        failures=[f for p in parts.values() for f in p.failures],
        detail={
            **{kind: p.detail for kind, p in parts.items()},
            "nondegenerate_bivector": _worst(s.data["h_parallel"]["nondegenerate_bivector"] for s in ctx.states),
        },
    )


def _vertex(kind):
    def check(ctx):
        outcome = _pointwise(ctx.states, lambda s: abs(s.sections[kind].d_kappa_sq), ctx.tol)
        outcome.detail["kappa_sq"] = [s.sections[kind].kappa_sq for s in ctx.states]
        return _verdict(outcome)
    return check


def _corollary_radical_shape(ctx):
    return _pointwise(ctx.states, lambda s: s.data["radical_shape"], ctx.tol,
                      eligible=lambda s: s.sections[DEGENERATE].planar)


def _proposition_screen_geodesic(ctx):
    return _pointwise(ctx.states, lambda s: s.data["screen_acceleration"], ctx.tol,
                      eligible=lambda s: s.sections[NONDEGENERATE].planar)


def _equivalence_degenerate(ctx):
    return _pointwise(
        ctx.states,
        lambda s: max(s.data["equivalences"].values()),
        ctx.tol,
        eligible=lambda s: s.sections[DEGENERATE].planar and abs(s.data["L"][DEGENERATE]) < ctx.tol,
    )


def _classification(predicate):
    def check(ctx):
        report = predicate(ctx.M, ctx.g, ctx.sample, ctx.tol, packages=ctx.packages)
        return Outcome(
            holds=report.holds(),
            residual=report.residual,
            verdict=report.verdict,
            detail={"witnesses": report.witnesses, **report.extra},
        )
    return check


def _totally_umbilical(ctx):
    outcome = _classification(classify.totally_umbilical)(ctx)
    tree = ctx.claims.get("umbilical_mu")
    if tree is not None:
        claimed = [value_at(tree, s.point, ctx.M.parameters) for s in ctx.states]
        fitted = [s.data["classes"]["umbilical"]["mu"] for s in ctx.states]
        outcome.detail.update(classify.umbilical_claim(fitted, claimed, ctx.tol))
    return outcome


def _conformal_at(s, tol):
    fit = s.data["classes"]["conformal"]
    return fit["vanishing"] or fit["residual"] < tol


def _null_curvature_theorem(ctx):
    return _pointwise(
        ctx.states,
        lambda s: abs(s.data["classes"]["null_curvature"]),
        ctx.tol,
        eligible=lambda s: s.data["classes"]["minimal"] < ctx.tol and _conformal_at(s, ctx.tol),
    )


def _gauss_identity(ctx):
    outcome = _pointwise(ctx.states, lambda s: s.data["classes"]["gauss"]["direct"], ctx.tol,
                         eligible=lambda s: "direct" in s.data["classes"]["gauss"])
    if not outcome.detail["eligible"]:
        return Outcome(holds=None, detail={"reason": "no screen conformal point in the sample"})
    outcome.detail["substituted"] = _worst(
        s.data["classes"]["gauss"]["substituted"] for s in ctx.states if "direct" in s.data["classes"]["gauss"]
    )
    return outcome


def _implications(ctx):
    tol = ctx.tol
    violations = []
    for s in ctx.states:
        classes = s.data["classes"]
        geodesic = classes["geodesic"] < tol
        umbilical = classes["umbilical"]["residual"] < tol
        statements = {
            "totally geodesic => totally umbilical": (not geodesic) or umbilical,
            "totally geodesic => degenerate vertex": (not geodesic) or abs(s.sections[DEGENERATE].d_kappa_sq) < tol,
            "totally geodesic => non-degenerate vertex":
                (not geodesic) or abs(s.sections[NONDEGENERATE].d_kappa_sq) < tol,
            "minimal and screen conformal => K = 0":
                not (classes["minimal"] < tol and _conformal_at(s, tol)) or abs(classes["null_curvature"]) < tol,
        }
        violations += [{"point": list(s.point), "implication": name} for name, ok in statements.items() if not ok]
    return Outcome(
        holds=not violations,
        failures=[v["point"] for v in violations],
        detail={"violations": violations},
    )


def _gauge(ctx):
    failures, worst = [], 0.0
    for s in ctx.states:
        for alpha, entry in s.data["gauge"].items():
            scale = max(1.0, float(alpha) ** 2)
            residual = max(entry["residuals"].values()) / scale
            worst = max(worst, residual)
            unchanged = all(entry["planar"][kind] == s.sections[kind].planar for kind in KINDS)
            if not residual < ctx.tol or not unchanged:
                failures.append(list(s.point))
    return Outcome(holds=not failures, residual=worst, failures=failures,
                   detail={"factors": list(GAUGE_FACTORS)})


def _backend_fd(ctx):
    if ctx.backend != Backend.both:
        return Outcome(holds=None, detail={"reason": "needs backend 'both'"})

    def delta(s):
        fd = s.data["backend_fd"]
        return max(max(fd["forms"].values()), max(max(d.values()) for d in fd["sections"].values()))

    outcome = _pointwise(ctx.states, delta, ctx.agreement)
    mismatched = [list(s.point) for s in ctx.states
                  if any(a != b for a, b in s.data["backend_fd"]["planar"].values())]
    outcome.failures += mismatched
    outcome.holds = outcome.holds and not mismatched
    return outcome


def _backend_trace(ctx):
    failures, worst, errors = [], 0.0, []
    for s in ctx.states:
        for kind, entry in s.data["backend_trace"].items():
            if "error" in entry:
                errors.append({"point": list(s.point), "kind": kind, "error": entry["error"]})
                failures.append(list(s.point))
                continue
            delta = max(entry["agreement"][key] for key in AGREEMENT_KEYS)
            worst = max(worst, delta)
            if not delta < ctx.agreement:
                failures.append(list(s.point))
    return Outcome(holds=not failures, residual=worst, failures=failures, detail={"errors": errors})


CHECKS = {
    CheckName.frame: _frame,
    CheckName.identities: _identities,
    CheckName.planar_degenerate: _planar(DEGENERATE),
    CheckName.planar_nondegenerate: _planar(NONDEGENERATE),
    CheckName.theorem_degenerate: _theorem_degenerate,
    CheckName.theorem_nondegenerate: _theorem_nondegenerate,
    CheckName.geodesic_h: _geodesic_h,
    CheckName.vertex_degenerate: _vertex(DEGENERATE),
    CheckName.vertex_nondegenerate: _vertex(NONDEGENERATE),
    CheckName.corollary_radical_shape: _corollary_radical_shape,
    CheckName.proposition_screen_geodesic: _proposition_screen_geodesic,
    CheckName.equivalence_degenerate: _equivalence_degenerate,
    CheckName.totally_geodesic: _classification(classify.totally_geodesic),
    CheckName.totally_umbilical: _totally_umbilical,
    CheckName.minimal: _classification(classify.minimal),
    CheckName.irrotational: _classification(classify.irrotational),
    CheckName.screen_conformal: _classification(classify.screen_conformal),
    CheckName.null_curvature_theorem: _null_curvature_theorem,
    CheckName.gauss_identity: _gauss_identity,
    CheckName.implications: _implications,
    CheckName.gauge: _gauge,
    CheckName.backend_fd: _backend_fd,
    CheckName.backend_trace: _backend_trace,
}


def _result(name, outcome, expected):
    if outcome.holds is None:
        status = CheckStatus.skipped
    elif outcome.holds == expected:
        status = CheckStatus.passed
    else:
        status = CheckStatus.failed
    return CheckResult(
        name=name.value,
        status=status,
        holds=outcome.holds,
        expected=expected,
        verdict=outcome.verdict,
        residual=outcome.residual,
        failures=outcome.failures,
        detail=to_plain(outcome.detail),
    )


def run(config, backend=None, tol=None, points=None, trace=None, deep=False):
    """Evaluate every sample point and run the requested checks over the ones that succeeded.

    Exit code 0 when every check passes, 2 when any fails and 1 when no
    sample point could be evaluated.
    """
    backend = Backend(backend or config.run.backend)
    primary = Backend.fd if backend == Backend.fd else Backend.jet
    if tol is None:
        tol = config.tolerance.fd if primary == Backend.fd else config.tolerance.jet
    sample = [tuple(map(float, p)) for p in points] if points else config.sample()
    requested = list(dict.fromkeys(CheckName(c) for c in config.checks.run))
    if backend != Backend.both and CheckName.backend_fd in requested:
        evaluated_checks = [c for c in requested if c != CheckName.backend_fd]
    else:
        evaluated_checks = requested

    logger.info("running %d checks on '%s' over %d points (%s backend)",
                len(requested), config.name, len(sample), backend.value)
    states = Parallel(n_jobs=config.run.jobs)(
        delayed(evaluate_point)(config, p, primary, tol, evaluated_checks, trace, deep) for p in sample
    )
    ok = [s for s in states if s.ok]
    ctx = CheckContext(
        M=config.immersion_model(),
        g=config.metric(),
        states=ok,
        tol=tol,
        agreement=config.tolerance.agreement,
        backend=backend,
        claims=config.claims_model(),
    )

    results = []
    for name in requested:
        expected = config.checks.expect.get(name.value, True)
        if not ok:
            outcome = Outcome(holds=None, detail={"reason": "no sample point could be evaluated"})
        else:
            try:
                outcome = CHECKS[name](ctx)
            except SurfaceCheckError as e:
                logger.error("check %s failed to run: %s", name.value, e)
                outcome = Outcome(holds=not expected, detail={"error": str(e)})
        results.append(_result(name, outcome, expected))

    if not ok:
        exit_code = 1
    elif any(r.status == CheckStatus.failed for r in results):
        exit_code = 2
    else:
        exit_code = 0
    logger.info("'%s' finished with exit code %d", config.name, exit_code)
    return Report(
        name=config.name,
        backend=backend.value,
        tolerance=tol,
        points=[PointReport(point=list(s.point), error=s.error, data=to_plain(s.data)) for s in states],
        checks=results,
        passed=exit_code == 0,
        exit_code=exit_code,
    )
