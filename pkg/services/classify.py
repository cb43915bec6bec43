"""Classification predicates over a sample of points.

Point-level helpers work on an induced package and the base-point frame;
the region-level predicates take the worst point and return a ClassReport.
"""
import logging
import os

import numpy as np
from dotenv import load_dotenv

from models.errors import HypothesisNotMet
from models.geometry import ClassReport
from models.models import Verdict
from services.forms import V, XI, decompose, induced_fields

load_dotenv()

logger = logging.getLogger(__name__)

CONFIG = {
    'tolerance': float(os.getenv('JET_TOLERANCE', 1e-8)),
}


def _tol(tol):
    return CONFIG['tolerance'] if tol is None else tol


def point_data(M, g, p, options=None):
    """(frame at the base point, induced package) at one parameter point."""
    fields = induced_fields(M, g, p, options)
    return fields.frame.at_base(), fields.package()


def _points(M, g, sample, options, packages):
    if packages is not None:
        return packages
    return [point_data(M, g, p, options) for p in sample]


# point-level helpers

def geodesic_residual(frame, pkg):
    return float(np.linalg.norm(pkg.D1) + np.linalg.norm(pkg.D2))


def umbilical_fit(frame, pkg):
    """Least-squares Z = lam N + mu u with h(X,Y) = Z g(X,Y) over the three slots."""
    metric = {(XI, XI): 0.0, (XI, V): 0.0, (V, V): float(frame.eps_v)}
    rows, rhs = [], []
    for (X, Y), gxy in metric.items():
        rows.append([gxy, 0.0])
        rhs.append(pkg.D1[X, Y])
        rows.append([0.0, gxy])
        rhs.append(pkg.D2[X, Y])
    A, b = np.array(rows), np.array(rhs)
    (lam, mu), *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.linalg.norm(A @ np.array([lam, mu]) - b)) / max(1.0, float(np.linalg.norm(b)))
    return {"lambda": float(lam), "mu": float(mu), "residual": residual}


def umbilical_claim(fitted, claimed, tol=None):
    """Compare fitted mu values with a stated closed form for H2, point by point.

    ``h2_consistent`` holds when every |mu - claimed| stays below ``tol``
    relative to max(1, |claimed|); ``ratios`` lists mu / claimed.
    """
    tol = _tol(tol)
    fitted, claimed = np.asarray(fitted, dtype=float), np.asarray(claimed, dtype=float)
    gaps = np.abs(fitted - claimed) / np.maximum(1.0, np.abs(claimed))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(claimed != 0.0, fitted / claimed, np.nan)
    return {
        "h2_consistent": bool(np.all(gaps < tol)),
        "h2_residual": float(np.max(gaps)),
        "h2_claimed": claimed.tolist(),
        "h2_ratios": [None if np.isnan(r) else float(r) for r in ratios],
    }


def minimal_residual(frame, pkg):
    trace = frame.eps_v * np.array([pkg.D1[V, V], pkg.D2[V, V]])
    return float(max(np.max(np.abs(trace)), np.max(np.abs(pkg.eps1))))


def irrotational_residual(frame, pkg):
    return float(max(np.max(np.abs(pkg.D2[:, XI])), np.max(np.abs(pkg.eps1))))


def radical_tangency_residual(frame, pkg, g):
    """Largest transversal coefficient of the ambient derivative of xi."""
    worst = 0.0
    for X in (XI, V):
        _, _, a_u, a_n = decompose(frame, pkg.derivatives[X, 0], g)
        worst = max(worst, abs(float(a_u)), abs(float(a_n)))
    return worst


def conformal_fit(frame, pkg, tol=None):
    """Fitted phi with A_N = phi A*_xi, the residual, and whether both operators vanish.

    phi is the ratio of the (v, v) entries when that denominator exceeds
    ``tol``, otherwise the least-squares ratio over the whole operator.
    """
    tol = _tol(tol)
    A_N, A_star = np.asarray(pkg.A_N, dtype=float), np.asarray(pkg.A_xi_star, dtype=float)
    vanishing = np.max(np.abs(A_N)) <= tol and np.max(np.abs(A_star)) <= tol
    denominator = A_star[1, 1]
    if abs(denominator) > tol:
        phi = A_N[1, 1] / denominator
        determinate = True
    else:
        scale = float(np.sum(A_star * A_star))
        phi = float(np.sum(A_N * A_star)) / scale if scale > 0 else 0.0
        determinate = False
    residual = float(np.linalg.norm(A_N - phi * A_star))
    return {"phi": float(phi), "determinate": determinate, "residual": residual, "vanishing": bool(vanishing)}


def null_sectional_curvature_of(frame, pkg):
    D2 = pkg.D2
    return float(frame.eps * (D2[V, XI] * D2[XI, V] - D2[XI, XI] * D2[V, V]))


def gauss_identity_residuals(frame, pkg, tol=None):
    """Flat-ambient Gauss identity for a screen conformal point, in two forms.

    ``direct`` pairs phi D1 with D1; ``substituted`` replaces phi D1(., PW)
    by E1(., PW). Both are maximised over the basis slots with PW = v.
    """
    fit = conformal_fit(frame, pkg, tol)
    if not (fit["vanishing"] or fit["residual"] < _tol(tol)):
        raise HypothesisNotMet(f"point is not screen conformal (residual {fit['residual']:.3e})")
    phi = fit["phi"]
    D1, D2, E1, eps = pkg.D1, pkg.D2, pkg.E1, frame.eps
    direct, substituted = 0.0, 0.0
    for X in (XI, V):
        for Y in (XI, V):
            for Z in (XI, V):
                screen = eps * (D2[X, Z] * D2[Y, V] - D2[Y, Z] * D2[X, V])
                direct = max(direct, abs(phi * (D1[X, Z] * D1[Y, V] - D1[Y, Z] * D1[X, V]) + screen))
                substituted = max(substituted, abs(D1[X, Z] * E1[Y, V] - D1[Y, Z] * E1[X, V] + screen))
    return {"direct": float(direct), "substituted": float(substituted), "phi": phi}


# region-level predicates

def _report(name, holds, residual, witnesses, sample, extra=None, verdict=None):
    if verdict is None:
        verdict = Verdict.true if holds else Verdict.false
    return ClassReport(
        name=name,
        verdict=verdict,
        residual=float(residual),
        witnesses=witnesses,
        sample=[list(map(float, p)) for p in sample],
        extra=extra or {},
    )


def totally_geodesic(M, g, sample, tol=None, options=None, packages=None):
    tol = _tol(tol)
    residuals = [geodesic_residual(f, pkg) for f, pkg in _points(M, g, sample, options, packages)]
    worst = max(residuals)
    return _report("totally_geodesic", worst < tol, worst, residuals, sample)


def totally_umbilical(M, g, sample, tol=None, options=None, packages=None):
    tol = _tol(tol)
    fits = [umbilical_fit(f, pkg) for f, pkg in _points(M, g, sample, options, packages)]
    worst = max(fit["residual"] for fit in fits)
    return _report("totally_umbilical", worst < tol, worst, fits, sample)


def minimal(M, g, sample, tol=None, options=None, packages=None):
    tol = _tol(tol)
    residuals = [minimal_residual(f, pkg) for f, pkg in _points(M, g, sample, options, packages)]
    worst = max(residuals)
    return _report("minimal", worst < tol, worst, residuals, sample)


def irrotational(M, g, sample, tol=None, options=None, packages=None):
    tol = _tol(tol)
    points = _points(M, g, sample, options, packages)
    residuals = [irrotational_residual(f, pkg) for f, pkg in points]
    tangency = [radical_tangency_residual(f, pkg, g) for f, pkg in points]
    worst = max(residuals)
    return _report("irrotational", worst < tol, worst, residuals, sample,
                   extra={"tangency_residual": max(tangency)})


def screen_conformal(M, g, sample, tol=None, options=None, packages=None):
    tol = _tol(tol)
    fits = [conformal_fit(f, pkg, tol) for f, pkg in _points(M, g, sample, options, packages)]
    holds = all(fit["vanishing"] or fit["residual"] < tol for fit in fits)
    if not holds:
        verdict = Verdict.false
    elif all(fit["vanishing"] for fit in fits):
        verdict = Verdict.indeterminate_true
    else:
        verdict = Verdict.true
    worst = max(0.0 if fit["vanishing"] else fit["residual"] for fit in fits)
    return _report("screen_conformal", holds, worst, fits, sample, verdict=verdict)


def null_sectional_curvature(M, g, p, options=None):
    frame, pkg = point_data(M, g, p, options)
    return null_sectional_curvature_of(frame, pkg)


def gauss_identity_residual(M, g, p, options=None, tol=None):
    frame, pkg = point_data(M, g, p, options)
    return gauss_identity_residuals(frame, pkg, tol)["direct"]
