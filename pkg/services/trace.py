"""Independent oracle: trace the normal section M ^ E(p, w) numerically.

The section is followed by predictor-corrector continuation on the plane
constraint, and its derivatives at p come from symmetric stencils with
Richardson extrapolation. Nothing here touches the induced forms, so the
jets in ``services.sections`` can be checked against it.
"""
import logging
import os

import numpy as np
from dotenv import load_dotenv

from models.errors import ContinuationStall, StepTooLarge
from models.geometry import FrameOptions, TracedCurve
from services.ambient import inner, triple_wedge
from services.exprjet import immersion_jet, immersion_point
from services.forms import pin_fields
from services.frame import build_frame
from services.oracle import line_derivative

load_dotenv()

logger = logging.getLogger(__name__)

CONFIG = {
    'trace_step': float(os.getenv('TRACE_STEP', 1e-2)),
    'newton_tolerance': float(os.getenv('NEWTON_TOLERANCE', 1e-13)),
    'max_iterations': int(os.getenv('NEWTON_MAX_ITERATIONS', 25)),
}

MIN_SAMPLES_PER_SIDE = 4


def _position_and_tangents(M, c):
    jet = immersion_jet(M, c, order=1)
    return jet.position(), np.array(jet.tangents()).T


def _correct(M, c, origin, X_p, normal, tau, sigma):
    """Newton corrector for the plane constraint plus the arc-parameter condition."""
    for _ in range(CONFIG['max_iterations']):
        X, J = _position_and_tangents(M, c)
        residual = np.array([normal @ (X - X_p), tau @ (c - origin) - sigma])
        jacobian = np.array([normal @ J, tau])
        try:
            delta = np.linalg.solve(jacobian, -residual)
        except np.linalg.LinAlgError as e:
            raise ContinuationStall(f"singular corrector system at {tuple(c)}") from e
        c = c + delta
        if np.linalg.norm(delta) <= CONFIG['newton_tolerance'] * (1.0 + np.linalg.norm(c)):
            return c
    raise ContinuationStall(f"corrector did not converge at sigma={sigma:.3e}")


def trace_curve(M, g, p, w, h=None, n=MIN_SAMPLES_PER_SIDE, options=None, frame=None):
    """Samples of M ^ E(p, w) at sigma = k h/2, |k| <= n, and its derivatives at p.

    ``sigma`` is the parameter-space projection onto the coordinates of w,
    so the traced curve has the parametrization its own samples give it.
    """
    h = CONFIG['trace_step'] if h is None else float(h)
    if h <= 0:
        raise ValueError(f"trace step must be positive, got {h}")
    if n < MIN_SAMPLES_PER_SIDE:
        raise ValueError(f"the third-derivative stencil needs {MIN_SAMPLES_PER_SIDE} samples per side, got {n}")
    origin = np.array([float(x) for x in p])
    w = np.asarray(w, dtype=float)
    if frame is None:
        base = immersion_jet(M, origin)
        frame = build_frame(base, g, pin_fields(M, base.point, options or FrameOptions()))
    frame = frame.at_base()

    normal = triple_wedge(w, frame.n, frame.u)
    length = np.linalg.norm(normal)
    if length <= 1e-12 * np.linalg.norm(w):
        raise ValueError("E(p, w) is not three-dimensional")
    normal = normal / length

    X_p, J_p = _position_and_tangents(M, origin)
    tau, *_ = np.linalg.lstsq(J_p, w, rcond=None)
    if np.linalg.norm(J_p @ tau - w) > 1e-8 * np.linalg.norm(w):
        raise ValueError("trace direction is not tangent to M")

    unit = h / 2.0
    reach = unit / np.linalg.norm(tau)
    samples = {0: origin}
    for sign in (1, -1):
        previous = current = origin
        for k in range(1, n + 1):
            sigma = sign * k * unit
            if k == 1:
                predictor = origin + sign * unit * tau / (tau @ tau)
            else:
                predictor = 2 * current - previous
            corrected = _correct(M, predictor, origin, X_p, normal, tau, sigma)
            if np.linalg.norm(corrected - predictor) > reach:
                raise StepTooLarge(f"corrector jumped {np.linalg.norm(corrected - predictor):.3e} at step {h}")
            previous, current = current, corrected
            samples[sign * k] = corrected

    keys = sorted(samples)
    parameters = np.array([samples[k] for k in keys])
    ambient = np.array([immersion_point(M, c) for c in parameters])
    positions = dict(zip(keys, ambient))
    derivatives = tuple(
        line_derivative(lambda k: positions[k], order, levels=2)[0] / unit ** order for order in (1, 2, 3)
    )
    constraint = float(np.max(np.abs((ambient - X_p) @ normal)))
    logger.debug("traced section at %s along %s: constraint residual %.3e", tuple(origin), w, constraint)
    return TracedCurve(
        direction=w,
        step=h,
        sigma=np.array(keys, dtype=float) * unit,
        parameter_samples=parameters,
        ambient_samples=ambient,
        plane_normal=normal,
        constraint_residual=constraint,
        derivatives=derivatives,
    )


def fit_parametrization(curve_derivatives, section_derivatives):
    """Least-squares reparametrization s -> sigma matching the traced curve to a jet.

    With sigma' = lam, sigma'' = mu, sigma''' = nu the traced derivatives
    transform by the chain rule; the fitted triple and the transformed
    derivatives are returned.
    """
    G1, G2, G3 = curve_derivatives
    d1, d2, d3 = section_derivatives
    scale = G1 @ G1
    lam = (G1 @ d1) / scale
    mu = ((d2 - lam ** 2 * G2) @ G1) / scale
    nu = ((d3 - lam ** 3 * G3 - 3 * lam * mu * G2) @ G1) / scale
    matched = (lam * G1, lam ** 2 * G2 + mu * G1, lam ** 3 * G3 + 3 * lam * mu * G2 + nu * G1)
    return (float(lam), float(mu), float(nu)), matched


def backend_agreement(section_jet, curve, g, eps):
    """Relative deltas between jet derivatives and the matched traced ones."""
    (lam, mu, nu), matched = fit_parametrization(
        curve.derivatives, (section_jet.d1, section_jet.d2, section_jet.d3)
    )
    deltas = {
        name: float(np.linalg.norm(jet - traced)) / max(1.0, float(np.linalg.norm(jet)))
        for name, jet, traced in zip(("d1", "d2", "d3"), (section_jet.d1, section_jet.d2, section_jet.d3), matched)
    }
    deltas["kappa_sq"] = abs(section_jet.kappa_sq - float(eps * inner(g, matched[1], matched[1])))
    deltas["reparametrization"] = [lam, mu, nu]
    return deltas
