"""Half-lightlike structure detection and the quasi-orthonormal frame {xi, N, u, v}.

Every construction here is written against the jet scalar, so the frame
comes out as a field around the base point and can be differentiated.
Discrete choices (pivots, dominant coefficients, signs) are made on the
base-point values only.
"""
import logging
import os
from dataclasses import replace
from itertools import combinations

import numpy as np
from dotenv import load_dotenv

from models.errors import CoIsotropic, NotLightlike, PinViolation, TransversalNotFound
from models.geometry import MovingFrame
from models.models import StructureKind
from services import jet as jets
from services.ambient import euclidean, inner, sign_of, unit_cosine
from services.jet import value_of

load_dotenv()

logger = logging.getLogger(__name__)

CONFIG = {
    'rank_tolerance': float(os.getenv('RANK_TOLERANCE', 1e-9)),
    'transversal_tolerance': float(os.getenv('TRANSVERSAL_TOLERANCE', 1e-12)),
    'pin_tolerance': float(os.getenv('PIN_TOLERANCE', 1e-9)),
    'tie_tolerance': float(os.getenv('TIE_TOLERANCE', 1e-12)),
}


def _vector(items):
    return np.array(list(items), dtype=object)


def _metric_fields(tangents, g):
    return [[inner(g, tangents[i], tangents[j]) for j in range(2)] for i in range(2)]


def classify_metric(matrix):
    matrix = np.asarray(matrix, dtype=float)
    scale = float(np.max(np.abs(matrix)))
    if scale == 0.0:
        return StructureKind.co_isotropic
    eigenvalues = np.linalg.eigvalsh(matrix)
    rank = int(np.sum(np.abs(eigenvalues) > CONFIG['rank_tolerance'] * scale))
    return {0: StructureKind.co_isotropic, 1: StructureKind.half_lightlike}.get(rank, StructureKind.non_degenerate)


def induced_metric(jet, g):
    """Induced metric on the coordinate tangents and the structure it implies."""
    matrix = value_of(np.array(_metric_fields(jet.tangent_fields(), g), dtype=object))
    return matrix, classify_metric(matrix)


def _require_half_lightlike(kind):
    if kind == StructureKind.co_isotropic:
        raise CoIsotropic("induced metric vanishes: the radical is two-dimensional")
    if kind == StructureKind.non_degenerate:
        raise NotLightlike("induced metric is non-degenerate")


def _radical_coefficients(metric):
    """Kernel coefficients of the induced metric, largest one scaled to exactly 1."""
    (g11, g12), (_, g22) = metric
    row1 = np.hypot(value_of(g11), value_of(g12))
    row2 = np.hypot(value_of(g12), value_of(g22))
    c = [-g12, g11] if row1 >= row2 else [g22, -g12]
    k = int(np.argmax([abs(value_of(x)) for x in c]))
    pivot = c[k]
    coefficients = [x / pivot for x in c]
    coefficients[k] = 1.0
    return coefficients


def _radical_field(tangents, g):
    metric = _metric_fields(tangents, g)
    _require_half_lightlike(classify_metric(value_of(np.array(metric, dtype=object))))
    c = _radical_coefficients(metric)
    return c[0] * tangents[0] + c[1] * tangents[1], _vector(c)


def radical_direction(jet, g):
    xi, _ = _radical_field(jet.tangent_fields(), g)
    return value_of(xi)


def tangent_coordinates(tangents, x):
    """Coefficients c with x = c1 X1 + c2 X2, solved on the best-conditioned row pair."""
    t1, t2 = (value_of(t) for t in tangents)
    pairs = list(combinations(range(4), 2))
    minors = [abs(t1[a] * t2[b] - t1[b] * t2[a]) for a, b in pairs]
    a, b = pairs[int(np.argmax(minors))]
    det = tangents[0][a] * tangents[1][b] - tangents[0][b] * tangents[1][a]
    c1 = (x[a] * tangents[1][b] - x[b] * tangents[1][a]) / det
    c2 = (tangents[0][a] * x[b] - tangents[0][b] * x[a]) / det
    return _vector([c1, c2])


def _orthogonal_complement(rows, g):
    """Basis of the vectors g-orthogonal to two independent vectors."""
    a = [[g.signs[j] * row[j] for j in range(4)] for row in rows]
    pairs = list(combinations(range(4), 2))
    minors = [abs(value_of(a[0][p] * a[1][q] - a[0][q] * a[1][p])) for p, q in pairs]
    p, q = pairs[int(np.argmax(minors))]
    det = a[0][p] * a[1][q] - a[0][q] * a[1][p]
    basis = []
    for f in (j for j in range(4) if j not in (p, q)):
        w = [0.0] * 4
        w[f] = 1.0
        w[p] = (-a[0][f] * a[1][q] + a[0][q] * a[1][f]) / det
        w[q] = (-a[0][p] * a[1][f] + a[0][f] * a[1][p]) / det
        basis.append(_vector(w))
    return basis


def _fix_sign(x, *companions):
    """Flip so the first nonzero base-point component is positive."""
    values = value_of(x)
    nonzero = np.flatnonzero(np.abs(values) > CONFIG['tie_tolerance'] * max(np.max(np.abs(values)), 1e-300))
    if nonzero.size and values[nonzero[0]] < 0:
        return (-x,) + tuple(-c for c in companions)
    return (x,) + companions


def transversal_N(V, xi, g, tol=None):
    """The null transversal with g(N, xi) = 1, built from any V with g(V, xi) != 0."""
    tol = CONFIG['transversal_tolerance'] if tol is None else tol
    gv = inner(g, V, xi)
    scale = np.linalg.norm(value_of(np.asarray(V))) * np.linalg.norm(value_of(np.asarray(xi)))
    if abs(value_of(gv)) <= tol * max(scale, 1e-300):
        raise TransversalNotFound(f"g(V, xi) = {value_of(gv):.3e} is too small to build N")
    return (V - (inner(g, V, V) / (2 * gv)) * xi) / gv


def _screen_vector(tangents, xi, g):
    """Unit coordinate tangent least parallel to xi (ties go to the lower index)."""
    cosines = [unit_cosine(value_of(t), value_of(xi)) for t in tangents]
    j = 1 if cosines[1] < cosines[0] - CONFIG['tie_tolerance'] else 0
    q = inner(g, tangents[j], tangents[j])
    eps_v = sign_of(value_of(q))
    scale = jets.sqrt(eps_v * q)
    direction = _vector([1.0 if k == j else 0.0 for k in range(2)]) / scale
    v, direction = _fix_sign(tangents[j] / scale, direction)
    return v, direction, eps_v


def _screen_transversal(tangents, xi, g):
    candidates = _orthogonal_complement(tangents, g)
    cosines = [unit_cosine(value_of(w), value_of(xi)) for w in candidates]
    w = candidates[1] if cosines[1] < cosines[0] - CONFIG['tie_tolerance'] else candidates[0]
    w = w - (euclidean(w, xi) / euclidean(xi, xi)) * xi
    q = inner(g, w, w)
    if abs(value_of(q)) <= CONFIG['transversal_tolerance'] * np.dot(value_of(w), value_of(w)):
        raise TransversalNotFound("normal bundle has no non-null direction")
    eps = sign_of(value_of(q))
    (u,) = _fix_sign(w / jets.sqrt(eps * q))
    return u, eps


def _lightlike_transversal(v, u, xi, g):
    candidates = _orthogonal_complement((v, u), g)
    pairings = [abs(value_of(inner(g, w, xi))) for w in candidates]
    V = candidates[int(np.argmax(pairings))]
    return transversal_N(V, xi, g)


def _check(relation, residual):
    if abs(residual) > CONFIG['pin_tolerance']:
        raise PinViolation(relation, abs(residual))


def _validate_tangent(name, x, tangents):
    c = tangent_coordinates(tangents, x)
    rebuilt = value_of(c[0] * tangents[0] + c[1] * tangents[1])
    _check(f"{name} tangent to M", float(np.linalg.norm(rebuilt - value_of(x))))
    return c


def _normalize_pin(name, x, direction, g):
    q = inner(g, x, x)
    if abs(value_of(q)) <= CONFIG['pin_tolerance']:
        raise PinViolation(f"g({name},{name}) != 0", abs(value_of(q)))
    sign = sign_of(value_of(q))
    scale = jets.sqrt(sign * q)
    return x / scale, (None if direction is None else direction / scale), sign


def build_frame(jet, g, pins=None):
    """Frame field around the jet's base point, honouring any pinned vectors.

    ``pins`` maps any of 'xi', 'v', 'u', 'n' to jet-valued 4-vectors. Pinned
    xi and n are used verbatim; pinned v and u are rescaled to unit length.
    """
    pins = pins or {}
    tangents = jet.tangent_fields()
    metric = value_of(np.array(_metric_fields(tangents, g), dtype=object))
    _require_half_lightlike(classify_metric(metric))

    if 'xi' in pins:
        xi = pins['xi']
        _check("g(xi,xi) = 0", value_of(inner(g, xi, xi)))
        xi_direction = _validate_tangent("xi", xi, tangents)
        for i in range(2):
            _check(f"g(xi,X{i + 1}) = 0", value_of(inner(g, xi, tangents[i])))
    else:
        xi, xi_direction = _radical_field(tangents, g)

    if 'v' in pins:
        v_direction = _validate_tangent("v", pins['v'], tangents)
        _check("g(v,xi) = 0", value_of(inner(g, pins['v'], xi)))
        v, v_direction, eps_v = _normalize_pin("v", pins['v'], v_direction, g)
        if abs(np.linalg.det(np.array([value_of(xi_direction), value_of(v_direction)]))) <= CONFIG['pin_tolerance']:
            raise PinViolation("v independent of xi", 0.0)
    else:
        v, v_direction, eps_v = _screen_vector(tangents, xi, g)

    if 'u' in pins:
        for i in range(2):
            _check(f"g(u,X{i + 1}) = 0", value_of(inner(g, pins['u'], tangents[i])))
        u, _, eps = _normalize_pin("u", pins['u'], None, g)
    else:
        u, eps = _screen_transversal(tangents, xi, g)

    if 'n' in pins:
        n = pins['n']
        _check("g(N,xi) = 1", value_of(inner(g, n, xi)) - 1.0)
        _check("g(N,N) = 0", value_of(inner(g, n, n)))
        _check("g(N,u) = 0", value_of(inner(g, n, u)))
        _check("g(N,v) = 0", value_of(inner(g, n, v)))
    else:
        n = _lightlike_transversal(v, u, xi, g)

    logger.debug("frame at %s: eps=%d eps_v=%d pinned=%s", jet.point, eps, eps_v, sorted(pins))
    return MovingFrame(
        xi=np.asarray(xi, dtype=object),
        v=np.asarray(v, dtype=object),
        u=np.asarray(u, dtype=object),
        n=np.asarray(n, dtype=object),
        eps=eps,
        eps_v=eps_v,
        xi_direction=np.asarray(xi_direction, dtype=object),
        v_direction=np.asarray(v_direction, dtype=object),
    )


def gauge_transform(frame, alpha):
    if alpha == 0:
        raise ValueError("gauge factor must be nonzero")
    return replace(
        frame,
        xi=frame.xi * alpha,
        n=frame.n / alpha,
        xi_direction=frame.xi_direction * alpha,
        gauge=frame.gauge * alpha,
    )


def frame_residuals(frame, g):
    """Residual of every quasi-orthonormality relation at the base point."""
    f = frame.at_base()
    residuals = {
        "g(xi,xi)": inner(g, f.xi, f.xi),
        "g(N,N)": inner(g, f.n, f.n),
        "g(N,xi)-1": inner(g, f.n, f.xi) - 1.0,
        "g(N,u)": inner(g, f.n, f.u),
        "g(N,v)": inner(g, f.n, f.v),
        "g(u,u)-eps": inner(g, f.u, f.u) - f.eps,
        "g(u,xi)": inner(g, f.u, f.xi),
        "g(u,v)": inner(g, f.u, f.v),
        "g(v,v)-eps_v": inner(g, f.v, f.v) - f.eps_v,
        "g(v,xi)": inner(g, f.v, f.xi),
    }
    return {name: abs(float(value)) for name, value in residuals.items()}


def spans_ambient(frame, tol=1e-9):
    f = frame.at_base()
    return abs(float(np.linalg.det(np.array([f.xi, f.v, f.u, f.n], dtype=float)))) > tol
