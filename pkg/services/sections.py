"""Normal sections in the radical (xi) and screen (v) directions.

Section jets are assembled from the induced objects term by term, exactly
as the structure equations expand them. Those terms describe the flow line
of the frame field; the section itself leaves that line wherever the flow
drifts off its plane E(p, w), so d2 and d3 carry the drift correction and
``flow`` keeps the uncorrected pair. The direct derivatives of the frame
field along itself are kept alongside as a cross-check of the terms.
"""
import logging
import os

import numpy as np
from dotenv import load_dotenv

from models.errors import CoefficientUndefined
from models.geometry import SectionJet
from models.models import DirectionKind
from services.ambient import inner, norm, relative_bivector_residual, relative_wedge_residual
from services.forms import V, XI, combine, decompose, induced_fields
from services.jet import value_of

load_dotenv()

logger = logging.getLogger(__name__)

CONFIG = {
    'tolerance': float(os.getenv('JET_TOLERANCE', 1e-8)),
    'geodesic_tolerance': float(os.getenv('GEODESIC_TOLERANCE', 1e-8)),
    'negligible': float(os.getenv('WEDGE_NEGLIGIBLE', 1e-12)),
}


def _tol(tol):
    return CONFIG['tolerance'] if tol is None else tol


def _negligible(negligible):
    return CONFIG['negligible'] if negligible is None else negligible


def _base(fields):
    return fields.frame.at_base()


def _tangential_part(fields, w):
    b = _base(fields)
    a_xi, a_v, _, _ = decompose(b, w, fields.g)
    return combine(b, a_xi=a_xi, a_v=a_v)


def stay_in_plane(flow, partner, m, cross, g):
    """Bend the flow line of X back into the plane g(x - p, m) = 0.

    The section is tangent to X + phi Y with phi(0) = 0; ``partner`` is Y,
    ``cross`` is nabla_Y X + 2 nabla_X Y and ``flow`` the pair
    (nabla_X X, nabla_X nabla_X X). Returns corrected (d2, d3) and the drift
    (phi', phi'') that keeps g(d2, m) = g(d3, m) = 0.
    """
    flow2, flow3 = flow
    pairing = inner(g, partner, m)
    phi1 = -inner(g, flow2, m) / pairing
    d2 = flow2 + phi1 * partner
    bent = flow3 + phi1 * cross
    phi2 = -inner(g, bent, m) / pairing
    d3 = bent + phi2 * partner
    return d2, d3, {"phi1": float(phi1), "phi2": float(phi2)}


def _finish(kind, d1, flow, correction, terms, direct, frame, g, geodesic_arc, tol, negligible):
    d2, d3, drift = stay_in_plane(flow, *correction, g)
    residual = relative_wedge_residual(d1, d2, d3, negligible=negligible)
    return SectionJet(
        kind=kind,
        d1=d1,
        d2=d2,
        d3=d3,
        kappa_sq=float(frame.eps * inner(g, d2, d2)),
        d_kappa_sq=float(2 * frame.eps * inner(g, d2, d3)),
        planarity_residual=residual,
        planar=residual < tol,
        geodesic_arc=geodesic_arc,
        terms=terms,
        direct=direct,
        flow=flow,
        flow_residual=relative_wedge_residual(d1, *flow, negligible=negligible),
        drift=drift,
    )


def degenerate_section(fields, tol=None, negligible=None):
    """Radical section in E(p, xi) = {g(x - p, v) = 0}."""
    tol = _tol(tol)
    f, b, g = fields, _base(fields), fields.g
    D = f.D2[XI][XI]
    nabla_xi_xi = f.tangential(XI, XI)
    gamma_xi, gamma_v = value_of(np.array(f.nabla[XI][XI], dtype=object))
    d2_xi = value_of(D)
    terms = {
        "nabla_xi nabla_xi xi": _tangential_part(f, value_of(f.derivative(nabla_xi_xi, XI))),
        "D2(nabla_xi xi, xi) u": (gamma_xi * d2_xi + gamma_v * value_of(f.D2[V][XI])) * b.u,
        "xi(D2(xi,xi)) u": value_of(f.derivative(D, XI)) * b.u,
        "D2(xi,xi)(-A_u xi + eps1(xi) N)": d2_xi * (
            -combine(b, a_xi=value_of(f.A_u[0][XI]), a_v=value_of(f.A_u[1][XI])) + value_of(f.eps1[XI]) * b.n
        ),
    }
    flow = (value_of(nabla_xi_xi) + d2_xi * b.u, sum(terms.values()))
    cross = value_of(f.dxi[V]) + 2 * value_of(f.dv[XI])
    direct = (value_of(f.dxi[XI]), value_of(f.derivative(f.dxi[XI], XI)))
    geodesic_arc = np.linalg.norm(value_of(nabla_xi_xi)) < CONFIG['geodesic_tolerance'] * np.linalg.norm(b.xi)
    return _finish(DirectionKind.degenerate, b.xi, flow, (b.v, b.v, cross), terms, direct, b, g,
                   bool(geodesic_arc), tol, _negligible(negligible))


def _screen_second_form(fields):
    """T(v,v) = E1(v,v) xi + D1(v,v) N + D2(v,v) u as a jet field."""
    f = fields
    return combine(f.frame, a_xi=f.E1[V][V], a_u=f.D2[V][V], a_n=f.D1[V][V])


def nondegenerate_section(fields, tol=None, negligible=None):
    """Screen section in E(p, v) = {g(x - p, N) = 0}."""
    tol = _tol(tol)
    f, b, g = fields, _base(fields), fields.g
    ns = f.nabla_star[V]
    screen_acceleration = ns * f.frame.v
    E, D1, D2 = (value_of(x) for x in (f.E1[V][V], f.D1[V][V], f.D2[V][V]))
    nsv = value_of(ns)
    image = {
        name: combine(b, a_xi=value_of(op[0][V]), a_v=value_of(op[1][V]))
        for name, op in (("A*_xi", f.A_xi_star), ("A_N", f.A_N), ("A_u", f.A_u))
    }
    screen_derivative = value_of(f.derivative(screen_acceleration, V))
    terms = {
        "nabla*_v nabla*_v v": b.eps_v * inner(g, screen_derivative, b.v) * b.v,
        "E1(v, nabla*_v v) xi": nsv * E * b.xi,
        "D1(v, nabla*_v v) N": nsv * D1 * b.n,
        "D2(v, nabla*_v v) u": nsv * D2 * b.u,
        "v(E1(v,v)) xi": value_of(f.derivative(f.E1[V][V], V)) * b.xi,
        "v(D1(v,v)) N": value_of(f.derivative(f.D1[V][V], V)) * b.n,
        "v(D2(v,v)) u": value_of(f.derivative(f.D2[V][V], V)) * b.u,
        "-E1(v,v) A*_xi v": -E * image["A*_xi"],
        "E1(v,v) u1(v) xi": E * value_of(f.u1[V]) * b.xi,
        "E1(v,v) D2(v,xi) u": E * value_of(f.D2[V][XI]) * b.u,
        "-D1(v,v) A_N v": -D1 * image["A_N"],
        "D1(v,v) rho1(v) N": D1 * value_of(f.rho1[V]) * b.n,
        "D1(v,v) rho2(v) u": D1 * value_of(f.rho2[V]) * b.u,
        "-D2(v,v) A_u v": -D2 * image["A_u"],
        "D2(v,v) eps1(v) N": D2 * value_of(f.eps1[V]) * b.n,
    }
    flow = (value_of(screen_acceleration) + value_of(_screen_second_form(f)), sum(terms.values()))
    cross = value_of(f.dv[XI]) + 2 * value_of(f.dxi[V])
    direct = (value_of(f.dv[V]), value_of(f.derivative(f.dv[V], V)))
    geodesic_arc = np.linalg.norm(value_of(screen_acceleration)) < CONFIG['geodesic_tolerance'] * np.linalg.norm(b.v)
    return _finish(DirectionKind.nondegenerate, b.v, flow, (b.xi, b.n, cross), terms, direct, b, g,
                   bool(geodesic_arc), tol, _negligible(negligible))


def section(fields, kind, tol=None, negligible=None):
    if DirectionKind(kind) == DirectionKind.degenerate:
        return degenerate_section(fields, tol, negligible)
    return nondegenerate_section(fields, tol, negligible)


def planarity(jet, tol=None, negligible=None):
    """Wedge verdict of a section jet, or of a bare (d1, d2, d3) triple."""
    tol = _tol(tol)
    d1, d2, d3 = (jet.d1, jet.d2, jet.d3) if isinstance(jet, SectionJet) else jet
    residual = relative_wedge_residual(d1, d2, d3, negligible=_negligible(negligible))
    return residual < tol, residual


def radical_plane_residual(fields, tol=None, negligible=None):
    """D2(xi,xi) u ^ nabla_xi(D2(xi,xi) u), expanded through the Weingarten formula for u."""
    f, b = fields, _base(fields)
    D = value_of(f.D2[XI][XI])
    A_u_xi = combine(b, a_xi=value_of(f.A_u[0][XI]), a_v=value_of(f.A_u[1][XI]))
    derivative = value_of(f.derivative(f.D2[XI][XI], XI)) * b.u - D * A_u_xi + D * value_of(f.eps1[XI]) * b.n
    return relative_bivector_residual(D * b.u, derivative, negligible=_negligible(negligible), reference=norm(b.xi))


def screen_plane_residuals(fields, section_jet=None, tol=None, negligible=None):
    """Planarity of T(v,v) against its derivative along v.

    ``residual`` spans v, T and its derivative; ``bivector`` is the bare
    two-factor wedge, reported for comparison.
    """
    negligible = _negligible(negligible)
    section_jet = section_jet or nondegenerate_section(fields, tol, negligible)
    b = _base(fields)
    T = value_of(_screen_second_form(fields))
    derivative = section_jet.flow[1] - section_jet.terms["nabla*_v nabla*_v v"]
    return {
        "residual": relative_wedge_residual(b.v, T, derivative, negligible=negligible),
        "bivector": relative_bivector_residual(T, derivative, negligible=negligible, reference=norm(b.v)),
    }


def covariant_h(fields, X, Y, Z):
    """(nabla_X h)(Y, Z) at the base point."""
    f = fields
    h_base = {(i, j): value_of(f.h(i, j)) for i in (XI, V) for j in (XI, V)}
    result = value_of(f.derivative(f.h(Y, Z), X))
    gy_xi, gy_v = value_of(np.array(f.nabla[X][Y], dtype=object))
    gz_xi, gz_v = value_of(np.array(f.nabla[X][Z], dtype=object))
    result = result - gy_xi * h_base[XI, Z] - gy_v * h_base[V, Z]
    result = result - gz_xi * h_base[Y, XI] - gz_v * h_base[Y, V]
    return result


def h_parallel_residuals(fields, tol=None, negligible=None):
    negligible = _negligible(negligible)
    f, b = fields, _base(fields)
    h_vv = value_of(f.h(V, V))
    nabla_h_vv = covariant_h(f, V, V, V)
    degenerate = relative_bivector_residual(
        value_of(f.D2[XI][XI]) * b.u, covariant_h(f, XI, XI, XI), negligible=negligible, reference=norm(b.xi)
    )
    return {
        "degenerate": degenerate,
        "nondegenerate": relative_wedge_residual(b.v, h_vv, nabla_h_vv, negligible=negligible),
        "nondegenerate_bivector": relative_bivector_residual(h_vv, nabla_h_vv, negligible=negligible,
                                                             reference=norm(b.v)),
    }


def tangential_acceleration(fields, X):
    """Size of nabla_X X and of its tangential derivative along X."""
    W = fields.tangential(X, X)
    first = float(np.linalg.norm(value_of(W)))
    second = float(np.linalg.norm(_tangential_part(fields, value_of(fields.derivative(W, X)))))
    return first, second


def l_values(fields):
    b = _base(fields)
    T = value_of(_screen_second_form(fields))
    return {
        "degenerate": float(b.eps * value_of(fields.D2[XI][XI]) ** 2),
        "nondegenerate": float(inner(fields.g, T, T)),
    }


def radical_plane_coefficients(fields, section_jet=None, tol=None):
    """Coefficients of gamma''' = a gamma'' + b gamma' along the flow line of xi.

    The log-derivative of D2(xi,xi) needs D2(xi,xi) > 0. Since eps1(xi) =
    -eps D2(xi,xi), gamma''' then keeps the N-component -eps D2(xi,xi)^2 that
    neither gamma' nor gamma'' carries, so the reconstruction residual never
    vanishes there.
    """
    tol = _tol(tol)
    f, b = fields, _base(fields)
    D = value_of(f.D2[XI][XI])
    if D <= tol:
        raise CoefficientUndefined(f"D2(xi,xi) = {D:.3e} admits no logarithm")
    log_derivative = value_of(f.derivative(f.D2[XI][XI], XI)) / D
    u1 = value_of(f.u1[XI])
    a = u1 + log_derivative
    bb = value_of(f.derivative(f.u1[XI], XI)) - D * value_of(f.rho2[XI]) * b.eps - u1 * log_derivative
    section_jet = section_jet or degenerate_section(f, tol)
    flow2, flow3 = section_jet.flow
    residual = flow3 - a * flow2 - bb * section_jet.d1
    return {"a": float(a), "b": float(bb), "residual": float(np.linalg.norm(residual))}


def radical_shape_residual(fields):
    """|A_u xi - eps rho2(xi) xi|."""
    b = _base(fields)
    A_u_xi = combine(b, a_xi=value_of(fields.A_u[0][XI]), a_v=value_of(fields.A_u[1][XI]))
    return float(np.linalg.norm(A_u_xi - b.eps * value_of(fields.rho2[XI]) * b.xi))


def degenerate_equivalences(fields, section_jet=None, tol=None):
    """Magnitudes of the four statements tied together along planar radical sections."""
    section_jet = section_jet or degenerate_section(fields, tol)
    slots = [(Y, Z) for Y in (XI, V) for Z in (XI, V)]
    return {
        "D2(xi,xi) = 0": abs(float(value_of(fields.D2[XI][XI]))),
        "(nabla_xi h)(xi,xi) = 0": float(np.linalg.norm(covariant_h(fields, XI, XI, XI))),
        "nabla h = 0 along xi": max(float(np.linalg.norm(covariant_h(fields, XI, Y, Z))) for Y, Z in slots),
        "kappa = 0": abs(section_jet.kappa_sq),
    }


# entry points on an immersion and a parameter point

def degenerate_jet(M, g, p, options=None, tol=None):
    return degenerate_section(induced_fields(M, g, p, options), tol)


def nondegenerate_jet(M, g, p, options=None, tol=None):
    return nondegenerate_section(induced_fields(M, g, p, options), tol)


def theorem31_residual(M, g, p, options=None, tol=None):
    return radical_plane_residual(induced_fields(M, g, p, options), tol)


def theorem_nd_residual(M, g, p, options=None, tol=None):
    return screen_plane_residuals(induced_fields(M, g, p, options), tol=tol)["residual"]


def geodesic_h_residual(M, g, p, options=None, tol=None):
    return h_parallel_residuals(induced_fields(M, g, p, options), tol)


def L_value(M, g, p, kind, options=None):
    return l_values(induced_fields(M, g, p, options))[DirectionKind(kind).value]


def vertex(M, g, p, kind, options=None, tol=None):
    jet = section(induced_fields(M, g, p, options), kind, tol)
    return jet.kappa_sq, jet.d_kappa_sq


def plane_coefficients(M, g, p, options=None, tol=None):
    result = radical_plane_coefficients(induced_fields(M, g, p, options), tol=tol)
    return result["a"], result["b"]
