"""Induced geometry of the frame: fundamental forms, shape operators, one-forms.

Everything comes from decomposing ambient directional derivatives of the
frame fields in the basis {xi, v, u, N}; the ambient space is flat, so the
ambient connection is plain componentwise differentiation.
"""
import logging

import numpy as np

from models.geometry import FrameOptions, InducedPackage
from services.ambient import inner
from services.exprjet import field_jets, immersion_jet
from services.frame import build_frame, gauge_transform
from services.jet import Jet, value_of

logger = logging.getLogger(__name__)

XI, V = 0, 1


def ambient_derivative(field, direction):
    """Directional derivative of a jet field along (c1, c2) in parameter space."""
    if isinstance(field, np.ndarray):
        return np.array([ambient_derivative(f, direction) for f in field], dtype=object)
    if not isinstance(field, Jet):
        return 0.0
    return direction[0] * field.partial(0) + direction[1] * field.partial(1)


def decompose(frame, w, g):
    """Coefficients (a_xi, a_v, a_u, a_N) of w in the frame."""
    return (
        inner(g, w, frame.n),
        frame.eps_v * inner(g, w, frame.v),
        frame.eps * inner(g, w, frame.u),
        inner(g, w, frame.xi),
    )


def combine(frame, a_xi=0.0, a_v=0.0, a_u=0.0, a_n=0.0):
    return a_xi * frame.xi + a_v * frame.v + a_u * frame.u + a_n * frame.n


def _matrix(rows):
    return np.array(rows, dtype=object)


class InducedFields:
    """Jet-valued induced objects around one base point.

    Index 0 stands for xi and index 1 for v in every slot. Bilinear forms
    are [X][Y]; operators are [component][X].
    """

    def __init__(self, frame, g, jet=None):
        self.frame = frame
        self.g = g
        self.jet = jet
        self.basis = (frame.xi, frame.v)
        self.directions = (frame.xi_direction, frame.v_direction)

        self.dxi = [self.derivative(frame.xi, X) for X in (XI, V)]
        self.dv = [self.derivative(frame.v, X) for X in (XI, V)]
        self.du = [self.derivative(frame.u, X) for X in (XI, V)]
        self.dn = [self.derivative(frame.n, X) for X in (XI, V)]
        dbasis = (self.dxi, self.dv)

        # nabla[X][Y] = (xi, v) coefficients of nabla_X Y; D1, D2 transversal parts
        self.nabla = [[None, None], [None, None]]
        self.D1 = [[None, None], [None, None]]
        self.D2 = [[None, None], [None, None]]
        for X in (XI, V):
            for Y in (XI, V):
                a_xi, a_v, a_u, a_n = decompose(frame, dbasis[Y][X], g)
                self.nabla[X][Y] = (a_xi, a_v)
                self.D1[X][Y] = a_n
                self.D2[X][Y] = a_u

        self.E1 = [[0.0, self.nabla[X][V][0]] for X in (XI, V)]
        self.nabla_star = [self.nabla[X][V][1] for X in (XI, V)]

        self.A_N = [[None, None], [None, None]]
        self.A_u = [[None, None], [None, None]]
        self.A_xi_star = [[0.0, 0.0], [None, None]]
        self.rho1, self.rho2 = [None, None], [None, None]
        self.eps1, self.eps2 = [None, None], [None, None]
        self.u1 = [None, None]
        for X in (XI, V):
            a_xi, a_v, a_u, a_n = decompose(frame, self.dn[X], g)
            self.A_N[0][X], self.A_N[1][X] = -a_xi, -a_v
            self.rho1[X], self.rho2[X] = a_n, a_u
            a_xi, a_v, a_u, a_n = decompose(frame, self.du[X], g)
            self.A_u[0][X], self.A_u[1][X] = -a_xi, -a_v
            self.eps1[X], self.eps2[X] = a_n, a_u
            a_xi, a_v, _, _ = decompose(frame, self.dxi[X], g)
            self.u1[X] = a_xi
            self.A_xi_star[1][X] = -a_v

        self.eta = [inner(g, frame.xi, frame.n), inner(g, frame.v, frame.n)]
        self.screen_norm = inner(g, frame.v, frame.v)

    def derivative(self, field, X):
        return ambient_derivative(field, self.directions[X])

    def tangential(self, X, Y):
        """nabla_X Y as an ambient jet field."""
        a_xi, a_v = self.nabla[X][Y]
        return combine(self.frame, a_xi=a_xi, a_v=a_v)

    def h(self, X, Y):
        """Second fundamental form h(X, Y) = D1 N + D2 u as an ambient field."""
        return combine(self.frame, a_u=self.D2[X][Y], a_n=self.D1[X][Y])

    def operator_image(self, operator, X):
        return combine(self.frame, a_xi=operator[0][X], a_v=operator[1][X])

    def package(self):
        derivatives = np.array(
            [[value_of(d[X]) for d in (self.dxi, self.dv, self.du, self.dn)] for X in (XI, V)]
        )
        return InducedPackage(
            D1=value_of(_matrix(self.D1)),
            D2=value_of(_matrix(self.D2)),
            E1=value_of(_matrix(self.E1)),
            A_N=value_of(_matrix(self.A_N)),
            A_u=value_of(_matrix(self.A_u)),
            A_xi_star=value_of(_matrix(self.A_xi_star)),
            rho1=value_of(_matrix(self.rho1)),
            rho2=value_of(_matrix(self.rho2)),
            eps1=value_of(_matrix(self.eps1)),
            eps2=value_of(_matrix(self.eps2)),
            u1=value_of(_matrix(self.u1)),
            eta=value_of(_matrix(self.eta)),
            nabla=value_of(_matrix(self.nabla)),
            nabla_star=value_of(_matrix(self.nabla_star)),
            derivatives=derivatives,
            screen_norm_derivative=np.array([value_of(self.derivative(self.screen_norm, X)) for X in (XI, V)]),
            directions=value_of(_matrix(self.directions)),
        )


def pin_fields(M, p, options):
    if not options.pins:
        return None
    return {
        name: np.array(field_jets(trees, p, M.parameters, options.backend, options.fd_step), dtype=object)
        for name, trees in options.pins.items()
    }


def induced_fields(M, g, p, options=None):
    options = options or FrameOptions()
    jet = immersion_jet(M, p, options.backend, options.fd_step)
    frame = build_frame(jet, g, pin_fields(M, jet.point, options))
    if options.gauge != 1.0:
        frame = gauge_transform(frame, options.gauge)
    return InducedFields(frame, g, jet)


def induced_package(M, g, p, options=None):
    return induced_fields(M, g, p, options).package()


def coordinate_form(pkg, form):
    """A bilinear form from the {xi, v} basis to the coordinate tangents."""
    inverse = np.linalg.inv(pkg.directions)
    return inverse @ np.asarray(form, dtype=float) @ inverse.T


def _relative(x, reference):
    return float(np.linalg.norm(x)) / max(1.0, float(np.linalg.norm(reference)))


def identity_residuals(pkg, frame, g):
    """Residual of each structural identity of the induced objects, largest over slots."""
    f = frame.at_base()
    basis = (f.xi, f.v)
    eps = f.eps
    image = {
        "A_N": [combine(f, pkg.A_N[0, X], pkg.A_N[1, X]) for X in (XI, V)],
        "A_u": [combine(f, pkg.A_u[0, X], pkg.A_u[1, X]) for X in (XI, V)],
        "A_xi_star": [combine(f, pkg.A_xi_star[0, X], pkg.A_xi_star[1, X]) for X in (XI, V)],
    }
    slots = [(X, Y) for X in (XI, V) for Y in (XI, V)]
    residuals = {
        "D1(X,xi) = 0": max(abs(pkg.D1[X, XI]) for X in (XI, V)),
        "g(A_N X, N) = 0": max(abs(inner(g, image["A_N"][X], f.n)) for X in (XI, V)),
        "g(A_u X, Y) = eps D2(X,Y) + eps1(X) eta(Y)": max(
            abs(inner(g, image["A_u"][X], basis[Y]) - (eps * pkg.D2[X, Y] + pkg.eps1[X] * pkg.eta[Y]))
            for X, Y in slots
        ),
        "eps1(X) = -eps D2(X,xi)": max(abs(pkg.eps1[X] + eps * pkg.D2[X, XI]) for X in (XI, V)),
        "E1(X,PY) = g(A_N X, PY)": max(abs(pkg.E1[X, V] - inner(g, image["A_N"][X], f.v)) for X in (XI, V)),
        "D1(X,PY) = g(A*_xi X, PY)": max(abs(pkg.D1[X, V] - inner(g, image["A_xi_star"][X], f.v)) for X in (XI, V)),
        "A*_xi xi = 0": float(np.linalg.norm(image["A_xi_star"][XI])),
        "eps2 = 0": max(abs(pkg.eps2[X]) for X in (XI, V)),
        "u1 = -rho1": max(abs(pkg.u1[X] + pkg.rho1[X]) for X in (XI, V)),
        "D1 symmetric": abs(pkg.D1[XI, V] - pkg.D1[V, XI]),
        "D2 symmetric": abs(pkg.D2[XI, V] - pkg.D2[V, XI]),
        "eta = (1, 0)": abs(pkg.eta[XI] - 1.0) + abs(pkg.eta[V]),
        "screen metric compatibility": max(
            abs(pkg.screen_norm_derivative[X] - 2.0 * pkg.nabla_star[X] * f.eps_v) for X in (XI, V)
        ),
    }
    reconstruction = []
    for X, Y in slots:
        ambient = pkg.derivatives[X, Y]
        rebuilt = combine(f, pkg.nabla[X, Y, 0], pkg.nabla[X, Y, 1], pkg.D2[X, Y], pkg.D1[X, Y])
        reconstruction.append(_relative(ambient - rebuilt, ambient))
    residuals["Gauss reconstruction"] = max(reconstruction)
    residuals["Weingarten N"] = max(
        _relative(pkg.derivatives[X, 3] - (-image["A_N"][X] + combine(f, a_u=pkg.rho2[X], a_n=pkg.rho1[X])),
                  pkg.derivatives[X, 3])
        for X in (XI, V)
    )
    residuals["Weingarten u"] = max(
        _relative(pkg.derivatives[X, 2] - (-image["A_u"][X] + combine(f, a_u=pkg.eps2[X], a_n=pkg.eps1[X])),
                  pkg.derivatives[X, 2])
        for X in (XI, V)
    )
    residuals["radical Weingarten"] = max(
        _relative(pkg.derivatives[X, 0] - (-image["A_xi_star"][X]
                                           + combine(f, a_xi=pkg.u1[X], a_u=pkg.D2[X, XI], a_n=pkg.D1[X, XI])),
                  pkg.derivatives[X, 0])
        for X in (XI, V)
    )
    h_xi_xi = combine(f, a_u=pkg.D2[XI, XI], a_n=pkg.D1[XI, XI])
    residuals["<h(xi,xi), h(xi,w)> = eps D2(xi,xi) D2(w,xi)"] = max(
        abs(inner(g, h_xi_xi, combine(f, a_u=pkg.D2[XI, W], a_n=pkg.D1[XI, W])) - eps * pkg.D2[XI, XI] * pkg.D2[W, XI])
        for W in (XI, V)
    )
    return {name: float(value) for name, value in residuals.items()}


def gauge_residuals(pkg, frame, scaled_pkg, scaled_frame, alpha, g):
    """Homogeneity of each tensor slot under xi -> alpha xi."""
    f, s = frame.at_base(), scaled_frame.at_base()
    return {
        "N* = N/alpha": float(np.linalg.norm(s.n - f.n / alpha)),
        "g(N*,xi*) = 1": abs(float(inner(g, s.n, s.xi)) - 1.0),
        "D2(xi*,xi*) = alpha^2 D2(xi,xi)": abs(scaled_pkg.D2[XI, XI] - alpha ** 2 * pkg.D2[XI, XI]),
        "D1(xi*,v) = alpha D1(xi,v)": abs(scaled_pkg.D1[XI, V] - alpha * pkg.D1[XI, V]),
        "D2(xi*,v) = alpha D2(xi,v)": abs(scaled_pkg.D2[XI, V] - alpha * pkg.D2[XI, V]),
        "D2(v,v) unchanged": abs(scaled_pkg.D2[V, V] - pkg.D2[V, V]),
    }
