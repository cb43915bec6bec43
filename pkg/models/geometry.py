from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np

from models.models import Backend, DirectionKind, Verdict
from services.jet import value_of


@dataclass(frozen=True)
class AmbientMetric:
    """Flat metric of R^4_q as a signature vector."""
    signs: tuple

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if len(signs) != 4 or any(s not in (-1, 1) for s in signs):
            raise ValueError(f"metric signs must be four entries of +-1, got {self.signs!r}")
        if signs.count(-1) not in (1, 2):
            raise ValueError(f"metric index must be 1 or 2, got {signs.count(-1)}")
        object.__setattr__(self, "signs", signs)

    @property
    def index(self):
        return self.signs.count(-1)


@dataclass(frozen=True)
class Immersion:
    """Four coordinate expressions over a two-parameter box."""
    coordinates: tuple
    parameters: tuple
    domain: tuple

    def contains(self, point):
        return all(lo <= x <= hi for x, (lo, hi) in zip(point, self.domain))


@dataclass(frozen=True)
class ImmersionJet:
    point: tuple
    coordinates: tuple

    def position(self):
        return value_of(np.array(self.coordinates, dtype=object))

    def tangent_fields(self):
        return tuple(np.array([c.partial(i) for c in self.coordinates], dtype=object) for i in range(2))

    def tangents(self):
        return tuple(value_of(t) for t in self.tangent_fields())


@dataclass(frozen=True)
class FrameOptions:
    backend: Backend = Backend.jet
    pins: Optional[dict] = None
    gauge: float = 1.0
    fd_step: float = 1e-2


@dataclass(frozen=True)
class MovingFrame:
    """Quasi-orthonormal frame {xi, N, u, v}.

    Fields are either float vectors (values at the base point) or object
    arrays of jets; ``xi_direction`` and ``v_direction`` hold the
    parameter-space coefficients of xi and v on the coordinate tangents.
    """
    xi: np.ndarray
    v: np.ndarray
    u: np.ndarray
    n: np.ndarray
    eps: int
    eps_v: int
    xi_direction: np.ndarray
    v_direction: np.ndarray
    gauge: float = 1.0

    def at_base(self):
        return replace(
            self,
            xi=value_of(self.xi),
            v=value_of(self.v),
            u=value_of(self.u),
            n=value_of(self.n),
            xi_direction=value_of(self.xi_direction),
            v_direction=value_of(self.v_direction),
        )

    def as_dict(self):
        base = self.at_base()
        return {
            "xi": base.xi.tolist(),
            "n": base.n.tolist(),
            "u": base.u.tolist(),
            "v": base.v.tolist(),
            "eps": self.eps,
            "eps_v": self.eps_v,
            "gauge": self.gauge,
        }


@dataclass(frozen=True)
class InducedPackage:
    """Induced objects at one point, expressed in the basis {xi, v}.

    Bilinear forms are 2x2 arrays indexed [X, Y]; shape operators are 2x2
    arrays whose column X holds the (xi, v) coefficients of the image of X;
    one-forms are length-2 arrays; ``nabla[X, Y]`` holds the (xi, v)
    coefficients of nabla_X Y and ``derivatives[X, F]`` the ambient
    derivative of F in (xi, v, u, N) along X.
    """
    D1: np.ndarray
    D2: np.ndarray
    E1: np.ndarray
    A_N: np.ndarray
    A_u: np.ndarray
    A_xi_star: np.ndarray
    rho1: np.ndarray
    rho2: np.ndarray
    eps1: np.ndarray
    eps2: np.ndarray
    u1: np.ndarray
    eta: np.ndarray
    nabla: np.ndarray
    nabla_star: np.ndarray
    derivatives: np.ndarray
    screen_norm_derivative: np.ndarray
    directions: np.ndarray

    def as_dict(self):
        return {
            name: np.asarray(getattr(self, name)).tolist()
            for name in ("D1", "D2", "E1", "A_N", "A_u", "A_xi_star", "rho1", "rho2",
                         "eps1", "eps2", "u1", "eta", "nabla", "nabla_star")
        }


@dataclass(frozen=True)
class SectionJet:
    kind: DirectionKind
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    kappa_sq: float
    d_kappa_sq: float
    planarity_residual: float
    planar: bool
    geodesic_arc: bool
    terms: dict = field(default_factory=dict)
    direct: tuple = ()
    flow: tuple = ()
    flow_residual: float = 0.0
    drift: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "kind": self.kind.value,
            "d1": self.d1.tolist(),
            "d2": self.d2.tolist(),
            "d3": self.d3.tolist(),
            "kappa_sq": self.kappa_sq,
            "d_kappa_sq": self.d_kappa_sq,
            "planarity_residual": self.planarity_residual,
            "planar": self.planar,
            "geodesic_arc": self.geodesic_arc,
            "flow_residual": self.flow_residual,
            "drift": self.drift,
        }


@dataclass(frozen=True)
class TracedCurve:
    direction: np.ndarray
    step: float
    sigma: np.ndarray
    parameter_samples: np.ndarray
    ambient_samples: np.ndarray
    plane_normal: np.ndarray
    constraint_residual: float
    derivatives: tuple

    def as_dict(self):
        return {
            "direction": self.direction.tolist(),
            "step": self.step,
            "sigma": self.sigma.tolist(),
            "parameter_samples": self.parameter_samples.tolist(),
            "ambient_samples": self.ambient_samples.tolist(),
            "constraint_residual": self.constraint_residual,
            "derivatives": [d.tolist() for d in self.derivatives],
        }


@dataclass(frozen=True)
class ClassReport:
    name: str
    verdict: Verdict
    residual: float
    witnesses: list
    sample: list
    extra: dict = field(default_factory=dict)

    def holds(self):
        return self.verdict in (Verdict.true, Verdict.indeterminate_true)

    def as_dict(self):
        return {
            "name": self.name,
            "verdict": self.verdict.value,
            "residual": self.residual,
            "witnesses": self.witnesses,
        }


@dataclass
class PointState:
    """Everything computed at one sample point, shared by the checks."""
    point: tuple
    error: Optional[str] = None
    frame: Any = None
    package: Any = None
    sections: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.error is None
