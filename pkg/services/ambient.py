"""Flat semi-Euclidean 4-space and the exterior algebra behind the planarity test."""
import itertools
import math

import numpy as np

from models.geometry import AmbientMetric
from models.models import CausalCharacter
from services.jet import value_of

R41 = AmbientMetric((-1, 1, 1, 1))
R42 = AmbientMetric((-1, -1, 1, 1))

DELTA_FLOOR = 1e-300

_PAIRS = tuple(itertools.combinations(range(4), 2))


def inner(g, x, y):
    """Semi-Euclidean product; works on float vectors and on jet-valued fields."""
    return sum(s * a * b for s, a, b in zip(g.signs, x, y))


def euclidean(x, y):
    return sum(a * b for a, b in zip(x, y))


def norm(x):
    """Euclidean length at the base point."""
    return float(np.linalg.norm(value_of(np.asarray(x))))


def causal_character(g, x, tol=1e-12):
    x = np.asarray(x, dtype=float)
    length = float(np.linalg.norm(x))
    if length < tol:
        return CausalCharacter.zero
    q = inner(g, x, x)
    if abs(q) < tol * length ** 2:
        return CausalCharacter.null
    return CausalCharacter.spacelike if q > 0 else CausalCharacter.timelike


def triple_wedge(a, b, c):
    """Hodge-dual components of a ^ b ^ c: the 4D cross product of three vectors.

    Component i is (-1)^i times the minor of [a; b; c] with column i removed,
    so that euclidean(x, triple_wedge(a, b, c)) = det[x; a; b; c].
    """
    m = np.array([a, b, c], dtype=float)
    out = np.empty(4)
    for i in range(4):
        cols = [j for j in range(4) if j != i]
        out[i] = (-1) ** i * np.linalg.det(m[:, cols])
    return out


def wedge2(a, b):
    """The six Pluecker coordinates of a ^ b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.array([a[i] * b[j] - a[j] * b[i] for i, j in _PAIRS])


def _negligible_zeroed(vectors, negligible, reference):
    """Zero every vector no longer than ``negligible`` times the longest one (or ``reference``)."""
    vectors = [np.asarray(x, dtype=float) for x in vectors]
    top = max([float(np.linalg.norm(x)) for x in vectors] + [float(reference)])
    return [np.zeros(4) if np.linalg.norm(x) <= negligible * top else x for x in vectors]


def relative_wedge_residual(a, b, c, negligible=0.0, reference=0.0):
    """Scale-free zero test for a ^ b ^ c.

    A factor whose length is at most ``negligible`` times the longest factor,
    or ``reference`` when that is larger, counts as an exact zero; rounding
    noise in one argument then gives no spurious unit residual.
    """
    a, b, c = _negligible_zeroed((a, b, c), negligible, reference)
    scale = float(np.linalg.norm(a) * np.linalg.norm(b) * np.linalg.norm(c))
    return float(np.linalg.norm(triple_wedge(a, b, c))) / (scale + DELTA_FLOOR)


def relative_bivector_residual(a, b, negligible=0.0, reference=0.0):
    a, b = _negligible_zeroed((a, b), negligible, reference)
    scale = float(np.linalg.norm(a) * np.linalg.norm(b))
    return float(np.linalg.norm(wedge2(a, b))) / (scale + DELTA_FLOOR)


def sign_of(value):
    return 1 if value > 0 else -1


def unit_cosine(x, y):
    """|cos| of the Euclidean angle between two base-point vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return abs(float(np.dot(x, y))) / math.sqrt(float(np.dot(x, x) * np.dot(y, y)))
