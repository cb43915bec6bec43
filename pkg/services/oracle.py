"""Finite-difference derivatives with Richardson/Ridders extrapolation.

Central stencils have error expansions in even powers of the step, so the
Neville tableau uses ratios CON**2 between successive columns. Steps are
divided by CON at each level, which keeps every sample on an integer grid
of the finest step.
"""
from itertools import product

import numpy as np

from services.jet import Jet

CON = 2
NTAB = 3
SAFE = 2.0

# central stencils: offset (in units of the step) -> weight, before dividing by step^order
STENCILS = {
    0: {0: 1.0},
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
}


def _nrm(x):
    return float(np.max(np.abs(x)))


def extrapolate(estimates, safe=SAFE):
    """Best Neville-tableau value over estimates at steps h, h/CON, h/CON^2, ...

    Returns the extrapolated value and an error estimate; stops early when a
    higher order is worse than the best so far by the factor ``safe``.
    """
    con2 = float(CON * CON)
    a = {}
    err = np.inf
    result = estimates[-1]
    for i, estimate in enumerate(estimates):
        a[0, i] = np.asarray(estimate, dtype=float)
        fac = con2
        for j in range(1, i + 1):
            a[j, i] = (a[j - 1, i] * fac - a[j - 1, i - 1]) / (fac - 1.0)
            fac *= con2
            errt = max(_nrm(a[j, i] - a[j - 1, i]), _nrm(a[j, i] - a[j - 1, i - 1]))
            if errt <= err:
                err = errt
                result = a[j, i]
        if i > 0 and _nrm(a[i, i] - a[i - 1, i - 1]) >= safe * err:
            break
    return result, err


def line_derivative(sample, order, levels=2):
    """Derivative of a curve sampled at integer multiples of its finest step.

    ``sample(k)`` returns the value at offset k (finest steps); the caller
    divides by the finest step to the power ``order``.
    """
    if order == 0:
        return np.asarray(sample(0), dtype=float), 0.0
    estimates = []
    for level in range(levels):
        stride = CON ** (levels - 1 - level)
        value = sum(w * np.asarray(sample(k * stride), dtype=float) for k, w in STENCILS[order].items())
        estimates.append(value / stride ** order)
    return extrapolate(estimates)


class _Grid:
    def __init__(self, func, p, unit):
        self.func = func
        self.p = p
        self.unit = unit
        self.cache = {}

    def __call__(self, i, j):
        key = (i, j)
        if key not in self.cache:
            point = (self.p[0] + i * self.unit, self.p[1] + j * self.unit)
            self.cache[key] = np.asarray(self.func(point), dtype=float)
        return self.cache[key]


def fd_jet(func, p, h=1e-2, levels=NTAB):
    """Jets of a vector-valued function populated from tensor-product stencils.

    Every coefficient of total order <= 3 is estimated at steps h, h/2, h/4
    and extrapolated; the result plugs into the same pipeline as exact jets.
    """
    if h <= 0:
        raise ValueError(f"finite-difference step must be positive, got {h}")
    unit = h / CON ** (levels - 1)
    grid = _Grid(func, (float(p[0]), float(p[1])), unit)
    derivatives = {(0, 0): grid(0, 0)}
    for a, b in product(range(4), repeat=2):
        if a + b == 0 or a + b > 3:
            continue
        estimates = []
        for level in range(levels):
            stride = CON ** (levels - 1 - level)
            value = sum(
                wa * wb * grid(i * stride, j * stride)
                for (i, wa), (j, wb) in product(STENCILS[a].items(), STENCILS[b].items())
            )
            estimates.append(value / (stride * unit) ** (a + b))
        derivatives[a, b], _ = extrapolate(estimates)
    size = len(derivatives[0, 0])
    return tuple(
        Jet.from_derivatives({key: float(value[c]) for key, value in derivatives.items()})
        for c in range(size)
    )
