"""Seeded random instances for the property and acceptance suites.

Generated maps have a dominant leading term so that the density factor
``G`` has no zero on ``|w| <= 0.9``; flatness grids and annulus scans can
then be run on every instance without hitting a logarithmic singularity.
"""

import cmath
import math

import numpy as np

from .classify import Conical, CoordinateChange, Cylindrical, LogPole
from .devmap import DevelopingMap, density_of
from .errors import FlatsingError
from .series import DEFAULT_ORDER, LaurentSeries

BRANCHES = ("conical", "conical_integer", "cylindrical", "log_pole")
ZERO_FREE_RADIUS = 0.9


def random_complex(rng, lo, hi):
    return complex(cmath.rect(rng.uniform(lo, hi), rng.uniform(-math.pi, math.pi)))


def _tail(rng, lead, degree, size):
    c = [lead]
    for k in range(1, degree + 1):
        c.append(random_complex(rng, 0.0, size * abs(lead) * 0.5 ** (k - 1)))
    return c


def random_unit_series(rng, order=DEFAULT_ORDER, lead=(0.7, 1.4), size=0.2, degree=6):
    """Polynomial ``h`` with ``|h(0)|`` in ``lead`` and a geometrically small tail."""
    h0 = random_complex(rng, *lead)
    return LaurentSeries(_tail(rng, h0, degree, size), 0, order)


def random_change(rng, order=DEFAULT_ORDER, **kw):
    return CoordinateChange(random_unit_series(rng, order, **kw))


def _zero_free(fmap, radius=ZERO_FREE_RADIUS):
    try:
        G = density_of(fmap).normalized().G
    except FlatsingError:
        return False
    c = np.abs(G.coeffs)
    k = np.arange(len(c))
    return c[0] > np.sum(c[1:] * radius ** k[1:]) * 1.05


def random_map(rng, branch, order=DEFAULT_ORDER, pole=None, degree=5):
    """Random developing map in one of :data:`BRANCHES`.

    ``pole`` fixes the pole order of the log-pole branch (default: 1..3).
    """
    for _ in range(1000):
        fmap = _draw(rng, branch, order, pole, degree)
        if _zero_free(fmap):
            return fmap
    raise RuntimeError(f"could not draw a zero-free {branch} map")


def _draw(rng, branch, order, pole, degree):
    u0 = random_complex(rng, 0.5, 2.0)
    if branch == "conical":
        alpha = rng.uniform(0.05, 0.95)
        n = int(rng.integers(-2, 3))
        return DevelopingMap(alpha, 0, LaurentSeries(_tail(rng, u0, degree, 0.3), n, n + order + 4))
    if branch == "conical_integer":
        n = int(rng.choice([-3, -2, -1, 0, 1, 2, 3]))
        if n == 0:
            k = int(rng.integers(1, 4))
            body = np.zeros(k + degree + 1, dtype=complex)
            body[0] = random_complex(rng, 0.0, 3.0)
            body[k:] = _tail(rng, u0, degree, 0.3)
            return DevelopingMap(0, 0, LaurentSeries(body, 0, order + 4))
        return DevelopingMap(0, 0, LaurentSeries(_tail(rng, u0, degree, 0.3), n, n + order + 4))
    if branch == "cylindrical":
        c = random_complex(rng, 0.2, 1.1)
        body = [random_complex(rng, 0.0, 3.0)] + _tail(rng, 0.3 * abs(c), degree, 0.5)[1:]
        return DevelopingMap(0, c, LaurentSeries(body, 0, order + 4))
    if branch == "log_pole":
        n = pole if pole is not None else int(rng.integers(1, 4))
        c = random_complex(rng, 0.2, 1.1)
        return DevelopingMap(0, c, LaurentSeries(_tail(rng, u0, degree, 0.3), -n, order + 4))
    raise ValueError(f"unknown branch {branch!r}")


def random_form(rng, branch, pole=None):
    """Random normal form whose density is zero-free on ``|z| <= 0.9``."""
    if branch == "conical":
        beta = rng.uniform(-2.9, 2.0)
        while abs(beta + 1) < 0.05 or abs(beta - round(beta)) < 0.05:
            beta = rng.uniform(-2.9, 2.0)
        return Conical(beta)
    if branch == "conical_integer":
        return Conical(float(rng.choice([-4, -3, -2, 0, 1, 2])))
    if branch == "cylindrical":
        return Cylindrical(rng.uniform(0.2, 3.0))
    if branch == "log_pole":
        n = pole if pole is not None else int(rng.integers(1, 4))
        return LogPole(rng.uniform(0.2, 1.1), n)
    raise ValueError(f"unknown branch {branch!r}")
