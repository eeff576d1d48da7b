"""Developing maps of flat metrics on the punctured disk and their densities.

A developing map is either ``f = w**alpha * psi(w)`` (nontrivial rotational
holonomy, ``0 < alpha < 1``) or ``f = c*log(w) + psi(w)`` (``alpha == 0``).
The induced metric is ``|f'(w)|**2 |dw|**2``, stored as a
:class:`MetricDensity` ``|w|**(2a) * |G(w)|**2`` with ``G`` holomorphic
away from the puncture.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import series as ser
from .errors import FlatsingError
from .series import LaurentSeries

RELIABLE_RADIUS = 0.5
FD_STEP = 1e-3
FLATNESS_TOL = 1e-6


def _complex_json(z):
    return [float(z.real), float(z.imag)]


@dataclass(frozen=True)
class DevelopingMap:
    """``(alpha, c, psi)``: holonomy exponent, log coefficient, single-valued factor."""

    alpha: float
    c: complex
    psi: LaurentSeries

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "c", complex(self.c))
        if not 0.0 <= self.alpha < 1.0:
            raise FlatsingError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.alpha != 0.0 and abs(self.c) > ser.ATOL:
            # the log term is removable by a translation; we refuse to guess it
            raise FlatsingError("alpha != 0 requires c == 0 (translate the developing map first)")
        if not isinstance(self.psi, LaurentSeries):
            raise FlatsingError("psi must be a LaurentSeries")

    @property
    def y0(self):
        """Translation part of the monodromy, ``2*pi*i*c``."""
        return 2j * math.pi * self.c

    @property
    def holonomy_angle(self):
        return 2.0 * math.pi * self.alpha

    def substitute(self, h):
        """The same metric in a coordinate ``u`` with ``w = u*h(u)``.

        ``h`` is a unit series.  The returned map has the same ``alpha`` and ``c``.
        """
        if h.is_zero or h.valuation != 0:
            raise FlatsingError("coordinate change must have h(0) != 0")
        u = h.shift(1)
        moved = ser.compose(self.psi, u)
        if self.alpha != 0.0:
            return DevelopingMap(self.alpha, 0j, ser.pow_real(h, self.alpha) * moved)
        if self.c == 0:
            return DevelopingMap(0.0, 0j, moved)
        return DevelopingMap(0.0, self.c, self.c * ser.log_unit(h) + moved)

    def derivative_at(self, w):
        """``f'(w)`` on the principal branch, summed directly from the map."""
        w = np.asarray(w, dtype=complex)
        psi = self.psi(w)
        dpsi = ser.derive(self.psi)(w) if not self.psi.is_zero else np.zeros_like(w)
        if self.alpha != 0.0:
            return self.alpha * w ** (self.alpha - 1) * psi + w ** self.alpha * dpsi
        return self.c / w + dpsi

    def to_json(self):
        return {"alpha": self.alpha, "c": _complex_json(self.c), "psi": self.psi.to_json()}

    @classmethod
    def from_json(cls, obj):
        c = obj.get("c", [0.0, 0.0])
        return cls(obj["alpha"], complex(c[0], c[1]), LaurentSeries.from_json(obj["psi"]))


@dataclass(frozen=True)
class MetricDensity:
    """Density ``lambda**2 = |w|**(2a) * |G(w)|**2``."""

    a: float
    G: LaurentSeries

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        if self.G.is_zero:
            raise FlatsingError("density factor G is the zero series")

    def normalized(self):
        """Move the valuation of ``G`` into the exponent, so that ``G(0) != 0``."""
        v = self.G.valuation
        if v == 0:
            return self
        return MetricDensity(self.a + v, self.G.shift(-v))

    def __call__(self, w):
        return eval_density(self, w)

    def to_json(self):
        return {"a": self.a, "G": self.G.to_json()}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["a"], LaurentSeries.from_json(obj["G"]))


def density_of(fmap):
    """Density of the metric pulled back by a developing map."""
    psi = fmap.psi
    if fmap.alpha != 0.0:
        a = fmap.alpha - 1.0
        G = fmap.alpha * psi + ser.euler(psi)
    else:
        a = -1.0
        G = ser.euler(psi) + fmap.c
    if G.is_zero or np.max(np.abs(G.coeffs)) <= ser.ATOL:
        raise FlatsingError("degenerate developing map")
    return MetricDensity(a, G)


def eval_density(d, w):
    """``|w|**(2a) * |G(w)|**2`` at a point or array of points."""
    w = np.asarray(w, dtype=complex)
    if np.any(w == 0):
        raise FlatsingError("evaluation at puncture")
    r = np.abs(w)
    out = r ** (2.0 * d.a) * np.abs(d.G(w)) ** 2
    return float(out) if out.ndim == 0 else out


def reliable_radius(d, default=RELIABLE_RADIUS):
    """Radius inside which the truncated density is trusted.

    Root test on the upper half of the retained coefficients of the
    normalized ``G``; the default radius is kept unless the estimated
    convergence radius is below 1, in which case half of it is used.
    """
    G = d.normalized().G
    c = G.coeffs
    n = len(c)
    ks = np.arange(max(n // 2, 1), n)
    mags = np.abs(c[ks]) / abs(c[0])
    mask = mags > 0
    if not np.any(mask):
        return default
    rho = float(np.min(mags[mask] ** (-1.0 / ks[mask])))
    return default if rho >= 1.0 else default * rho


@dataclass(frozen=True)
class AnnulusGrid:
    """Polar sample grid ``r_min..r_max`` x ``n_angles`` for finite differences."""

    r_min: float = 0.2
    r_max: float = 0.8
    n_radii: int = 13
    n_angles: int = 64
    step: float = FD_STEP

    def points(self):
        r = np.linspace(self.r_min, self.r_max, self.n_radii)
        t = np.linspace(0.0, 2.0 * math.pi, self.n_angles, endpoint=False)
        return (r[:, None] * np.exp(1j * t)[None, :]).ravel()


STANDARD_GRID = AnnulusGrid()


def _log_lambda(d, w):
    g = np.abs(d.G(w))
    if np.any(~np.isfinite(g)) or np.any(g <= 1e-12 * max(float(np.max(g)), 1e-300)):
        bad = w[np.argmin(g)]
        raise FlatsingError(f"log singularity on grid near w={complex(bad):.6g}")
    return d.a * np.log(np.abs(w)) + np.log(g)


def _five_point(d, w, h):
    u0 = _log_lambda(d, w)
    nb = sum(_log_lambda(d, w + s) for s in (h, -h, 1j * h, -1j * h))
    return (nb - 4.0 * u0) / h ** 2


def flatness_residual(d, grid=STANDARD_GRID):
    """Max over the grid of ``|Laplacian(log lambda)|``.

    The 5-point Laplacian at steps ``h`` and ``h/2`` is Richardson-combined;
    the bare stencil leaves an ``h**2/r**4`` error of order 1e-4 at r = 0.2.
    """
    w = grid.points()
    if np.any(np.abs(w) <= 2 * grid.step):
        raise FlatsingError("grid touches the puncture")
    h = grid.step
    lap = (4.0 * _five_point(d, w, h / 2) - _five_point(d, w, h)) / 3.0
    return float(np.max(np.abs(lap)))


def density_residual(d1, d2, upto=None):
    """Distance between two densities on their common known range.

    ``|G|`` fixes ``G`` up to a unimodular constant, so both factors are
    rotated to a positive leading coefficient before comparison.  Returns
    ``max(|a1 - a2|, max coefficient gap / max(1, |lead|))``.
    """
    n1, n2 = d1.normalized(), d2.normalized()
    g1 = n1.G * (abs(n1.G.lead) / n1.G.lead)
    g2 = n2.G * (abs(n2.G.lead) / n2.G.lead)
    gap = ser.max_abs_diff(g1, g2, upto)
    return max(abs(n1.a - n2.a), gap / max(1.0, abs(g2.lead)))
