"""Area growth of a flat metric near the puncture.

``Area(1/r < |w| < R)`` is computed by product quadrature: 4-point
Gauss-Legendre panels in ``log|w|`` times the uniform rule in the angle.
The growth law is read off the shell mass ``dA/d(log r)``, the area per
unit of log-radius at ``|w| = 1/r``:

=============  ===================================
law            shell mass as ``r -> infinity``
=============  ===================================
constant       decays like ``r**-q``, ``q > 0``
logarithmic    tends to a positive constant
power ``N``    grows like ``r**N``
=============  ===================================
"""

import csv
import io
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Tuple

import numpy as np

from .classify import apply_change
from .devmap import RELIABLE_RADIUS, reliable_radius
from .errors import FlatsingError

ANGULAR_NODES = 512
PANELS_PER_DECADE = 16
GAUSS_NODES = 4
DEFAULT_OUTER = RELIABLE_RADIUS
DEFAULT_R_VALUES = tuple(np.logspace(1.0, 4.0, 40))
LEVEL_MARGIN = 0.05
EXPONENT_TOL = 0.05

_GX, _GW = np.polynomial.legendre.leggauss(GAUSS_NODES)


def _radial_rule(r_inner, r_outer, panels_per_decade):
    """Nodes ``rho`` and weights for ``int f(rho) rho d rho`` on ``[r_inner, r_outer]``."""
    t0, t1 = math.log(r_inner), math.log(r_outer)
    n = max(1, math.ceil((t1 - t0) / math.log(10.0) * panels_per_decade))
    edges = np.linspace(t0, t1, n + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = (mid[:, None] + half[:, None] * _GX[None, :]).ravel()
    w = (half[:, None] * _GW[None, :]).ravel()
    rho = np.exp(t)
    # rho d rho = rho^2 dt
    return rho, w * rho ** 2


def circle_mass(d, radii, n_angles=ANGULAR_NODES):
    """``int_0^{2 pi} lambda^2(rho e^{i t}) dt`` for each radius ``rho``."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    t = np.arange(n_angles) * (2.0 * math.pi / n_angles)
    w = radii[:, None] * np.exp(1j * t)[None, :]
    g = np.abs(d.G(w))
    floor = 1e-12 * np.max(g, axis=1)
    bad = np.any(g <= floor[:, None], axis=1) | ~np.all(np.isfinite(g), axis=1)
    if np.any(bad):
        raise FlatsingError(f"density factor vanishes near radius {radii[np.argmax(bad)]:.6g}")
    vals = radii[:, None] ** (2.0 * d.a) * g ** 2
    return 2.0 * math.pi * vals.mean(axis=1)


def annulus_area(d, r_inner, r_outer, n_angles=ANGULAR_NODES, panels_per_decade=PANELS_PER_DECADE):
    """dsigma^2-area of ``r_inner < |w| < r_outer``."""
    if not 0 < r_inner < r_outer:
        raise FlatsingError(f"need 0 < r_inner < r_outer, got {r_inner}, {r_outer}")
    limit = reliable_radius(d)
    if r_outer > limit * (1 + 1e-12):
        raise FlatsingError(f"outer radius {r_outer} exceeds the reliable radius {limit:.4g}")
    rho, wt = _radial_rule(r_inner, r_outer, panels_per_decade)
    return float(np.dot(wt, circle_mass(d, rho, n_angles)))


def _areas(d, inner, R, n_angles, panels_per_decade):
    """Areas of ``inner[i] < |w| < R`` for decreasing ``inner``, accumulated panel by panel."""
    edges = np.concatenate([[R], inner])
    out = np.empty(len(inner))
    total = 0.0
    for i in range(len(inner)):
        rho, wt = _radial_rule(edges[i + 1], edges[i], panels_per_decade)
        total += float(np.dot(wt, circle_mass(d, rho, n_angles)))
        out[i] = total
    return out


@dataclass
class AreaScan:
    """Areas ``A(r) = Area(1/r < |w| < R)`` and the fitted growth law.

    ``fit_residual`` is the max relative deviation of the selected law
    from the sampled shell masses.  ``exponent`` is the fitted ``N`` for
    the power law and 0 otherwise; ``shell_slope`` is the raw log-log slope.
    """

    R: float
    samples: List[Tuple[float, float]]
    fitted_model: str
    exponent: float
    fit_residual: float
    shell_slope: float = 0.0
    truncated: bool = False
    residuals: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "R": self.R,
            "fitted_model": self.fitted_model,
            "exponent": self.exponent,
            "fit_residual": self.fit_residual,
            "shell_slope": self.shell_slope,
            "truncated": self.truncated,
            "residuals": dict(self.residuals),
            "n_samples": len(self.samples),
        }

    def to_csv(self):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["r", "area"])
        for r, a in self.samples:
            wr.writerow([repr(float(r)), repr(float(a))])
        return buf.getvalue()


def fit_growth(r, mass):
    """Select the growth law from shell masses ``mass`` sampled at ``r``.

    Returns ``(model, exponent, residual, slope, residuals)``.  The
    logarithmic law (constant shell mass) wins whenever its relative
    spread is within :data:`LEVEL_MARGIN`; otherwise the sign of the
    log-log slope separates bounded area from power growth.
    """
    lr = np.log(r)
    lm = np.log(mass)
    slope, icpt = np.polyfit(lr, lm, 1)
    power_res = float(np.max(np.abs(mass - np.exp(icpt + slope * lr)) / mass))
    level = float(np.mean(mass))
    level_res = float(np.max(np.abs(mass - level)) / level)
    residuals = {"logarithmic": level_res, "slope": power_res}
    if level_res <= LEVEL_MARGIN:
        return "logarithmic", 0.0, level_res, float(slope), residuals
    if slope < 0:
        return "constant", 0.0, power_res, float(slope), residuals
    return "power", float(slope), power_res, float(slope), residuals


def growth_scan(d, R=DEFAULT_OUTER, r_values=DEFAULT_R_VALUES,
                n_angles=ANGULAR_NODES, panels_per_decade=PANELS_PER_DECADE):
    """Sample ``Area(1/r < |w| < R)`` over ``r_values`` and fit the growth law."""
    r = np.asarray(sorted(r_values), dtype=float)
    if len(r) < 3:
        raise FlatsingError("need at least three r values")
    if np.any(np.diff(r) <= 0):
        raise FlatsingError("r values must be distinct")
    if r[0] <= 1.0 / R:
        raise FlatsingError(f"all r must exceed 1/R = {1.0 / R:.6g}")
    if r[-1] / r[0] < 100.0:
        raise FlatsingError("r values must span at least two decades")
    limit = reliable_radius(d)
    if R > limit * (1 + 1e-12):
        raise FlatsingError(f"outer radius {R} exceeds the reliable radius {limit:.4g}")
    truncated = False
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            mass = circle_mass(d, 1.0 / r, n_angles)
            areas = _areas(d, 1.0 / r, R, n_angles, panels_per_decade)
        except FlatsingError:
            areas = mass = np.full(len(r), np.nan)
    ok = np.isfinite(areas) & np.isfinite(mass) & (mass > 0)
    if not np.all(ok):
        keep = int(np.argmin(ok))
        if keep < 3:
            raise FlatsingError("scan fails before three valid samples")
        r, areas, mass = r[:keep], areas[:keep], mass[:keep]
        truncated = True
    # shell mass dA/dlog r at inner radius 1/r is rho^2 * (circle integral)
    shell = mass / r ** 2
    model, expo, res, slope, residuals = fit_growth(r, shell)
    return AreaScan(float(R), list(zip(r.tolist(), areas.tolist())), model, expo, res,
                    slope, truncated, residuals)


class Invariance(NamedTuple):
    before: AreaScan
    after: AreaScan

    @property
    def exponent_before(self):
        return self.before.exponent

    @property
    def exponent_after(self):
        return self.after.exponent

    @property
    def consistent(self):
        return (self.before.fitted_model == self.after.fitted_model
                and abs(self.before.exponent - self.after.exponent) < EXPONENT_TOL)


def invariance_check(d, ch, R=DEFAULT_OUTER, r_values=DEFAULT_R_VALUES):
    """Growth law of ``d`` before and after the coordinate change ``ch``."""
    return Invariance(growth_scan(d, R, r_values), growth_scan(apply_change(d, ch), R, r_values))
