"""Normal forms of isolated flat singularities and the coordinate changes reaching them.

Every developing map with a meromorphic single-valued factor falls into
exactly one of

* ``Conical(beta)``:   ``(beta+1)**2 |z|**(2 beta) |dz|**2``, ``beta != -1``
* ``Cylindrical(c)``:  ``c**2 |z|**-2 |dz|**2``, ``c > 0``
* ``LogPole(nu, n)``:  ``|nu/z - n/z**(n+1)|**2 |dz|**2``, ``nu > 0``, ``n >= 1``

and :func:`classify` returns the form together with the series ``h`` of
the normalizing coordinate ``z = w*h(w)``.
"""

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from . import series as ser
from .devmap import MetricDensity, density_of, density_residual
from .errors import FlatsingError, SchemaError
from .series import DEFAULT_ORDER, LaurentSeries


@dataclass(frozen=True)
class Conical:
    beta: float
    tag = "conical"

    def __post_init__(self):
        object.__setattr__(self, "beta", float(self.beta))
        if self.beta == -1.0:
            raise FlatsingError("conical form requires beta != -1")

    @property
    def is_integer_pole(self):
        """True when ``beta`` is an integer below -1 (the non-rigid conical case)."""
        return self.beta < -1 and float(self.beta).is_integer()

    def density(self, order=DEFAULT_ORDER):
        return MetricDensity(self.beta, LaurentSeries.constant(self.beta + 1.0, order))

    def to_json(self):
        return {"form": self.tag, "beta": self.beta}


@dataclass(frozen=True)
class Cylindrical:
    c: float
    tag = "cylindrical"

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))
        if not self.c > 0:
            raise FlatsingError("cylindrical form requires c > 0")

    def density(self, order=DEFAULT_ORDER):
        return MetricDensity(-1.0, LaurentSeries.constant(self.c, order))

    def to_json(self):
        return {"form": self.tag, "c": self.c}


@dataclass(frozen=True)
class LogPole:
    nu: float
    n: int
    tag = "log_pole"

    def __post_init__(self):
        object.__setattr__(self, "nu", float(self.nu))
        if int(self.n) != self.n or self.n < 1:
            raise FlatsingError("log-pole form requires an integer n >= 1")
        object.__setattr__(self, "n", int(self.n))
        if not self.nu > 0:
            raise FlatsingError("log-pole form requires nu > 0")

    def density(self, order=DEFAULT_ORDER):
        # |nu/z - n/z^(n+1)|^2 = |z|^(-2n-2) |nu z^n - n|^2
        G = LaurentSeries.from_terms({0: -self.n, self.n: self.nu}, order)
        return MetricDensity(-self.n - 1.0, G)

    def to_json(self):
        return {"form": self.tag, "nu": self.nu, "n": self.n}


NormalForm = Union[Conical, Cylindrical, LogPole]


def normal_form_from_json(obj):
    tag = obj.get("form")
    try:
        if tag == "conical":
            return Conical(obj["beta"])
        if tag == "cylindrical":
            return Cylindrical(obj["c"])
        if tag == "log_pole":
            return LogPole(obj["nu"], obj["n"])
    except KeyError as exc:
        raise SchemaError(f"missing field {exc.args[0]!r}", path=exc.args[0]) from None
    raise SchemaError(f"unknown form {tag!r}", path="form")


@dataclass(frozen=True)
class CoordinateChange:
    """Origin-preserving germ ``z -> z*h(z)`` with ``h(0) != 0``.

    ``eta`` is the free additive constant of the log-pole developing map,
    set only by :func:`third_form_change`.
    """

    h: LaurentSeries
    eta: Optional[complex] = None

    def __post_init__(self):
        if self.h.is_zero or self.h.valuation != 0:
            raise FlatsingError("coordinate change needs h(0) != 0")

    @classmethod
    def identity(cls, order=DEFAULT_ORDER):
        return cls(LaurentSeries.constant(1.0, order))

    @property
    def series(self):
        """``z*h(z)`` as a series."""
        return self.h.shift(1)

    def inverse(self):
        """The change ``w = z*k(z)`` undoing this one."""
        return CoordinateChange(ser.revert(self.series).shift(-1))

    def then(self, other):
        """Apply ``self`` first, then ``other``: ``z*h1(z)*h2(z*h1(z))``."""
        return CoordinateChange(self.h * ser.compose(other.h, self.series))

    def to_json(self):
        out = {"h": self.h.to_json()}
        if self.eta is not None:
            out["eta"] = [float(self.eta.real), float(self.eta.imag)]
        return out

    @classmethod
    def from_json(cls, obj):
        eta = obj.get("eta")
        return cls(LaurentSeries.from_json(obj["h"]), None if eta is None else complex(*eta))


class ConicalChange(NamedTuple):
    beta: float
    h: LaurentSeries


class CylinderChange(NamedTuple):
    c: float
    h: LaurentSeries


class ThirdFormChange(NamedTuple):
    nu: float
    n: int
    h: LaurentSeries
    eta: complex
    phi: LaurentSeries


def conical_change(fmap, order=DEFAULT_ORDER):
    """Write ``psi = w**n e**g`` and set ``z = w exp(g/(beta+1))``, ``beta = alpha+n-1``."""
    if fmap.alpha == 0.0 and fmap.c != 0:
        raise FlatsingError("conical reduction needs alpha != 0 or c == 0")
    psi = fmap.psi
    if fmap.alpha == 0.0 and not psi.is_zero and psi.valuation == 0:
        # translating the developing map leaves the metric unchanged
        psi = psi - psi.lead
    if psi.is_zero:
        raise FlatsingError("degenerate developing map")
    n = psi.valuation
    beta = fmap.alpha + n - 1
    if beta == -1.0:
        raise FlatsingError("internal consistency error: beta == -1 in conical branch")
    g = ser.log_unit(psi.shift(-n))
    h = ser.exp(g / (beta + 1.0)).truncate(order)
    return ConicalChange(beta, h)


def cylinder_change(fmap, order=DEFAULT_ORDER):
    """``z = w exp(psi/c)``; the invariant is ``|c|``."""
    if fmap.alpha != 0.0 or fmap.c == 0:
        raise FlatsingError("cylindrical reduction needs alpha == 0 and c != 0")
    if not fmap.psi.is_zero and fmap.psi.valuation < 0:
        raise FlatsingError("cylindrical reduction needs a holomorphic psi")
    h = ser.exp(fmap.psi / fmap.c).truncate(order)
    return CylinderChange(abs(fmap.c), h)


def third_form_change(fmap, order=DEFAULT_ORDER, root_index=0):
    """Solve ``g = e^{i theta} e^{-n phi} + w^n (c phi + eta)`` for ``phi`` and ``eta``.

    Here ``psi = w^-n g``, ``c = nu e^{i theta}``.  Coefficients of ``phi``
    are fixed order by order; at order ``n`` the gauge ``phi_n = 0`` is
    imposed and ``eta`` is solved instead.  ``root_index`` picks the branch
    of ``phi(0)``: ``h(0)`` is multiplied by ``exp(2 pi i root_index / n)``.
    """
    c = fmap.c
    if fmap.alpha != 0.0 or c == 0:
        raise FlatsingError("third-form reduction needs alpha == 0 and c != 0")
    psi = fmap.psi
    if psi.is_zero or psi.valuation >= 0:
        raise FlatsingError("third-form reduction needs a pole in psi")
    n = -psi.valuation
    if order < 2 * n + 2:
        raise FlatsingError(f"working order {order} is below 2n+2 = {2 * n + 2}")
    g = psi.shift(n)
    c0 = g.lead
    if abs(c0) <= ser.STRIP_TOL:
        raise FlatsingError("pole-order misdetection: leading coefficient vanishes")
    nu = abs(c)
    rot = c / nu
    N = min(order, g.order)
    if N <= n:
        raise FlatsingError(f"psi is known only to order {psi.order}, too short for pole order {n}")
    gc = g.window(0, N)

    phi = np.zeros(N, dtype=complex)
    E = np.zeros(N, dtype=complex)  # coefficients of exp(-n phi)
    kq = np.zeros(N, dtype=complex)  # k * [z^k](-n phi)
    phi[0] = (2j * math.pi * root_index - cmath.log(c0 / rot)) / n
    E[0] = c0 / rot
    eta = 0j
    for m in range(1, N):
        rest = np.dot(kq[1:m], E[m - 1:0:-1]) / m
        if m < n:
            phi[m] = (gc[m] / rot - rest) / (-n * E[0])
        elif m == n:
            phi[m] = 0.0
            eta = gc[n] - rot * rest - c * phi[0]
        else:
            phi[m] = ((gc[m] - c * phi[m - n]) / rot - rest) / (-n * E[0])
        kq[m] = -n * m * phi[m]
        E[m] = rest - n * phi[m] * E[0]
    phi_s = LaurentSeries(phi, 0, N)
    return ThirdFormChange(nu, n, ser.exp(phi_s), complex(eta), phi_s)


def third_form_residual(fmap, result):
    """Scaled max coefficient of ``g - e^{i theta} exp(-n phi) - w^n (c phi + eta)``.

    Built from series primitives only, independent of the recursion above.
    """
    n, c = result.n, fmap.c
    g = fmap.psi.shift(n)
    rot = c / abs(c)
    lhs = rot * ser.exp(result.phi * (-n)) + (c * result.phi + result.eta).shift(n)
    hi = min(g.order, lhs.order)
    diff = ser.max_abs_diff(g.truncate(hi), lhs.truncate(hi))
    return diff / max(1.0, float(np.max(np.abs(g.window(0, hi)))))


def classify(fmap, order=DEFAULT_ORDER, root_index=0):
    """Normal form of the metric induced by ``fmap`` and the change ``z = w*h(w)`` reaching it."""
    density_of(fmap)  # rejects degenerate maps up front
    if fmap.alpha != 0.0 or fmap.c == 0:
        beta, h = conical_change(fmap, order)
        return Conical(beta), CoordinateChange(h)
    if fmap.psi.is_zero or fmap.psi.valuation >= 0:
        c, h = cylinder_change(fmap, order)
        return Cylindrical(c), CoordinateChange(h)
    res = third_form_change(fmap, order, root_index)
    return LogPole(res.nu, res.n), CoordinateChange(res.h, res.eta)


def apply_change(d, ch, order=None):
    """Rewrite a density in ``z~`` as a density in ``z``, where ``z~ = z*h(z)``.

    ``|z~|^(2a) |G(z~)|^2 |dz~|^2 = |z|^(2a) |G(z h) h^a (z h)'|^2 |dz|^2``.
    """
    dn = d.normalized()
    zh = ch.series
    G = ser.compose(dn.G, zh) * ser.pow_real(ch.h, dn.a) * ser.derive(zh)
    if order is not None:
        G = G.truncate(order)
    return MetricDensity(dn.a, G)


def pushforward(d, ch, order=None):
    """Express a density in ``w`` in the new coordinate ``z = w*h(w)``."""
    return apply_change(d, ch.inverse(), order)


class RoundTrip(NamedTuple):
    forward: float
    backward: float
    inverse_scale: float

    @property
    def residual(self):
        """Backward gap, and forward gap relative to the size of the reverted series.

        Reversion of ``w*h(w)`` amplifies rounding by the magnitude of the
        inverse coefficients, which grow like ``R**-k`` for an inverse of
        convergence radius ``R``.
        """
        return max(self.backward, self.forward / max(1.0, self.inverse_scale))


def roundtrip_residual(fmap, form, change, upto=16):
    """Compare the map density pushed to ``z`` with the normal form, and the
    normal form pulled back to ``w`` with the map density."""
    d = density_of(fmap)
    order = change.h.order + 2 * (getattr(form, "n", 0) + 1)
    nf = form.density(order)
    inv = change.inverse()
    forward = density_residual(apply_change(d, inv), nf, upto)
    backward = density_residual(apply_change(nf, change), d, upto)
    hi = min(upto, inv.h.order) if upto else inv.h.order
    scale = float(np.max(np.abs(inv.h.window(0, hi))))
    return RoundTrip(forward, backward, scale)


def classification_json(form, change):
    out = dict(form.to_json())
    if change.eta is not None:
        out["eta"] = [float(change.eta.real), float(change.eta.imag)]
    out["change"] = change.h.to_json()
    return out
