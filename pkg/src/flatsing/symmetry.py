"""Coordinate changes that preserve a normal form, and their composition laws.

Families
--------
``M1_generic``  conical, beta > -1 or beta not an integer: rotations ``z -> lam z``.
``M1_integer``  conical, beta an integer below -1: ``z~^(beta+1) = lam z^(beta+1) + zeta``.
``M2``          cylindrical: scalings ``z -> p z``.
``M3``          log-pole: ``h = e_k + a z^n + ...`` solving
                ``nu log h + (z h)^-n = z^-n + zeta0``.

Elements compose left to right: ``compose_elements(g1, g2)`` is "apply
``g1``, then ``g2``".
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import series as ser
from .classify import Conical, CoordinateChange, Cylindrical, LogPole, apply_change
from .devmap import density_residual
from .errors import FlatsingError, SchemaError
from .series import DEFAULT_ORDER, LaurentSeries

FAMILIES = ("M1_generic", "M1_integer", "M2", "M3")


@dataclass(frozen=True)
class SymmetryElement:
    family: str
    lam: complex = 1.0
    zeta: complex = 0.0
    p: complex = 1.0
    ek_index: int = 0
    a: complex = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise FlatsingError(f"unknown family {self.family!r}")
        for name in ("lam", "zeta", "p", "a"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.family.startswith("M1") and abs(abs(self.lam) - 1.0) > 1e-12:
            raise FlatsingError("lambda must have modulus 1")
        if self.family == "M2" and self.p == 0:
            raise FlatsingError("scaling p must be nonzero")
        if self.family == "M3" and self.ek_index < 0:
            raise FlatsingError("ek_index must be nonnegative")

    def to_json(self):
        def cj(z):
            return [float(z.real), float(z.imag)]

        out = {"family": self.family}
        if self.family.startswith("M1"):
            out["lambda"] = cj(self.lam)
        if self.family == "M1_integer":
            out["zeta"] = cj(self.zeta)
        if self.family == "M2":
            out["p"] = cj(self.p)
        if self.family == "M3":
            out["ek_index"] = self.ek_index
            out["a"] = cj(self.a)
        return out

    @classmethod
    def from_json(cls, obj):
        def cz(key, default):
            v = obj.get(key)
            return default if v is None else complex(v[0], v[1])

        if "family" not in obj:
            raise SchemaError("missing field 'family'", path="family")
        return cls(obj["family"], cz("lambda", 1.0), cz("zeta", 0.0), cz("p", 1.0),
                   int(obj.get("ek_index", 0)), cz("a", 0.0))


def root_of_unity(k, n):
    return cmath.exp(2j * math.pi * k / n)


def family_for(form):
    if isinstance(form, Conical):
        return "M1_integer" if form.is_integer_pole else "M1_generic"
    if isinstance(form, Cylindrical):
        return "M2"
    if isinstance(form, LogPole):
        return "M3"
    raise FlatsingError(f"not a normal form: {form!r}")


def _check(g, form):
    fam = family_for(form)
    if g.family != fam:
        raise FlatsingError(f"family {g.family} does not act on {form!r} (expected {fam})")
    if fam == "M3" and g.ek_index >= form.n:
        raise FlatsingError(f"ek_index {g.ek_index} out of range for n = {form.n}")


def solve_m3(n, nu, k=0, a=0.0, order=DEFAULT_ORDER):
    """Series ``h`` with ``h(0) = e_k``, ``[z^n] h = a`` solving
    ``nu z^n log h + h^-n = 1 + zeta0 z^n``; returns ``(h, zeta0)``.

    Coefficients below ``z^n`` vanish; above it each ``h_m`` is fixed by
    the coefficient of ``z^m`` with divisor ``n * e_k^(-n-1)``.
    """
    N = int(order)
    if N <= n:
        raise FlatsingError(f"order {N} too small for n = {n}")
    e = root_of_unity(k, n)
    h = np.zeros(N, dtype=complex)
    kL = np.zeros(N, dtype=complex)  # k * [z^k] log h
    H = np.zeros(N, dtype=complex)   # h^-n
    h[0] = e
    L0 = cmath.log(e)
    H[0] = e ** (-n)
    for m in range(1, N):
        sL = np.dot(kL[1:m], h[m - 1:0:-1])
        sH = -n * np.dot(kL[1:m], H[m - 1:0:-1])
        if m < n:
            hm = (sL + sH * h[0] / (n * H[0])) / m
        elif m == n:
            hm = a
        else:
            klm = (sH + m * nu * kL[m - n] / (m - n)) / (n * H[0])
            hm = (klm * h[0] + sL) / m
        h[m] = hm
        kL[m] = (m * hm - sL) / h[0]
        H[m] = (sH - n * kL[m] * H[0]) / m
    zeta0 = nu * L0 + H[n]
    return LaurentSeries(h, 0, N), complex(zeta0)


def m3_identity_residual(h, n, nu, zeta0):
    """Max coefficient of ``nu z^n log h + h^-n - 1 - zeta0 z^n``, from series primitives.

    Measured relative to ``max(1, max |h_k|)`` like :func:`verify_invariance`.
    """
    expr = nu * ser.log_unit(h).shift(n) + h ** (-n) - 1.0 - LaurentSeries.monomial(n, zeta0, h.order + n)
    raw = float(np.max(np.abs(expr.window(0, min(expr.order, h.order))), initial=0.0))
    return raw / max(1.0, float(np.max(np.abs(h.coeffs))))


def element_to_change(g, form, order=DEFAULT_ORDER):
    """Realize a symmetry element as a coordinate change ``z -> z h(z)``."""
    _check(g, form)
    if g.family == "M1_generic":
        return CoordinateChange(LaurentSeries.constant(g.lam, order))
    if g.family == "M1_integer":
        m = int(round(-(form.beta + 1)))
        base = LaurentSeries.from_terms({0: g.lam, m: g.zeta}, order)
        return CoordinateChange(ser.pow_real(base, 1.0 / (form.beta + 1)))
    if g.family == "M2":
        return CoordinateChange(LaurentSeries.constant(g.p, order))
    h, _ = solve_m3(form.n, form.nu, g.ek_index, g.a, order)
    return CoordinateChange(h)


def identity_element(form):
    return SymmetryElement(family_for(form))


def compose_elements(g1, g2, form):
    """``g1`` followed by ``g2``."""
    _check(g1, form)
    _check(g2, form)
    fam = g1.family
    if fam == "M1_generic":
        return SymmetryElement(fam, lam=g1.lam * g2.lam)
    if fam == "M1_integer":
        return SymmetryElement(fam, lam=g1.lam * g2.lam, zeta=g2.lam * g1.zeta + g2.zeta)
    if fam == "M2":
        return SymmetryElement(fam, p=g1.p * g2.p)
    n = form.n
    ek, ej = root_of_unity(g1.ek_index, n), root_of_unity(g2.ek_index, n)
    return SymmetryElement(fam, ek_index=(g1.ek_index + g2.ek_index) % n, a=ek * g2.a + ej * g1.a)


def inverse_element(g, form):
    _check(g, form)
    fam = g.family
    if fam == "M1_generic":
        return SymmetryElement(fam, lam=g.lam.conjugate())
    if fam == "M1_integer":
        lc = g.lam.conjugate()
        return SymmetryElement(fam, lam=lc, zeta=-g.zeta * lc)
    if fam == "M2":
        return SymmetryElement(fam, p=1.0 / g.p)
    n = form.n
    ek = root_of_unity(g.ek_index, n)
    return SymmetryElement(fam, ek_index=(-g.ek_index) % n, a=-g.a / ek ** 2)


def _composite(g1, g2, form, order):
    c1 = element_to_change(g1, form, order)
    c2 = element_to_change(g2, form, order)
    actual = c1.then(c2).h
    expected = element_to_change(compose_elements(g1, g2, form), form, order).h
    if g1.family == "M1_integer":
        # (lam, zeta) fixes h only up to a (beta+1)-th root of unity; compare h^(beta+1)
        m = int(round(form.beta + 1))
        actual, expected = actual ** m, expected ** m
    return actual, expected


def composition_profile(g1, g2, form, order=DEFAULT_ORDER):
    """Per-coefficient deviation between the composed series and the law's prediction."""
    actual, expected = _composite(g1, g2, form, order)
    hi = min(actual.order, expected.order)
    return np.abs(actual.window(0, hi) - expected.window(0, hi))


def verify_composition(g1, g2, form, order=DEFAULT_ORDER):
    """Max deviation over the coefficients where the composition law is exact.

    For ``M3`` only ``h(0)`` and ``[z^n] h`` are covered by the law; the
    full profile is available from :func:`composition_profile`.
    """
    if g1.family == "M3" and order < 2 * form.n:
        raise FlatsingError(f"order must be at least 2n = {2 * form.n}")
    prof = composition_profile(g1, g2, form, order)
    if g1.family == "M3":
        prof = prof[:form.n + 1]
    return float(np.max(prof, initial=0.0))


def invariance_report(form, g, order=DEFAULT_ORDER):
    """``(raw, scale)``: density gap after pulling the form back by ``g``, and
    the largest coefficient of ``h`` over the compared range."""
    ch = element_to_change(g, form, order)
    d = form.density(order + 2 * getattr(form, "n", 0) + 2)
    raw = density_residual(apply_change(d, ch), d, upto=order)
    return raw, float(np.max(np.abs(ch.h.window(0, order))))


def verify_invariance(form, g, order=DEFAULT_ORDER):
    """Residual between the normal-form density and its pullback under ``g``.

    Rounding in the pullback grows with the coefficients of ``h``, which for
    ``M3`` elements increase geometrically; the gap is therefore measured
    relative to ``max(1, max |h_k|)``.
    """
    raw, scale = invariance_report(form, g, order)
    return raw / max(1.0, scale)


def m3_vector_field(z, ht, n, nu, k=0):
    """``F(z, h~)`` with ``z h~' = F`` for ``h = e_k + h~``."""
    h = root_of_unity(k, n) + ht
    return n * h * (1 - h ** n) / (nu * z ** n * h ** n - n)


def linearization_eigenvalue(n, nu, k=0, eps=1e-6):
    """``dF/dh~`` at the origin by central differences."""
    return (m3_vector_field(0.0, eps, n, nu, k) - m3_vector_field(0.0, -eps, n, nu, k)) / (2 * eps)
