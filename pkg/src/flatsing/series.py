"""Truncated Laurent series with complex double coefficients.

A :class:`LaurentSeries` stores the coefficients of exponents
``valuation .. order-1``.  Coefficients at exponents ``>= order`` are
*unknown*, not zero, and every operation propagates the order it can
actually vouch for::

    >>> z = LaurentSeries.monomial(1, order=6)
    >>> (1 / (1 - z)).coeffs.real
    array([1., 1., 1., 1., 1., 1.])
    >>> (1 / (1 - z)).order
    6

Leading coefficients below :data:`STRIP_TOL` are dropped when the
valuation is determined, so floating noise never turns into a spurious
pole.  Instances are immutable.
"""

import cmath
import math
import numbers

import numpy as np

from .errors import FlatsingError

DEFAULT_ORDER = 32
STRIP_TOL = 1e-14
RTOL = 1e-9
ATOL = 1e-12


def _conv(a, b, n):
    """First ``n`` coefficients of the product of two dense coefficient arrays."""
    if n <= 0:
        return np.zeros(0, dtype=complex)
    out = np.convolve(a[:n], b[:n])[:n]
    if len(out) < n:
        out = np.concatenate([out, np.zeros(n - len(out), dtype=complex)])
    return out


def _pad(a, n):
    a = np.asarray(a, dtype=complex)[:n]
    if len(a) < n:
        a = np.concatenate([a, np.zeros(n - len(a), dtype=complex)])
    return a


def _inv_dense(a, n):
    """Reciprocal of a unit power series, ``a[0] != 0``."""
    a = _pad(a, n)
    b = np.zeros(n, dtype=complex)
    b[0] = 1.0 / a[0]
    for m in range(1, n):
        b[m] = -np.dot(a[1:m + 1], b[m - 1::-1]) * b[0]
    return b


def _exp_dense(s, n):
    # m E_m = sum_{k=1}^m k s_k E_{m-k}
    s = _pad(s, n)
    ks = np.arange(n) * s
    e = np.zeros(n, dtype=complex)
    e[0] = cmath.exp(s[0])
    for m in range(1, n):
        e[m] = np.dot(ks[1:m + 1], e[m - 1::-1]) / m
    return e


def _log_dense(s, n, branch):
    # s' = s L'  =>  m s_m = sum_{k=1}^m k L_k s_{m-k}
    s = _pad(s, n)
    out = np.zeros(n, dtype=complex)
    out[0] = cmath.log(s[0]) + 2j * math.pi * branch
    kl = np.zeros(n, dtype=complex)
    for m in range(1, n):
        acc = m * s[m] - np.dot(kl[1:m], s[m - 1:0:-1])
        kl[m] = acc / s[0]
        out[m] = kl[m] / m
    return out


class LaurentSeries:
    """Truncated Laurent series ``sum_{k=valuation}^{order-1} c_k z^k + O(z^order)``.

    Parameters
    ----------
    coeffs : array_like
        Complex coefficients for exponents ``valuation, valuation+1, ...``.
        Missing entries below ``order`` are zero; entries at or beyond
        ``order`` are discarded.
    valuation : int
        Exponent of ``coeffs[0]``.
    order : int, optional
        Truncation order.  Defaults to ``max(DEFAULT_ORDER, valuation+len(coeffs))``.
    """

    __slots__ = ("_valuation", "_coeffs", "_order")

    def __init__(self, coeffs=(), valuation=0, order=None):
        c = np.array(coeffs, dtype=complex).ravel()
        valuation = int(valuation)
        if order is None:
            order = max(DEFAULT_ORDER, valuation + len(c))
        order = int(order)
        c = c[:max(order - valuation, 0)]
        nz = np.flatnonzero(np.abs(c) > STRIP_TOL)
        if len(nz) == 0:
            valuation, c = order, np.zeros(0, dtype=complex)
        else:
            valuation += int(nz[0])
            c = _pad(c[nz[0]:], order - valuation)
        c.setflags(write=False)
        self._valuation = valuation
        self._coeffs = c
        self._order = order

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, order=DEFAULT_ORDER):
        return cls((), valuation=order, order=order)

    @classmethod
    def constant(cls, value, order=DEFAULT_ORDER):
        return cls([value], 0, order)

    @classmethod
    def monomial(cls, k, coeff=1.0, order=DEFAULT_ORDER):
        return cls([coeff], k, order)

    @classmethod
    def from_terms(cls, terms, order=DEFAULT_ORDER):
        """Build from a mapping ``{exponent: coefficient}``."""
        if not terms:
            return cls.zero(order)
        lo = min(terms)
        c = np.zeros(max(terms) - lo + 1, dtype=complex)
        for k, v in terms.items():
            c[k - lo] = v
        return cls(c, lo, order)

    # -- accessors ----------------------------------------------------

    @property
    def valuation(self):
        return self._valuation

    @property
    def order(self):
        return self._order

    @property
    def coeffs(self):
        """Read-only coefficients for exponents ``valuation .. order-1``."""
        return self._coeffs

    @property
    def is_zero(self):
        return len(self._coeffs) == 0

    @property
    def lead(self):
        """Coefficient at the valuation (0 for the zero series)."""
        return complex(self._coeffs[0]) if len(self._coeffs) else 0j

    def coeff(self, k):
        """Coefficient of ``z**k``; raises if ``k`` is beyond the truncation order."""
        if k >= self._order:
            raise FlatsingError(f"coefficient {k} is beyond truncation order {self._order}")
        if k < self._valuation:
            return 0j
        return complex(self._coeffs[k - self._valuation])

    __getitem__ = coeff

    def window(self, lo, hi):
        """Dense coefficients for exponents ``lo .. hi-1`` (hi <= order)."""
        if hi > self._order:
            raise FlatsingError(f"window end {hi} is beyond truncation order {self._order}")
        out = np.zeros(max(hi - lo, 0), dtype=complex)
        a, b = max(lo, self._valuation), hi
        if b > a:
            out[a - lo:b - lo] = self._coeffs[a - self._valuation:b - self._valuation]
        return out

    def truncate(self, order):
        """Same series known only to ``min(order, self.order)``."""
        order = min(int(order), self._order)
        return LaurentSeries(self._coeffs, self._valuation, order)

    def shift(self, k):
        """Multiply by ``z**k``."""
        return LaurentSeries(self._coeffs, self._valuation + k, self._order + k)

    def __repr__(self):
        c = self._coeffs
        nz = np.flatnonzero(c)
        body = c[:nz[-1] + 1] if len(nz) else c
        return f"LaurentSeries({np.round(body, 12).tolist()}, valuation={self._valuation}, order={self._order})"

    # -- evaluation ---------------------------------------------------

    def __call__(self, z):
        """Evaluate the truncated series (Horner) at ``z`` (scalar or array)."""
        z = np.asarray(z, dtype=complex)
        c = self._coeffs
        nz = np.flatnonzero(c)
        if len(nz) == 0:
            return np.zeros_like(z)
        c = c[:nz[-1] + 1]
        acc = np.full_like(z, c[-1])
        for v in c[-2::-1]:
            acc = acc * z + v
        if self._valuation:
            acc = acc * z ** self._valuation
        return acc

    # -- coercion & ring operations -------------------------------------

    def _coerce(self, other):
        if isinstance(other, LaurentSeries):
            return other
        if isinstance(other, numbers.Number):
            # a scalar is exact: give it enough order never to bind
            return LaurentSeries.constant(other, self._order + abs(self._valuation) + 1)
        return NotImplemented

    def __neg__(self):
        return LaurentSeries(-self._coeffs, self._valuation, self._order)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return arith(self, other, "add")

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return arith(self, other, "sub")

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return arith(other, self, "sub")

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return LaurentSeries(self._coeffs * other, self._valuation, self._order)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return arith(self, other, "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            if other == 0:
                raise FlatsingError("zero divisor")
            return LaurentSeries(self._coeffs / other, self._valuation, self._order)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return arith(self, other, "div")

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return arith(other, self, "div")

    def __pow__(self, m):
        if not isinstance(m, numbers.Integral):
            return NotImplemented
        base = self if m >= 0 else reciprocal(self)
        m = abs(int(m))
        result = LaurentSeries.constant(1.0, base._order + abs(base._valuation) + 1)
        while m:
            if m & 1:
                result = result * base
            m >>= 1
            if m:
                base = base * base
        return result

    # -- serialization ------------------------------------------------

    def to_json(self):
        c = self._coeffs
        nz = np.flatnonzero(c)
        c = c[:nz[-1] + 1] if len(nz) else c[:0]
        return {
            "valuation": self._valuation,
            "order": self._order,
            "coeffs": [[float(x.real), float(x.imag)] for x in c],
        }

    @classmethod
    def from_json(cls, obj):
        coeffs = [complex(re, im) for re, im in obj["coeffs"]]
        return cls(coeffs, obj.get("valuation", 0), obj.get("order"))


def _zero_like(order):
    return LaurentSeries.zero(order)


def reciprocal(s):
    """``1/s`` for a nonzero series."""
    if s.is_zero:
        raise FlatsingError("zero divisor")
    v, o = s.valuation, s.order
    n = o - v
    return LaurentSeries(_inv_dense(s.coeffs, n), -v, o - 2 * v)


def arith(a, b, op):
    """Ring operation ``op`` in {"add", "sub", "mul", "div"} on two series."""
    if op in ("add", "sub"):
        v = min(a.valuation, b.valuation)
        o = min(a.order, b.order)
        if o <= v:
            return _zero_like(o)
        x = a.window(v, o)
        y = b.window(v, o)
        return LaurentSeries(x + y if op == "add" else x - y, v, o)
    if op == "mul":
        v = a.valuation + b.valuation
        o = min(a.order + b.valuation, b.order + a.valuation)
        if a.is_zero or b.is_zero or o <= v:
            return _zero_like(o)
        return LaurentSeries(_conv(a.coeffs, b.coeffs, o - v), v, o)
    if op == "div":
        return arith(a, reciprocal(b), "mul")
    raise ValueError(f"unknown operation {op!r}")


def derive(s):
    """Termwise derivative; the order drops by one."""
    if s.is_zero:
        return _zero_like(s.order - 1)
    k = np.arange(s.valuation, s.order)
    return LaurentSeries(k * s.coeffs, s.valuation - 1, s.order - 1)


def euler(s):
    """``z * s'(z)``; same valuation bookkeeping and order as ``s``."""
    if s.is_zero:
        return s
    k = np.arange(s.valuation, s.order)
    return LaurentSeries(k * s.coeffs, s.valuation, s.order)


def compose(outer, inner):
    """``outer(inner(z))`` for ``inner`` of positive valuation.

    ``outer`` may carry a pole: ``outer = z**v * u`` is composed as
    ``inner**v * u(inner)``.
    """
    vi = inner.valuation
    if inner.is_zero or vi <= 0:
        raise FlatsingError("composition requires positive valuation")
    if outer.valuation < 0:
        v = outer.valuation
        return (inner ** v) * compose(outer.shift(-v), inner)
    oo = outer.order
    # lowest exponent >= 1 that may be nonzero in outer (known or unknown)
    nz = [k for k in range(max(outer.valuation, 1), oo) if outer.coeff(k) != 0]
    k1 = nz[0] if nz else oo
    order = min(vi * oo, inner.order + vi * (k1 - 1))
    out = np.zeros(order, dtype=complex)
    if order <= 0:
        return _zero_like(order)
    oc = outer.window(0, min(oo, order))
    # unknown inner terms beyond inner.order only reach exponents >= order
    ic = _pad(inner.window(0, min(order, inner.order)), order)
    power = np.zeros(order, dtype=complex)
    power[0] = 1.0
    for j, cj in enumerate(oc):
        if j * vi >= order:
            break
        if cj != 0:
            out += cj * power
        power = _conv(power, ic, order)
    return LaurentSeries(out, 0, order)


def exp(s):
    """Exponential of a series with nonnegative valuation."""
    if not s.is_zero and s.valuation < 0:
        raise FlatsingError("essential exponential")
    o = s.order
    if o <= 0:
        return _zero_like(o)
    return LaurentSeries(_exp_dense(s.window(0, o), o), 0, o)


def log_unit(s, branch=0):
    """Logarithm of a unit series; constant term ``Log s(0) + 2*pi*i*branch``."""
    if s.is_zero or s.valuation != 0:
        raise FlatsingError("log of non-unit")
    o = s.order
    return LaurentSeries(_log_dense(s.coeffs, o, int(branch)), 0, o)


def pow_real(s, gamma, branch=0):
    """``s**gamma = exp(gamma * log_unit(s, branch))`` for a unit series."""
    if s.is_zero or s.valuation != 0:
        raise FlatsingError("real power of non-unit")
    return exp(log_unit(s, branch) * gamma)


def revert(s):
    """Compositional inverse of a series ``s = z*h(z)``, ``h(0) != 0``.

    Lagrange inversion: ``[w^m] s^{-1} = (1/m) [z^{m-1}] h^{-m}``.
    """
    if s.is_zero or s.valuation != 1:
        raise FlatsingError("reversion requires valuation exactly 1")
    o = s.order
    n = o - 1
    hinv = _inv_dense(s.coeffs, n)
    out = np.zeros(n, dtype=complex)
    power = np.zeros(n, dtype=complex)
    power[0] = 1.0
    for m in range(1, n + 1):
        power = _conv(power, hinv, n)
        out[m - 1] = power[m - 1] / m
    return LaurentSeries(out, 1, o)


def max_abs_diff(a, b, upto=None):
    """Largest coefficient difference over the exponents both series know."""
    lo = min(a.valuation, b.valuation)
    hi = min(a.order, b.order)
    if upto is not None:
        hi = min(hi, upto)
    if hi <= lo:
        return 0.0
    return float(np.max(np.abs(a.window(lo, hi) - b.window(lo, hi)), initial=0.0))


def allclose(a, b, rtol=RTOL, atol=ATOL, upto=None):
    """Tolerance-based equality on the common known range."""
    lo = min(a.valuation, b.valuation)
    hi = min(a.order, b.order)
    if upto is not None:
        hi = min(hi, upto)
    if hi <= lo:
        return True
    x, y = a.window(lo, hi), b.window(lo, hi)
    return bool(np.all(np.abs(x - y) <= atol + rtol * np.maximum(np.abs(x), np.abs(y))))
