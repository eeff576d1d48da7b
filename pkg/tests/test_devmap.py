import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatsing.classify import Conical, Cylindrical, LogPole
from flatsing.devmap import (AnnulusGrid, DevelopingMap, MetricDensity,
                             density_of, eval_density, flatness_residual, reliable_radius)
from flatsing.errors import FlatsingError
from flatsing.sampling import BRANCHES, random_map
from flatsing.series import LaurentSeries as S


def test_density_of_square_root_map():
    d = density_of(DevelopingMap(0.5, 0, S.constant(1.0)))
    assert d.a == -0.5 and d.G.coeff(0) == pytest.approx(0.5)
    assert eval_density(d, 0.3) == pytest.approx(0.25 / 0.3)


def test_density_of_logarithm():
    d = density_of(DevelopingMap(0, 1, S.zero()))
    assert d.a == -1 and d.G.coeff(0) == 1


def test_density_of_log_pole_map():
    nu, theta, n = 1.5, 0.7, 2
    c = nu * np.exp(1j * theta)
    d = density_of(DevelopingMap(0, c, S.monomial(-n, 1.0)))
    assert d.a == -1
    assert d.G.coeff(-n) == pytest.approx(-n) and d.G.coeff(0) == pytest.approx(c)
    w = 0.3 + 0.1j
    assert eval_density(d, w) == pytest.approx(abs(c / w - n / w ** (n + 1)) ** 2)
    # with theta = 0 this is the log-pole normal density
    d0 = density_of(DevelopingMap(0, nu, S.monomial(-n, 1.0)))
    assert eval_density(d0, w) == pytest.approx(abs(nu / w - n / w ** (n + 1)) ** 2)


def test_eval_density_examples():
    assert eval_density(MetricDensity(0, S.constant(1.0)), 0.3 + 0.4j) == pytest.approx(1.0)
    assert eval_density(MetricDensity(-1, S.constant(1.0)), 0.5j) == pytest.approx(4.0)
    assert eval_density(Conical(1).density(), 0.1) == pytest.approx(0.04)
    with pytest.raises(FlatsingError, match="puncture"):
        eval_density(MetricDensity(0, S.constant(1.0)), 0)


def test_unit_cylinder_is_inverse_square():
    d = density_of(DevelopingMap(0, 1j, S.zero()))
    w = np.array([0.1, 0.2 - 0.3j, 0.45j])
    assert np.allclose(eval_density(d, w), np.abs(w) ** -2.0, rtol=0, atol=1e-14 * 400)


def test_rejections():
    with pytest.raises(FlatsingError):
        DevelopingMap(1.0, 0, S.constant(1.0))
    with pytest.raises(FlatsingError, match="translate"):
        DevelopingMap(0.5, 1.0, S.constant(1.0))
    with pytest.raises(FlatsingError, match="degenerate"):
        density_of(DevelopingMap(0, 0, S.constant(2.0)))


def test_map_json_round_trip():
    m = DevelopingMap(0, 1 - 2j, S([1, 0.5j], -1, 20))
    back = DevelopingMap.from_json(m.to_json())
    assert back.c == m.c and back.psi.valuation == -1 and back.psi.order == 20


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(BRANCHES), st.integers(0, 2 ** 32 - 1),
       st.floats(0.05, 0.45), st.floats(-math.pi, math.pi))
def test_density_matches_direct_derivative(branch, seed, r, t):
    fmap = random_map(np.random.default_rng(seed), branch, order=24)
    w = r * np.exp(1j * t)
    direct = abs(fmap.derivative_at(w)) ** 2
    assert eval_density(density_of(fmap), w) == pytest.approx(direct, rel=1e-9)


@pytest.mark.parametrize("form", [Conical(-0.5), Conical(1.0), Cylindrical(2.0),
                                  LogPole(1.0, 1), LogPole(0.5, 3)])
def test_normal_forms_are_flat(form):
    d = form.density()
    if isinstance(form, LogPole) and form.n == 1:
        # |nu z - n| vanishes at z = 1; stay clear of it
        grid = AnnulusGrid(0.2, 0.8)
        assert flatness_residual(d, grid) < 1e-6
    else:
        assert flatness_residual(d) < 1e-6


def test_euclidean_is_flat():
    assert flatness_residual(MetricDensity(0, S.constant(1.0))) < 1e-9


class _Spherical:
    """Round-sphere density 4/(1+|w|^2)^2: curvature +1, so not flat."""

    a = 0.0
    G = staticmethod(lambda w: 2.0 / (1.0 + np.abs(w) ** 2))


def test_curved_density_is_detected():
    assert flatness_residual(_Spherical()) > 1e-2


def test_grid_hitting_a_zero_is_an_error():
    d = density_of(DevelopingMap(0, 2, S.monomial(-1, 1.0)))  # G = 2 - 1/w vanishes at 0.5
    with pytest.raises(FlatsingError, match="log singularity"):
        flatness_residual(d)


def test_reliable_radius_shrinks_for_slow_series():
    fast = MetricDensity(0, S([1.0] + [0.5 ** k for k in range(1, 20)], 0, 20))
    slow = MetricDensity(0, S([1.0] + [3.0 ** k for k in range(1, 20)], 0, 20))
    assert reliable_radius(fast) == 0.5
    assert reliable_radius(slow) < 0.5 / 2.5
