import math

import numpy as np
import pytest
from scipy.special import betainc

from dirlaw.dirichlet import (DirichletParams, RectQuery, cdf, cdf_arcsine,
                              cdf_monte_carlo, density, sample, sample_many,
                              simplex_mass)
from dirlaw.errors import DomainError, SingularityError

ARCSINE = DirichletParams((0.5, 0.5))


def test_arcsine_closed_form():
    for u in [0.0, 0.1, 0.25, 0.5, 0.9, 1.0]:
        got = cdf(ARCSINE, (u,))
        assert abs(got - cdf_arcsine(u)) <= 1e-8
    assert cdf_arcsine(0.25) == pytest.approx(1 / 3, abs=1e-15)


def test_beta_marginal_matches_scipy():
    for a, b in [(2.0, 3.0), (0.5, 1.5), (1.0, 1.0), (0.25, 0.75)]:
        for u in [0.05, 0.3, 0.5, 0.77, 0.95]:
            got = cdf((a, b), (u,))
            assert got == pytest.approx(betainc(a, b, u), abs=1e-9)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_simplex_mass_is_one(k):
    alpha = (1.0 / k,) * k
    assert abs(simplex_mass(alpha) - 1.0) <= 1e-6


def test_full_rectangle_has_full_mass():
    assert cdf((0.5, 0.5), (1.0,)) == pytest.approx(1.0, abs=1e-8)
    assert cdf((1 / 3, 1 / 3, 1 / 3), (1.0, 0.0)) == pytest.approx(0.0,
                                                                   abs=1e-9)


def test_cdf_requires_simplex_corner():
    with pytest.raises(DomainError):
        cdf((1 / 3, 1 / 3, 1 / 3), (0.7, 0.7))


def test_cdf_monotone_in_each_coordinate():
    alpha = (0.4, 0.7, 1.9)
    last = -1.0
    for u in np.linspace(0.05, 0.55, 10):
        val = cdf(alpha, (float(u), 0.4))
        assert val >= last - 1e-12
        last = val
    last = -1.0
    for u in np.linspace(0.05, 0.55, 10):
        val = cdf(alpha, (0.4, float(u)))
        assert val >= last - 1e-12
        last = val


def test_density_beta_value():
    # Dir(2,2) is Beta(2,2): density 6 t (1 - t), so 1.5 at the center
    assert density((2.0, 2.0), (0.5, 0.5)) == pytest.approx(1.5, rel=1e-12)


def test_density_singular_on_boundary():
    with pytest.raises(SingularityError):
        density(ARCSINE, (0.0, 1.0))


def test_rect_query_rejects_out_of_range():
    with pytest.raises(DomainError):
        RectQuery((1.5,))
    with pytest.raises(DomainError):
        cdf(ARCSINE, (-0.1,))


def test_sampling_is_deterministic():
    a = sample_many(ARCSINE, 6, seed=42)
    b = sample_many(ARCSINE, 6, seed=42)
    c = sample_many(ARCSINE, 6, seed=43)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert np.allclose(a.sum(axis=1), 1.0)
    pt = sample(ARCSINE, seed=0)
    assert math.isclose(sum(pt.t), 1.0, abs_tol=1e-12)


def test_monte_carlo_agrees_with_quadrature():
    est, err = cdf_monte_carlo(ARCSINE, (0.3,), 200_000, seed=11)
    want = cdf_arcsine(0.3)
    assert abs(est - want) <= 4 * err
    assert err < 0.005
