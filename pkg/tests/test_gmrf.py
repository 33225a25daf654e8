"""Local conditional densities and the exponential-family decomposition."""

import math

import numpy as np
import pytest
from scipy import stats as sps

from gmrf_infogeo.gmrf import (
    ModelParams,
    NaturalStatistics,
    lcdf_log_density,
    log_density_offset,
    log_pseudo_likelihood,
    natural_parameter_vector,
    natural_statistics,
)
from gmrf_infogeo.lattice import Configuration, neighbors, new_iid_configuration


def test_model_params_validation():
    with pytest.raises(ValueError, match="sigma2 must be positive"):
        ModelParams(sigma2=0.0)
    with pytest.raises(ValueError, match="delta must be one of"):
        ModelParams(delta=5)
    params = ModelParams()
    assert (params.mu, params.sigma2, params.beta, params.delta) == (0.0, 1.0, 0.0, 8)


def test_lcdf_hand_value():
    # x=1, all 8 neighbors at 0.5, mu=0.5 -> centered neighbor sum is 0,
    # so the residual is x - mu = 0.5 and the density is N(0.5, 2) at 1.
    params = ModelParams(mu=0.5, sigma2=2.0, beta=0.1)
    value = lcdf_log_density(1.0, [0.5] * 8, params)
    assert value == pytest.approx(-0.5 * math.log(4.0 * math.pi) - 0.0625, rel=1e-15)


def test_lcdf_matches_gaussian_logpdf():
    rng = np.random.default_rng(7)
    for _ in range(20):
        params = ModelParams(
            mu=rng.uniform(-2, 2), sigma2=rng.uniform(0.2, 4.0), beta=rng.uniform(-0.3, 0.3)
        )
        x = rng.normal()
        nv = rng.normal(size=8)
        loc = params.mu + params.beta * (nv.sum() - 8 * params.mu)
        expected = sps.norm.logpdf(x, loc=loc, scale=math.sqrt(params.sigma2))
        assert lcdf_log_density(x, nv, params) == pytest.approx(expected, rel=1e-12)


def test_natural_statistics_all_ones():
    stats = natural_statistics(Configuration(3, 3, np.ones(9)))
    assert stats.as_vector().tolist() == [9.0, 9.0, 72.0, 72.0, 576.0]


def test_natural_statistics_hand_values():
    # on the 3x3 torus each neighbor sum is 45 - x_i, so
    # t3 = 45*45 - sum x^2, t4 = 8*45, t5 = sum (45 - x)^2
    stats = natural_statistics(Configuration(3, 3, np.arange(1.0, 10.0)))
    assert stats.t1 == 45.0
    assert stats.t2 == 285.0
    assert stats.t3 == 1740.0
    assert stats.t4 == 360.0
    assert stats.t5 == 14460.0


def test_pseudo_likelihood_is_sum_of_lcdfs():
    config = new_iid_configuration(5, 5, 0.5, 2.0, seed=13)
    params = ModelParams(mu=0.2, sigma2=1.5, beta=0.08)
    total = sum(
        lcdf_log_density(config.grid[r, c], neighbors(config, (r, c)), params)
        for r in range(5)
        for c in range(5)
    )
    assert log_pseudo_likelihood(config, params) == pytest.approx(total, rel=1e-12)


@pytest.mark.parametrize("mu, sigma2, beta", [
    (0.0, 1.0, 0.0),
    (1.3, 0.7, 0.1),
    (-0.8, 2.5, -0.15),
    (2.0, 4.0, 0.05),
])
def test_exponential_family_decomposition(mu, sigma2, beta):
    # log PL(x; theta) = c(theta) . T(x) + d(theta) must hold exactly
    params = ModelParams(mu=mu, sigma2=sigma2, beta=beta)
    for seed, shape in ((1, (3, 3)), (2, (5, 7))):
        config = new_iid_configuration(*shape, 0.3, 1.8, seed=seed)
        t = natural_statistics(config).as_vector()
        decomposed = float(natural_parameter_vector(params) @ t) + log_density_offset(
            params, config.n_sites
        )
        assert log_pseudo_likelihood(config, params) == pytest.approx(
            decomposed, rel=1e-9
        )


def test_beta_zero_reduces_to_iid_gaussian():
    config = new_iid_configuration(4, 4, 0.0, 1.0, seed=3)
    params = ModelParams(mu=0.4, sigma2=2.2, beta=0.0)
    expected = sps.norm.logpdf(config.cells, loc=0.4, scale=math.sqrt(2.2)).sum()
    assert log_pseudo_likelihood(config, params) == pytest.approx(expected, rel=1e-12)
    # the coupling coordinates of c(theta) vanish with beta
    c = natural_parameter_vector(params)
    assert c[2] == 0.0 and c[3] == 0.0 and c[4] == 0.0


def test_natural_statistics_vector_order():
    stats = NaturalStatistics(1.0, 2.0, 3.0, 4.0, 5.0)
    np.testing.assert_array_equal(stats.as_vector(), [1.0, 2.0, 3.0, 4.0, 5.0])


def test_lcdf_standard_normal_values():
    std = ModelParams(mu=0.0, sigma2=1.0, beta=0.3)
    # zero field: the coupling term vanishes whatever beta is
    assert lcdf_log_density(0.0, [0.0] * 8, std) == pytest.approx(
        -0.5 * math.log(2 * math.pi), rel=1e-15
    )
    iid = ModelParams(mu=0.0, sigma2=1.0, beta=0.0)
    assert lcdf_log_density(1.0, [9.9] * 8, iid) == pytest.approx(
        -0.5 * math.log(2 * math.pi) - 0.5, rel=1e-15
    )


def test_lcdf_with_zero_coupling_is_a_plain_gaussian_everywhere():
    rng = np.random.default_rng(51)
    for _ in range(1000):
        x, mu = rng.normal(size=2) * 3.0
        sigma2 = rng.uniform(0.1, 9.0)
        nbrs = rng.normal(size=8)
        got = lcdf_log_density(x, nbrs, ModelParams(mu=mu, sigma2=sigma2, beta=0.0))
        assert got == pytest.approx(
            sps.norm.logpdf(x, loc=mu, scale=math.sqrt(sigma2)), rel=1e-12
        )


def test_lcdf_is_concave_in_x_with_curvature_minus_one_over_sigma2():
    # log density is quadratic in x, so the central second difference is
    # exactly -h^2 / sigma2 at any point
    params = ModelParams(mu=0.3, sigma2=1.7, beta=0.08)
    nbrs = np.linspace(-1.0, 1.0, 8)
    h = 0.25
    for x in (-2.0, 0.0, 1.3):
        second = (
            lcdf_log_density(x + h, nbrs, params)
            + lcdf_log_density(x - h, nbrs, params)
            - 2.0 * lcdf_log_density(x, nbrs, params)
        )
        assert second == pytest.approx(-h * h / 1.7, rel=1e-9)


def test_natural_statistics_of_zero_field_vanish():
    stats = natural_statistics(Configuration(3, 3, np.zeros(9)))
    np.testing.assert_array_equal(stats.as_vector(), np.zeros(5))


def test_natural_statistics_match_a_double_loop_oracle():
    rng = np.random.default_rng(52)
    grid = rng.normal(size=(4, 4))
    config = Configuration(4, 4, grid.ravel())
    t = np.zeros(5)
    for r in range(4):
        for c in range(4):
            x = grid[r, c]
            eta = sum(
                grid[(r + dr) % 4, (c + dc) % 4]
                for dr in (-1, 0, 1)
                for dc in (-1, 0, 1)
                if (dr, dc) != (0, 0)
            )
            t += (x, x * x, x * eta, eta, eta * eta)
    np.testing.assert_allclose(natural_statistics(config).as_vector(), t, rtol=1e-12)


def test_log_pseudo_likelihood_of_zero_field():
    config = Configuration(3, 3, np.zeros(9))
    params = ModelParams(mu=0.0, sigma2=1.0, beta=0.2)
    assert log_pseudo_likelihood(config, params) == pytest.approx(
        -4.5 * math.log(2 * math.pi), rel=1e-15
    )


def test_numeric_maximizer_in_beta_agrees_with_the_closed_form_estimate():
    from scipy.optimize import minimize_scalar

    from gmrf_infogeo.infogeo import field_estimates

    config = new_iid_configuration(32, 32, 0.0, 2.0, seed=53)
    est = field_estimates(config)

    def negative_pl(beta):
        p = ModelParams(mu=est.mu_hat, sigma2=est.sigma2_hat, beta=beta)
        return -log_pseudo_likelihood(config, p)

    res = minimize_scalar(negative_pl, bounds=(-0.4, 0.4), method="bounded")
    assert res.x == pytest.approx(est.beta_mpl, abs=1e-6)
