"""Density and estimator checks, with scipy.stats as the outside oracle."""

import math

import numpy as np
import pytest
from scipy import stats

from jitterfit import (
    DegenerateDataError,
    InsufficientDataError,
    ModelKind,
    ModelParams,
    NonConvergenceError,
    ParameterDomainError,
    SingularDensityError,
    gamma_moment_guess,
    log_pdf,
    log_pdf_many,
    mle_exponential,
    mle_gamma,
)


# ---------------------------------------------------------------- densities


@pytest.mark.parametrize("rate", [0.1, 1.0, 2.5, 40.0])
def test_exponential_log_pdf_matches_scipy(rate):
    v = np.linspace(0.0, 30.0, 400)
    ours = log_pdf_many(ModelParams.exponential(rate), v)
    ref = stats.expon.logpdf(v, scale=1.0 / rate)
    assert np.allclose(ours, ref, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("shape,scale", [(0.5, 2.0), (1.0, 0.5), (4.0, 1.0), (80.0, 0.01)])
def test_gamma_log_pdf_matches_scipy(shape, scale):
    v = np.linspace(0.01, 30.0, 400)
    ours = log_pdf_many(ModelParams.gamma(shape, scale), v)
    ref = stats.gamma.logpdf(v, shape, scale=scale)
    assert np.allclose(ours, ref, rtol=1e-11, atol=1e-11)


@pytest.mark.parametrize("rate", [0.5, 2.0])
def test_gamma_shape_one_reduces_to_exponential(rate):
    grid = np.arange(0.01, 10.0 + 1e-9, 0.01)
    exp_model = ModelParams.exponential(rate)
    gamma_model = ModelParams.gamma(1.0, 1.0 / rate)
    diff = np.abs(log_pdf_many(exp_model, grid) - log_pdf_many(gamma_model, grid))
    assert float(diff.max()) <= 1e-12


def test_negative_values_have_zero_density():
    exp_model = ModelParams.exponential(2.0)
    gamma_model = ModelParams.gamma(3.0, 1.0)
    for v in (-1e-12, -0.5, -100.0):
        assert log_pdf(exp_model, v) == -math.inf
        assert log_pdf(gamma_model, v) == -math.inf
    out = log_pdf_many(gamma_model, np.array([-1.0, 1.0]))
    assert out[0] == -math.inf and math.isfinite(out[1])


def test_gamma_density_at_zero():
    assert log_pdf(ModelParams.gamma(2.0, 1.0), 0.0) == -math.inf
    assert log_pdf(ModelParams.gamma(1.0, 0.5), 0.0) == pytest.approx(math.log(2.0))
    with pytest.raises(SingularDensityError):
        log_pdf(ModelParams.gamma(0.5, 1.0), 0.0)
    # vector path mirrors the scalar behavior
    vec = log_pdf_many(ModelParams.gamma(2.0, 1.0), np.array([0.0, 1.0]))
    assert vec[0] == -math.inf
    vec = log_pdf_many(ModelParams.gamma(1.0, 0.5), np.array([0.0]))
    assert vec[0] == pytest.approx(math.log(2.0))
    with pytest.raises(SingularDensityError):
        log_pdf_many(ModelParams.gamma(0.5, 1.0), np.array([0.0, 1.0]))


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), -float("inf")])
def test_non_finite_value_rejected(bad):
    model = ModelParams.exponential(1.0)
    with pytest.raises(ParameterDomainError):
        log_pdf(model, bad)
    with pytest.raises(ParameterDomainError):
        log_pdf_many(model, np.array([1.0, bad]))


def test_log_pdf_many_matches_scalar():
    rng = np.random.default_rng(17)
    values = rng.uniform(1e-6, 50.0, 200)
    for model in (ModelParams.exponential(0.7), ModelParams.gamma(3.3, 0.4)):
        vec = log_pdf_many(model, values)
        for v, lv in zip(values, vec):
            assert lv == pytest.approx(log_pdf(model, float(v)), rel=1e-14)


def test_extreme_arguments_stay_defined():
    # Far tails underflow to a log-density of -inf instead of raising.
    assert log_pdf(ModelParams.exponential(10.0), 1e308) == -math.inf
    assert log_pdf(ModelParams.gamma(2.0, 1e-3), 1e308) == -math.inf


@pytest.mark.parametrize(
    "model, tail",
    [
        (ModelParams.exponential(0.3), stats.expon(scale=1 / 0.3)),
        (ModelParams.exponential(5.0), stats.expon(scale=0.2)),
        (ModelParams.gamma(0.7, 2.0), stats.gamma(0.7, scale=2.0)),
        (ModelParams.gamma(4.0, 1.0), stats.gamma(4.0, scale=1.0)),
        (ModelParams.gamma(25.0, 0.05), stats.gamma(25.0, scale=0.05)),
    ],
)
def test_density_integrates_to_one(model, tail):
    from scipy import integrate

    # upper limit chosen so the truncated mass is below 1e-9
    upper = float(tail.ppf(1.0 - 1e-10))
    total, _ = integrate.quad(
        lambda v: math.exp(log_pdf(model, v)), 0.0, upper, limit=200
    )
    assert total == pytest.approx(1.0, abs=1e-6)


# ------------------------------------------------------------- ModelParams


def test_model_params_validation():
    with pytest.raises(ParameterDomainError):
        ModelParams.exponential(0.0)
    with pytest.raises(ParameterDomainError):
        ModelParams.exponential(-2.0)
    with pytest.raises(ParameterDomainError):
        ModelParams.exponential(float("nan"))
    with pytest.raises(ParameterDomainError):
        ModelParams.gamma(1.0, float("inf"))
    with pytest.raises(ParameterDomainError):
        ModelParams.gamma(-1.0, 1.0)
    with pytest.raises(ParameterDomainError):
        ModelParams(ModelKind.EXPONENTIAL, rate=1.0, shape=2.0)
    with pytest.raises(ParameterDomainError):
        ModelParams(ModelKind.GAMMA, rate=1.0)
    with pytest.raises(ValueError):
        ModelParams(7, rate=1.0)


def test_model_kind_codes():
    # The numeric codes are load-bearing (tie-breaks and the wire format).
    assert int(ModelKind.EXPONENTIAL) == 0
    assert int(ModelKind.GAMMA) == 1


# -------------------------------------------------------------- estimators


def test_mle_exponential_inverse_mean_identity():
    rng = np.random.default_rng(23)
    for _ in range(200):
        n = int(rng.integers(1, 500))
        x = rng.uniform(1e-6, 100.0, n)
        fit = mle_exponential(x)
        assert abs(fit.rate * x.mean() - 1.0) <= 1e-15


def test_mle_exponential_is_grid_optimal():
    rng = np.random.default_rng(29)
    x = rng.gamma(2.0, 0.5, 5000)  # deliberately misspecified data
    fit = mle_exponential(x)

    def loglik(rate):
        return len(x) * math.log(rate) - rate * x.sum()

    best = loglik(fit.rate)
    for factor in np.linspace(0.9, 1.1, 201):
        if factor != 1.0:
            assert loglik(fit.rate * factor) < best


def test_mle_exponential_errors():
    with pytest.raises(InsufficientDataError):
        mle_exponential(np.array([]))
    with pytest.raises(ParameterDomainError):
        mle_exponential(np.array([1.0, -1.0]))
    with pytest.raises(ParameterDomainError):
        mle_exponential(np.array([1.0, 0.0]))


def test_mle_gamma_matches_scipy_fit():
    rng = np.random.default_rng(99)
    for _ in range(10):
        a = float(rng.uniform(0.5, 8.0))
        b = float(rng.uniform(0.1, 4.0))
        x = rng.gamma(a, b, 10000)
        fit = mle_gamma(x)
        a_ref, _, b_ref = stats.gamma.fit(x, floc=0)
        assert abs(fit.shape - a_ref) / a_ref <= 1e-8
        assert abs(fit.scale - b_ref) / b_ref <= 1e-8


def test_mle_gamma_stationarity_residual():
    rng = np.random.default_rng(7)
    from jitterfit import digamma

    for _ in range(20):
        a = float(rng.uniform(0.3, 12.0))
        x = rng.gamma(a, 1.7, 5000)
        fit = mle_gamma(x)
        s = math.log(x.mean()) - np.log(x).mean()
        assert abs(math.log(fit.shape) - digamma(fit.shape) - s) <= 1e-8
        # the scale is pinned to the mean through the shape
        assert fit.scale == pytest.approx(x.mean() / fit.shape, rel=1e-12)


def test_mle_gamma_recovers_truth():
    rng = np.random.default_rng(11)
    x = rng.gamma(4.0, 1.0, 20000)
    fit = mle_gamma(x)
    assert fit.shape == pytest.approx(4.0, rel=0.05)
    assert fit.scale == pytest.approx(1.0, rel=0.05)


def test_mle_gamma_insufficient_and_invalid():
    with pytest.raises(InsufficientDataError):
        mle_gamma(np.array([1.0]))
    with pytest.raises(ParameterDomainError):
        mle_gamma(np.array([1.0, -2.0]))
    with pytest.raises(ParameterDomainError):
        mle_gamma(np.array([1.0, 2.0]), tol=0.0)
    with pytest.raises(ParameterDomainError):
        mle_gamma(np.array([1.0, 2.0]), max_newton_iters=0)


def test_mle_gamma_constant_samples_degenerate():
    with pytest.raises(DegenerateDataError):
        mle_gamma(np.full(100, 3.25))


def test_mle_gamma_shape_cap():
    # Nearly constant data push the shape estimate far past any physical
    # value; the solve must refuse rather than report a 1e8 shape.
    rng = np.random.default_rng(5)
    x = 1.0 + rng.normal(0.0, 1e-4, 1000)
    x = np.abs(x)
    with pytest.raises(DegenerateDataError):
        mle_gamma(x)


def test_mle_gamma_budget_exhaustion_carries_iterate():
    rng = np.random.default_rng(13)
    x = rng.gamma(3.0, 2.0, 1000)
    with pytest.raises(NonConvergenceError) as excinfo:
        mle_gamma(x, max_newton_iters=1)
    assert excinfo.value.last_iterate is not None
    assert excinfo.value.last_iterate > 0


def test_gamma_moment_guess_worked_example():
    shape, scale = gamma_moment_guess([1.0, 2.0, 3.0, 4.0])
    assert shape == pytest.approx(5.0, abs=1e-12)
    assert scale == pytest.approx(0.5, abs=1e-12)


def test_gamma_moment_guess_constant_degenerate():
    with pytest.raises(DegenerateDataError):
        gamma_moment_guess(np.full(10, 2.0))


def test_gamma_moment_guess_tracks_mle():
    rng = np.random.default_rng(31)
    x = rng.gamma(6.0, 0.5, 50000)
    shape, scale = gamma_moment_guess(x)
    fit = mle_gamma(x)
    assert shape == pytest.approx(fit.shape, rel=0.1)
    assert scale == pytest.approx(fit.scale, rel=0.1)
