import math

import numpy as np
import pytest
from scipy import stats

from uav_coverage.core.coverage import CoverageModel, TierParams, coverage_integral
from uav_coverage.core.exceptions import (
    DomainError,
    RadiusRequiredError,
    ResourceLimitError,
)
from uav_coverage.core.mc_oracle import (
    McEstimate,
    OracleSettings,
    ServingMode,
    empirical_coverage,
    empirical_sweep,
    fading_marks,
    laplace_equivalent_density,
    rng_stream,
    sample_ppp,
    serving_radius_for,
    settings_metadata,
    thin,
    truncation_tail_bound,
)


def _lonely_model(alpha=4.0):
    return CoverageModel(TierParams(0.05, 1.0), (), threshold=1.0, alpha=alpha)


class TestSampling:
    def test_streams_are_reproducible(self):
        first = rng_stream(7, 3).random(5)
        assert np.array_equal(first, rng_stream(7, 3).random(5))
        assert not np.array_equal(first, rng_stream(7, 4).random(5))
        assert not np.array_equal(first, rng_stream(8, 3).random(5))

    def test_zero_radius_is_empty(self):
        field = sample_ppp(0.1, 0.0, rng_stream(1, 0))
        assert field.count == 0
        assert field.points.shape == (0, 2)

    def test_mean_count_and_support(self):
        rng = rng_stream(1, 0)
        fields = [sample_ppp(0.01, 10.0, rng) for _ in range(2000)]
        mean = np.mean([f.count for f in fields])
        expected = 0.01 * math.pi * 100
        assert abs(mean - expected) < 4 * math.sqrt(expected / 2000)
        assert all(np.all(f.radii <= 10.0) for f in fields)

    def test_thinning_halves_the_field(self):
        rng = rng_stream(2, 0)
        field = sample_ppp(1.0, 50.0, rng)
        kept = thin(field, 0.5, rng)
        assert kept.density == 0.5
        assert kept.region_radius == 50.0
        assert abs(kept.count - field.count / 2) < 4 * math.sqrt(field.count / 4)
        with pytest.raises(DomainError):
            thin(field, 1.5, rng)

    def test_thinned_counts_match_half_density(self):
        thin_rng, direct_rng = rng_stream(5, 0), rng_stream(5, 1)
        thinned = [thin(sample_ppp(0.01, 10.0, thin_rng), 0.5, thin_rng).count
                   for _ in range(10_000)]
        direct = [sample_ppp(0.005, 10.0, direct_rng).count for _ in range(10_000)]
        assert stats.ks_2samp(thinned, direct).pvalue > 1e-3
        full = [sample_ppp(0.01, 10.0, direct_rng).count for _ in range(10_000)]
        assert stats.ks_2samp(thinned, full).pvalue < 1e-6

    def test_tiny_mean_is_almost_always_empty(self):
        rng = rng_stream(6, 0)
        density = 1e-4 / math.pi
        nonempty = sum(sample_ppp(density, 1.0, rng).count > 0 for _ in range(100_000))
        assert nonempty < 100
        assert stats.binomtest(nonempty, 100_000, -math.expm1(-1e-4)).pvalue > 1e-3

    def test_fading_marks(self):
        marks = fading_marks(rng_stream(3, 0), 100_000)
        assert abs(marks.mean() - 1.0) < 4 / math.sqrt(100_000)
        assert np.all(marks >= 0)
        assert np.array_equal(fading_marks(rng_stream(3, 0), 4, enabled=False), np.ones(4))

    def test_point_budget(self):
        with pytest.raises(ResourceLimitError) as exc_info:
            sample_ppp(1.0, 1e4, rng_stream(1, 0))
        assert exc_info.value.exit_code == 4

    def test_laplace_equivalent_density(self):
        assert laplace_equivalent_density(0.03, 4.0) == pytest.approx(2 * 0.03 / math.pi**2)
        with pytest.raises(DomainError):
            laplace_equivalent_density(0.03, 2.0)


class TestDeterministicCases:
    def test_zero_threshold_always_covered(self, single_tier_model):
        settings = OracleSettings(trials=2000, radius=100.0, serving_distance=2.0)
        sample = empirical_sweep(single_tier_model(), [0.0], settings)[0]
        assert sample.fixed.p_cov == 1.0

    def test_no_interferers_always_covered(self):
        settings = OracleSettings(trials=1000)
        samples = empirical_sweep(_lonely_model(), [0.1, 10.0, 1e6], settings)
        assert [s.fixed.p_cov for s in samples] == [1.0, 1.0, 1.0]

    def test_fixed_interferer_without_fading(self):
        settings = OracleSettings(
            trials=500, fading=False, fixed_interferers=((2.0, 1.0),), serving_distance=1.0
        )
        samples = empirical_sweep(_lonely_model(), [15.0, 17.0], settings)
        # SINR = 1 / 2^-4 = 16 on every trial
        assert [s.fixed.p_cov for s in samples] == [1.0, 0.0]
        assert samples[0].fixed.half_width_99 == 0.0

    def test_reference_noise_in_fixed_mode(self):
        settings = OracleSettings(
            trials=200, fading=False, serving_distance=2.0, reference_noise=1.0
        )
        # SINR = 2^-4 / (2^-2) = 0.25
        samples = empirical_sweep(_lonely_model(), [0.24, 0.26], settings)
        assert [s.fixed.p_cov for s in samples] == [1.0, 0.0]


class TestRunControl:
    def test_radius_required_for_alpha_two(self, single_tier_model):
        with pytest.raises(RadiusRequiredError) as exc_info:
            empirical_sweep(single_tier_model(alpha=2.0), [1.0], OracleSettings(trials=10))
        assert exc_info.value.exit_code == 2

    def test_explicit_radius_allows_alpha_two(self, single_tier_model):
        settings = OracleSettings(trials=1000, radius=50.0)
        sample = empirical_sweep(single_tier_model(alpha=2.0), [1.0], settings)[0]
        assert 0.0 <= sample.fixed.p_cov <= 1.0
        assert sample.tail_bound is None

    def test_point_budget_of_a_run(self, single_tier_model):
        settings = OracleSettings(trials=10, radius=1e4)
        with pytest.raises(ResourceLimitError):
            empirical_sweep(single_tier_model(density=1.0), [1.0], settings)

    def test_invalid_inputs(self, single_tier_model):
        with pytest.raises(DomainError):
            empirical_sweep(single_tier_model(), [1.0], OracleSettings(trials=0))
        with pytest.raises(DomainError):
            empirical_sweep(single_tier_model(), [-1.0], OracleSettings(trials=10))
        with pytest.raises(DomainError):
            OracleSettings(seed=-1)
        assert empirical_sweep(single_tier_model(), [], OracleSettings(trials=10)) == []

    def test_common_random_numbers_give_monotone_curve(self, single_tier_model):
        settings = OracleSettings(trials=5000, radius=100.0, serving_distance=2.0)
        grid = np.logspace(-2, 2, 25)
        values = [s.fixed.p_cov for s in empirical_sweep(single_tier_model(), grid, settings)]
        assert all(b <= a for a, b in zip(values, values[1:]))

    def test_worker_count_does_not_change_results(self, single_tier_model):
        base = OracleSettings(trials=20_000, radius=50.0, serving_distance=2.0, block_size=5000)
        model = single_tier_model()
        serial = empirical_sweep(model, [0.5, 1.0, 2.0], base)
        threaded = empirical_sweep(model, [0.5, 1.0, 2.0], OracleSettings(
            trials=20_000, radius=50.0, serving_distance=2.0, block_size=5000, workers=3
        ))
        assert serial == threaded

    def test_same_seed_same_estimate(self, single_tier_model):
        settings = OracleSettings(trials=3000, radius=50.0, serving_distance=2.0)
        first = empirical_sweep(single_tier_model(), [1.0], settings)
        assert first == empirical_sweep(single_tier_model(), [1.0], settings)

    def test_ppp_mode_reports_both_estimators(self, single_tier_model):
        settings = OracleSettings(
            trials=2000,
            radius=50.0,
            serving_mode=ServingMode.PPP,
            reference_noise=1.0,
            include_noise=False,
        )
        sample = empirical_sweep(single_tier_model(), [1.0], settings)[0]
        assert sample.fixed is None
        assert sample.primary is sample.union_bound
        assert sample.union_bound.estimator == "union-bound"
        assert sample.max_sinr.estimator == "max-sinr"
        assert sample.tail_bound is not None and sample.tail_bound > 0

    def test_empirical_coverage_uses_model_threshold(self, single_tier_model):
        estimate = empirical_coverage(
            single_tier_model(threshold=1.0),
            trials=1000,
            radius=50.0,
            seed=5,
            settings=OracleSettings(serving_distance=2.0),
        )
        assert estimate.trials == 1000
        assert estimate.seed == 5
        assert estimate.estimator == "fixed"

    def test_metadata(self):
        metadata = settings_metadata(OracleSettings(trials=10, seed=3, radius=20.0))
        assert metadata["seed"] == 3
        assert metadata["trials"] == 10
        assert metadata["radius_m"] == 20.0
        assert metadata["serving_mode"] == "fixed"


class TestBounds:
    def test_serving_radius_from_reference_noise(self, single_tier_model):
        settings = OracleSettings(serving_mode=ServingMode.PPP, reference_noise=1.0)
        model = single_tier_model(serving_density=0.05)
        radius = serving_radius_for(model, 1.0, settings)
        assert radius**2 == pytest.approx(math.log(0.05 * math.pi / 1e-9))
        explicit = OracleSettings(serving_mode=ServingMode.PPP, serving_radius=12.0)
        assert serving_radius_for(model, 1.0, explicit) == 12.0

    def test_fixed_mode_tail_bound(self, single_tier_model):
        model = single_tier_model()
        settings = OracleSettings(radius=100.0, serving_distance=2.0)
        lam = laplace_equivalent_density(0.03, 4.0)
        k = lam * 2 * math.pi * 1.0 * 100.0 * 100.0**-2 / 2
        bound = truncation_tail_bound(model, 1.0, settings)
        assert bound == pytest.approx(k * 16.0, rel=1e-12)
        assert truncation_tail_bound(model, 1.0, OracleSettings(radius=1000.0)) < bound

    def test_estimate_interval(self):
        estimate = McEstimate(0.5, 100, 0.1, seed=1)
        assert estimate.contains(0.55)
        assert not estimate.contains(0.65)
        assert estimate.contains(0.65, slack=0.06)
        assert (estimate.low, estimate.high) == pytest.approx((0.4, 0.6))


PPP_MODELS = [
    # (threshold, serving density, serving power, interferer density, interferer power)
    (0.5, 0.03, 1.0, 0.03, 100.0),
    (1.0, 0.05, 1.0, 0.03, 100.0),
    (2.0, 0.1, 1.0, 0.03, 100.0),
    (1.0, 0.05, 1.0, 0.01, 400.0),
    (1.0, 0.03, 2.0, 0.02, 100.0),
]


def _ppp_settings(seed):
    return OracleSettings(
        trials=1_000_000,
        seed=seed,
        radius=100.0,
        serving_mode=ServingMode.PPP,
        reference_noise=1.0,
        include_noise=False,
    )


def _ppp_gap(params, seed):
    threshold, serving_density, serving_power, density, power = params
    model = CoverageModel(
        TierParams(serving_density, serving_power),
        (TierParams(density, power),),
        threshold=threshold,
        alpha=4.0,
    )
    integral = coverage_integral(model).raw
    sample = empirical_sweep(model, [threshold], _ppp_settings(seed))[0]
    estimate = sample.union_bound
    return abs(estimate.center - integral), estimate.half_width_99, sample.tail_bound


@pytest.mark.slow
def test_ppp_oracle_agrees_with_radial_integral():
    gaps = [_ppp_gap(params, seed=20240601) for params in PPP_MODELS]
    assert all(gap <= hw for gap, hw, _ in gaps)
    assert all(hw <= 1.5e-3 for _, hw, _ in gaps)


@pytest.mark.slow
def test_neighbouring_seeds_both_agree():
    first = _ppp_gap(PPP_MODELS[1], seed=1000)
    second = _ppp_gap(PPP_MODELS[1], seed=1001)
    assert first[0] != second[0]
    for gap, hw, tail in (first, second):
        assert gap <= 1.5 * hw + tail


@pytest.mark.slow
def test_fixed_serving_distance_matches_laplace_functional(single_tier_model):
    settings = OracleSettings(trials=200_000, radius=100.0, serving_distance=2.0)
    sample = empirical_sweep(single_tier_model(), [1.0], settings)[0]
    # exp(-(S r0^4 / P)^(1/2) * lambda * P_i^(1/2)) = exp(-4 * 0.03 * 10)
    expected = math.exp(-1.2)
    assert expected == pytest.approx(0.3012, abs=1e-4)
    assert sample.fixed.contains(expected, slack=sample.tail_bound)


def test_disc_points_are_uniform_in_area():
    field = sample_ppp(0.05, 40.0, rng_stream(9, 0))
    statistic = stats.kstest((field.radii / 40.0) ** 2, "uniform")
    assert statistic.pvalue > 1e-3
    angles = np.arctan2(field.points[:, 1], field.points[:, 0])
    assert stats.kstest((angles + math.pi) / (2 * math.pi), "uniform").pvalue > 1e-3
