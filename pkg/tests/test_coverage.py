import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from uav_coverage.core import coverage
from uav_coverage.core.coverage import (
    CoverageCurve,
    CoverageModel,
    Method,
    QuadratureSettings,
    TierParams,
    coverage_closed_form,
    coverage_integral,
    laplace_interference,
    radial_integral,
    radial_integrand,
    sweep,
    tolerable_threshold,
)
from uav_coverage.core.exceptions import (
    DegenerateModelError,
    DomainError,
    NumericalError,
    ResourceLimitError,
    SweepPointError,
)
from uav_coverage.core.mc_oracle import OracleSettings, ServingMode
from uav_coverage.core.units import db_to_linear
from uav_coverage.scenarios import derive_model, preset

TIGHT = QuadratureSettings(epsabs=0.0, epsrel=1e-11)


def _random_model(rng, alpha=None):
    tiers = tuple(
        TierParams(rng.uniform(1e-4, 0.1), rng.uniform(0.1, 50)) for _ in range(rng.integers(1, 4))
    )
    return CoverageModel(
        serving=TierParams(rng.uniform(1e-4, 0.1), rng.uniform(0.1, 10)),
        interferers=tiers,
        threshold=float(10 ** rng.uniform(-2, 2)),
        alpha=float(alpha if alpha is not None else rng.uniform(2, 5)),
        downlink_sinr=float(10 ** rng.uniform(-2, 2)),
    )


class TestClosedForm:
    def test_all_ratios_one(self, single_tier_model):
        model = single_tier_model(alpha=2.0, serving_density=0.03, density=0.03)
        assert coverage_closed_form(model) == pytest.approx(1 - math.exp(-math.pi), rel=1e-12)
        assert coverage_closed_form(model) == pytest.approx(0.95678, abs=1e-5)

    def test_half_sinr_ratio(self, single_tier_model):
        model = single_tier_model(
            alpha=2.0, serving_density=0.03, density=0.03, threshold=2.0, downlink_sinr=1.0
        )
        assert coverage_closed_form(model) == pytest.approx(1 - math.exp(-math.pi / 2), rel=1e-12)
        assert coverage_closed_form(model) == pytest.approx(0.79212, abs=1e-5)

    def test_vanishes_for_large_threshold(self, single_tier_model):
        assert coverage_closed_form(single_tier_model(threshold=1e30)) < 1e-10

    def test_no_interferers(self):
        model = CoverageModel(TierParams(0.03, 1.0), (), threshold=1.0, alpha=2.0)
        with pytest.raises(DegenerateModelError):
            coverage_closed_form(model)

    def test_monotone_on_random_models(self):
        rng = np.random.default_rng(2024)
        for _ in range(10_000):
            model = _random_model(rng)
            base = coverage_closed_form(model)
            assert 0.0 <= base <= 1.0
            higher_threshold = model.with_threshold(model.threshold * 1.5)
            assert coverage_closed_form(higher_threshold) <= base
            stronger = CoverageModel(
                model.serving,
                model.interferers,
                model.threshold,
                model.alpha,
                downlink_sinr=model.downlink_sinr * 1.5,
            )
            assert coverage_closed_form(stronger) >= base

    def test_joint_sinr_scaling_invariance(self, single_tier_model):
        model = single_tier_model(threshold=3.0, downlink_sinr=0.7, alpha=3.0)
        scaled = single_tier_model(threshold=30.0, downlink_sinr=7.0, alpha=3.0)
        assert coverage_closed_form(scaled) == pytest.approx(coverage_closed_form(model), rel=1e-12)

    def test_density_scaling_invariance(self, single_tier_model):
        model = single_tier_model(serving_density=0.02, density=0.03)
        scaled = single_tier_model(serving_density=2.0, density=3.0)
        assert coverage_closed_form(scaled) == pytest.approx(coverage_closed_form(model), rel=1e-12)


class TestLaplace:
    def test_zero_argument(self):
        assert laplace_interference(0.0, [TierParams(0.1, 10.0)], 4.0) == 1.0

    def test_gaussian_case(self):
        value = laplace_interference(math.pi**2, [TierParams(1 / math.pi, 1.0)], 2.0)
        assert value == pytest.approx(math.exp(-math.pi), rel=1e-12)
        assert value == pytest.approx(0.04321, abs=1e-5)

    def test_doubling_densities_squares(self):
        tiers = [TierParams(0.01, 30.0), TierParams(0.02, 8.0)]
        doubled = [TierParams(2 * t.density, t.tx_power) for t in tiers]
        single = laplace_interference(0.7, tiers, 3.5)
        assert laplace_interference(0.7, doubled, 3.5) == pytest.approx(single**2, rel=1e-12)

    def test_monotone(self):
        tiers = [TierParams(0.01, 30.0)]
        values = [laplace_interference(s, tiers, 4.0) for s in np.linspace(0, 50, 200)]
        assert all(b <= a for a, b in zip(values, values[1:]))

    def test_rejects_negative_argument(self):
        with pytest.raises(DomainError):
            laplace_interference(-1.0, [TierParams(0.01, 30.0)], 4.0)


def _gaussian_c(model):
    load = sum(t.density * t.tx_power for t in model.interferers)
    return (model.threshold / model.serving.tx_power) * (1 + load)


class TestIntegral:
    def test_integrand_at_origin(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            model = _random_model(rng)
            assert radial_integrand(model, 0.0) == 1.0
            assert radial_integrand(model, 0.0, include_noise=True) == 1.0

    def test_gaussian_oracle(self):
        rng = np.random.default_rng(7)
        models = [_random_model(rng, alpha=2.0) for _ in range(100)]
        expected = [math.pi / _gaussian_c(m) for m in models]
        values = [radial_integral(m, TIGHT)[0] for m in models]
        assert_allclose(values, expected, rtol=1e-9)

    @pytest.mark.parametrize("alpha", [2.0, 4.0])
    def test_cartesian_riemann_sum(self, single_tier_model, alpha):
        model = single_tier_model(alpha=alpha, power=10.0)
        c = coverage.gaussian_coefficient(model)
        half_side = math.sqrt(40.0 / c)
        h = half_side / 600
        axis = (np.arange(1200) + 0.5) * h - half_side
        x, y = np.meshgrid(axis, axis)
        riemann = 1.0 - model.serving.density * radial_integrand(model, np.hypot(x, y)).sum() * h**2
        assert coverage_integral(model).raw == pytest.approx(riemann, abs=1e-4)

    def test_integral_non_increasing_in_threshold(self, single_tier_model):
        values = [
            radial_integral(single_tier_model(threshold=t))[0] for t in np.logspace(-2, 2, 30)
        ]
        assert all(b <= a * (1 + 1e-9) for a, b in zip(values, values[1:]))

    def test_noise_shrinks_integral(self, single_tier_model):
        model = single_tier_model(noise=0.5)
        quiet, _, _ = radial_integral(model)
        noisy, _, _ = radial_integral(model, include_noise=True)
        assert noisy < quiet

    def test_result_is_clamped_but_raw_kept(self, single_tier_model):
        result = coverage_integral(single_tier_model(serving_density=1.0, threshold=1e-3))
        assert result.raw < 0
        assert result.probability == 0.0
        assert result.truncation_radius > 0

    def test_non_convergence(self, single_tier_model, monkeypatch):
        def failing_quad(*args, **kwargs):
            return 0.1, 1e-3, {}, "The maximum number of subdivisions (1) has been achieved."

        monkeypatch.setattr(coverage.integrate, "quad", failing_quad)
        with pytest.raises(NumericalError) as exc_info:
            coverage_integral(single_tier_model())
        assert exc_info.value.error_estimate == 1e-3
        assert exc_info.value.exit_code == 4


class TestSweep:
    def test_empty_grid(self, single_tier_model):
        curve = sweep(single_tier_model(), [], Method.CLOSED_FORM)
        assert len(curve) == 0

    def test_preset_sweep_matches_pointwise(self):
        model = derive_model(preset("fig1a_irs_0.1W")).model
        grid = [float(t) for t in range(-10, 31)]
        curve = sweep(model, grid, Method.CLOSED_FORM, scenario_name="fig1a_irs_0.1W")
        assert len(curve) == 41
        assert curve.thresholds_db == grid
        for t, p in curve.samples:
            assert p == coverage_closed_form(model.with_threshold(db_to_linear(t)))
        assert all(b <= a for a, b in zip(curve.probabilities, curve.probabilities[1:]))

    def test_workers_preserve_order(self, single_tier_model):
        grid = [float(t) for t in range(-10, 11)]
        serial = sweep(single_tier_model(), grid, Method.INTEGRAL)
        threaded = sweep(single_tier_model(), grid, Method.INTEGRAL, workers=4)
        assert threaded.samples == serial.samples
        assert serial.metadata["quadrature"]["epsrel"] == 1e-8

    def test_rejects_unsorted_grid(self, single_tier_model):
        with pytest.raises(DomainError):
            sweep(single_tier_model(), [0.0, -1.0])

    def test_point_error_carries_threshold(self, single_tier_model, monkeypatch):
        def failing_quad(*args, **kwargs):
            return 0.1, 1e-3, {}, "roundoff error"

        monkeypatch.setattr(coverage.integrate, "quad", failing_quad)
        with pytest.raises(SweepPointError) as exc_info:
            sweep(single_tier_model(), [3.0], Method.INTEGRAL)
        assert exc_info.value.threshold_db == 3.0
        assert exc_info.value.exit_code == 4
        assert isinstance(exc_info.value.cause, NumericalError)

    def test_oracle_point_error_names_the_lowest_threshold(self, single_tier_model):
        # at -80 dB the serving disc needed to bound the tail exceeds the point budget
        oracle = OracleSettings(
            trials=10,
            radius=100.0,
            serving_mode=ServingMode.PPP,
            reference_noise=1.0,
            include_noise=False,
        )
        with pytest.raises(SweepPointError) as exc_info:
            sweep(single_tier_model(), [-80.0, 10.0], Method.MONTE_CARLO, oracle=oracle)
        assert exc_info.value.threshold_db == -80.0
        assert exc_info.value.exit_code == 4
        assert isinstance(exc_info.value.cause, ResourceLimitError)
        assert sweep(single_tier_model(), [10.0], Method.MONTE_CARLO, oracle=oracle).samples

    def test_method_from_string(self, single_tier_model):
        assert sweep(single_tier_model(), [0.0], "closed-form").method is Method.CLOSED_FORM


class TestCurve:
    def test_rejects_out_of_range_probability(self):
        with pytest.raises(DomainError):
            CoverageCurve(Method.CLOSED_FORM, ((0.0, 1.2),))

    def test_rejects_repeated_threshold(self):
        with pytest.raises(DomainError):
            CoverageCurve(Method.CLOSED_FORM, ((0.0, 0.5), (0.0, 0.4)))

    def test_tolerable_threshold(self):
        curve = CoverageCurve(Method.CLOSED_FORM, ((0.0, 0.9), (1.0, 0.56), (2.0, 0.54)))
        assert tolerable_threshold(curve) == 1.0
        assert tolerable_threshold(curve, level=0.95) is None
        assert tolerable_threshold(curve, level=0.5) == 2.0
