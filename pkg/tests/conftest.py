"""Shared fixtures."""

import pytest

from uav_coverage.core.coverage import CoverageModel, TierParams
from uav_coverage.infra.settings import settings


@pytest.fixture(autouse=True)
def fresh_settings():
    """Every test starts from the default tooling settings."""
    settings.reload()
    yield
    settings.reload()


@pytest.fixture
def single_tier_model():
    """Factory for alpha-configurable single-interfering-tier models."""

    def build(
        threshold=1.0,
        serving_density=0.05,
        serving_power=1.0,
        density=0.03,
        power=100.0,
        alpha=4.0,
        noise=0.0,
        downlink_sinr=1.0,
    ):
        return CoverageModel(
            serving=TierParams(serving_density, serving_power),
            interferers=(TierParams(density, power),),
            threshold=threshold,
            alpha=alpha,
            noise_variance=noise,
            downlink_sinr=downlink_sinr,
        )

    return build
