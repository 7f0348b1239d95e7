import pytest

from jitterfit import LabeledTrace, ModelParams, RegimeSpec, generate_synthetic

REFERENCE_SEED = 42
REFERENCE_HALF = 15000


def reference_spec(seed: int = REFERENCE_SEED, half: int = REFERENCE_HALF) -> RegimeSpec:
    """Two-regime recipe: gamma(4, 1) samples, then exponential(rate 1)."""
    return RegimeSpec(
        segments=(
            (ModelParams.gamma(4.0, 1.0), half),
            (ModelParams.exponential(1.0), half),
        ),
        seed=seed,
    )


@pytest.fixture(scope="session")
def reference_labeled() -> LabeledTrace:
    return generate_synthetic(reference_spec())


@pytest.fixture(scope="session")
def reference_trace(reference_labeled):
    return reference_labeled.trace
