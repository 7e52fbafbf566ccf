import pytest

from mvsom import SyntheticSpec, generate_synthetic


@pytest.fixture(scope="session")
def desk_dataset():
    """Two-viewpoint 200-item fixture used across the suite.

    Wide weight ranges keep real spread inside each group, so sampled-row
    codebooks are beatable by training.
    """
    spec = SyntheticSpec(
        item_count=200,
        features={"alpha": 30, "beta": 24},
        group_count=3,
        coupling=0.8,
        seed=7,
        weight_ranges={"alpha": (1, 9), "beta": (1, 9)},
    )
    return generate_synthetic(spec)


@pytest.fixture(scope="session")
def coupled_dataset():
    """Perfectly coupled two-viewpoint fixture (groups align across views)."""
    spec = SyntheticSpec(
        item_count=48,
        features={"alpha": 16, "beta": 16},
        group_count=4,
        coupling=1.0,
        seed=11,
    )
    return generate_synthetic(spec)
