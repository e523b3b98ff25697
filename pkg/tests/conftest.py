import numpy as np
import pytest

from xbartrain.datasets import make_half_moons
from xbartrain.training import TrainingConfig, train_hardware_aware, train_regular
from xbartrain.variability import (
    BiasDisturbanceDb,
    LinearStdModel,
    OffsetModel,
    StuckModel,
    VariabilityModel,
    make_synthetic_model,
)

# Matches the stream derivation used by experiments.experiment_dataset for
# the default config, so fixture nets line up with CLI runs.
DATASET_SEED = np.random.SeedSequence([0, 102])


def zero_noise_model() -> VariabilityModel:
    """Every stochastic source disabled; transfers become deterministic."""
    return VariabilityModel(
        std_model=LinearStdModel.zero(),
        offset_model=OffsetModel.zero(),
        bias_db=BiasDisturbanceDb.zero(),
        stuck_model=StuckModel(10.0, 100.0, (900.0,)),
    )


@pytest.fixture(scope="session")
def synthetic_model():
    return make_synthetic_model()


@pytest.fixture(scope="session")
def zero_model():
    return zero_noise_model()


@pytest.fixture(scope="session")
def moons_split():
    return make_half_moons(1075, noise_std=0.1, seed=DATASET_SEED).split(875)


@pytest.fixture(scope="session")
def default_config():
    return TrainingConfig(seed=0)


@pytest.fixture(scope="session")
def trained_hann(default_config, moons_split, synthetic_model):
    train_set, _ = moons_split
    return train_hardware_aware(default_config, train_set, model=synthetic_model)


@pytest.fixture(scope="session")
def trained_regular(default_config, moons_split):
    train_set, _ = moons_split
    return train_regular(default_config, train_set)
