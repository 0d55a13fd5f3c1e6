import numpy as np
import pytest

from ncsdesign import ContinuousPlant, DiscretePlant, discretize_zoh

import refdata


@pytest.fixture(scope="session")
def ref_continuous() -> ContinuousPlant:
    return ContinuousPlant(A=refdata.PLANT_A, B=refdata.PLANT_B,
                           C=refdata.PLANT_C)


@pytest.fixture(scope="session")
def ref_plant(ref_continuous) -> DiscretePlant:
    return discretize_zoh(ref_continuous, refdata.SAMPLE_TIME)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240131)
