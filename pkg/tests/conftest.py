import numpy as np
import pytest

from ionvq.core import IonSpec, build_register, m1_map, m2_map


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def reg_n2():
    return build_register([IonSpec(4, m1_map())])


@pytest.fixture
def reg_n2_m2():
    return build_register([IonSpec(4, m2_map())])


@pytest.fixture
def reg_mixed():
    return build_register([IonSpec(4, m1_map()), IonSpec(2)])
