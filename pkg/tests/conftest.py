import pathlib

import numpy as np
import pytest

from evoloss import PayoffParams

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture
def fixture_params():
    # hand-checkable game: interior fixed point at (5/6, 5/6)
    return PayoffParams(g1=1.5, d1=1.0, g2=1.0, d2=1.5, n1=0.5, n2=0.5)


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def rng():
    return np.random.default_rng(20240816)
