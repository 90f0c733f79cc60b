import numpy as np
import pytest

from evsite.grids import Grid


@pytest.fixture
def template():
    return Grid(8, 6, 0.0, 0.0, 10.0, -9999.0, np.zeros((6, 8)))
