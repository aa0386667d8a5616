import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


def random_state(rs: np.random.Generator):
    from photonbell import PhotonState

    z = rs.normal(size=4) + 1j * rs.normal(size=4)
    return PhotonState(z / np.linalg.norm(z))


@pytest.fixture
def rs():
    return np.random.default_rng(20031)
