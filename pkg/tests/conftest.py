import numpy as np
import pytest
from hypothesis import strategies as st

from qhadamard.quat import Quaternion

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
quats = st.builds(Quaternion, finite, finite, finite, finite)
nonzero_quats = quats.filter(lambda q: abs(q) > 1e-3)
unit_quats = nonzero_quats.map(lambda q: q / abs(q))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_unit(rng):
    v = rng.standard_normal(4)
    return Quaternion(*(v / np.linalg.norm(v)))
