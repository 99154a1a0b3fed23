import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from hbsa.hilbert import PhotonId, PureState, canonical_pair_register

AB = (PhotonId.A, PhotonId.B)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(rng, register):
    n = 2 ** len(register)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return PureState(register, v / np.linalg.norm(v))


@st.composite
def pair_states(draw):
    """Normalized random states on the six qubits of photons A and B."""
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_state(np.random.default_rng(seed), canonical_pair_register(AB))
