import math

import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from entmoments.linalg import DensityMatrix
from entmoments.states import ket, projector


def bell() -> DensityMatrix:
    phi = (ket(0, 0) + ket(1, 1)) / math.sqrt(2)
    return DensityMatrix(projector(phi), (2, 2))


def mixed(d: int, dims) -> DensityMatrix:
    return DensityMatrix(np.eye(d) / d, dims)


def random_hermitian(rng, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


@st.composite
def hermitian_matrices(draw, sizes=(2, 3, 4, 6, 8, 9)):
    n = draw(st.sampled_from(sizes))
    floats = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
    re = draw(arrays(float, (n, n), elements=floats))
    im = draw(arrays(float, (n, n), elements=floats))
    g = re + 1j * im
    return (g + g.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
