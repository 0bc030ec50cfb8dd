"""
Ortak test fixture'ları
"""

import numpy as np
import pytest

from matroidphase.services.gf import field_make
from matroidphase.services.spmat import SparseMatrix


@pytest.fixture
def gf2():
    return field_make(2)


@pytest.fixture
def gf3():
    return field_make(3)


@pytest.fixture
def gf4():
    return field_make(2, 2)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))


@pytest.fixture
def u23_host(gf2):
    """U(2,3)'ü silme olmadan içeren 3x4 GF(2) matrisi"""
    return SparseMatrix.from_columns(
        gf2,
        3,
        [
            [(0, 1)],
            [(1, 1)],
            [(0, 1), (1, 1)],
            [(2, 1)],
        ],
    )


@pytest.fixture
def identity3(gf2):
    """Serbest matroid: birim sütunlar"""
    return SparseMatrix.from_columns(gf2, 3, [[(0, 1)], [(1, 1)], [(2, 1)]])
