import numpy as np
import pytest

import walraskit as wk
from support import edgeworth_asymmetric, edgeworth_symmetric


@pytest.fixture
def rng():
    return np.random.default_rng(20250810)


@pytest.fixture
def sym_edgeworth():
    return edgeworth_symmetric()


@pytest.fixture
def asym_edgeworth():
    return edgeworth_asymmetric()


@pytest.fixture
def symmetric_family():
    return wk.CanonicalFamily.symmetric(2)
