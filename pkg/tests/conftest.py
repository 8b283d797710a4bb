import os

import numpy as np
import pytest
from mpmath import mp

from csrec.config import DATA_DIR, Settings


@pytest.fixture(autouse=True)
def precision_64():
    """Run every test at 64 bits and restore the global mpmath context."""
    saved = mp.prec
    mp.prec = 64
    yield
    mp.prec = saved


@pytest.fixture
def settings():
    return Settings(threads=1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def data_path():
    return lambda name: os.path.join(DATA_DIR, name)


@pytest.fixture(scope='session')
def m6_manifold():
    from csrec.manifold import load_manifold
    with mp.workprec(64):
        return load_manifold(os.path.join(DATA_DIR, 'm6_fig8.json'), Settings(threads=1))


@pytest.fixture(scope='session')
def lens_manifold():
    from csrec.manifold import load_manifold
    with mp.workprec(64):
        return load_manifold(os.path.join(DATA_DIR, 'lens_5_1.json'), Settings(threads=1))
