import numpy as np
import pytest

from abq import BaselineMode, Batch, init_network
from tests.config import SMALL_WIDTHS
from tests.utils import random_batch


def pytest_addoption(parser):
    parser.addoption(
        '--runslow',
        action='store_true',
        default=False,
        help='run the long training acceptance tests',
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_net():
    return init_network(state_dim=5, n=3, N=4, widths=SMALL_WIDTHS, seed=7)


@pytest.fixture
def small_batch(rng) -> Batch:
    return random_batch(rng, size=8, state_dim=5, n=3, N=4)


@pytest.fixture(params=list(BaselineMode), ids=lambda m: m.value)
def mode(request) -> BaselineMode:
    return request.param


@pytest.fixture
def run_dir(tmp_path):
    return str(tmp_path / 'runs')
