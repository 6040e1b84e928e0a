import os

os.environ['FLASK_ENV'] = 'testing'

import numpy as np
import pytest

from main.core import app as witness_app
from main.criteria import CriteriaConfig


@pytest.fixture
def app():
    witness_app.config['TESTING'] = True
    return witness_app


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def config(app):
    """ Criteria configuration read from testing.cfg (analytic gradients, few restarts). """
    return CriteriaConfig.from_mapping(app.config)
