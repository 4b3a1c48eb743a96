"""Shared fixtures."""

import os

import numpy as np
import pytest

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def rng():
    return np.random.default_rng(20170501)
