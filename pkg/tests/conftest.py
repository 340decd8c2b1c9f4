#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
from qncsim import confdir
from qncsim.engine import draw_coefficients
from qncsim.network import DeploymentConfig, Edge, NetworkGraph, generate_deployment
import pytest

def pytest_configure(config):
    config.addinivalue_line("markers", "slow: statistical checks with 10^4 samples or more, deselect with -m 'not slow'")

@pytest.fixture(scope='module')
def deployment():
    """ n=10, |E|=30 random deployment """
    return generate_deployment(DeploymentConfig(10, 30, capacity=1.0, seed=7))

@pytest.fixture(scope='module')
def schedule(deployment):
    return draw_coefficients(deployment, 6, seed=11)

@pytest.fixture
def single_edge():
    """ Smallest deployment: node 1 sends to the gateway 2 """
    return NetworkGraph(2, [ Edge(0, 1, 2, 1.0) ], 2)

@pytest.fixture
def cache(tmp_path, monkeypatch):
    """ Record stores under the test directory """
    directory = str(tmp_path / 'cache')
    monkeypatch.setattr(confdir, 'cache', directory)
    return directory
