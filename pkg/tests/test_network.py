#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
from qncsim import network
from qncsim.exception import ConfigException, DeploymentException
from qncsim.network import (DeploymentConfig, Edge, NetworkGraph, generate_deployment, incoming_edges,
                            load_graph, outgoing_edges, reaches_gateway, save_graph)
import numpy as np
import pytest

def test_deployment_sizes(deployment):
    assert deployment.n == 10
    assert deployment.edge_count == 30
    assert 1 <= deployment.gateway <= 10
    assert all(e.tail != e.head for e in deployment.edges)
    assert reaches_gateway(deployment)

def test_deployment_is_seeded():
    first = generate_deployment(DeploymentConfig(10, 30, seed=7))
    second = generate_deployment(DeploymentConfig(10, 30, seed=7))
    assert first == second
    assert [ (e.tail, e.head) for e in first.edges ] == [ (e.tail, e.head) for e in second.edges ]

def test_smallest_deployment():
    g = generate_deployment(DeploymentConfig(2, 1, seed=3))
    other = 3 - g.gateway
    assert incoming_edges(g, g.gateway) == [ 0 ]
    assert incoming_edges(g, other) == []
    assert outgoing_edges(g, other) == [ 0 ]
    assert outgoing_edges(g, g.gateway) == []

def test_in_out_partition(deployment):
    ins = sum( (incoming_edges(deployment, v) for v in range(1, 11)), [] )
    outs = sum( (outgoing_edges(deployment, v) for v in range(1, 11)), [] )
    assert sorted(ins) == list(range(30))
    assert sorted(outs) == list(range(30))
    for v in range(1, 11):
        assert incoming_edges(deployment, v) == sorted(incoming_edges(deployment, v))
        assert all(deployment.edges[e].head == v for e in incoming_edges(deployment, v))
        assert all(deployment.edges[e].tail == v for e in outgoing_edges(deployment, v))

def test_large_deployment():
    g = generate_deployment(DeploymentConfig(100, 1100, seed=5))
    assert g.n == 100 and g.edge_count == 1100
    assert reaches_gateway(g)

def test_incidence(deployment):
    assert deployment.incidence.shape == (30, 10)
    assert np.all(deployment.incidence.sum(axis=1) == 1)
    assert np.all(deployment.incidence[np.arange(30), deployment.tails-1] == 1)

def test_invalid_node(deployment):
    with pytest.raises(ConfigException):
        incoming_edges(deployment, 0)
    with pytest.raises(ConfigException):
        outgoing_edges(deployment, 11)

def test_invalid_configurations():
    with pytest.raises(ConfigException):
        generate_deployment(DeploymentConfig(10, 8))
    with pytest.raises(ConfigException):
        generate_deployment(DeploymentConfig(1, 3))
    with pytest.raises(ConfigException):
        generate_deployment(DeploymentConfig(4, 6, capacity=0.0))

def test_invalid_graphs():
    with pytest.raises(ConfigException):
        Edge(0, 1, 2, 0.0)
    with pytest.raises(ConfigException):
        NetworkGraph(2, [ Edge(0, 1, 1, 1.0) ], 1)
    with pytest.raises(ConfigException):
        NetworkGraph(2, [ Edge(0, 2, 1, 1.0) ], 2)
    with pytest.raises(ConfigException):
        NetworkGraph(3, [ Edge(1, 1, 2, 1.0) ], 2)

def test_unreachable_gateway():
    g = NetworkGraph(3, [ Edge(0, 1, 3, 1.0), Edge(1, 3, 2, 1.0) ], 3)
    assert not reaches_gateway(g)

def test_attempts_exhausted(monkeypatch):
    monkeypatch.setattr(network, 'MAX_ATTEMPTS', 0)
    with pytest.raises(DeploymentException):
        generate_deployment(DeploymentConfig(5, 10, seed=1))

def test_capacity_sampler():
    g = generate_deployment(DeploymentConfig(6, 15, seed=2, capacity_sampler=lambda rng, size: rng.uniform(2.0, 6.0, size)))
    assert np.all((g.capacities >= 2.0) & (g.capacities <= 6.0))
    assert len(set(g.capacities.tolist())) > 1

def test_save_load(tmp_path, deployment):
    path = str(tmp_path / 'graph.txt')
    save_graph(deployment, path)
    assert load_graph(path) == deployment

def test_load_without_seed(tmp_path):
    path = tmp_path / 'graph.txt'
    path.write_text('# hand made\n3 2 3 -\n0 1 2 1.5\n\n1 2 3 2\n')
    g = load_graph(str(path))
    assert g.seed is None
    assert g.edges[0] == Edge(0, 1, 2, 1.5)
    assert incoming_edges(g, 3) == [ 1 ]
