#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
from dataclasses import dataclass
from functools import cached_property
from qncsim.exception import ConfigException, DeploymentException
from qncsim.grammar.graph import GraphGrammar
from typing import Callable, Optional, Tuple
import logging
import networkx as nx
import numpy as np

__all__ = [
    "Edge", "NetworkGraph", "DeploymentConfig",
    "generate_deployment", "incoming_edges", "outgoing_edges", "reaches_gateway",
    "save_graph", "load_graph"
]
logger = logging.getLogger('qncsim.network')

# Resampling bound of generate_deployment
MAX_ATTEMPTS = 1000

@dataclass(frozen=True)
class Edge:
    id: int
    tail: int
    head: int
    capacity: float

    def __post_init__(self):
        if not self.capacity > 0:
            msg = 'Edge %d: capacity must be positive, got %r' % (self.id, self.capacity)
            logger.error ( msg )
            raise ConfigException(msg)

@dataclass(frozen=True)
class NetworkGraph:
    """
        Directed multigraph over nodes 1..n. Edge ids index the edges tuple, 0..|E|-1.
        Node v sends on Out(v) and receives on In(v); the gateway v0 collects all measurements.
    """
    n: int
    edges: Tuple[Edge, ...]
    gateway: int
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'edges', tuple(self.edges))
        if self.n < 1:
            msg = 'Node count must be positive, got %r' % self.n
            logger.error ( msg )
            raise ConfigException(msg)
        if not 1 <= self.gateway <= self.n:
            msg = 'Gateway %r is not a node of a %d nodes graph' % (self.gateway, self.n)
            logger.error ( msg )
            raise ConfigException(msg)
        for index, edge in enumerate(self.edges):
            if edge.id != index:
                msg = 'Edge at position %d has id %d' % (index, edge.id)
                logger.error ( msg )
                raise ConfigException(msg)
            if not (1 <= edge.tail <= self.n and 1 <= edge.head <= self.n):
                msg = 'Edge %d joins unknown nodes %d -> %d' % (edge.id, edge.tail, edge.head)
                logger.error ( msg )
                raise ConfigException(msg)
            if edge.tail == edge.head:
                msg = 'Edge %d is a self-loop on node %d' % (edge.id, edge.tail)
                logger.error ( msg )
                raise ConfigException(msg)
        if not self.incoming[self.gateway]:
            msg = 'Gateway %d has no incoming edge' % self.gateway
            logger.error ( msg )
            raise ConfigException(msg)

    @property
    def edge_count(self):
        return len(self.edges)

    @cached_property
    def tails(self):
        """ tail(e) for every edge, as an integer vector """
        return np.array([ e.tail for e in self.edges ], dtype=int)

    @cached_property
    def heads(self):
        return np.array([ e.head for e in self.edges ], dtype=int)

    @cached_property
    def capacities(self):
        return np.array([ e.capacity for e in self.edges ], dtype=float)

    @cached_property
    def incoming(self):
        sets = dict( (v, []) for v in range(1, self.n+1) )
        for e in self.edges: sets[e.head].append(e.id)
        return dict( (v, tuple(ids)) for v, ids in sets.items() )

    @cached_property
    def outgoing(self):
        sets = dict( (v, []) for v in range(1, self.n+1) )
        for e in self.edges: sets[e.tail].append(e.id)
        return dict( (v, tuple(ids)) for v, ids in sets.items() )

    @cached_property
    def incidence(self):
        """ |E| x n matrix with a one at (e, tail(e)), the sparsity pattern of A(2) """
        matrix = np.zeros((self.edge_count, self.n))
        matrix[np.arange(self.edge_count), self.tails-1] = 1.0
        return matrix

    def __str__(self):
        return 'graph n=%d |E|=%d gateway=%d |In(gateway)|=%d' % (
            self.n, self.edge_count, self.gateway, len(self.incoming[self.gateway])
        )

@dataclass(frozen=True)
class DeploymentConfig:
    """
        Random deployment parameters. Capacities are either the constant capacity,
        or drawn by capacity_sampler(rng, edge_count) when one is given.
    """
    n: int
    edge_count: int
    capacity: float = 1.0
    seed: Optional[int] = None
    capacity_sampler: Optional[Callable] = None

    def validate(self):
        if self.n < 2:
            msg = 'A deployment needs at least 2 nodes, got %r' % self.n
            logger.error ( msg )
            raise ConfigException(msg)
        if self.edge_count < self.n - 1:
            msg = '%d edges cannot connect %d nodes to a gateway' % (self.edge_count, self.n)
            logger.error ( msg )
            raise ConfigException(msg)
        if self.capacity_sampler is None and not self.capacity > 0:
            msg = 'Capacity must be positive, got %r' % self.capacity
            logger.error ( msg )
            raise ConfigException(msg)

def _checkNode(g, v):
    if not (isinstance(v, (int, np.integer)) and 1 <= v <= g.n):
        msg = 'Invalid node id %r for a %d nodes graph' % (v, g.n)
        logger.error ( msg )
        raise ConfigException(msg)

def incoming_edges(g, v):
    """ In(v): ids of edges whose head is v, ascending """
    _checkNode(g, v)
    return list(g.incoming[v])

def outgoing_edges(g, v):
    """ Out(v): ids of edges whose tail is v, ascending """
    _checkNode(g, v)
    return list(g.outgoing[v])

def _reaches(n, tails, heads, gateway):
    graph = nx.MultiDiGraph()
    graph.add_nodes_from(range(1, n+1))
    graph.add_edges_from(zip(tails.tolist(), heads.tolist()))
    return len(nx.ancestors(graph, gateway)) == n - 1

def reaches_gateway(g):
    """ True when every node has a directed path to the gateway """
    return _reaches(g.n, g.tails, g.heads, g.gateway)

def generate_deployment(cfg):
    """
        Uniform random deployment: every edge joins an ordered pair of distinct nodes drawn
        uniformly, the gateway is drawn uniformly, and the whole draw is rejected until every
        node reaches the gateway. Parallel edges are kept.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    for attempt in range(1, MAX_ATTEMPTS+1):
        tails = rng.integers(1, cfg.n+1, size=cfg.edge_count)
        # Shift in 1..n-1 around the ring skips self-loops and keeps heads uniform
        heads = (tails - 1 + rng.integers(1, cfg.n, size=cfg.edge_count)) % cfg.n + 1
        gateway = int(rng.integers(1, cfg.n+1))
        if _reaches(cfg.n, tails, heads, gateway):
            break
    else:
        msg = 'No deployment with n=%d, |E|=%d reaches its gateway after %d attempts' % (cfg.n, cfg.edge_count, MAX_ATTEMPTS)
        logger.error ( msg )
        raise DeploymentException(msg)

    if cfg.capacity_sampler is not None:
        capacities = np.asarray(cfg.capacity_sampler(rng, cfg.edge_count), dtype=float)
    else:
        capacities = np.full(cfg.edge_count, float(cfg.capacity))
    edges = [ Edge(i, int(t), int(h), float(c)) for i, (t, h, c) in enumerate(zip(tails, heads, capacities)) ]
    g = NetworkGraph(cfg.n, edges, gateway, cfg.seed)
    logger.debug ( 'Deployment accepted after %d attempt(s): %s', attempt, g );
    return g

def graph_lines(g):
    return GraphGrammar().build(g.n, g.gateway, g.seed, [ (e.id, e.tail, e.head, e.capacity) for e in g.edges ])

def save_graph(g, path):
    with open(path, 'w') as f:
        f.write('\n'.join(graph_lines(g)) + '\n')
    logger.debug ( 'Deployment saved to %s', path );

def load_graph(path):
    with open(path, 'r') as f:
        (n, count, gateway, seed), edges = GraphGrammar().parse(f)
    return NetworkGraph(n, [ Edge(*fields) for fields in edges ], gateway, seed)
