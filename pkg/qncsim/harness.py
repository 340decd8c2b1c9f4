#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
"""
    Sweeps comparing the worst-case tail probability of network coded measurements with
    the Gaussian ensemble of the same size, RIP bound tables and end-to-end recovery runs.

    Every unit of work draws its randomness from deriveSeed(master seed, unit key), so
    results never depend on the worker count or on completion order.
"""
from dataclasses import asdict, dataclass, fields, replace
from qncsim import deriveSeed
from qncsim.config import config_digest
from qncsim.engine import QuantizerSpec, build_omega, calibrate_alpha_variance, draw_coefficients, omega_prefix, run_qnc
from qncsim.grammar.delimited import DelimitedGrammar
from qncsim.network import DeploymentConfig, generate_deployment
from qncsim.recovery import RecoveryProblem, generate_sparse_message, l1_min_decode_with_info, random_orthonormal_basis, recovery_report
from qncsim.rip import TailQuery, rip_lower_bound, tail_probability_gaussian, worst_case_tail
from qncsim.store import RecordStore
from qncsim.worker import run_tasks
from typing import Optional
import logging
import math
import numpy as np
import os
import time

__all__ = [
    "SweepRecord", "SummaryRecord", "MatchedRecord", "RipReportRow", "EndToEndRecord",
    "run_sweep", "matched_measurements", "summarize", "tail_curve", "rip_report", "run_end_to_end",
    "write_records", "read_records", "measurement_time"
]
logger = logging.getLogger('qncsim.harness')

@dataclass(frozen=True)
class SweepRecord:
    edges: int
    deployment: int
    delta: float
    epsilon: float
    target_m: int
    T: int
    m: int
    gateway_in: int
    sigma_alpha_sq: float
    p_tail_qnc: float
    p_tail_gauss: float
    wall_time: Optional[float] = None

    @property
    def tail_log_ratio(self):
        """ log10 of the network coding tail over the Gaussian tail at the same m """
        return math.log10(self.p_tail_qnc / self.p_tail_gauss) if self.p_tail_qnc > 0 and self.p_tail_gauss > 0 else math.nan

@dataclass(frozen=True)
class SummaryRecord:
    edges: int
    delta: float
    target_m: int
    deployments: int
    m_mean: float
    p_tail_qnc_geomean: float
    p_tail_qnc_mean: float
    p_tail_gauss_geomean: float
    p_tail_gauss_mean: float

@dataclass(frozen=True)
class MatchedRecord:
    """
        Smallest measurement count reaching p_tail <= target: geometric mean over
        deployments for network coding, exact count for the Gaussian ensemble.
    """
    edges: int
    delta: float
    target: float
    deployments: int
    reached: int
    m_qnc: float
    m_gauss: float
    log_ratio: float
    status: str

@dataclass(frozen=True)
class RipReportRow:
    edges: int
    deployment: int
    delta: float
    m: int
    k: int
    order: int
    p_tail: float
    p_rip: float
    vacuous: bool

@dataclass(frozen=True)
class EndToEndRecord:
    n: int
    edges: int
    k: int
    T: int
    m: int
    bits: int
    noise_radius: float
    saturations: int
    residual: float
    iterations: int
    error: float
    message_error: float
    precision: float
    recall: float
    sdr_db: float

def _converter(kind):
    if kind is bool:
        return lambda text: text == 'true'
    if kind in (int, float, str):
        return kind
    return float

def write_records(path, records, fields_=None):
    """ Writes dataclass records as a header-bearing CSV file """
    records = list(records)
    rows = [ asdict(r) for r in records ]
    if fields_ is None:
        fields_ = [ f.name for f in fields(records[0]) ] if records else []
        # Optional columns are only written when set
        fields_ = [ name for name in fields_ if any(row[name] is not None for row in rows) ]
    with open(path, 'w') as f:
        f.write('\n'.join(DelimitedGrammar().build(fields_, rows)) + '\n')
    logger.debug ( '%d record(s) written to %s', len(records), path );

def read_records(path, cls):
    types = dict( (f.name, _converter(f.type)) for f in fields(cls) )
    with open(path, 'r') as f:
        return [ cls(**row) for row in DelimitedGrammar().parse(f, types) ]

def measurement_time(m, gateway_in):
    """ Final time T giving at least m measurements: (T-1)|In(v0)| >= m """
    return max(2, -(-m // gateway_in) + 1)

def _geomean(values):
    values = np.asarray(values, dtype=float)
    if np.any(values == 0):
        return 0.0
    return float(np.exp(np.mean(np.log(values))))

def _pointKey(edges, d, delta, target_m):
    return 'point|%d|%d|%r|%d' % (edges, d, delta, target_m)

def _matchedKey(edges, d, delta, target):
    return 'matched|%d|%d|%r|%r' % (edges, d, delta, target)

def _recordFields(cfg):
    names = [ f.name for f in fields(SweepRecord) ]
    return names if cfg.timing else names[:-1]

def _deploy(cfg, edges, d):
    g = generate_deployment(DeploymentConfig(cfg.n, edges, cfg.capacity, seed=deriveSeed(cfg.seed, 'deployment|%d|%d' % (edges, d))))
    return g, deriveSeed(cfg.seed, 'coefficients|%d|%d' % (edges, d))

def evaluate_deployment(cfg, edges, d):
    """
        All grid points and matched-target searches of one deployment.
        Returns (store key, line) pairs: record CSV lines, and matched counts ('unreached' when the
        largest measurement count does not reach the target).
    """
    g, coefficient_seed = _deploy(cfg, edges, d)
    gateway_in = len(g.incoming[g.gateway])
    times = [ measurement_time(m, gateway_in) for m in cfg.measurements ]
    last = max(max(times), cfg.max_measurements // gateway_in + 1)
    sched = draw_coefficients(g, last, coefficient_seed)
    omega_max = build_omega(sched, g, last)
    grammar = DelimitedGrammar()
    names = _recordFields(cfg)
    logger.info ( '|E|=%d deployment %d: %s', edges, d, g );

    cache = {}
    def tail(delta, T):
        if (delta, T) not in cache:
            omega = omega_prefix(omega_max, gateway_in, T)
            sigma_alpha_sq = calibrate_alpha_variance(omega, g.n)
            budget = replace(cfg.budget, seed=deriveSeed(cfg.seed, 'search|%d|%d|%r|%d' % (edges, d, delta, T)))
            p, x = worst_case_tail(omega, g, sigma_alpha_sq, TailQuery(delta / math.sqrt(2), cfg.tolerance), budget)
            cache[(delta, T)] = (p, sigma_alpha_sq)
        return cache[(delta, T)]

    lines = []
    for delta in cfg.deltas:
        epsilon = delta / math.sqrt(2)
        for target_m, T in zip(cfg.measurements, times):
            start = time.perf_counter()
            p_qnc, sigma_alpha_sq = tail(delta, T)
            m = (T - 1) * gateway_in
            p_gauss = tail_probability_gaussian(m, TailQuery(epsilon, cfg.tolerance))
            record = SweepRecord(edges, d, delta, epsilon, target_m, T, m, gateway_in, sigma_alpha_sq, p_qnc, p_gauss,
                                 time.perf_counter() - start if cfg.timing else None)
            lines.append( (_pointKey(edges, d, delta, target_m), grammar.build(names, [ asdict(record) ])[1]) )
        for target in cfg.targets:
            if tail(delta, last)[0] > target:
                found = 'unreached'
            else:
                low, high = 1, last
                while high - low > 1:
                    middle = (low + high) // 2
                    if tail(delta, middle)[0] <= target:
                        high = middle
                    else:
                        low = middle
                found = '%d' % ((high - 1) * gateway_in)
            lines.append( (_matchedKey(edges, d, delta, target), found) )
    return lines

def _gaussianMatched(target, epsilon, limit, tolerance):
    """ Smallest m <= limit with Gaussian tail <= target, None when unreached """
    query = TailQuery(epsilon, tolerance)
    if tail_probability_gaussian(limit, query) > target:
        return None
    low, high = 0, limit
    while high - low > 1:
        middle = (low + high) // 2
        if tail_probability_gaussian(middle, query) <= target:
            high = middle
        else:
            low = middle
    return high

def _runGrid(cfg):
    """ Store lines of every grid point, computed or resumed """
    cfg.validate()
    tasks = [ (cfg, edges, d) for edges in cfg.edges for d in range(cfg.deployments) ]
    expected = dict( (task, [ _pointKey(task[1], task[2], delta, m) for delta in cfg.deltas for m in cfg.measurements ]
                            + [ _matchedKey(task[1], task[2], delta, t) for delta in cfg.deltas for t in cfg.targets ])
                     for task in tasks )
    store = RecordStore(cfg.output, config_digest(cfg)).open() if cfg.output else None
    lines = {}
    failures = []
    try:
        if store is not None:
            for key in store.keys():
                lines[key] = store.get(key)
        missing = [ task for task in tasks if any(key not in lines for key in expected[task]) ]
        if len(missing) < len(tasks):
            logger.info ( '%d of %d deployment(s) resumed from %s', len(tasks) - len(missing), len(tasks), store.path );

        def handle(task, outcome):
            if isinstance(outcome, Exception):
                logger.error ( '|E|=%d deployment %d failed: %s', task[1], task[2], outcome );
                failures.append(outcome)
                return
            for key, line in outcome:
                lines[key] = line
                if store is not None:
                    store.put(key, line)

        run_tasks(evaluate_deployment, missing, cfg.workers, handle)
    finally:
        if store is not None:
            store.close()
    if failures:
        raise failures[0]
    return dict( (key, lines[key]) for task in tasks for key in expected[task] )

def _records(cfg, lines):
    grammar = DelimitedGrammar()
    names = _recordFields(cfg)
    types = dict( (f.name, _converter(f.type)) for f in fields(SweepRecord) )
    records = []
    for edges in cfg.edges:
        for d in range(cfg.deployments):
            for delta in cfg.deltas:
                for m in cfg.measurements:
                    row = grammar.parse([ ','.join(names), lines[_pointKey(edges, d, delta, m)] ], types)[0]
                    records.append(SweepRecord(**row))
    return records

def summarize(cfg, records):
    """ Per (|E|, delta, m) means over deployments """
    summary = []
    for edges in cfg.edges:
        for delta in cfg.deltas:
            for target_m in cfg.measurements:
                group = [ r for r in records if r.edges == edges and r.delta == delta and r.target_m == target_m ]
                qnc = [ r.p_tail_qnc for r in group ]
                gauss = [ r.p_tail_gauss for r in group ]
                summary.append(SummaryRecord(edges, delta, target_m, len(group), float(np.mean([ r.m for r in group ])),
                                             _geomean(qnc), float(np.mean(qnc)), _geomean(gauss), float(np.mean(gauss))))
    return summary

def matched_measurements(cfg, lines=None):
    """ Matched-tail comparison of network coding and Gaussian measurement counts """
    lines = _runGrid(cfg) if lines is None else lines
    matched = []
    for edges in cfg.edges:
        for delta in cfg.deltas:
            epsilon = delta / math.sqrt(2)
            for target in cfg.targets:
                found = [ lines[_matchedKey(edges, d, delta, target)] for d in range(cfg.deployments) ]
                counts = [ int(v) for v in found if v != 'unreached' ]
                m_gauss = _gaussianMatched(target, epsilon, cfg.max_measurements, cfg.tolerance)
                m_qnc = _geomean(counts) if len(counts) == len(found) else math.nan
                if len(counts) < len(found):
                    status = 'unreached'
                elif m_gauss is None:
                    status = 'gaussian-unreached'
                else:
                    status = 'ok'
                ratio = math.log10(m_qnc / m_gauss) if status == 'ok' else math.nan
                matched.append(MatchedRecord(edges, delta, target, len(found), len(counts), m_qnc,
                                             math.nan if m_gauss is None else float(m_gauss), ratio, status))
                if status != 'ok':
                    logger.warning ( '|E|=%d delta=%g target %g: %s (%d of %d deployment(s) reached it)',
                                     edges, delta, target, status, len(counts), len(found) );
    return matched

def _siblings(output):
    base, ext = os.path.splitext(output)
    return base + '-summary' + (ext or '.csv'), base + '-matched' + (ext or '.csv')

def run_sweep(cfg):
    """
        Worst-case tail of every (|E|, deployment, delta, m) point with its Gaussian baseline.
        With an output path, writes the records, their summary and the matched comparison.
    """
    logger.info ( 'Sweep: n=%d, |E| in %s, delta in %s, m in %s, %d deployment(s)',
                  cfg.n, list(cfg.edges), list(cfg.deltas), list(cfg.measurements), cfg.deployments );
    lines = _runGrid(cfg)
    records = _records(cfg, lines)
    if cfg.output:
        summary_path, matched_path = _siblings(cfg.output)
        write_records(cfg.output, records, _recordFields(cfg))
        write_records(summary_path, summarize(cfg, records))
        write_records(matched_path, matched_measurements(cfg, lines))
        logger.info ( 'Sweep written to %s, %s and %s', cfg.output, summary_path, matched_path );
    return records

def tail_curve(g, sched, deltas, times, budget, deployment=0, tolerance=1e-8):
    """ Worst-case and Gaussian tails of one deployment over deltas x final times """
    gateway_in = len(g.incoming[g.gateway])
    omega_max = build_omega(sched, g, max(times))
    records = []
    for delta in deltas:
        query = TailQuery(delta / math.sqrt(2), tolerance)
        for T in times:
            omega = omega_prefix(omega_max, gateway_in, T)
            sigma_alpha_sq = calibrate_alpha_variance(omega, g.n)
            p_qnc, x = worst_case_tail(omega, g, sigma_alpha_sq, query, budget)
            records.append(SweepRecord(g.edge_count, deployment, delta, query.epsilon, omega.shape[0], T, omega.shape[0],
                                       gateway_in, sigma_alpha_sq, p_qnc, tail_probability_gaussian(omega.shape[0], query)))
    return records

def rip_report(records, n, ks, order=1):
    """
        RIP probability lower bound of every record for every sparsity k. order=2 reads the
        bound at order 2k, the one k-sparse recovery guarantees rest on.
    """
    rows = []
    for r in records:
        for k in ks:
            if order * k > n:
                continue
            p_rip = rip_lower_bound(r.p_tail_qnc, n, order * k, r.delta)
            rows.append(RipReportRow(r.edges, r.deployment, r.delta, r.m, k, order, r.p_tail_qnc, p_rip, p_rip == 0.0))
    vacuous = sum(1 for row in rows if row.vacuous)
    if vacuous:
        logger.warning ( '%d of %d RIP bound(s) are vacuous', vacuous, len(rows) );
    return rows

def run_end_to_end(n, edges, k, T, bits, seed, law='rademacher', basis='identity', tol=1e-8):
    """
        Deployment, coefficients, k-sparse message, network run, then l1-min decoding with the
        measured effective noise norm as radius. bits=0 disables quantization.
    """
    g = generate_deployment(DeploymentConfig(n, edges, float(bits or 1), seed=deriveSeed(seed, 'deployment')))
    sched = draw_coefficients(g, T, deriveSeed(seed, 'coefficients'))
    signal = generate_sparse_message(n, k, law, deriveSeed(seed, 'message'))
    phi = random_orthonormal_basis(n, deriveSeed(seed, 'basis'), kind=basis)
    quant = QuantizerSpec('uniform' if bits else 'disabled')
    z, noise_effect, system = run_qnc(g, sched, quant, phi.phi @ signal.s, T)
    radius = float(np.linalg.norm(noise_effect))
    problem = RecoveryProblem(z, system.psi_tot @ phi.phi, radius, signal.s)
    estimate, info = l1_min_decode_with_info(problem, tol)
    metrics = recovery_report(estimate, signal.s, phi)
    logger.info ( 'Recovery n=%d |E|=%d k=%d m=%d: error %.3g, SDR %.1f dB', n, edges, k, system.m, metrics.error, metrics.sdr_db );
    return EndToEndRecord(n, edges, k, T, system.m, bits, radius, system.saturations, info.residual, info.iterations,
                          **metrics.record())
