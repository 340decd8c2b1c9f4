#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
from dataclasses import replace
from qncsim import deriveSeed, harness
from qncsim.config import SweepConfig, load_sweep_config
from qncsim.engine import draw_coefficients
from qncsim.exception import ConfigException
from qncsim.harness import (EndToEndRecord, MatchedRecord, SweepRecord, matched_measurements, measurement_time,
                            read_records, rip_report, run_end_to_end, run_sweep, tail_curve, write_records)
from qncsim.network import DeploymentConfig, generate_deployment
from qncsim.recovery import recovery_report
from qncsim.rip import SearchBudget
import math
import numpy as np
import os
import pytest

DESK = os.path.join(os.path.dirname(__file__), 'conf', 'desk.conf')
BASELINE = os.path.join(os.path.dirname(__file__), 'results', 'end-to-end-n100.csv')

TINY_BUDGET = SearchBudget(random_starts=4, refine=1, max_sweeps=2)

def tiny(**kwargs):
    """ Sweep small enough for unit tests """
    values = dict(n=6, edges=(12,), deltas=(0.41421,), measurements=(2, 4), deployments=3, seed=5,
                  budget=TINY_BUDGET, targets=(1.0,), max_measurements=8)
    values.update(kwargs)
    return SweepConfig(**values)

def read(path):
    with open(path, 'rb') as f:
        return f.read()

def test_measurement_time():
    assert measurement_time(1, 1) == 2
    assert measurement_time(12, 3) == 5
    assert measurement_time(13, 3) == 6
    assert measurement_time(1, 4) == 2

def test_smallest_sweep():
    cfg = SweepConfig(n=2, edges=(1,), deltas=(0.41421,), measurements=(1,), deployments=1,
                      budget=TINY_BUDGET, targets=(1.0,), max_measurements=4)
    records = run_sweep(cfg)
    assert len(records) == 1
    record = records[0]
    assert (record.m, record.T, record.gateway_in) == (1, 2, 1)
    assert 0.0 <= record.p_tail_gauss <= 1.0
    # the gateway message is never measured
    assert record.p_tail_qnc == 1.0
    assert record.wall_time is None
    assert math.isfinite(record.tail_log_ratio)

def test_records_cover_grid():
    cfg = tiny(deltas=(0.2, 0.41421))
    records = run_sweep(cfg)
    assert len(records) == 2 * 2 * 3
    for r in records:
        assert r.m >= r.target_m and r.m == (r.T - 1) * r.gateway_in
        assert r.epsilon == pytest.approx(r.delta / math.sqrt(2))
        assert 0.0 <= r.p_tail_qnc <= 1.0 and 0.0 <= r.p_tail_gauss <= 1.0

def test_sweep_files_deterministic(tmp_path, cache):
    first, second = str(tmp_path / 'first.csv'), str(tmp_path / 'second.csv')
    run_sweep(tiny(output=first))
    run_sweep(tiny(output=second))
    for suffix in ('', '-summary', '-matched'):
        assert read(first.replace('.csv', suffix + '.csv')) == read(second.replace('.csv', suffix + '.csv'))

def test_worker_count_does_not_change_records(cache):
    assert run_sweep(tiny(workers=1)) == run_sweep(tiny(workers=3))

def test_sweep_resumes(tmp_path, cache, monkeypatch):
    output = str(tmp_path / 'sweep.csv')
    records = run_sweep(tiny(output=output))

    def fail(*args):
        raise AssertionError('deployment evaluated again')
    monkeypatch.setattr(harness, 'evaluate_deployment', fail)
    assert run_sweep(tiny(output=output)) == records

def test_changed_configuration_restarts(tmp_path, cache, monkeypatch):
    output = str(tmp_path / 'sweep.csv')
    run_sweep(tiny(output=output))
    calls = []
    evaluate = harness.evaluate_deployment
    def counting(*args):
        calls.append(args[1:])
        return evaluate(*args)
    monkeypatch.setattr(harness, 'evaluate_deployment', counting)
    run_sweep(tiny(output=output, seed=6))
    assert sorted(calls) == [ (12, 0), (12, 1), (12, 2) ]

def test_timing_column(tmp_path, cache):
    output = str(tmp_path / 'timed.csv')
    records = run_sweep(tiny(output=output, timing=True))
    assert all(r.wall_time is not None and r.wall_time >= 0 for r in records)
    assert read_records(output, SweepRecord) == records
    with open(output) as f:
        assert f.readline().strip().endswith(',wall_time')

def test_matched_target_one():
    cfg = tiny()
    matched = matched_measurements(cfg)
    assert len(matched) == 1
    row = matched[0]
    gateway_in = [ len(g.incoming[g.gateway]) for g in (
        generate_deployment(DeploymentConfig(6, 12, 1.0, seed=deriveSeed(5, 'deployment|12|%d' % d))) for d in range(3)) ]
    assert row.status == 'ok' and row.reached == 3
    assert row.m_gauss == 1.0
    assert row.m_qnc == pytest.approx(math.exp(np.mean(np.log(gateway_in))))
    assert row.log_ratio == pytest.approx(math.log10(row.m_qnc))

def test_matched_target_unreached():
    # single-node directions keep the network coded tail high whatever m is
    matched = matched_measurements(tiny(targets=(1e-2,), max_measurements=400))
    assert matched[0].status == 'unreached'
    assert matched[0].reached < matched[0].deployments
    assert math.isnan(matched[0].log_ratio) and math.isnan(matched[0].m_qnc)
    assert matched[0].m_gauss > 1

def test_summary_and_matched_files(tmp_path, cache):
    output = str(tmp_path / 'sweep.csv')
    records = run_sweep(tiny(output=output))
    matched = read_records(str(tmp_path / 'sweep-matched.csv'), MatchedRecord)
    assert matched == matched_measurements(tiny())
    with open(str(tmp_path / 'sweep-summary.csv')) as f:
        lines = f.read().splitlines()
    assert len(lines) == 1 + 2
    assert read_records(output, SweepRecord) == records

def test_invalid_sweep():
    with pytest.raises(ConfigException):
        run_sweep(tiny(deltas=(1.2,)))

def test_tail_curve(deployment):
    sched = draw_coefficients(deployment, 5, seed=3)
    records = tail_curve(deployment, sched, [ 0.41421 ], [ 3, 5 ], TINY_BUDGET)
    gateway_in = len(deployment.incoming[deployment.gateway])
    assert [ r.m for r in records ] == [ 2 * gateway_in, 4 * gateway_in ]
    assert records[1].p_tail_gauss <= records[0].p_tail_gauss

def test_rip_report():
    record = SweepRecord(120, 0, 0.41421, 0.41421 / math.sqrt(2), 40, 5, 40, 10, 0.1, 1e-12, 1e-14)
    rows = rip_report([ record ], 20, list(range(1, 11)))
    values = [ row.p_rip for row in rows ]
    assert [ row.k for row in rows ] == list(range(1, 11))
    assert all(later <= earlier for earlier, later in zip(values, values[1:]))
    assert rows[0].p_rip == pytest.approx(1.0 - 20 * (42 / 0.41421) * 1e-12)
    assert rows[-1].vacuous and not rows[0].vacuous
    doubled = rip_report([ record ], 20, list(range(1, 11)), order=2)
    assert [ row.k for row in doubled ] == list(range(1, 11))
    assert doubled[1].p_rip == rows[3].p_rip
    assert len(rip_report([ record ], 6, list(range(1, 11)), order=2)) == 3
    assert rip_report([ replace(record, p_tail_qnc=0.0) ], 20, [ 3 ])[0].p_rip == 1.0

def test_records_round_trip(tmp_path):
    rows = rip_report([ SweepRecord(60, 1, 0.2, 0.2 / math.sqrt(2), 12, 4, 12, 4, 0.5, 1e-9, 1e-11) ], 10, [ 1, 2 ])
    path = str(tmp_path / 'rip.csv')
    write_records(path, rows)
    assert read_records(path, type(rows[0])) == rows

def test_end_to_end_zero_message():
    record = run_end_to_end(8, 24, 0, 6, 6, seed=1)
    assert isinstance(record, EndToEndRecord)
    zero = recovery_report(np.zeros(8), np.zeros(8)).record()
    assert dict( (key, getattr(record, key)) for key in zero ) == zero
    assert record.error == 0.0 and record.sdr_db == math.inf
    assert record.iterations == 0

def test_end_to_end_noiseless():
    # a gateway that sends lets every message reach it
    for seed in range(10):
        g = generate_deployment(DeploymentConfig(6, 30, 1.0, seed=deriveSeed(seed, 'deployment')))
        if g.outgoing[g.gateway]:
            break
    record = run_end_to_end(6, 30, 2, 12, 0, seed=seed)
    assert record.m >= 6
    assert record.noise_radius <= 1e-10
    assert record.error <= 1e-6

@pytest.mark.slow
def test_end_to_end_quantized_runs():
    for seed in range(20):
        record = run_end_to_end(10, 40, 2, 8, 6, seed=seed, law='gaussian', basis='random')
        assert math.isfinite(record.sdr_db)
        assert record.residual <= record.noise_radius + 1e-8
        assert record.saturations >= 0

@pytest.mark.slow
def test_desk_sweep(tmp_path, cache):
    cfg = load_sweep_config(DESK, dict(output=str(tmp_path / 'desk.csv'), workers=4))
    records = run_sweep(cfg)
    assert len(records) == 2 * 16 * 2 * 4
    # the worst direction keeps the network coded tail far from zero at every m
    assert min(r.p_tail_qnc for r in records) > 0.1
    matched = read_records(str(tmp_path / 'desk-matched.csv'), MatchedRecord)
    rows = dict( ((r.edges, r.delta, r.target), r) for r in matched )
    assert len(rows) == 2 * 2 * 3
    for delta in cfg.deltas:
        for edges in cfg.edges:
            one = rows[(edges, delta, 1.0)]
            assert one.status == 'ok' and one.m_gauss == 1.0
            assert 0.0 < one.log_ratio < 1.0
            for target in (1e-1, 1e-2):
                row = rows[(edges, delta, target)]
                assert row.status == 'unreached' and math.isnan(row.log_ratio)
                assert 1.0 < row.m_gauss <= cfg.max_measurements
        # more edges bring more gateway inputs, so the ratio at target 1.0 grows with |E|
        assert rows[(120, delta, 1.0)].log_ratio > rows[(60, delta, 1.0)].log_ratio

@pytest.mark.slow
def test_end_to_end_large_deployment():
    seed = 2024
    g = generate_deployment(DeploymentConfig(100, 1400, 6.0, seed=deriveSeed(seed, 'deployment')))
    gateway_in = len(g.incoming[g.gateway])
    T = measurement_time(60, gateway_in)
    record = run_end_to_end(100, 1400, 5, T, 6, seed=seed)
    assert 60 <= record.m < 60 + gateway_in
    assert record.bits == 6 and record.k == 5
    assert 0.0 < record.noise_radius and record.residual <= record.noise_radius * (1 + 1e-6) + 1e-8
    assert math.isfinite(record.sdr_db)
    again = run_end_to_end(100, 1400, 5, T, 6, seed=seed)
    assert (again.sdr_db, again.residual, again.iterations) == (record.sdr_db, record.residual, record.iterations)

    # sdr and residual are pinned by the first run on a clean checkout
    if not os.path.exists(BASELINE):
        os.makedirs(os.path.dirname(BASELINE), exist_ok=True)
        write_records(BASELINE, [ record ])
    baseline = read_records(BASELINE, EndToEndRecord)[0]
    assert (baseline.m, baseline.T) == (record.m, record.T)
    assert record.sdr_db == pytest.approx(baseline.sdr_db, rel=1e-6)
    assert record.residual == pytest.approx(baseline.residual, rel=1e-6, abs=1e-12)
