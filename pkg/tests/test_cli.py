#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
from qncsim.engine import load_system
from qncsim.harness import EndToEndRecord, SweepRecord, read_records
from qncsim.network import load_graph
import importlib.util
import logging
import os
import pytest

import qncsim.logger

SCRIPT = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'scripts', 'qncsim.py')

@pytest.fixture(scope='module')
def cli():
    spec = importlib.util.spec_from_file_location('qncsim_cli', SCRIPT)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module

@pytest.fixture(autouse=True)
def quiet(monkeypatch):
    # keep the package log configuration away from pytest's captured streams
    monkeypatch.setattr(qncsim.logger, 'configure', lambda dest='console', verbose=False: None)
    monkeypatch.setattr(logging, 'shutdown', lambda: None)

def test_deploy_simulate(tmp_path, cli):
    graph, system = str(tmp_path / 'graph.txt'), str(tmp_path / 'system.txt')
    assert cli.main([ 'deploy', '-n', '8', '-E', '20', '--seed', '3', '-o', graph ]) == 0
    g = load_graph(graph)
    assert (g.n, g.edge_count) == (8, 20)
    assert cli.main([ 'simulate', '-g', graph, '-T', '4', '-o', system ]) == 0
    assert load_system(system).m == 3 * len(g.incoming[g.gateway])

def test_deploy_to_stdout(cli, capsys):
    assert cli.main([ 'deploy', '-n', '4', '-E', '6' ]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith('#') and len(lines) == 2 + 6

def test_tail(tmp_path, cli, capsys):
    output = str(tmp_path / 'tail.csv')
    assert cli.main([ 'tail', '-n', '6', '-E', '12', '-T', '3', '4', '--delta', '0.41421', '--random-starts', '4', '-o', output ]) == 0
    records = read_records(output, SweepRecord)
    assert [ r.T for r in records ] == [ 3, 4 ]
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].endswith('log10_ratio=%.3f' % records[0].tail_log_ratio)

def test_rip_bound(cli, capsys):
    assert cli.main([ 'rip-bound', '-n', '100', '-k', '2', '--p-tail', '1e-12', '--delta', '0.41421' ]) == 0
    assert capsys.readouterr().out.startswith('k=2 p_rip=0.99994')

def test_recover(tmp_path, cli):
    output = str(tmp_path / 'recover.csv')
    assert cli.main([ 'recover', '-n', '8', '-E', '24', '-k', '0', '-T', '6', '-o', output ]) == 0
    assert read_records(output, EndToEndRecord)[0].error == 0.0

def test_exit_codes(tmp_path, cli):
    assert cli.main([ 'sweep', str(tmp_path / 'missing.conf') ]) == 1
    assert cli.main([ 'rip-bound', '-n', '10', '-k', '2' ]) == 1
    assert cli.main([ 'deploy', '-n', '10', '-E', '3' ]) == 1

@pytest.mark.parametrize('argv', [
    [ 'deploy', '-n', 'ten' ],
    [ 'deploy', '-n', '0', '-E', '3' ],
    [ 'frobnicate' ],
    [ 'rip-bound', '-k', '2' ],
    [ 'tail', '--delta' ],
])
def test_usage_errors_are_configuration_errors(cli, argv, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 1
    assert 'error:' in capsys.readouterr().err
