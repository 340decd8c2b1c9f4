#!/usr/bin/env python
#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
# Commands:
#
#       deploy:     draws a random deployment and saves it
#       simulate:   runs quantized network coding on a deployment and saves the measurement system
#       tail:       worst-case and Gaussian tail probabilities of one deployment
#       sweep:      batch of deployments described by a configuration file, resumable
#       rip-bound:  RIP probability lower bound, from one tail probability or from sweep records
#       recover:    end-to-end run, from the deployment to l1-min decoding
#
from multiprocessing.process import current_process
from qncsim import __version__, confdir, deriveSeed, setProcTitle
from qncsim.config import load_sweep_config
from qncsim.engine import QuantizerSpec, draw_coefficients, run_qnc, save_system
from qncsim.exception import ConfigException, QncException
from qncsim.harness import SweepRecord, read_records, rip_report, run_end_to_end, run_sweep, tail_curve, write_records
from qncsim.network import DeploymentConfig, generate_deployment, graph_lines, load_graph, save_graph
from qncsim.rip import SearchBudget, rip_lower_bound
import argparse
import logging
import numpy as np
import os
import sys

import qncsim.logger

logger = logging.getLogger('qncsim.main')

class QncArgumentParser(argparse.ArgumentParser):
    """ Usage errors are configuration errors: exit code 1, numerical failures keep 2 """
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))

def positive_int(string):
    value = int(string)
    if value < 1:
        raise argparse.ArgumentTypeError("%s is not a positive integer" % string)
    return value

def file_type_r(string):
    if not os.path.isfile(string):
        raise argparse.ArgumentTypeError("%s is not a readable file" % string)
    return string

def graph_from(options):
    if options.graph:
        return load_graph(options.graph)
    if options.nodes is None or options.edges is None:
        raise ConfigException('Either --graph or both --nodes and --edges are required')
    return generate_deployment(DeploymentConfig(options.nodes, options.edges, options.capacity, seed=deriveSeed(options.seed, 'deployment')))

def cmd_deploy(options):
    g = graph_from(options)
    if options.output:
        save_graph(g, options.output)
    else:
        sys.stdout.write('\n'.join(graph_lines(g)) + '\n')
    logger.info ( 'Deployment: %s', g );

def cmd_simulate(options):
    g = graph_from(options)
    sched = draw_coefficients(g, options.time, deriveSeed(options.seed, 'coefficients'))
    x = np.random.default_rng(deriveSeed(options.seed, 'message')).standard_normal(g.n)
    quant = QuantizerSpec('disabled' if options.no_quantizer else 'uniform', options.block_length)
    z, noise_effect, system = run_qnc(g, sched, quant, x, options.time)
    logger.info ( 'm=%d measurements, effective noise norm %.6g, %d saturation(s)', system.m, np.linalg.norm(noise_effect), system.saturations );
    if options.output:
        save_system(system, options.output)

def cmd_tail(options):
    g = graph_from(options)
    sched = draw_coefficients(g, max(options.time), deriveSeed(options.seed, 'coefficients'))
    budget = SearchBudget(random_starts=options.random_starts, seed=deriveSeed(options.seed, 'search'), workers=options.workers)
    records = tail_curve(g, sched, options.delta, options.time, budget, tolerance=options.quad_tol)
    if options.output:
        write_records(options.output, records)
    for r in records:
        sys.stdout.write('T=%d m=%d delta=%g p_tail_qnc=%.6g p_tail_gauss=%.6g log10_ratio=%.3f\n' % (r.T, r.m, r.delta, r.p_tail_qnc, r.p_tail_gauss, r.tail_log_ratio))

def cmd_sweep(options):
    overrides = dict(output=options.output, workers=options.workers, tolerance=options.quad_tol, seed=options.seed)
    cfg = load_sweep_config(options.config, overrides)
    # Changes the process name shown by ps for instance
    setProcTitle ( "qncsim sweep [version: %s] [config: %s]" % (__version__, options.config) );
    records = run_sweep(cfg)
    logger.info ( 'Sweep done: %d record(s)', len(records) );

def cmd_rip_bound(options):
    if options.records:
        rows = rip_report(read_records(options.records, SweepRecord), options.nodes, options.k, options.order)
        if options.output:
            write_records(options.output, rows)
        for row in rows:
            sys.stdout.write('|E|=%d deployment=%d m=%d k=%d p_rip=%.6g%s\n' % (
                row.edges, row.deployment, row.m, row.k, row.p_rip, ' (vacuous)' if row.vacuous else ''))
        return
    if options.p_tail is None or options.delta is None:
        raise ConfigException('rip-bound needs either --records or both --p-tail and --delta')
    for k in options.k:
        sys.stdout.write('k=%d p_rip=%.12g\n' % (k, rip_lower_bound(options.p_tail, options.nodes, options.order * k, options.delta)))

def cmd_recover(options):
    record = run_end_to_end(options.nodes, options.edges, options.k, options.time, options.bits, options.seed,
                            law=options.law, basis=options.basis)
    if options.output:
        write_records(options.output, [ record ])
    sys.stdout.write('m=%d error=%.6g sdr_db=%.3f precision=%.3f recall=%.3f\n' % (
        record.m, record.error, record.sdr_db, record.precision, record.recall))

def build_parser():
    epilog = "Configuration files are looked up as given, then in:\n"
    for directory in confdir.conf:
        epilog += "  - %s\n" % directory
    epilog += "Exit codes: 0 success, 1 invalid configuration, 2 numerical failure.\n"
    parser = QncArgumentParser(description='Quantized network coding simulator version %s' % __version__,
                                     epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument( '-v', '--version',  action='version', version=('%(prog)s '+__version__) )
    parser.add_argument( '-l', '--log-dest', choices=['console', 'syslog'], default='console', help='Log output, default: %(default)s' )
    parser.add_argument( '-d', '--debug',    action='store_true', help='Debug level logs' )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument( '--seed',     type=int, default=0, help='Master seed, default: %(default)s' )
    common.add_argument( '-o', '--output', metavar='<file>', help='Output file' )
    common.add_argument( '--quad-tol', type=float, default=1e-8, help='Tail quadrature absolute tolerance, default: %(default)s' )
    common.add_argument( '--workers',  type=positive_int, default=1, help='Worker count, default: %(default)s' )

    graph = argparse.ArgumentParser(add_help=False)
    graph.add_argument( '-g', '--graph',  metavar='<file>', type=file_type_r, help='Saved deployment, instead of a random one' )
    graph.add_argument( '-n', '--nodes',  type=positive_int, help='Node count of a random deployment' )
    graph.add_argument( '-E', '--edges',  type=positive_int, help='Edge count of a random deployment' )
    graph.add_argument( '--capacity',     type=float, default=6.0, help='Edge capacity in bits per link use, default: %(default)s' )

    commands = parser.add_subparsers(dest='command', metavar='<command>')
    commands.required = True
    p = commands.add_parser('deploy', parents=[common, graph], help='Draw a random deployment')
    p.set_defaults(run=cmd_deploy)

    p = commands.add_parser('simulate', parents=[common, graph], help='Run network coding and save the measurement system')
    p.add_argument( '-T', '--time', type=int, default=6, help='Final time, default: %(default)s' )
    p.add_argument( '-L', '--block-length', type=float, default=1.0, help='Link uses per network use, edge e quantizes on ceil(L*C_e) bits, default: %(default)s' )
    p.add_argument( '--no-quantizer', action='store_true', help='Disable quantization' )
    p.set_defaults(run=cmd_simulate)

    p = commands.add_parser('tail', parents=[common, graph], help='Tail probabilities of one deployment')
    p.add_argument( '-T', '--time',  type=int, nargs='+', default=[6], help='Final times, default: %(default)s' )
    p.add_argument( '--delta',       type=float, nargs='+', default=[0.41421], help='RIP constants, default: %(default)s' )
    p.add_argument( '--random-starts', type=int, default=512, help='Random search starts, default: %(default)s' )
    p.set_defaults(run=cmd_tail)

    p = commands.add_parser('sweep', parents=[common], help='Run a sweep configuration')
    p.add_argument( 'config', metavar='<config>', help='Sweep configuration file' )
    p.set_defaults(run=cmd_sweep, seed=None, quad_tol=None, workers=None)

    p = commands.add_parser('rip-bound', parents=[common], help='RIP probability lower bounds')
    p.add_argument( '-n', '--nodes',  type=positive_int, required=True, help='Message length n' )
    p.add_argument( '-k',             type=positive_int, nargs='+', default=[1], help='Sparsities, default: %(default)s' )
    p.add_argument( '--order',        type=int, choices=[1, 2], default=1, help='Bound at order k or 2k, default: %(default)s' )
    p.add_argument( '--p-tail',       type=float, help='Tail probability at eps = delta/sqrt(2)' )
    p.add_argument( '--delta',        type=float, help='RIP constant' )
    p.add_argument( '--records',      metavar='<file>', type=file_type_r, help='Sweep records file' )
    p.set_defaults(run=cmd_rip_bound)

    p = commands.add_parser('recover', parents=[common], help='End-to-end recovery run')
    p.add_argument( '-n', '--nodes',  type=positive_int, default=20, help='Node count, default: %(default)s' )
    p.add_argument( '-E', '--edges',  type=positive_int, default=120, help='Edge count, default: %(default)s' )
    p.add_argument( '-k',             type=int, default=2, help='Sparsity, default: %(default)s' )
    p.add_argument( '-T', '--time',   type=int, default=12, help='Final time, default: %(default)s' )
    p.add_argument( '--bits',         type=int, default=6, help='Quantizer bits per edge, 0 disables quantization, default: %(default)s' )
    p.add_argument( '--law',          choices=['rademacher', 'gaussian'], default='rademacher', help='Nonzero law, default: %(default)s' )
    p.add_argument( '--basis',        choices=['identity', 'random'], default='identity', help='Sparsifying basis, default: %(default)s' )
    p.set_defaults(run=cmd_recover)
    return parser

def main(argv=None):
    options = build_parser().parse_args(argv)
    qncsim.logger.configure(options.log_dest, options.debug)
    current_process().name = os.path.split(__file__)[1]
    try:
        options.run(options)
    except QncException as exc:
        logger.error ( '%s failed: %s', options.command, exc );
        logger.debug ( "", exc_info=True );
        return getattr(exc, 'exit_code', 2)
    except KeyboardInterrupt:
        logger.info ( 'Interrupted' );
        return 2
    finally:
        logging.shutdown()
    return 0

if __name__ == "__main__":
    sys.exit(main())
