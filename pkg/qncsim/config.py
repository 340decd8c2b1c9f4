#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
"""
    Sweep configuration files, for instance:

        [sweep]
        nodes        = 20
        edges        = 60, 120
        deltas       = 0.2, 0.41421
        measurements = 12, 24, 48
        deployments  = 16
        seed         = 2024

        [search]
        random_starts = 64

        [matched]
        targets = 1e-1, 1e-2, 1e-3

        [output]
        path    = desk.csv
        workers = 4
"""
from dataclasses import asdict, dataclass, field, replace
from qncsim import confdir, md5text
from qncsim.exception import ConfigException
from qncsim.rip import SearchBudget
from typing import Optional, Tuple
import configparser
import logging

__all__ = ["SweepConfig", "load_sweep_config", "config_digest"]
logger = logging.getLogger('qncsim.config')

@dataclass(frozen=True)
class SweepConfig:
    """
        Grid of a sweep: every edge count, deployment, RIP constant and measurement count.
        Measurement counts are rounded up to whole network uses: m = (T-1)|In(v0)|.
    """
    n: int
    edges: Tuple[int, ...]
    deltas: Tuple[float, ...]
    measurements: Tuple[int, ...]
    deployments: int = 64
    seed: int = 0
    capacity: float = 1.0
    budget: SearchBudget = field(default_factory=SearchBudget)
    targets: Tuple[float, ...] = (1e-1, 1e-2, 1e-3)
    max_measurements: int = 1024
    tolerance: float = 1e-8
    output: Optional[str] = None
    workers: int = 1
    timing: bool = False

    def __post_init__(self):
        for name in ('edges', 'deltas', 'measurements', 'targets'):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def validate(self):
        problems = []
        if self.n < 2:
            problems.append('nodes must be at least 2')
        for name in ('edges', 'deltas', 'measurements', 'targets'):
            if not getattr(self, name):
                problems.append('%s must not be empty' % name)
        if any(e < self.n - 1 for e in self.edges):
            problems.append('every edge count must be at least nodes-1')
        if any(not 0 < d < 1 for d in self.deltas):
            problems.append('deltas must lie in (0,1)')
        if any(m < 1 for m in self.measurements):
            problems.append('measurements must be positive')
        if any(not 0 < p <= 1 for p in self.targets):
            problems.append('targets must lie in (0,1]')
        if self.measurements and self.max_measurements < max(self.measurements):
            problems.append('max_measurements is below the largest measurement count')
        if self.deployments < 1 or self.workers < 1 or not self.capacity > 0 or not self.tolerance > 0:
            problems.append('deployments, workers, capacity and tolerance must be positive')
        if problems:
            msg = 'Invalid sweep configuration: %s' % '; '.join(problems)
            logger.error ( msg )
            raise ConfigException(msg)
        return self

def _ints(text):
    return [ int(v) for v in text.replace(',', ' ').split() ]

def _floats(text):
    return [ float(v) for v in text.replace(',', ' ').split() ]

def _bool(text):
    value = text.strip().lower()
    if value in ('1', 'yes', 'true', 'on'):  return True
    if value in ('0', 'no', 'false', 'off'): return False
    raise ValueError('not a boolean: %r' % text)

# section -> key -> (field, converter)
SECTIONS = {
    'sweep': {
        'nodes':         ('n',                int),
        'edges':         ('edges',            _ints),
        'deltas':        ('deltas',           _floats),
        'measurements':  ('measurements',     _ints),
        'deployments':   ('deployments',      int),
        'seed':          ('seed',             int),
        'capacity':      ('capacity',         float),
    },
    'search': {
        'random_starts': ('random_starts',    int),
        'refine':        ('refine',           int),
        'max_sweeps':    ('max_sweeps',       int),
        'initial_step':  ('initial_step',     float),
        'min_step':      ('min_step',         float),
    },
    'matched': {
        'targets':       ('targets',          _floats),
        'max_measurements': ('max_measurements', int),
    },
    'output': {
        'path':          ('output',           str),
        'workers':       ('workers',          int),
        'timing':        ('timing',           _bool),
    },
    'quadrature': {
        'tolerance':     ('tolerance',        float),
    },
}
MANDATORY = ( ('sweep', 'nodes'), ('sweep', 'edges'), ('sweep', 'deltas'), ('sweep', 'measurements') )

def load_sweep_config(path, overrides=None):
    """ Reads a sweep configuration; overrides maps SweepConfig fields to values set on top of the file """
    path = confdir.findConf(path) or path
    parser = configparser.ConfigParser(inline_comment_prefixes=('#', ';'))
    try:
        with open(path, 'r') as f:
            parser.read_file(f)
    except (OSError, configparser.Error) as exc:
        msg = 'Cannot read sweep configuration %s: %s' % (path, exc)
        logger.error ( msg )
        raise ConfigException(msg)

    values, search = {}, {}
    for section in parser.sections():
        if section not in SECTIONS:
            msg = '%s: unknown section [%s]' % (path, section)
            logger.error ( msg )
            raise ConfigException(msg)
        for key, text in parser.items(section):
            if key not in SECTIONS[section]:
                msg = '%s: unknown key "%s" in section [%s]' % (path, key, section)
                logger.error ( msg )
                raise ConfigException(msg)
            name, convert = SECTIONS[section][key]
            try:
                value = convert(text)
            except ValueError as exc:
                msg = '%s: invalid value for %s.%s: %s' % (path, section, key, exc)
                logger.error ( msg )
                raise ConfigException(msg)
            (search if section == 'search' else values)[name] = value
    for section, key in MANDATORY:
        if not parser.has_option(section, key):
            msg = '%s: missing mandatory key %s.%s' % (path, section, key)
            logger.error ( msg )
            raise ConfigException(msg)

    cfg = SweepConfig(budget=SearchBudget(**search), **values)
    if overrides:
        cfg = replace(cfg, **dict( (k, v) for k, v in overrides.items() if v is not None ))
    cfg.validate()
    logger.debug ( 'Sweep configuration %s: %r', path, cfg );
    return cfg

def config_digest(cfg):
    """
        Digest of everything that changes the stored lines of a sweep. Output location
        and worker count are left out.
    """
    fields = asdict(cfg)
    for key in ('output', 'workers'):
        fields.pop(key, None)
    return md5text(repr(sorted(fields.items())))
