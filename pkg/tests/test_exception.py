#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
from qncsim.engine import QuantizerSpec, draw_coefficients
from qncsim.exception import ConfigException, DimensionException, SpectrumException
from qncsim.network import Edge, NetworkGraph
from qncsim.recovery import RecoveryProblem, SparsifyingBasis
from qncsim.rip import TailQuery, TailSpectrum
import logging
import numpy as np
import pytest

def test_exit_codes():
    assert ConfigException.exit_code == 1 and DimensionException.exit_code == 1
    assert SpectrumException.exit_code == 2

@pytest.mark.parametrize('build, expected, source', [
    (lambda g: NetworkGraph(2, [ Edge(0, 1, 2, 1.0) ], 3), ConfigException, 'qncsim.network'),
    (lambda g: NetworkGraph(2, [ Edge(0, 1, 1, 1.0) ], 2), ConfigException, 'qncsim.network'),
    (lambda g: NetworkGraph(2, [ Edge(0, 2, 1, 1.0) ], 2), ConfigException, 'qncsim.network'),
    (lambda g: TailSpectrum([ 1.0, -0.5 ]), SpectrumException, 'qncsim.rip'),
    (lambda g: TailSpectrum([[ 1.0 ]]), DimensionException, 'qncsim.rip'),
    (lambda g: TailQuery(0.0), ConfigException, 'qncsim.rip'),
    (lambda g: SparsifyingBasis(np.ones((2, 2))), ConfigException, 'qncsim.recovery'),
    (lambda g: RecoveryProblem(np.zeros(2), np.zeros((3, 2))), DimensionException, 'qncsim.recovery'),
    (lambda g: RecoveryProblem(np.zeros(3), np.zeros((3, 2)), -1.0), ConfigException, 'qncsim.recovery'),
    (lambda g: draw_coefficients(g, 4, 1, beta_mode='frozen'), ConfigException, 'qncsim.engine'),
    (lambda g: draw_coefficients(g, 4, 1, gateway_mode='random'), ConfigException, 'qncsim.engine'),
    (lambda g: QuantizerSpec('nonuniform'), ConfigException, 'qncsim.engine'),
])
def test_errors_are_logged_before_raising(deployment, caplog, build, expected, source):
    with caplog.at_level(logging.ERROR, logger='qncsim'):
        with pytest.raises(expected) as exc:
            build(deployment)
    logged = [ r for r in caplog.records if r.name == source and r.levelno == logging.ERROR ]
    assert logged and logged[-1].getMessage() == str(exc.value)
