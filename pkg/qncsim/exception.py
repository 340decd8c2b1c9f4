#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
__all__ = [
    "QncException", "ConfigException", "DeploymentException", "DimensionException",
    "NumericalException", "ConvergenceException", "SpectrumException", "InfeasibleProblem"
]

class QncException(Exception):
    pass

class ConfigException(QncException):
    """ Invalid parameters or configuration, command line exit code 1 """
    exit_code = 1

class DeploymentException(ConfigException):
    pass

class DimensionException(ConfigException):
    pass

class NumericalException(QncException):
    """ Numerical failure, command line exit code 2 """
    exit_code = 2

class ConvergenceException(NumericalException):
    pass

class SpectrumException(NumericalException):
    pass

class InfeasibleProblem(NumericalException):
    pass
