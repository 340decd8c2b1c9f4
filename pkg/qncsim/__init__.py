#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
__version__ = '0.3.0'

import hashlib

def dummySetproctitle(title):
    """ Inactive version of setproctitle when the package is not installed """
    pass

try:
    from setproctitle import setproctitle as setProcTitle
except ImportError:
    from qncsim import dummySetproctitle as setProcTitle

def md5text(text):
    return hashlib.md5(text.encode('utf-8')).hexdigest()

def deriveSeed(master, key):
    """
      Seed for one unit of work, derived from the master seed and the unit key.
      Results never depend on which process or in which order the unit runs.
    """
    digest = hashlib.sha256(('%d|%s' % (int(master), key)).encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'big')
