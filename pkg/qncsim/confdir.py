#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
import os
import sys
import tempfile

__all__ = ["conf", "cache", "findConf"]

if sys.platform[:3] == 'win':
    conf = [
        os.path.join(os.environ.get('HOMEPATH', ''), 'qncsim'),
        os.path.join(os.environ.get('APPDATA', ''), 'qncsim'),
        os.path.join(os.path.split(__file__)[0], 'conf')
    ]
else:
    conf = [
        os.path.join(os.path.expanduser('~'), '.qncsim'),
        os.path.join('/', 'etc', 'qncsim'),
        os.path.join(os.path.split(__file__)[0], 'conf')
    ]

# Sweep record stores live here, one dbm file per output path
cache = os.path.join(tempfile.gettempdir(), 'qncsim')

def findConf(name):
    """ Returns the first existing file called name, looked up as given then in each conf directory """
    if os.path.exists(name):
        return os.path.abspath(name)
    for directory in conf:
        candidate = os.path.join(directory, name)
        if os.path.exists(candidate):
            return candidate
    return None
