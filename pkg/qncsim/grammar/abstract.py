#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
from qncsim.exception import QncException

class AbstractGrammar:
    """ A text format: parse() reads an iterable of lines, build() returns the lines to write """

    def parse(self, lines):
        raise QncException('Method not implemented at %s' % self.__class__.__name__)

    def build(self, *args, **kwargs):
        raise QncException('Method not implemented at %s' % self.__class__.__name__)

    @staticmethod
    def significant(lines):
        """ Yields (line number, stripped line), comments and empty lines skipped """
        for lineNo, line in enumerate(lines, 1):
            line = line.strip(" \t\n\r")
            if line.startswith('#') or len(line)==0:
                continue
            yield lineNo, line

    @staticmethod
    def formatFloat(value):
        # 17 significant digits round-trip any double
        return '%.17g' % value
