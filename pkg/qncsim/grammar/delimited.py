#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
from qncsim.exception import ConfigException
from qncsim.grammar import abstract
import logging
import math

logger = logging.getLogger('qncsim.grammar')

class DelimitedGrammar(abstract.AbstractGrammar):
    """ Comma separated records with a header row, floats with 17 significant digits """

    separator = ','

    def formatValue(self, value):
        if isinstance(value, bool):
            return 'true' if value else 'false'
        if isinstance(value, float):
            if math.isnan(value): return 'nan'
            if math.isinf(value): return 'inf' if value > 0 else '-inf'
            return self.formatFloat(value)
        return str(value)

    def build(self, fields, rows):
        lines = [ self.separator.join(fields) ]
        for row in rows:
            lines.append( self.separator.join(self.formatValue(row[f]) for f in fields) )
        return lines

    def parse(self, lines, types=None):
        """ Returns the list of records as dicts, values converted with types[field] when given """
        types = types or {}
        fields = None
        records = []
        for lineNo, line in self.significant(lines):
            values = line.split(self.separator)
            if fields is None:
                fields = values
                continue
            if len(values) != len(fields):
                msg = 'Record at line %d has %d values, header has %d' % (lineNo, len(values), len(fields))
                logger.error ( msg )
                raise ConfigException(msg)
            try:
                records.append( dict( (f, types.get(f, str)(v)) for f, v in zip(fields, values) ) )
            except ValueError:
                msg = 'Malformed value in record at line %d' % lineNo
                logger.error ( msg )
                raise ConfigException(msg)
        return records
