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

logger = logging.getLogger('qncsim.grammar')

class GraphGrammar(abstract.AbstractGrammar):
    """
        Deployment files:
            # comment
            <n> <edge count> <gateway> <seed>
            <id> <tail> <head> <capacity>
            ...
        Seed is '-' for graphs that were not generated.
    """

    def build(self, n, gateway, seed, edges):
        lines = [ '# qncsim deployment: n |E| gateway seed, then: id tail head capacity' ]
        lines.append( '%d %d %d %s' % (n, len(edges), gateway, '-' if seed is None else seed) )
        for (eid, tail, head, capacity) in edges:
            lines.append( '%d %d %d %s' % (eid, tail, head, self.formatFloat(capacity)) )
        return lines

    def parse(self, lines):
        header = None
        edges = []
        for lineNo, line in self.significant(lines):
            fields = line.split()
            try:
                if header is None:
                    n, count, gateway, seed = fields
                    header = ( int(n), int(count), int(gateway), None if seed == '-' else int(seed) )
                else:
                    eid, tail, head, capacity = fields
                    edges.append( (int(eid), int(tail), int(head), float(capacity)) )
            except ValueError:
                msg = 'Malformed deployment line %d: "%s"' % (lineNo, line)
                logger.error ( msg )
                raise ConfigException(msg)
        if header is None:
            msg = 'Deployment file has no header line'
            logger.error ( msg )
            raise ConfigException(msg)
        if header[1] != len(edges):
            msg = 'Deployment header announces %d edges, %d found' % (header[1], len(edges))
            logger.error ( msg )
            raise ConfigException(msg)
        return header, edges
