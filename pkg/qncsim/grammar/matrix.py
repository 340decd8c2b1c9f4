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
import numpy as np

logger = logging.getLogger('qncsim.grammar')

class MatrixGrammar(abstract.AbstractGrammar):
    """
        Named dense blocks, row-major, 17 significant digits:
            @<name> <rows> <cols>
            <v11> <v12> ...
            ...
        Scalars are 1x1 blocks, vectors are rows x 1 blocks.
    """

    def build(self, title, blocks):
        lines = [ '# %s' % title ]
        for name, value in blocks:
            value = np.asarray(value, dtype=float)
            value = value.reshape(-1, 1) if value.ndim == 1 else np.atleast_2d(value)
            lines.append( '@%s %d %d' % (name, value.shape[0], value.shape[1]) )
            for row in value:
                lines.append( ' '.join(self.formatFloat(v) for v in row) )
        return lines

    def parse(self, lines):
        blocks = {}
        name = None
        rows = []
        shape = None
        for lineNo, line in self.significant(lines):
            if line.startswith('@'):
                if name is not None:
                    blocks[name] = self.__close(name, shape, rows)
                try:
                    name, r, c = line[1:].split()
                    shape = ( int(r), int(c) )
                except ValueError:
                    msg = 'Malformed block header line %d: "%s"' % (lineNo, line)
                    logger.error ( msg )
                    raise ConfigException(msg)
                rows = []
                continue
            if name is None:
                msg = 'Values before any block header at line %d' % lineNo
                logger.error ( msg )
                raise ConfigException(msg)
            try:
                rows.append( [ float(v) for v in line.split() ] )
            except ValueError:
                msg = 'Malformed matrix row at line %d' % lineNo
                logger.error ( msg )
                raise ConfigException(msg)
        if name is not None:
            blocks[name] = self.__close(name, shape, rows)
        return blocks

    def __close(self, name, shape, rows):
        values = np.array(rows, dtype=float).reshape(-1)
        if values.size != shape[0]*shape[1]:
            msg = 'Block "%s" announces %dx%d values, %d found' % (name, shape[0], shape[1], values.size)
            logger.error ( msg )
            raise ConfigException(msg)
        return values.reshape(shape)
