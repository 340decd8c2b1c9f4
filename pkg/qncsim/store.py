#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
from qncsim import confdir
import dbm
import logging
import os
import sys
import threading

logger = logging.getLogger('qncsim.store')

class RecordStore:
    """
        Completed sweep records indexed by record key, so that an interrupted sweep
        restarts where it stopped. The store belongs to one output file and one sweep
        configuration: a store built for another configuration is discarded on open.
    """

    # Version of the store structure
    version = "1.0"

    def __init__(self, outputFile, digest):
        self.outputFile = outputFile
        self.digest     = digest
        self.__dbFile   = os.path.abspath(outputFile) + os.path.extsep + 'dbm'
        self.__dbFile   = os.path.join(confdir.cache, os.path.splitdrive(self.__dbFile)[1].replace(os.path.sep, '_'))
        self.__db       = None
        self.__lock     = threading.RLock()

    def __str__(self):
        with self.__lock:
            return 'Record store %s for %s, %s' % (
                self.__dbFile, self.outputFile, self.__db is not None and 'opened' or 'closed'
            )

    @property
    def path(self):
        return self.__dbFile

    def check_cache(self, cachedir):
        if not os.path.exists(cachedir):
            logger.info ( 'Creating cache directory %s...', cachedir );
            try:
                os.makedirs(cachedir)
            except OSError:
                logger.critical( 'ERROR: %s: %s', cachedir, sys.exc_info()[1] );
                raise
            else:
                logger.debug ( 'Cache directory created' );

    def isUpToDate(self):
        """ True when the store on disk was built by this version for this configuration """
        if dbm.whichdb(self.__dbFile) in (None, ''):
            return False
        try:
            db = dbm.open(self.__dbFile, 'r')
        except Exception:
            return False
        try:
            if db.get(b"__version__") != RecordStore.version.encode():
                logger.debug ( 'Store version of %s differs from %s', self.__dbFile, RecordStore.version );
                return False
            if db.get(b"__digest__") != self.digest.encode():
                logger.debug ( 'Store %s was built for another configuration', self.__dbFile );
                return False
            return True
        finally:
            db.close()

    def open(self):
        self.check_cache(confdir.cache)
        with self.__lock:
            if self.isUpToDate():
                self.__db = dbm.open(self.__dbFile, 'w')
                logger.info ( 'Resuming from %d completed record(s) in %s', len(self.keys()), self.__dbFile );
            else:
                self.__db = dbm.open(self.__dbFile, 'n')
                self.__db["__version__"] = RecordStore.version
                self.__db["__digest__"]  = self.digest
        return self

    def put(self, key, line):
        with self.__lock:
            self.__db[key] = line
            sync = getattr(self.__db, 'sync', None)
            if sync is not None:
                sync()

    def get(self, key):
        with self.__lock:
            value = self.__db.get(key.encode())
        return None if value is None else value.decode()

    def has(self, key):
        with self.__lock:
            return key.encode() in self.__db

    def keys(self):
        with self.__lock:
            return sorted( k.decode() for k in self.__db.keys() if not k.startswith(b"__") )

    def dump(self):
        """ Dump the store in debug log level """
        logger.debug ( "Dumping record store %s", self.__dbFile );
        for key in self.keys():
            logger.debug ( "  %s = %s", key, self.get(key) );

    def close(self):
        with self.__lock:
            if self.__db is not None:
                self.__db.close()
            self.__db = None

    def __enter__(self):
        return self.open()

    def __exit__(self, *exc):
        self.close()
