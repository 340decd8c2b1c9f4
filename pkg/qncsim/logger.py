#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
import logging
import logging.config
import os
import socket

__all__ = ["rfc5424Formatter", "configure", "console_log_file", "syslog_log_file"]

console_log_file = os.path.join(os.path.dirname(__file__), "qncsim-log-console.conf")
syslog_log_file  = os.path.join(os.path.dirname(__file__), "qncsim-log-syslog.conf")

class rfc5424Formatter(logging.Formatter):
	"""
		logging.handlers.SysLogHandler just send data to an udp server with the priority field
		We must do the remaining job to be compliant with RFC5424.
		Sweep workers are separate processes, processName tells them apart.
		MSGID and STRUCTURED-DATA are not supported
	"""
	def __init__(self, fmt=None, datefmt=None, style="%", **kwargs):
		syslogHeader = "1 %%(asctime)s %s qncsim %%(processName)s %%(process)s - - " % (socket.gethostname())
		if fmt:	fmt = syslogHeader + fmt
		else:	fmt = syslogHeader + "%(message)s"
		logging.Formatter.__init__( self, fmt, "%Y-%m-%dT%H:%M:%SZ" )

def configure(dest='console', verbose=False):
	""" Loads the logging configuration shipped with the package for the given destination """
	confFile = syslog_log_file if dest == 'syslog' else console_log_file
	if os.path.exists(confFile):
		logging.config.fileConfig(confFile, disable_existing_loggers=False)
	else:
		logging.basicConfig(format="%(asctime)s %(processName)s[%(process)d] %(name)s %(levelname)s %(message)s")
	if verbose:
		logging.getLogger('qncsim').setLevel(logging.DEBUG)
