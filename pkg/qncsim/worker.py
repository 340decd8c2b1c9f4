#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
from multiprocessing import Process
from qncsim import setProcTitle
from qncsim.exception import QncException
import logging
import os
import sys

__all__ = ["SweepWorker", "run_tasks"]
logger = logging.getLogger('qncsim.worker')

class SweepWorker(Process):
    """
        Evaluates deployments in a child process. Tasks are taken from a joinable queue
        until a None task arrives; every task gives one (task, outcome) entry on the
        result queue, outcome being the list returned by evaluate or the exception raised.
    """

    def __init__(self, evaluate, tasks, results, rank):
        Process.__init__(self)
        self.evaluate = evaluate
        self.tasks    = tasks
        self.results  = results
        self.rank     = rank

    def run(self):
        while True:
            task = self.tasks.get()
            try:
                if task is None:
                    logger.debug ( 'Worker %d end', self.rank );
                    return
                # Changes the process name shown by ps for instance
                setProcTitle ( "qncsim worker %d [task: %s]" % (self.rank, task[0]) );
                try:
                    outcome = self.evaluate(*task)
                except QncException:
                    outcome = sys.exc_info()[1]
                except Exception:
                    logger.error ( 'Exception in worker %d (pid %d): %s', self.rank, os.getpid(), sys.exc_info()[1] );
                    logger.debug ( "", exc_info=True );
                    outcome = QncException('%s: %s' % (type(sys.exc_info()[1]).__name__, sys.exc_info()[1]))
                self.results.put( (task, outcome) )
            finally:
                self.tasks.task_done()

def run_tasks(evaluate, tasks, workers, handle):
    """
        Runs evaluate(*task) for every task and calls handle(task, outcome) in the calling
        process as results arrive. workers=1 stays in process.
    """
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        for task in tasks:
            try:
                outcome = evaluate(*task)
            except QncException:
                outcome = sys.exc_info()[1]
            handle(task, outcome)
        return

    from multiprocessing import JoinableQueue, Queue
    queue, results = JoinableQueue(), Queue()
    pool = [ SweepWorker(evaluate, queue, results, rank) for rank in range(min(workers, len(tasks))) ]
    for worker in pool:
        worker.start()
    for task in tasks:
        queue.put(task)
    for worker in pool:
        queue.put(None)
    try:
        for i in range(len(tasks)):
            handle(*results.get())
        queue.join()
    finally:
        for worker in pool:
            worker.join(1)
            if worker.is_alive():
                worker.terminate()
