#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
from qncsim.store import RecordStore
from qncsim.worker import run_tasks
from qncsim.exception import NumericalException
import os

def test_store_keeps_records(tmp_path, cache):
    output = str(tmp_path / 'out.csv')
    with RecordStore(output, 'abc') as store:
        store.put('point|1', '1,2,3')
        store.put('point|0', '4,5,6')
        assert store.has('point|1') and not store.has('point|2')
    assert os.path.dirname(RecordStore(output, 'abc').path) == cache

    with RecordStore(output, 'abc') as store:
        assert store.keys() == [ 'point|0', 'point|1' ]
        assert store.get('point|1') == '1,2,3'
        assert store.get('missing') is None
        store.dump()

def test_store_reset_on_new_digest(tmp_path, cache):
    output = str(tmp_path / 'out.csv')
    with RecordStore(output, 'abc') as store:
        store.put('point|1', 'x')
    store = RecordStore(output, 'def')
    assert not store.isUpToDate()
    with store:
        assert store.keys() == []
    assert 'closed' in str(store)

def square(value):
    if value < 0:
        raise NumericalException('negative %d' % value)
    return [ value * value ]

def test_run_tasks_in_process():
    seen = {}
    run_tasks(square, [ (2,), (-1,), (3,) ], 1, lambda task, outcome: seen.__setitem__(task, outcome))
    assert seen[(2,)] == [ 4 ] and seen[(3,)] == [ 9 ]
    assert isinstance(seen[(-1,)], NumericalException)
