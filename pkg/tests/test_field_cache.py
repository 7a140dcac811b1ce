"""
In-memory field cache and the on-disk field store
"""

import json
import threading

import numpy as np
import pytest

from slitpaths import field_store
from slitpaths.errors import ConfigError
from slitpaths.field_cache import FieldCache


def _fields():
    return {'A': np.array([1 + 2j, 3 - 4j]), 'B': np.array([0.5j, -1.0]), 'AB': np.zeros(2, dtype=complex)}


def test_compute_runs_once_per_key():
    cache = FieldCache()
    calls = []

    def compute():
        calls.append(1)
        return _fields()

    first = cache.get_or_compute('key-1', compute)
    second = cache.get_or_compute('key-1', compute)
    assert first is second
    assert len(calls) == 1
    assert cache.entries['key-1'].hits == 1

    cache.clear()
    cache.get_or_compute('key-1', compute)
    assert len(calls) == 2


def test_fields_survive_on_disk(tmp_path):
    FieldCache().get_or_compute('abc123', _fields, cache_dir=tmp_path, meta={'layout': 'double'})
    assert (tmp_path / 'abc123.npz').exists()

    def fail():
        raise AssertionError('fields should come from disk')

    loaded = FieldCache().get_or_compute('abc123', fail, cache_dir=tmp_path)
    for name, values in _fields().items():
        assert np.array_equal(loaded[name], values)

    index = json.loads((tmp_path / field_store.INDEX_FILE).read_text())
    assert index['abc123']['meta'] == {'layout': 'double'}
    assert index['abc123']['names'] == ['A', 'AB', 'B']


def test_expired_entries_are_ignored_and_cleared(tmp_path, monkeypatch):
    """Test entries past expires_at are skipped and then removed"""
    monkeypatch.setenv('SLITPATHS_CACHE_TTL_HOURS', '-1')
    field_store.add_fields(tmp_path, 'old', _fields())
    assert field_store.get_fields(tmp_path, 'old') is None

    monkeypatch.setenv('SLITPATHS_CACHE_TTL_HOURS', '24')
    field_store.add_fields(tmp_path, 'new', _fields())
    assert field_store.clear_expired(tmp_path) == 1
    assert not (tmp_path / 'old.npz').exists()
    assert (tmp_path / 'new.npz').exists()


def test_damaged_index_is_ignored(tmp_path):
    (tmp_path / field_store.INDEX_FILE).write_text('not json')
    assert field_store.load_index(tmp_path) == {}
    assert field_store.get_fields(tmp_path, 'anything') is None


def test_delete_fields(tmp_path):
    field_store.add_fields(tmp_path, 'gone', _fields())
    field_store.delete_fields(tmp_path, 'gone')
    assert field_store.get_fields(tmp_path, 'gone') is None
    assert not (tmp_path / 'gone.npz').exists()


def test_bad_ttl_names_its_field(tmp_path, monkeypatch):
    """Test an unparsable TTL fails when an entry is written, not at import"""
    monkeypatch.setenv('SLITPATHS_CACHE_TTL_HOURS', 'a day')
    with pytest.raises(ConfigError) as excinfo:
        field_store.add_fields(tmp_path, 'key', _fields())
    assert excinfo.value.field == 'cache_ttl_hours'
    assert not (tmp_path / 'key.npz').exists()


def test_other_keys_compute_while_one_is_busy():
    """Test a slow computation does not block a different key"""
    cache = FieldCache()
    started = threading.Event()
    other_done = threading.Event()
    seen = {}

    def slow():
        started.set()
        seen['other_done'] = other_done.wait(timeout=5)
        return _fields()

    def fast():
        other_done.set()
        return _fields()

    worker = threading.Thread(target=cache.get_or_compute, args=('slow', slow))
    worker.start()
    assert started.wait(timeout=5)
    cache.get_or_compute('fast', fast)
    worker.join(timeout=10)

    assert seen['other_done'] is True
    assert set(cache.entries) == {'slow', 'fast'}


def test_same_key_computes_once_across_threads():
    cache = FieldCache()
    calls = []
    lock = threading.Lock()

    def compute():
        with lock:
            calls.append(1)
        return _fields()

    threads = [threading.Thread(target=cache.get_or_compute, args=('shared', compute)) for _ in range(8)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join(timeout=10)
    assert len(calls) == 1
