"""
SlitPaths - Field Cache
In-memory, thread-safe front of the on-disk field store
"""

import logging
import threading
from datetime import datetime

from slitpaths import field_store

logger = logging.getLogger(__name__)


class CachedFields:
    """Fields computed for one physics key"""
    def __init__(self, key, fields):
        self.key = key
        self.fields = fields
        self.created_at = datetime.now()
        self.hits = 0


class FieldCache:
    """Computes screen fields once per physics key"""
    def __init__(self):
        self.entries = {}  # {key: CachedFields}

        # Guards entries and key_locks only; never held while computing
        self._lock = threading.Lock()
        self.key_locks = {}  # {key: Lock}

    def _key_lock(self, key):
        with self._lock:
            return self.key_locks.setdefault(key, threading.Lock())

    def _lookup(self, key):
        with self._lock:
            entry = self.entries.get(key)
            if entry:
                entry.hits += 1
            return entry

    def _remember(self, key, fields):
        with self._lock:
            self.entries[key] = CachedFields(key, fields)

    def get_or_compute(self, key, compute, cache_dir=None, meta=None):
        """
        Fields for `key`: from memory, then from `cache_dir`, else by calling
        `compute()` and storing the result in both. Callers asking for the
        same key wait for one computation; other keys proceed in parallel.
        """
        with self._key_lock(key):
            entry = self._lookup(key)
            if entry:
                logger.debug(f"Field cache hit (memory): {key[:12]}")
                if cache_dir and key not in field_store.load_index(cache_dir):
                    field_store.add_fields(cache_dir, key, entry.fields, meta)
                return entry.fields

            if cache_dir:
                stored = field_store.get_fields(cache_dir, key)
                if stored is not None:
                    self._remember(key, stored)
                    logger.info(f"Field cache hit (disk): {key[:12]}")
                    return stored

            fields = compute()
            self._remember(key, fields)
            if cache_dir:
                field_store.add_fields(cache_dir, key, fields, meta)
            return fields

    def discard(self, key):
        with self._lock:
            self.entries.pop(key, None)

    def clear(self):
        with self._lock:
            count = len(self.entries)
            self.entries.clear()
            logger.debug(f"Field cache cleared ({count} entries)")


# Global instance
field_cache = FieldCache()
