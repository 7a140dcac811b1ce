"""
Persistent field storage using .npz files and a JSON index
Lets repeated runs with the same physics reuse computed screen fields
"""

import os
import json
import logging
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from slitpaths.errors import ConfigError

logger = logging.getLogger(__name__)

INDEX_FILE = 'index.json'
TTL_ENV = 'SLITPATHS_CACHE_TTL_HOURS'
DEFAULT_TTL_HOURS = 24


def ttl_hours():
    """Hours a stored entry stays valid, from SLITPATHS_CACHE_TTL_HOURS"""
    raw = os.environ.get(TTL_ENV)
    if raw is None or not raw.strip():
        return float(DEFAULT_TTL_HOURS)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError('cache_ttl_hours', f"{TTL_ENV} must be a number of hours, got {raw!r}") from None


def _index_path(cache_dir):
    return Path(cache_dir) / INDEX_FILE


def _read_index(cache_dir):
    path = _index_path(cache_dir)
    if not path.exists():
        return {}
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except (json.JSONDecodeError, OSError) as e:
        logger.warning(f"Ignoring unreadable field index {path}: {e}")
        return {}


def load_index(cache_dir):
    """Load the index of stored fields, skipping expired entries"""
    current_time = datetime.now().isoformat()
    return {
        key: entry for key, entry in _read_index(cache_dir).items()
        if entry.get('expires_at', current_time) > current_time
    }


def save_index(cache_dir, index):
    """Write the index back to disk"""
    try:
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        with open(_index_path(cache_dir), 'w') as f:
            json.dump(index, f, indent=2, sort_keys=True)
    except OSError as e:
        logger.error(f"Error saving field index: {e}", exc_info=True)


def add_fields(cache_dir, key, fields, meta=None):
    """Store a {name: complex array} mapping under `key`"""
    expires_at = (datetime.now() + timedelta(hours=ttl_hours())).isoformat()
    try:
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        filename = f"{key}.npz"
        np.savez(Path(cache_dir) / filename, **fields)
    except OSError as e:
        logger.error(f"Error storing fields {key}: {e}", exc_info=True)
        return False

    index = _read_index(cache_dir)
    index[key] = {
        'file': filename,
        'names': sorted(fields),
        'meta': meta or {},
        'expires_at': expires_at,
    }
    save_index(cache_dir, index)
    logger.info(f"Stored fields {key[:12]} in {cache_dir}")
    return True


def get_fields(cache_dir, key):
    """Stored fields for `key`, or None"""
    entry = load_index(cache_dir).get(key)
    if not entry:
        return None
    try:
        with np.load(Path(cache_dir) / entry['file']) as data:
            return {name: data[name] for name in entry['names']}
    except (OSError, KeyError, ValueError) as e:
        logger.warning(f"Discarding damaged cache entry {key[:12]}: {e}")
        delete_fields(cache_dir, key)
        return None


def delete_fields(cache_dir, key):
    """Remove one stored entry"""
    index = _read_index(cache_dir)
    entry = index.pop(key, None)
    if entry:
        try:
            (Path(cache_dir) / entry['file']).unlink(missing_ok=True)
        except OSError as e:
            logger.error(f"Error deleting cached fields {key[:12]}: {e}", exc_info=True)
        save_index(cache_dir, index)


def clear_expired(cache_dir):
    """Drop expired entries and their files; returns the number kept"""
    data = _read_index(cache_dir)
    if not data:
        return 0
    active = load_index(cache_dir)
    for key, entry in data.items():
        if key not in active:
            (Path(cache_dir) / entry.get('file', f"{key}.npz")).unlink(missing_ok=True)
    save_index(cache_dir, active)
    return len(active)
