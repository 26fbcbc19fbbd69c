"""Keyed exclusive locks.

One registry per resource family (texts, assignments, logins): mutations
of the same key serialize, distinct keys proceed in parallel.
"""
from __future__ import annotations

import threading


class KeyedLocks:
    def __init__(self):
        self._guard = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    def for_key(self, key: str) -> threading.Lock:
        with self._guard:
            lock = self._locks.get(key)
            if lock is None:
                lock = self._locks[key] = threading.Lock()
            return lock
