"""File based cache of scattering data under <out>/cache."""

import hashlib
import json
import logging
import os

from django.core.cache.backends.filebased import FileBasedCache

from . import conf
from .scattering import ScatteringData

logger = logging.getLogger(__name__)


# SOLVER entries that change computed scattering data.
SCATTERING_SETTINGS = (
    "ODE_RTOL", "ODE_ATOL", "TAIL_TOL", "TAIL_SEARCH_MAX", "COEFF_TOL",
    "WRONSKIAN_FLOOR", "PROFILE_SHIFT", "KAPPA_TOL", "KAPPA_SCAN", "EIG_MARGIN", "EIG_GRID",
)


def cache_key(q, grid, role="full-line"):
    """SHA-256 of the canonical profile description, the k-grid, the role and
    the active scattering tolerances."""
    settings = {name: conf.get(name) for name in SCATTERING_SETTINGS}
    document = {"potential": q.spec(), "grid": grid, "role": role, "settings": settings}
    text = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class ScatteringCache:
    """Stores ScatteringData as versioned JSON documents.

    With ``enabled`` False every lookup misses and nothing is written.
    """

    def __init__(self, directory, enabled=True):
        self.enabled = enabled
        self.location = os.path.join(directory, "cache")
        self._backend = FileBasedCache(self.location, {"TIMEOUT": None}) if enabled else None

    def get(self, key):
        if not self.enabled:
            return None
        document = self._backend.get(key)
        if document is None:
            return None
        try:
            return ScatteringData.from_document(json.loads(document))
        except (ValueError, KeyError) as e:
            logger.warning("discarding unreadable cache entry %s: %s", key, e)
            self._backend.delete(key)
            return None

    def set(self, key, data):
        if self.enabled:
            self._backend.set(key, json.dumps(data.to_document()), timeout=None)

    def fetch(self, q, grid, compute, role="full-line"):
        """Cached data for (q, grid, role), computing and storing it on a miss.

        Returns (data, hit).
        """
        key = cache_key(q, grid, role)
        data = self.get(key)
        if data is not None:
            logger.debug("cache hit for %s (%s)", q.description, role)
            return data, True
        data = compute()
        self.set(key, data)
        return data, False
