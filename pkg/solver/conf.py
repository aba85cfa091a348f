"""Lookup of numerical defaults declared in ``settings.SOLVER``."""

from contextlib import contextmanager

from django.conf import settings

# Values set by a running command (from its run configuration).
_active = {}


def get(name, override=None):
    """Return ``override`` if given, else the configured value of ``name``."""
    if override is not None:
        return override
    if name in _active:
        return _active[name]
    return settings.SOLVER[name]


@contextmanager
def configured(values):
    """Temporarily replace SOLVER entries for the duration of a run."""
    unknown = set(values) - set(settings.SOLVER)
    if unknown:
        raise KeyError(f"unknown solver settings: {sorted(unknown)}")
    previous = dict(_active)
    _active.update(values)
    try:
        yield
    finally:
        _active.clear()
        _active.update(previous)
