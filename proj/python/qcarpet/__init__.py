"""Quantum carpets in the infinite square well."""

import json as _json

from ._qcarpet import *  # noqa: F401,F403
from ._qcarpet import run_acceptance as _run_acceptance


def acceptance(only=()):
    """Run acceptance checks and return them as a list of dicts."""
    return _json.loads(_run_acceptance(list(only)))
