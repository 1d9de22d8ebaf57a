#!/usr/bin/env python3
"""
Execution engines for the leakage analyzer.
Exact trace enumeration and seeded simulation from saved states.
"""

from .encoding import encode
from .precise import EnumerationResult, PreciseEngine, enumerate_traces
from .sampler import Sampler, make_rng
from .state import ProgramState, SavedState, SecretSpace, TraceOutcome

__all__ = [
    'EnumerationResult',
    'PreciseEngine',
    'ProgramState',
    'SavedState',
    'Sampler',
    'SecretSpace',
    'TraceOutcome',
    'encode',
    'enumerate_traces',
    'make_rng',
]
