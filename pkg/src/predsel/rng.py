"""Counter-based random streams for reproducible (parallel) replication.

All stochastic entry points in this package take a 64-bit ``seed`` plus an
optional stream id.  Substreams are derived as
``Generator(Philox(SeedSequence((seed, *stream))))``, so a replication
worker can open stream ``(seed, rep_index)`` without coordinating with any
other worker and still reproduce the serial run bit for bit.
"""
from __future__ import annotations

from numpy.random import Generator, Philox, SeedSequence


def substream(seed, *stream: int) -> Generator:
    """Independent generator keyed by (seed..., stream...).

    ``seed`` is a 64-bit integer or a tuple of integers (an already-derived
    key); extra ids extend the key, so e.g. ``substream((s, 3), r)`` is the
    stream of replication r inside campaign 3 of master seed s.
    """
    base = seed if isinstance(seed, tuple) else (seed,)
    return Generator(Philox(SeedSequence(tuple(int(v) for v in (*base, *stream)))))
