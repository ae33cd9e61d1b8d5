"""Deterministic worker-pool mapping for replication studies.

Work is split into fixed chunks of replication indices; every replication
derives its own counter-based random stream from (seed, rep index), so the
results are identical for any worker count.  Chunk results are combined in
chunk order.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable

WORKERS_ENV = "PREDSEL_WORKERS"


def resolve_workers(workers: int | None = None) -> int:
    """Explicit argument wins, then the PREDSEL_WORKERS env var, then 1."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return 1


def map_chunks(
    fn: Callable[[int, int], object],
    total: int,
    workers: int | None = None,
    chunk_size: int = 256,
) -> list:
    """Apply fn(start, stop) over [0, total) in fixed chunks, in order.

    ``fn`` must be picklable (module-level function or partial) when more
    than one worker is requested.
    """
    nw = resolve_workers(workers)
    bounds = [(s, min(s + chunk_size, total)) for s in range(0, total, chunk_size)]
    if nw == 1 or len(bounds) <= 1:
        return [fn(s, e) for s, e in bounds]
    with ProcessPoolExecutor(max_workers=min(nw, len(bounds))) as ex:
        return list(ex.map(_call, [fn] * len(bounds), [b[0] for b in bounds], [b[1] for b in bounds]))


def _call(fn, start, stop):
    return fn(start, stop)
