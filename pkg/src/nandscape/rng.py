"""Deterministic seed derivation and per-agent random streams.

Seed mixing uses splitmix64, a bijective 64-bit finalizer. Job seeds are
derived as::

    x = splitmix64(master_seed)
    x = splitmix64(x ^ (group_size * GAMMA))
    x = splitmix64(x ^ (replication_index * GAMMA2))

which keeps distinct (master, group, replication) triples on distinct seeds
with overwhelming probability. Agent streams inside a replication are plain
``random.Random`` (Mersenne Twister) instances seeded from the job seed and
the agent index through the same mixer, so agents draw independently and the
whole replication is reproducible from its job seed alone.
"""

from __future__ import annotations

import random

_U64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_GAMMA2 = 0xBF58476D1CE4E5B9


def splitmix64(x: int) -> int:
    """One splitmix64 finalization round (Steele, Lea, Flood constants)."""
    x = (x + _GAMMA) & _U64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, group_size: int, replication_index: int) -> int:
    """64-bit job seed for one (group size, replication) cell."""
    x = splitmix64(master_seed & _U64)
    x = splitmix64(x ^ ((group_size * _GAMMA) & _U64))
    x = splitmix64(x ^ ((replication_index * _GAMMA2) & _U64))
    return x


def agent_stream(job_seed: int, agent: int) -> random.Random:
    """Independent deterministic stream for one agent of a replication."""
    return random.Random(splitmix64(job_seed ^ ((agent + 1) * _GAMMA)))
