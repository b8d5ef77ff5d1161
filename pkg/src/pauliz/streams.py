"""Reproducible random streams for parallel shot generation.

Shots are grouped into fixed-size blocks. Every block draws from its own
counter-based Philox stream keyed by ``(seed, round, block)``, so the values a
block produces never depend on which worker runs it or in what order.
"""

from __future__ import annotations

import os
import secrets

import numpy as np

WORKERS_ENV = "PAULIZ_WORKERS"


def fresh_seed() -> int:
    return secrets.randbits(64)


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
