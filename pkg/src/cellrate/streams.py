"""Reproducible per-trial random streams.

Every trial draws from Philox (a counter-based generator) keyed by
``(seed, trial, substream)``, so results never depend on the order in
which trials execute or on how many run at once.
"""

from __future__ import annotations

import math

import numpy as np

GEOMETRY = 0
FADING = 1
DIAGNOSTIC = 2


def stream(seed: int, trial: int = 0, substream: int = 0) -> np.random.Generator:
    seq = np.random.SeedSequence([seed & (2 ** 64 - 1), trial, substream])
    return np.random.Generator(np.random.Philox(seq))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """IID CN(0, 1) draws by Box-Muller: modulus sqrt(-ln U1), phase 2*pi*U2."""
    u = rng.random((2, *np.atleast_1d(shape)))
    modulus = np.sqrt(-np.log1p(-u[0]))
    return modulus * np.exp(2j * math.pi * u[1])
