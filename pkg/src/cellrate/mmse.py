"""Rayleigh channel draws and the exact MMSE SINR of one uplink.

The representative node's channel ``h`` is kept out of the interference
covariance, so ``SINR = h^H (G diag(p) G^H + noise I)^-1 h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .streams import complex_gaussian


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray       # (N,) representative channel, sqrt(p_1) g_1
    G: np.ndarray       # (N, n) unit-variance interferer fading
    powers: np.ndarray  # (n,) received interference powers, watts
    noise: float

    @property
    def n_antennas(self) -> int:
        return self.h.shape[0]

    def sliced(self, n_antennas: int) -> "ChannelRealization":
        """The same draw seen by the first ``n_antennas`` elements."""
        return ChannelRealization(self.h[:n_antennas], self.G[:n_antennas], self.powers, self.noise)


def received_powers(positions: np.ndarray, tx_powers: np.ndarray, gain: float, alpha: float) -> np.ndarray:
    """``G_t * P_i * r_i**-alpha`` with ``r_i`` measured to the origin."""
    r = np.hypot(positions[:, 0], positions[:, 1])
    if np.any(r == 0):
        raise ValueError("node located at the receiver (infinite path gain)")
    return gain * np.asarray(tx_powers, dtype=float) * r ** -alpha


def generate_channel(positions: np.ndarray, tx_powers: np.ndarray, rep_index: int,
                     n_antennas: int, gain: float, alpha: float, noise: float,
                     rng: np.random.Generator) -> ChannelRealization:
    """Draw fading for all nodes; node ``rep_index`` is the desired link."""
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    if not 0 <= rep_index < len(positions):
        raise IndexError("representative index out of range")
    if n_antennas < 1:
        raise ValueError("need at least one antenna")
    if not noise > 0:
        raise ValueError("noise power must be positive")
    p = received_powers(positions, tx_powers, gain, alpha)
    g = complex_gaussian(rng, (n_antennas, len(positions)))
    h = math.sqrt(p[rep_index]) * g[:, rep_index]
    others = np.arange(len(positions)) != rep_index
    return ChannelRealization(h, g[:, others], p[others], noise)


def mmse_sinr(ch: ChannelRealization) -> float:
    return sinr_from(ch.h, ch.G, ch.powers, ch.noise)


def sinr_from(h: np.ndarray, G: np.ndarray, powers: np.ndarray, noise: float) -> float:
    """MMSE output SINR via a Cholesky solve; all quantities noise-normalized first."""
    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(G))
            and np.all(np.isfinite(powers)) and math.isfinite(noise)):
        raise ValueError("non-finite channel input")
    if not noise > 0:
        raise ValueError("noise power must be positive")
    w = np.asarray(powers, dtype=float) / noise
    cov = (G * w) @ G.conj().T
    cov[np.diag_indices_from(cov)] += 1.0
    x = cho_solve(cho_factor(cov, lower=True, check_finite=False), h, check_finite=False)
    return max(float(np.real(np.vdot(h, x))) / noise, 0.0)


def spectral_efficiency(sinr):
    """Shannon rate ``log2(1 + sinr)`` in b/s/Hz."""
    return np.log2(1.0 + np.asarray(sinr, dtype=float)) if np.ndim(sinr) else math.log2(1.0 + sinr)
