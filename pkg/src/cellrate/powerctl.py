"""Distance-based uplink power control and the transmit-power laws it induces.

Each node targets received power ``p_t`` at its nearest base station,
``P = min(p_t / G_t * r**alpha, P_M)``. Under a cell model the link length
``r`` is random, so ``P`` has a continuous part plus an atom at ``P_M``
whenever cell reach exceeds the full-power radius ``r_M``.

``alpha`` may be any real above 2; rationality is not required here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SQRT3, HexLinkLaw, PppLinkLaw


@dataclass(frozen=True)
class PowerControl:
    target_rx_power: float
    gain: float
    max_power: float = math.inf
    alpha: float = 4.0

    def __post_init__(self):
        if not self.target_rx_power > 0:
            raise ValueError("target received power must be positive")
        if not self.gain > 0:
            raise ValueError("gain constant must be positive")
        if not self.max_power > 0:
            raise ValueError("max power must be positive")
        if not self.alpha > 2:
            raise ValueError("path-loss exponent must exceed 2")

    @classmethod
    def from_snr(cls, snr_db: float, noise: float, gain: float,
                 max_power: float = math.inf, alpha: float = 4.0) -> "PowerControl":
        """Target received power set ``snr_db`` above the noise floor."""
        return cls(noise * 10 ** (snr_db / 10), gain, max_power, alpha)

    @property
    def ratio(self) -> float:
        """``p_t / G_t``."""
        return self.target_rx_power / self.gain

    @property
    def full_power_radius(self) -> float:
        """Link length beyond which a node transmits at ``max_power``."""
        if math.isinf(self.max_power):
            return math.inf
        return (self.max_power / self.ratio) ** (1 / self.alpha)


def transmit_power(r, pc: PowerControl):
    r = np.asarray(r, dtype=float)
    out = np.minimum(pc.ratio * r ** pc.alpha, pc.max_power)
    r_m = pc.full_power_radius
    # exact at the knee, independent of pow() rounding
    out = np.where(r >= r_m, pc.max_power, out)
    return out if out.ndim else float(out)


def hex_power_moment(pc: PowerControl, d: float) -> float:
    """``E[P**(2/alpha)]`` for hexagonal cells with lattice spacing ``d``."""
    a = pc.alpha
    q = pc.ratio
    r_m = pc.full_power_radius
    if r_m >= SQRT3 * d / 3:
        return q ** (2 / a) * 5.0 / 36.0 * d * d
    pm = pc.max_power
    lead = pm ** (2 / a) - math.pi * SQRT3 / (3 * d * d) * q ** (-2 / a) * pm ** (4 / a)
    if r_m < d / 2:
        return lead
    return (lead
            + 2 * SQRT3 / (d * d) * q ** (-2 / a) * pm ** (4 / a) * math.acos(d / (2 * r_m))
            + (SQRT3 * d / 12 * q ** (2 / a) - 5 * SQRT3 / (6 * d) * pm ** (2 / a))
            * math.sqrt(max(4 * r_m * r_m - d * d, 0.0)))


def ppp_power_moment(pc: PowerControl, intensity: float) -> float:
    """``E[P**(2/alpha)]`` for Poisson-Voronoi cells of the given intensity."""
    scale = pc.ratio ** (2 / pc.alpha) / (math.pi * intensity)
    if math.isinf(pc.max_power):
        return scale
    return scale * -math.expm1(-math.pi * intensity * pc.full_power_radius ** 2)


class PowerDistribution:
    """Transmit-power law induced by power control over a link-length law."""

    def __init__(self, link, pc: PowerControl):
        self.link = link
        self.pc = pc

    @classmethod
    def hex(cls, pc: PowerControl, spacing: float) -> "PowerDistribution":
        return cls(HexLinkLaw(spacing), pc)

    @classmethod
    def ppp(cls, pc: PowerControl, intensity: float) -> "PowerDistribution":
        return cls(PppLinkLaw(intensity), pc)

    def __repr__(self):
        return f"PowerDistribution({self.link!r}, {self.pc!r})"

    @property
    def alpha(self) -> float:
        return self.pc.alpha

    @property
    def max_power(self) -> float:
        """Supremum of the support."""
        r_max = self.link.support_max
        if r_max >= self.pc.full_power_radius:
            return self.pc.max_power
        return self.pc.ratio * r_max ** self.alpha

    @property
    def atom(self) -> float:
        """Probability mass sitting at ``max_power``."""
        r_m = self.pc.full_power_radius
        if math.isinf(r_m):
            return 0.0
        return 1.0 - float(self.link.cdf(r_m))

    def _link_length(self, p):
        return (np.asarray(p, dtype=float) / self.pc.ratio) ** (1 / self.alpha)

    def cdf(self, p):
        p = np.asarray(p, dtype=float)
        out = np.where(p >= self.pc.max_power, 1.0,
                       self.link.cdf(self._link_length(np.maximum(p, 0.0))))
        out = np.where(p < 0, 0.0, out)
        return out if out.ndim else float(out)

    def pdf(self, p):
        """Density of the continuous part; the atom is excluded."""
        p = np.asarray(p, dtype=float)
        safe = np.where(p > 0, p, 1.0)
        x = self._link_length(safe)
        out = self.link.pdf(x) * x / (self.alpha * safe)
        out = np.where((p > 0) & (p < self.pc.max_power), out, 0.0)
        return out if out.ndim else float(out)

    def moment(self) -> float:
        """``E[P**(2/alpha)]`` from the closed forms of each cell model."""
        if isinstance(self.link, HexLinkLaw):
            return hex_power_moment(self.pc, self.link.spacing)
        return ppp_power_moment(self.pc, self.link.intensity)

    def truncated_moment(self, t):
        """``E[P**(2/alpha); P >= t]``, atom included when ``t <= P_M``."""
        t = np.asarray(t, dtype=float)
        a = self.alpha
        r_m = self.pc.full_power_radius
        top = min(r_m, self.link.support_max)
        x_t = np.minimum(self._link_length(np.maximum(t, 0.0)), top)
        cont = self.pc.ratio ** (2 / a) * (self.link.partial_m2(top) - self.link.partial_m2(x_t))
        atom = self.atom * self.pc.max_power ** (2 / a) if self.atom > 0 else 0.0
        out = np.where(t <= self.pc.max_power, cont + atom, 0.0)
        return out if out.ndim else float(out)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return transmit_power(self.link.sample(rng, size), self.pc)


class PointMassPower:
    """Every node transmits the same power."""

    def __init__(self, power: float, alpha: float = 4.0):
        if not power > 0:
            raise ValueError("power must be positive")
        if not alpha > 2:
            raise ValueError("path-loss exponent must exceed 2")
        self.power = power
        self.alpha = alpha

    def __repr__(self):
        return f"PointMassPower({self.power!r}, alpha={self.alpha!r})"

    @property
    def max_power(self) -> float:
        return self.power

    atom = 1.0

    def cdf(self, p):
        out = np.where(np.asarray(p, dtype=float) >= self.power, 1.0, 0.0)
        return out if out.ndim else float(out)

    def pdf(self, p):
        out = np.zeros_like(np.asarray(p, dtype=float))
        return out if out.ndim else float(out)

    def moment(self) -> float:
        return self.power ** (2 / self.alpha)

    def truncated_moment(self, t):
        out = np.where(np.asarray(t, dtype=float) <= self.power, self.moment(), 0.0)
        return out if out.ndim else float(out)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, self.power)


def truncated_power_moment(dist, t):
    """``int_t^inf f_P(x) x**(2/alpha) dx`` including any atom at or above ``t``."""
    return dist.truncated_moment(t)


def power_cdf(dist, p):
    return dist.cdf(p)


def power_sample(dist, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    return dist.sample(rng, size)
