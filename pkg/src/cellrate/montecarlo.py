"""Full-network uplink trials for hexagonal and Poisson-Voronoi cells.

Each trial scatters ``n_nodes`` wireless nodes on a disk sized for the
target density, attaches every node to its nearest base station with
distance-based power control, picks a random node of the cell at the origin
as the representative link and evaluates its MMSE SINR against all other
nodes, for each antenna count on the same layout and fading draw.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import streams
from .geometry import (BaseStationIndex, HexLayout, PppLayout, disk_radius, hex_lattice,
                       hex_spacing, sample_ppp_disk, sample_uniform_disk)
from .mmse import generate_channel, mmse_sinr, received_powers, sinr_from, spectral_efficiency
from .powerctl import PowerControl, transmit_power

LAYOUTS = ("hex", "ppp")
DEFAULT_TRIALS = {"hex": 5000, "ppp": 1000}
MAX_REDRAWS = 1000


@dataclass(frozen=True)
class ExperimentConfig:
    layout: str
    rho_w: float
    rel_density: float
    pc: PowerControl
    noise: float
    n_antennas: tuple[int, ...] = (1, 2, 4, 8, 16)
    n_nodes: int = 4000
    trials: int | None = None
    seed: int = 0
    fixed_power: float | None = None   # every node transmits this, ignoring pc
    hex_margin: float = 2.0            # lattice extent = R + hex_margin * d
    ppp_radius_factor: float = 8.0     # base stations cover radius factor * R

    def __post_init__(self):
        if self.layout not in LAYOUTS:
            raise ValueError(f"layout must be one of {LAYOUTS}, got {self.layout!r}")
        if self.n_nodes < 1:
            raise ValueError("n_nodes must be at least 1")
        if self.trials is not None and self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not (self.rho_w > 0 and self.rel_density > 0):
            raise ValueError("densities must be positive")
        if not self.noise > 0:
            raise ValueError("noise power must be positive")
        if not self.n_antennas or min(self.n_antennas) < 1:
            raise ValueError("antenna counts must be positive")

    @property
    def n_trials(self) -> int:
        return self.trials if self.trials is not None else DEFAULT_TRIALS[self.layout]

    @property
    def radius(self) -> float:
        return disk_radius(self.n_nodes, self.rho_w)

    @property
    def bs_density(self) -> float:
        return self.rel_density * self.rho_w

    @property
    def spacing(self) -> float:
        return hex_spacing(self.bs_density)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    n_antennas: int
    sinr: float
    se: float
    r1: float
    p1: float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[TrialRecord]
    redraws: int = 0
    full_power_fraction: float = 0.0

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def by_antennas(self, n_antennas: int) -> list[TrialRecord]:
        return [r for r in self.records if r.n_antennas == n_antennas]

    def se(self, n_antennas: int) -> np.ndarray:
        return np.array([r.se for r in self.records if r.n_antennas == n_antennas])


@dataclass
class SeStats:
    mean: float
    stderr: float
    count: int
    outage: dict[float, float] = field(default_factory=dict)


@dataclass
class _Layout:
    nodes: np.ndarray
    link: np.ndarray     # distance of each node to its own base station
    rep: int
    redraws: int


def thread_count(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get("CELLRATE_THREADS", os.cpu_count() or 1))
    return max(1, threads)


def _node_powers(cfg: ExperimentConfig, link: np.ndarray) -> np.ndarray:
    if cfg.fixed_power is not None:
        return np.full(len(link), float(cfg.fixed_power))
    return transmit_power(link, cfg.pc)


def _hex_index(cfg: ExperimentConfig) -> BaseStationIndex:
    d = cfg.spacing
    return BaseStationIndex(hex_lattice(HexLayout(d, cfg.radius + cfg.hex_margin * d)))


def _hex_layout(cfg: ExperimentConfig, trial: int, index: BaseStationIndex) -> _Layout:
    rng = streams.stream(cfg.seed, trial, streams.GEOMETRY)
    for redraws in range(MAX_REDRAWS):
        nodes = sample_uniform_disk(cfg.n_nodes, cfg.radius, rng)
        owner, link = index.query(nodes)
        members = np.flatnonzero(owner == 0)
        if len(members):
            return _Layout(nodes, link, int(members[rng.integers(len(members))]), redraws)
    raise RuntimeError(f"center cell empty in {MAX_REDRAWS} consecutive draws")


def _ppp_layout(cfg: ExperimentConfig, trial: int, index=None) -> _Layout:
    rng = streams.stream(cfg.seed, trial, streams.GEOMETRY)
    radius = cfg.radius
    for redraws in range(MAX_REDRAWS):
        bases = sample_ppp_disk(PppLayout(cfg.bs_density, cfg.ppp_radius_factor * radius), rng)
        if len(bases) == 0:
            continue
        # the cell covering the original center becomes the origin cell
        center = int(np.argmin(np.hypot(bases[:, 0], bases[:, 1])))
        bases = bases - bases[center]
        nodes = sample_uniform_disk(cfg.n_nodes, radius, rng)
        owner, link = BaseStationIndex(bases).query(nodes)
        members = np.flatnonzero(owner == center)
        if len(members):
            return _Layout(nodes, link, int(members[rng.integers(len(members))]), redraws)
    raise RuntimeError(f"no usable PPP layout in {MAX_REDRAWS} consecutive draws")


def _run_trial(cfg: ExperimentConfig, trial: int, draw, index):
    lay = draw(cfg, trial, index)
    tx = _node_powers(cfg, lay.link)
    rng = streams.stream(cfg.seed, trial, streams.FADING)
    ch = generate_channel(lay.nodes, tx, lay.rep, max(cfg.n_antennas), cfg.pc.gain,
                          cfg.pc.alpha, cfg.noise, rng)
    r1 = float(lay.link[lay.rep])
    p1 = float(tx[lay.rep])
    records = []
    for n in cfg.n_antennas:
        sinr = mmse_sinr(ch.sliced(n))
        records.append(TrialRecord(trial, n, sinr, spectral_efficiency(sinr), r1, p1))
    others = np.arange(len(tx)) != lay.rep
    at_cap = int(np.count_nonzero(tx[others] >= cfg.pc.max_power))
    return records, lay.redraws, at_cap, int(others.sum())


def run_experiment(cfg: ExperimentConfig, threads: int | None = None) -> ExperimentResult:
    """Run ``cfg.n_trials`` independent trials; output order is by trial index."""
    if cfg.layout == "hex":
        draw, index = _hex_layout, _hex_index(cfg)
    else:
        draw, index = _ppp_layout, None
    workers = min(thread_count(threads), cfg.n_trials)

    def one(trial):
        return _run_trial(cfg, trial, draw, index)

    if workers == 1:
        outputs = [one(t) for t in range(cfg.n_trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(one, range(cfg.n_trials)))
    records = [rec for out in outputs for rec in out[0]]
    redraws = sum(out[1] for out in outputs)
    at_cap = sum(out[2] for out in outputs)
    total = sum(out[3] for out in outputs)
    return ExperimentResult(cfg, records, redraws, at_cap / total if total else 0.0)


def run_hex_experiment(cfg: ExperimentConfig, threads: int | None = None) -> ExperimentResult:
    if cfg.layout != "hex":
        raise ValueError("config layout is not hex")
    return run_experiment(cfg, threads)


def run_ppp_experiment(cfg: ExperimentConfig, threads: int | None = None) -> ExperimentResult:
    if cfg.layout != "ppp":
        raise ValueError("config layout is not ppp")
    return run_experiment(cfg, threads)


def outage_quantile(sorted_values: np.ndarray, p_outage: float) -> float:
    """Nearest-rank lower quantile: at least ``1 - p_outage`` of samples are >= it."""
    t = len(sorted_values)
    rank = max(1, math.ceil(p_outage * t - 1e-9))
    return float(sorted_values[min(rank, t) - 1])


def aggregate(records, outage_probs=(0.05, 0.25, 0.5)) -> SeStats:
    """Mean, standard error and outage SE of a batch of trials.

    ``records`` may hold ``TrialRecord`` objects or bare SE values.
    """
    values = np.array([getattr(r, "se", r) for r in records], dtype=float)
    if values.size == 0:
        raise ValueError("cannot aggregate an empty record set")
    ordered = np.sort(values)
    stderr = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    outage = {p: outage_quantile(ordered, p) for p in outage_probs}
    return SeStats(float(values.mean()), stderr, int(values.size), outage)


def summarize(result: ExperimentResult, outage_probs=(0.05, 0.25, 0.5)) -> dict[int, SeStats]:
    return {n: aggregate(result.by_antennas(n), outage_probs) for n in result.config.n_antennas}


def correlation(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation, defined as 0 when either sample has no spread."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sx = x.std()
    sy = y.std()
    if sx == 0 or sy == 0:
        return 0.0
    return float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy))


def independence_diagnostic(cfg: ExperimentConfig, trials: int | None = None) -> float:
    """Correlation between interferer transmit power and distance to the receiver.

    Pools every interferer over the trials; replays the geometry streams only,
    so running it leaves experiment results untouched.
    """
    if cfg.layout == "hex":
        draw, index = _hex_layout, _hex_index(cfg)
    else:
        draw, index = _ppp_layout, None
    powers, dists = [], []
    for trial in range(trials if trials is not None else cfg.n_trials):
        lay = draw(cfg, trial, index)
        keep = np.arange(len(lay.link)) != lay.rep
        powers.append(_node_powers(cfg, lay.link)[keep])
        dists.append(np.hypot(lay.nodes[keep, 0], lay.nodes[keep, 1]))
    return correlation(np.concatenate(powers), np.concatenate(dists))


def run_fixed_link_experiment(n_antennas: int, c: float, rho_w: float, r1: float, p1: float,
                              dist, gain: float, alpha: float, noise: float, trials: int,
                              seed: int = 0) -> np.ndarray:
    """SINR of a fixed-length link amid ``c * N`` interferers with IID powers from ``dist``.

    Interferers are uniform on a disk holding them at density ``rho_w``; this
    is the setting of the large-system fixed point, without any cells.
    """
    n = int(round(c * n_antennas))
    radius = disk_radius(n, rho_w)
    out = np.empty(trials)
    for t in range(trials):
        geo = streams.stream(seed, t, streams.GEOMETRY)
        pos = sample_uniform_disk(n, radius, geo)
        p = received_powers(pos, dist.sample(geo, n), gain, alpha)
        g = streams.complex_gaussian(streams.stream(seed, t, streams.FADING), (n_antennas, n + 1))
        h = math.sqrt(gain * p1 * r1 ** -alpha) * g[:, 0]
        out[t] = sinr_from(h, g[:, 1:], p, noise)
    return out
