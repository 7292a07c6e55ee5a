"""Uplink spectral efficiency of multi-antenna base stations in cellular networks.

Large-array closed forms for hexagonal and Poisson-Voronoi cells with
distance-based power control, and a Monte-Carlo simulator to check them.
"""

from .asymptotic import (AsymptoticParams, compare_hex_ppp, fixed_point_residual, g_alpha,
                         mean_se_hex, mean_se_hex_density, mean_se_hex_insufficient,
                         mean_se_hex_sufficient, mean_se_ppp, sinr_approx, solve_fixed_point)
from .errors import BracketError, NumericalError, QuadratureError
from .geometry import (BaseStationIndex, DiskRegion, HexLayout, HexLinkLaw, PppLayout, PppLinkLaw,
                       hex_lattice, hex_link_cdf, hex_link_moment, hex_link_pdf,
                       nearest_base_station, sample_ppp_disk, sample_uniform_disk)
from .mmse import ChannelRealization, generate_channel, mmse_sinr, spectral_efficiency
from .montecarlo import (ExperimentConfig, ExperimentResult, TrialRecord, aggregate,
                         independence_diagnostic, run_experiment, run_hex_experiment,
                         run_ppp_experiment, summarize)
from .powerctl import (PointMassPower, PowerControl, PowerDistribution, hex_power_moment,
                       power_cdf, power_sample, ppp_power_moment, transmit_power,
                       truncated_power_moment)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticParams", "BaseStationIndex", "BracketError", "ChannelRealization", "DiskRegion",
    "ExperimentConfig", "ExperimentResult", "HexLayout", "HexLinkLaw", "NumericalError",
    "PointMassPower", "PowerControl", "PowerDistribution", "PppLayout", "PppLinkLaw",
    "QuadratureError", "TrialRecord", "aggregate", "compare_hex_ppp", "fixed_point_residual",
    "g_alpha", "generate_channel", "hex_lattice", "hex_link_cdf", "hex_link_moment",
    "hex_link_pdf", "hex_power_moment", "independence_diagnostic", "mean_se_hex",
    "mean_se_hex_density", "mean_se_hex_insufficient", "mean_se_hex_sufficient", "mean_se_ppp",
    "mmse_sinr", "nearest_base_station", "power_cdf", "power_sample", "ppp_power_moment",
    "run_experiment", "run_hex_experiment", "run_ppp_experiment", "sample_ppp_disk",
    "sample_uniform_disk", "sinr_approx", "solve_fixed_point", "spectral_efficiency",
    "summarize", "transmit_power", "truncated_power_moment",
]
