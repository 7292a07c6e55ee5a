"""Large-array limits of the uplink MMSE SINR and mean spectral efficiency.

The normalized SINR ``beta = SINR / N**(alpha/2)`` converges to the root of a
scalar fixed-point equation driven by the transmit-power law. The closed
forms below follow from it when the interferer-to-antenna ratio is large and
noise is negligible, and from averaging over the link-length law of each
cell model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError
from .geometry import SQRT3, hex_link_cdf, hex_link_pdf, hex_spacing, ppp_link_pdf
from .powerctl import PowerControl, hex_power_moment, ppp_power_moment
from .quadrature import quadrature, quadrature_singular

# 1 / ((5/36) * (2/sqrt(3)) * pi): turns E[r^2] pi rho_w into rho_w / rho_h
HEX_DENSITY_GAIN = 18 * SQRT3 / (5 * math.pi)

FORMS = ("consistent", "literal")


def g_alpha(alpha: float) -> float:
    """``[(alpha / 2 pi) sin(2 pi / alpha)]**(alpha/2)``."""
    if not alpha > 2:
        raise ValueError("path-loss exponent must exceed 2")
    return (alpha / (2 * math.pi) * math.sin(2 * math.pi / alpha)) ** (alpha / 2)


def noise_to_sigma2(noise: float, n_antennas: int, alpha: float) -> float:
    """Constant ``sigma^2`` whose N-scaled noise equals the physical ``noise`` at this N."""
    return noise * n_antennas ** (alpha / 2 - 1)


def se_from_beta(beta: float, n_antennas, alpha: float):
    return np.log2(1 + np.asarray(n_antennas, dtype=float) ** (alpha / 2) * beta)


@dataclass(frozen=True)
class AsymptoticParams:
    alpha: float
    rho_w: float
    c: float          # interferers per antenna
    sigma2: float     # N-normalized noise constant
    gain: float       # G_t
    r1: float         # representative link length
    p1: float         # representative transmit power
    dist: object      # PowerDistribution or PointMassPower

    def __post_init__(self):
        if not self.alpha > 2:
            raise ValueError("path-loss exponent must exceed 2")
        for name in ("rho_w", "c", "gain", "r1", "p1"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be non-negative")

    @property
    def b(self) -> float:
        return (math.pi * self.rho_w / self.c) ** (self.alpha / 2)


def _truncation_integral(params: AsymptoticParams, m: float, gain: float) -> float:
    """``int_0^inf tau^(-2/a) / (1 + m tau) T(tau / b) dtau`` with ``T`` the
    upper-truncated moment of ``gain * P``, i.e. ``gain^(2/a) T_P(s / gain)``."""
    a = params.alpha
    dist = params.dist
    b = params.b
    scale = gain ** (2 / a)

    p_top = dist.max_power
    if math.isinf(p_top):
        # moment tail below 1e-15 of the total beyond this link length
        link = dist.link
        r_cut = math.sqrt(40.0 / (math.pi * link.intensity))
        p_top = dist.pc.ratio * r_cut ** a
    tau_top = b * gain * p_top
    if tau_top <= 0:
        return 0.0

    points = []
    link = getattr(dist, "link", None)
    if link is not None and hasattr(link, "spacing"):
        p_knee = dist.pc.ratio * (link.spacing / 2) ** a
        if p_knee < p_top:
            points.append(b * gain * p_knee)

    def integrand(tau):
        return scale * dist.truncated_moment(tau / (b * gain)) * tau ** (-2 / a) / (1 + m * tau)

    bound = scale * dist.moment() * tau_top ** (1 - 2 / a) / (1 - 2 / a)
    return quadrature_singular(integrand, 0.0, tau_top, 2 / a, tol=1e-13 * bound,
                               points=tuple(points))


def fixed_point_residual(beta: float, params: AsymptoticParams, form: str = "consistent") -> float:
    """Relative residual ``(LHS - RHS) / RHS`` of the fixed-point equation at ``beta``.

    ``form="literal"`` evaluates the equation verbatim, with ``P_1`` in
    physical units. ``form="consistent"`` re-derives it from the underlying
    Stieltjes-transform fixed point with the received-power law of
    ``G_t * P``; the two agree when ``P_1 = 1`` and the truncation term is
    negligible.
    """
    a = params.alpha
    csc = 1.0 / math.sin(2 * math.pi / a)
    e_p = params.dist.moment()
    if form == "consistent":
        p_bar = params.gain * params.p1 * params.r1 ** -a
        m = beta / p_bar
        first = 2 * math.pi ** 2 * params.rho_w / a * csc * params.gain ** (2 / a) * e_p * m ** (2 / a)
        trunc = 0.0
        if beta > 0:
            trunc = 2 * math.pi * params.rho_w * m / a * _truncation_integral(params, m, params.gain)
        return first - trunc + params.sigma2 * m - 1.0
    if form == "literal":
        p1, r1 = params.p1, params.r1
        rhs = p1 ** (a / 2) / (2 * params.rho_w * math.pi * r1 ** 2)
        first = e_p * beta ** (2 / a) * (math.pi / a) * csc
        trunc = 0.0
        if beta > 0:
            trunc = (2 * math.pi * params.rho_w * beta * r1 ** (a - 2) / (p1 ** (a / 2) * a)
                     * _truncation_integral(params, beta, 1.0))
        noise = beta * r1 ** (a - 2) * params.sigma2 / (
            2 * params.gain * params.rho_w * math.pi * p1 ** (1 - a / 2))
        return (first - trunc + noise - rhs) / rhs
    raise ValueError(f"unknown form {form!r}; expected one of {FORMS}")


def solve_fixed_point(params: AsymptoticParams, form: str = "consistent") -> float:
    """Limiting normalized SINR ``beta``.

    Brackets the root starting from the interference-limited closed form and
    doubling until the residual changes sign, then runs Brent's method.

    Raises:
        BracketError: if 64 doublings never produce a sign change.
    """
    seed = sinr_approx(1, params.r1, params.p1, params.dist, params.rho_w, params.alpha)
    lo, hi = 0.0, seed
    f_hi = fixed_point_residual(hi, params, form)
    for _ in range(64):
        if f_hi > 0:
            break
        lo, hi = hi, 2 * hi
        f_hi = fixed_point_residual(hi, params, form)
    else:
        raise BracketError("no sign change after 64 bracket expansions")
    if f_hi == 0:
        return hi
    return brentq(fixed_point_residual, lo, hi, args=(params, form),
                  xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)


def sinr_approx(n_antennas, r1: float, p1: float, dist, rho_w: float, alpha: float):
    """Interference-limited large-N SINR of a link of length ``r1`` and power ``p1``."""
    n = np.asarray(n_antennas, dtype=float)
    out = p1 * g_alpha(alpha) * (n / (dist.moment() * math.pi * rho_w * r1 ** 2)) ** (alpha / 2)
    return out if out.ndim else float(out)


def mean_se_hex_sufficient(n_antennas, d: float, rho_w: float, alpha: float):
    """Mean SE for hexagonal cells when every node reaches its target power."""
    n = np.asarray(n_antennas, dtype=float)
    out = np.log2(1 + g_alpha(alpha) * (n / (5.0 / 36.0 * d * d * math.pi * rho_w)) ** (alpha / 2))
    return out if out.ndim else float(out)


def mean_se_hex_density(n_antennas, rho_h: float, rho_w: float, alpha: float,
                        coefficient: float = HEX_DENSITY_GAIN):
    """The sufficient-power hexagonal mean SE written with base-station density.

    ``coefficient`` defaults to the exact constant (about 1.985); pass 1.95
    to reproduce the commonly quoted rounded form.
    """
    n = np.asarray(n_antennas, dtype=float)
    out = np.log2(1 + g_alpha(alpha) * (coefficient * n * rho_h / rho_w) ** (alpha / 2))
    return out if out.ndim else float(out)


def _log_gain(n_antennas: float, moment: float, rho_w: float, alpha: float) -> float:
    return g_alpha(alpha) * (n_antennas / (moment * math.pi * rho_w)) ** (alpha / 2)


def mean_se_hex_insufficient(n_antennas, d: float, rho_w: float, pc: PowerControl,
                             tol: float = 1e-8):
    """Mean SE for hexagonal cells with a transmit-power cap.

    Falls back to the sufficient-power closed form when the cap is never hit.
    """
    if np.ndim(n_antennas):
        return np.array([mean_se_hex_insufficient(n, d, rho_w, pc, tol) for n in n_antennas])
    a = pc.alpha
    r_m = pc.full_power_radius
    x_max = SQRT3 * d / 3
    if r_m >= x_max:
        return mean_se_hex_sufficient(n_antennas, d, rho_w, a)
    k = _log_gain(n_antennas, hex_power_moment(pc, d), rho_w, a)
    head = hex_link_cdf(r_m, d) * math.log2(1 + pc.ratio * k)
    pm = pc.max_power

    def integrand(x):
        return np.log2(1 + pm * k * x ** -a) * hex_link_pdf(x, d)

    tail = quadrature(integrand, r_m, x_max, tol, points=(d / 2,))
    return head + tail


def mean_se_hex(n_antennas, d: float, rho_w: float, pc: PowerControl):
    return mean_se_hex_insufficient(n_antennas, d, rho_w, pc)


def _rayleigh_cutoff(intensity: float, rel: float = 1e-12) -> float:
    """Radius beyond the mode where the Rayleigh weight drops to ``rel`` of its peak."""
    mode = 1 / math.sqrt(2 * math.pi * intensity)
    target = math.log(rel) + math.log(mode) - 0.5

    def f(r):
        return math.log(r) - math.pi * intensity * r * r - target

    hi = 2 * mode
    while f(hi) > 0:
        hi *= 2
    return brentq(f, mode, hi, xtol=1e-12 * mode)


def mean_se_ppp(n_antennas, rho_t: float, rho_w: float, pc: PowerControl, tol: float = 1e-10):
    """Mean SE for Poisson-Voronoi cells; exact ratio form when power is unlimited."""
    a = pc.alpha
    if math.isinf(pc.max_power):
        n = np.asarray(n_antennas, dtype=float)
        out = np.log2(1 + g_alpha(a) * (n * rho_t / rho_w) ** (a / 2))
        return out if out.ndim else float(out)
    if np.ndim(n_antennas):
        return np.array([mean_se_ppp(n, rho_t, rho_w, pc, tol) for n in n_antennas])
    r_m = pc.full_power_radius
    k = _log_gain(n_antennas, ppp_power_moment(pc, rho_t), rho_w, a)
    head = -math.expm1(-math.pi * rho_t * r_m ** 2) * math.log2(1 + pc.ratio * k)
    r_cut = _rayleigh_cutoff(rho_t)
    if r_m >= r_cut:
        return head
    pm = pc.max_power

    def integrand(r):
        return np.log2(1 + pm * k * r ** -a) * ppp_link_pdf(r, rho_t)

    return head + quadrature(integrand, r_m, r_cut, tol)


def compare_hex_ppp(n_antennas, rel_density: float, rho_w: float, pc: PowerControl):
    """Hexagonal and random-cell mean SE at the same base-station density.

    Returns ``(hex, ppp, hex / ppp)``.
    """
    rho = rel_density * rho_w
    hex_se = mean_se_hex(n_antennas, hex_spacing(rho), rho_w, pc)
    ppp_se = mean_se_ppp(n_antennas, rho, rho_w, pc)
    return hex_se, ppp_se, np.asarray(hex_se) / np.asarray(ppp_se)
