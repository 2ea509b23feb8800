"""
Link-level channel model: thermal noise, Friis path gain, fading samplers
and closed-form connection probabilities.

All arithmetic inside the functions is linear (mW, ratios); dB values are
converted only at the interfaces through db_to_linear / linear_to_db.
"""

import math
from typing import Optional, Tuple, Union

import numpy as np
import numpy.typing as npt
from scipy import special, stats

from ..schemas.sim_schemas import FadingKind, FadingModel, LinkBudget
from .errors import InvalidArgumentError
from .geometry import MIN_DISTANCE_KM

THERMAL_NOISE_DBM_HZ = -174.0
MARCUM_TOLERANCE = 1e-12

FloatOrArray = Union[float, npt.NDArray[np.float64]]


def db_to_linear(value_db: FloatOrArray) -> FloatOrArray:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: FloatOrArray) -> FloatOrArray:
    return 10.0 * np.log10(value)


def noise_dbm(bandwidth_hz: float, noise_figure_db: float) -> float:
    """
    Receiver noise power: -174 dBm/Hz + 10·log10(BW) + NF.

    Raises:
        InvalidArgumentError: If the bandwidth is not positive
    """
    if not bandwidth_hz > 0:
        raise InvalidArgumentError(f"bandwidth must be positive, got {bandwidth_hz}")
    return THERMAL_NOISE_DBM_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db


def noise_mw(budget: LinkBudget) -> float:
    return db_to_linear(noise_dbm(budget.bandwidth_hz, budget.noise_figure_db))


def tx_mw(budget: LinkBudget) -> float:
    return db_to_linear(budget.tx_power_dbm)


def path_gain(d: FloatOrArray, wavelength_km: float, eta: float) -> FloatOrArray:
    """
    Friis attenuation (λ / 4πd)^η, strictly decreasing in d.

    Raises:
        InvalidArgumentError: If any distance is below the 1 m clamp, the
            wavelength is not positive or eta < 2
    """
    if not wavelength_km > 0:
        raise InvalidArgumentError(f"wavelength must be positive, got {wavelength_km}")
    if not eta >= 2:
        raise InvalidArgumentError(f"path-loss exponent must be >= 2, got {eta}")
    d_arr = np.asarray(d, dtype=float)
    if np.any(~(d_arr >= MIN_DISTANCE_KM)):
        raise InvalidArgumentError(f"distance must be clamped to >= {MIN_DISTANCE_KM} km first")
    gain = (wavelength_km / (4.0 * math.pi * d_arr)) ** eta
    return float(gain) if gain.ndim == 0 else gain


def mean_snr(d: FloatOrArray, budget: LinkBudget) -> FloatOrArray:
    """SNR with unit fading gain at distance d."""
    return tx_mw(budget) * path_gain(d, budget.wavelength_km, budget.eta) / noise_mw(budget)


def sample_power_gain(model: FadingModel,
                      rng: np.random.Generator,
                      size: Optional[Union[int, Tuple[int, ...]]] = None) -> FloatOrArray:
    """
    Draw unit-mean power gains |h|^2.

    Rayleigh gains are exponential with mean 1. Rician gains are
    (ν + X)² + Y² with ν² = K/(K+1) and X, Y ~ N(0, σ²), 2σ² = 1/(K+1).

    Args:
        model (FadingModel): Fading distribution
        rng (np.random.Generator): Caller-owned random stream
        size: None for a single float, else the output shape

    Returns:
        A float when size is None, else an array of the requested shape
    """
    if model.kind == FadingKind.RAYLEIGH:
        gain = rng.exponential(1.0, size)
    else:
        k = model.k_factor
        nu = math.sqrt(k / (k + 1.0))
        sigma = math.sqrt(0.5 / (k + 1.0))
        x = rng.normal(0.0, sigma, size)
        y = rng.normal(0.0, sigma, size)
        gain = (nu + x) ** 2 + y ** 2
    return float(gain) if size is None else np.asarray(gain, dtype=float)


def marcum_q1(a: float, b: float, tolerance: float = MARCUM_TOLERANCE) -> float:
    """
    First-order Marcum Q function Q1(a, b) = P[noncentral-χ²(2, a²) > b²].

    Summed as a Poisson mixture of central χ² tails,
    Q1(a, b) = Σ_n Pois(n; a²/2) · Γ_upper(n + 1, b²/2) / n!,
    keeping only the Poisson window whose excluded mass is below `tolerance`.
    Every term lies in [0, 1], so the truncation error is bounded by that mass.

    Raises:
        InvalidArgumentError: If a or b is negative or not finite
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidArgumentError(f"Marcum Q arguments must be finite, got ({a}, {b})")
    if a < 0 or b < 0:
        raise InvalidArgumentError(f"Marcum Q arguments must be non-negative, got ({a}, {b})")
    if b == 0:
        return 1.0

    half_x = 0.5 * b * b
    if a == 0:
        return math.exp(-half_x)

    mu = 0.5 * a * a
    lo = int(stats.poisson.ppf(0.5 * tolerance, mu))
    hi = int(stats.poisson.isf(0.5 * tolerance, mu)) + 1
    n = np.arange(max(lo, 0), hi + 1)
    weights = stats.poisson.pmf(n, mu)
    tails = special.gammaincc(n + 1, half_x)
    return float(min(1.0, np.sum(weights * tails)))


def analytic_conn_prob(model: FadingModel, d: float, q_linear: float, budget: LinkBudget) -> float:
    """
    Closed-form P[SNR >= q] at distance d.

    With t = q·N / (ε·g(d)): Rayleigh gives exp(-t), Rician(K) gives
    Q1(√(2K), √(2(K+1)·t)).
    """
    if not q_linear > 0:
        raise InvalidArgumentError(f"threshold must be positive, got {q_linear}")
    t = q_linear / mean_snr(d, budget)
    if model.kind == FadingKind.RAYLEIGH:
        return math.exp(-t)
    k = model.k_factor
    return marcum_q1(math.sqrt(2.0 * k), math.sqrt(2.0 * (k + 1.0) * t))
