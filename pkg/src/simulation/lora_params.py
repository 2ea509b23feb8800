"""
LoRa protocol constants and spreading-factor assignment.

Holds the per-SF characteristics of a 25-byte packet at 125 kHz, the SIR
collision thresholds between spreading factors, the ALOHA duty cycle of
each SF and the distance rings that decide which SF an ED uses.
"""

import math
import numpy as np
import numpy.typing as npt

from ..schemas.lora_schemas import MAX_SF, MIN_SF, NUM_SF, SfBoundaries, SfRow, SirMatrix
from ..schemas.sim_schemas import SimConfig
from . import channel
from .errors import ConfigurationError, InvalidArgumentError

PACKET_BYTES = 25
PACKET_BITS = PACKET_BYTES * 8
SECONDS_PER_HOUR = 3600.0

SF_TABLE = (
    SfRow(sf=7, bitrate_kbps=5.47, airtime_ms=36.6, tx_per_hour=98, sensitivity_dbm=-123.0, snr_threshold_db=-6.0),
    SfRow(sf=8, bitrate_kbps=3.13, airtime_ms=64.0, tx_per_hour=56, sensitivity_dbm=-126.0, snr_threshold_db=-9.0),
    SfRow(sf=9, bitrate_kbps=1.76, airtime_ms=113.0, tx_per_hour=31, sensitivity_dbm=-129.0, snr_threshold_db=-12.0),
    SfRow(sf=10, bitrate_kbps=0.98, airtime_ms=204.0, tx_per_hour=17, sensitivity_dbm=-132.0, snr_threshold_db=-15.0),
    SfRow(sf=11, bitrate_kbps=0.54, airtime_ms=372.0, tx_per_hour=9, sensitivity_dbm=-134.5, snr_threshold_db=-17.5),
    SfRow(sf=12, bitrate_kbps=0.29, airtime_ms=682.0, tx_per_hour=5, sensitivity_dbm=-137.0, snr_threshold_db=-20.0),
)

SIR_MATRIX = SirMatrix(thresholds_db=(
    (1, -8, -9, -9, -9, -9),
    (-11, 1, -11, -12, -13, -13),
    (-15, -13, 1, -13, -14, -15),
    (-19, -18, -17, 1, -17, -18),
    (-22, -22, -21, -20, 1, -20),
    (-25, -25, -25, -24, -23, 1),
))

SPREADING_FACTORS = tuple(range(MIN_SF, MAX_SF + 1))


def _check_sf(sf: int) -> int:
    if isinstance(sf, bool) or not isinstance(sf, (int, np.integer)) or not MIN_SF <= sf <= MAX_SF:
        raise InvalidArgumentError(f"spreading factor must be an integer in {MIN_SF}..{MAX_SF}, got {sf!r}")
    return int(sf)


def sf_row(sf: int) -> SfRow:
    return SF_TABLE[_check_sf(sf) - MIN_SF]


def snr_threshold_db(sf: int) -> float:
    """Demodulation SNR threshold q_SF in dB."""
    return sf_row(sf).snr_threshold_db


def snr_threshold_linear(sf: int) -> float:
    return 10.0 ** (snr_threshold_db(sf) / 10.0)


def sir_threshold(sf_tagged: int, sf_interferer: int, matrix: SirMatrix = SIR_MATRIX) -> float:
    """
    Linear SIR the wanted signal needs over one interferer class.

    Args:
        sf_tagged (int): SF of the wanted signal (matrix row)
        sf_interferer (int): SF of the interfering transmissions (matrix column)
        matrix (SirMatrix): Threshold table in dB

    Returns:
        float: 10^(dB/10) of the table entry
    """
    return 10.0 ** (matrix.db(_check_sf(sf_tagged), _check_sf(sf_interferer)) / 10.0)


def duty_cycle(sf: int) -> float:
    """Probability that an ED using `sf` is transmitting at a random instant."""
    row = sf_row(sf)
    return row.tx_per_hour * (row.airtime_ms / 1000.0) / SECONDS_PER_HOUR


# Indexed by sf - MIN_SF
DUTY_CYCLES = np.array([duty_cycle(sf) for sf in SPREADING_FACTORS])


def symbol_time(sf: int, bandwidth_hz: float) -> float:
    """Chirp symbol duration 2^SF / BW in seconds."""
    if not bandwidth_hz > 0:
        raise InvalidArgumentError(f"bandwidth must be positive, got {bandwidth_hz}")
    return 2.0 ** _check_sf(sf) / bandwidth_hz


def compute_sf_boundaries(tx_power_dbm: float,
                          noise_dbm: float,
                          wavelength_km: float,
                          eta: float) -> SfBoundaries:
    """
    Derive the SF ring radii from the link budget.

    Boundary d_k (k >= 1) is where the mean received SNR with unit fading,
    ε·(λ/4πd)^η / N, equals the threshold of SF 6+k. The equation has the
    closed-form solution d = (λ/4π)·(ε/(q·N))^(1/η).

    Args:
        tx_power_dbm (float): Transmit power ε
        noise_dbm (float): Noise power N
        wavelength_km (float): Carrier wavelength λ
        eta (float): Path-loss exponent, at least 2

    Returns:
        SfBoundaries: d0 = 0 followed by the six ring edges

    Raises:
        InvalidArgumentError: If eta < 2 or the wavelength is not positive
        ConfigurationError: If a boundary is not finite
    """
    if not eta >= 2:
        raise InvalidArgumentError(f"path-loss exponent must be >= 2, got {eta}")
    if not wavelength_km > 0:
        raise InvalidArgumentError(f"wavelength must be positive, got {wavelength_km}")

    radii = [0.0]
    for sf in SPREADING_FACTORS:
        # Solve in the dB domain to keep the exponent well conditioned
        margin_db = tx_power_dbm - noise_dbm - snr_threshold_db(sf)
        d = wavelength_km / (4.0 * math.pi) * 10.0 ** (margin_db / (10.0 * eta))
        if not math.isfinite(d) or d <= 0:
            raise ConfigurationError(f"SF{sf} boundary is not finite ({d})", key='sf_boundaries')
        radii.append(d)
    return SfBoundaries(d=tuple(radii))


def resolve_sf_boundaries(config: SimConfig) -> SfBoundaries:
    """Explicit `sf_boundaries` from the config, else boundaries derived from its link budget."""
    if config.sf_boundaries is not None:
        return SfBoundaries(d=config.sf_boundaries)

    return compute_sf_boundaries(
        config.tx_power_dbm,
        channel.noise_dbm(config.bandwidth_hz, config.noise_figure_db),
        config.wavelength_km,
        config.eta,
    )


def sf_for_distance(d: float, boundaries: SfBoundaries) -> int:
    """
    SF used by an ED at distance `d` km from its nearest gateway.

    Rings are lower-inclusive; every ED at or beyond d6 keeps SF12.
    """
    if not d >= 0:
        raise InvalidArgumentError(f"distance must be non-negative, got {d}")
    k = int(np.searchsorted(boundaries.d[1:], d, side='right'))
    return MIN_SF + min(k, NUM_SF - 1)


def sf_for_distances(d: npt.ArrayLike, boundaries: SfBoundaries) -> npt.NDArray[np.int64]:
    """Vectorised sf_for_distance."""
    d = np.asarray(d, dtype=float)
    if np.any(~(d >= 0)):
        raise InvalidArgumentError("distances must be non-negative")
    k = np.searchsorted(np.asarray(boundaries.d[1:]), d, side='right')
    return (MIN_SF + np.minimum(k, NUM_SF - 1)).astype(np.int64)


def tx_per_hour(sf: int) -> int:
    return sf_row(sf).tx_per_hour
