"""
Monte Carlo engine for the SNR condition (H1), the SIR condition (H2) and
the combined uplink success probability of a tagged end device.

A trial is split in two phases. `draw_trial` consumes the random streams
and records every draw in a `TrialDraws`; `evaluate_trial` is a pure
function of those draws. `run_trial` chains both.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
import numpy.typing as npt

from ..logging.logger import Logger
from ..schemas.lora_schemas import MIN_SF, NUM_SF, SfBoundaries, SirMatrix
from ..schemas.sim_schemas import (
    BinEstimate,
    CoverageEstimate,
    CurveEstimate,
    FadingModel,
    GatewayMode,
    InterferenceMode,
    LinkBudget,
    SimConfig,
    TrialOutcome,
)
from . import channel, geometry, lora_params
from .errors import InvalidArgumentError
from .geometry import Deployment, Points
from .lora_params import DUTY_CYCLES, SIR_MATRIX
from .streams import COVERAGE_BIN, TrialStreams, trial_streams

logger = Logger(__name__)

THROUGHPUT_FORMULA = "p_success * tx_per_hour(sf) * 200 bit / 3600 s"


@dataclass(frozen=True)
class NetworkRealization:
    """A deployment together with the SF every (non-tagged) ED uses."""
    deployment: Deployment
    ed_sfs: npt.NDArray[np.int64]


@dataclass(frozen=True)
class Interferers:
    """Transmitting EDs and their spreading factors."""
    points: Points
    sfs: npt.NDArray[np.int64]


@dataclass(frozen=True)
class TrialDraws:
    """
    Complete log of the random draws of one trial.

    Attributes:
        deployment: Gateways and non-tagged EDs; the tagged ED is at the origin.
            Only EDs whose activity uniform lies below the largest duty cycle
            are placed
        activity_u: One uniform per ED; ED k transmits iff u_k < duty_cycle(sf_k)
        ed_sfs: SF of every ED, from the distance to its nearest gateway
        tagged_gains: Tagged-link power gain towards every gateway, used for SNR
        tagged_gains_sir: Gains used for the SIR test (the same array unless
            independent_events is set)
        interferer_gains: (n_active, n_gateways) gains of every transmitting ED,
            rows in increasing ED index
    """
    deployment: Deployment
    activity_u: npt.NDArray[np.float64]
    ed_sfs: npt.NDArray[np.int64]
    tagged_gains: npt.NDArray[np.float64]
    tagged_gains_sir: npt.NDArray[np.float64]
    interferer_gains: npt.NDArray[np.float64]


@dataclass
class TrialCounts:
    """Additive trial tallies; merging chunks in any order gives the same totals."""
    trials: int = 0
    h1: int = 0
    h2: int = 0
    success: int = 0
    no_gateway: int = 0
    # Integer tallies per SF keep the throughput sum independent of chunking
    success_by_sf: List[int] = field(default_factory=lambda: [0] * NUM_SF)

    def add(self, outcome: TrialOutcome) -> None:
        self.trials += 1
        self.h1 += outcome.h1
        self.h2 += outcome.h2
        self.success += outcome.success
        self.no_gateway += outcome.no_gateway
        if outcome.success:
            self.success_by_sf[outcome.sf - MIN_SF] += 1

    def merge(self, other: 'TrialCounts') -> None:
        self.trials += other.trials
        self.h1 += other.h1
        self.h2 += other.h2
        self.success += other.success
        self.no_gateway += other.no_gateway
        self.success_by_sf = [a + b for a, b in zip(self.success_by_sf, other.success_by_sf)]

    def delivered_bps(self) -> float:
        return sum(
            n * throughput(sf, 1.0) for sf, n in zip(lora_params.SPREADING_FACTORS, self.success_by_sf)
        )


def snr_value(h2_gain: channel.FloatOrArray, d: channel.FloatOrArray, budget: LinkBudget) -> channel.FloatOrArray:
    """Instantaneous SNR ε·|h|²·g(d) / N."""
    return h2_gain * channel.mean_snr(d, budget)


def eval_h1(snr: float, sf: int) -> bool:
    """SNR condition, inclusive at the threshold."""
    return bool(snr >= lora_params.snr_threshold_linear(sf))


def assign_sfs(end_devices: Points, gateways: Points, boundaries: SfBoundaries) -> npt.NDArray[np.int64]:
    """SF of every ED from the distance to its nearest gateway."""
    _, d = geometry.nearest_distances(end_devices, gateways)
    return lora_params.sf_for_distances(d, boundaries)


def _transmitting(ed_sfs: npt.NDArray[np.int64], activity_u: npt.NDArray[np.float64]) -> npt.NDArray[np.bool_]:
    return activity_u < DUTY_CYCLES[ed_sfs - MIN_SF]


def draw_active_interferers(realization: NetworkRealization,
                            tagged_sf: int,
                            mode: InterferenceMode,
                            rng: np.random.Generator) -> Interferers:
    """
    Thin the EDs to those transmitting at the observation instant.

    Every ED draws one uniform, so the stream consumption does not depend on
    the mode. In co-SF mode only EDs sharing the tagged SF are returned.
    """
    eds = realization.deployment.end_devices
    active = _transmitting(realization.ed_sfs, rng.random(len(eds)))
    if mode == InterferenceMode.CO_SF:
        active &= realization.ed_sfs == tagged_sf
    return Interferers(points=eds[active], sfs=realization.ed_sfs[active])


def class_interference(points: Points,
                       sfs: npt.NDArray[np.int64],
                       gains: npt.NDArray[np.float64],
                       gateways: Points,
                       budget: LinkBudget) -> npt.NDArray[np.float64]:
    """
    Received interference per SF class at each gateway.

    Args:
        points: (n, 2) interferer positions
        sfs: (n,) interferer spreading factors
        gains: (n, m) power gains of the interferer-to-gateway links
        gateways: (m, 2) gateway positions

    Returns:
        (NUM_SF, m) array; row s - MIN_SF sums ε·|h_kj|²·g(d_kj) over interferers k using SF s
    """
    power = np.zeros((NUM_SF, len(gateways)))
    if len(points) == 0:
        return power
    d = geometry.pairwise_distances(points, gateways)
    received = channel.tx_mw(budget) * gains * channel.path_gain(d, budget.wavelength_km, budget.eta)
    np.add.at(power, sfs - MIN_SF, received)
    return power


def interference_power(active: Interferers,
                       gw: npt.ArrayLike,
                       fading: FadingModel,
                       budget: LinkBudget,
                       rng: np.random.Generator) -> npt.NDArray[np.float64]:
    """
    Interference per SF class at one gateway, with a fresh fading draw per interferer link.

    The sum runs over the interferer-to-gateway links k -> j.
    """
    gw = np.asarray(gw, dtype=float).reshape(1, 2)
    gains = channel.sample_power_gain(fading, rng, (len(active.points), 1))
    return class_interference(active.points, active.sfs, gains, gw, budget)[:, 0]


def eval_h2(signal_power: float,
            interference: npt.NDArray[np.float64],
            tagged_sf: int,
            mode: InterferenceMode,
            sir_matrix: SirMatrix = SIR_MATRIX) -> bool:
    """
    SIR condition.

    Co-SF mode compares the signal with the co-SF class only, against the
    1 dB capture threshold. Inter-SF mode requires the per-class threshold
    of every class with nonzero interference. No interference passes.
    """
    if signal_power < 0:
        raise InvalidArgumentError(f"signal power must be non-negative, got {signal_power}")
    if mode == InterferenceMode.CO_SF:
        classes = [tagged_sf]
    else:
        classes = lora_params.SPREADING_FACTORS
    for sf in classes:
        i_s = interference[sf - MIN_SF]
        if i_s > 0 and signal_power / i_s < lora_params.sir_threshold(tagged_sf, sf, sir_matrix):
            return False
    return True


def draw_trial(config: SimConfig,
               tagged_distance: Optional[float],
               streams: TrialStreams,
               boundaries: SfBoundaries) -> TrialDraws:
    """
    Sample one network realization and every fading and activity draw.

    With a tagged distance the nearest gateway is placed at exactly that
    distance in a uniform direction and the remaining gateways are a PPP on
    the annulus beyond it. Without one the gateways are a plain PPP on the
    disk and may be absent; such a realization carries no EDs.

    An ED whose activity uniform is at or above the largest duty cycle u_max
    never transmits, so only the thinned PPP of EDs below it is drawn: its
    count is Poisson(λ_ED·u_max·πR²) and its uniforms are uniform on [0, u_max).
    """
    g = streams.geometry
    if tagged_distance is None:
        gateways = geometry.sample_ppp(config.gw_intensity, config.radius_km, g)
    else:
        if not 0 <= tagged_distance < config.radius_km:
            raise InvalidArgumentError(
                f"tagged distance must be in [0, {config.radius_km}), got {tagged_distance}"
            )
        theta = g.uniform(0.0, 2.0 * math.pi)
        placed = np.array([[tagged_distance * math.cos(theta), tagged_distance * math.sin(theta)]])
        others = geometry.sample_annulus(config.gw_intensity, tagged_distance, config.radius_km, g)
        gateways = np.vstack((placed, others))

    m = len(gateways)
    if m == 0:
        empty = np.empty(0)
        return TrialDraws(
            _deployment(config, gateways, np.empty((0, 2))),
            empty, np.empty(0, dtype=np.int64), empty, empty, np.empty((0, 0)),
        )

    u_max = float(DUTY_CYCLES.max())
    candidates = geometry.poisson_count(config.ed_intensity * u_max, 0.0, config.radius_km, g)
    activity_u = u_max * streams.activity.random(candidates)
    end_devices = geometry.place_uniform(len(activity_u), 0.0, config.radius_km, g)
    ed_sfs = assign_sfs(end_devices, gateways, boundaries)
    deployment = _deployment(config, gateways, end_devices)

    n_active = int(np.count_nonzero(_transmitting(ed_sfs, activity_u)))
    fading = config.fading_model
    tagged_gains = channel.sample_power_gain(fading, streams.fading, m)
    if config.independent_events:
        tagged_gains_sir = channel.sample_power_gain(fading, streams.fading, m)
    else:
        tagged_gains_sir = tagged_gains
    interferer_gains = channel.sample_power_gain(fading, streams.fading, (n_active, m))
    return TrialDraws(deployment, activity_u, ed_sfs, tagged_gains, tagged_gains_sir, interferer_gains)


def _deployment(config: SimConfig, gateways: Points, end_devices: Points) -> Deployment:
    return Deployment(
        gateways=gateways,
        end_devices=end_devices,
        radius=config.radius_km,
        gw_intensity=config.gw_intensity,
        ed_intensity=config.ed_intensity,
    )


def evaluate_trial(config: SimConfig,
                   draws: TrialDraws,
                   boundaries: SfBoundaries,
                   sir_matrix: SirMatrix = SIR_MATRIX) -> TrialOutcome:
    """Evaluate H1, H2 and success for the tagged ED from a draw log."""
    gateways = draws.deployment.gateways
    if len(gateways) == 0:
        return TrialOutcome(h1=False, h2=False, success=False, snr_linear=0.0, no_gateway=True)

    budget = config.link_budget
    serving, serving_d = geometry.nearest(geometry.ORIGIN, gateways)
    tagged_sf = lora_params.sf_for_distance(serving_d, boundaries)
    d_tagged = geometry.distances_from(geometry.ORIGIN, gateways)

    eds = draws.deployment.end_devices
    ed_sfs = draws.ed_sfs
    active = _transmitting(ed_sfs, draws.activity_u)
    interference = class_interference(eds[active], ed_sfs[active], draws.interferer_gains, gateways, budget)

    snr = snr_value(draws.tagged_gains, d_tagged, budget)
    signal = channel.tx_mw(budget) * draws.tagged_gains_sir * channel.path_gain(d_tagged, budget.wavelength_km, budget.eta)

    h1 = [eval_h1(s, tagged_sf) for s in snr]
    h2 = [
        eval_h2(signal[j], interference[:, j], tagged_sf, config.interference_mode, sir_matrix)
        for j in range(len(gateways))
    ]
    if config.gateway_mode == GatewayMode.NEAREST:
        success = h1[serving] and h2[serving]
    else:
        success = any(a and b for a, b in zip(h1, h2))

    co_sf = interference[tagged_sf - MIN_SF, serving]
    return TrialOutcome(
        h1=h1[serving],
        h2=h2[serving],
        success=success,
        snr_linear=float(snr[serving]),
        sir_linear=float(signal[serving] / co_sf) if co_sf > 0 else None,
        sf=tagged_sf,
    )


def run_trial(config: SimConfig,
              tagged_distance: Optional[float],
              rng: Union[np.random.Generator, TrialStreams],
              boundaries: Optional[SfBoundaries] = None) -> TrialOutcome:
    """
    Run one trial for a tagged ED whose nearest gateway is `tagged_distance` km away.

    Args:
        config (SimConfig): Simulation configuration
        tagged_distance (Optional[float]): Conditioning distance; None samples
            the gateway process unconditioned
        rng: One generator shared by all draws, or per-purpose TrialStreams
        boundaries (Optional[SfBoundaries]): SF rings; resolved from config if omitted

    Returns:
        TrialOutcome: Flags and ratios at the serving gateway
    """
    if boundaries is None:
        boundaries = lora_params.resolve_sf_boundaries(config)
    streams = rng if isinstance(rng, TrialStreams) else TrialStreams.shared(rng)
    return evaluate_trial(config, draw_trial(config, tagged_distance, streams, boundaries), boundaries)


def throughput(sf: int, p_success: float) -> float:
    """Expected delivered payload rate of one ED in bit/s."""
    if not 0 <= p_success <= 1:
        raise InvalidArgumentError(f"p_success must be in [0, 1], got {p_success}")
    return p_success * lora_params.tx_per_hour(sf) * lora_params.PACKET_BITS / lora_params.SECONDS_PER_HOUR


def wald_halfwidth(p: float, n: int) -> float:
    """3-sigma binomial half-width."""
    return 3.0 * math.sqrt(p * (1.0 - p) / n)


def _run_chunk(config: SimConfig,
               bin_index: int,
               distance: Optional[float],
               start: int,
               stop: int,
               boundaries: SfBoundaries) -> TrialCounts:
    counts = TrialCounts()
    for trial_index in range(start, stop):
        streams = trial_streams(config.seed, bin_index, trial_index)
        counts.add(run_trial(config, distance, streams, boundaries))
    return counts


def _chunks(trials: int, workers: int) -> List[Tuple[int, int]]:
    size = max(1, math.ceil(trials / workers))
    return [(start, min(start + size, trials)) for start in range(0, trials, size)]


def _run_bins(config: SimConfig,
              jobs: List[Tuple[int, Optional[float]]],
              boundaries: SfBoundaries) -> List[TrialCounts]:
    """Tally every (bin index, distance) job, fanning out over config.workers processes."""
    tasks = [
        (job_index, bin_index, distance, start, stop)
        for job_index, (bin_index, distance) in enumerate(jobs)
        for start, stop in _chunks(config.trials, config.workers)
    ]
    totals = [TrialCounts() for _ in jobs]
    if config.workers == 1:
        for job_index, bin_index, distance, start, stop in tasks:
            totals[job_index].merge(_run_chunk(config, bin_index, distance, start, stop, boundaries))
        return totals

    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        futures = [
            (job_index, pool.submit(_run_chunk, config, bin_index, distance, start, stop, boundaries))
            for job_index, bin_index, distance, start, stop in tasks
        ]
        for job_index, future in futures:
            totals[job_index].merge(future.result())
    return totals


def _estimate(successes: int, trials: int) -> Tuple[float, float]:
    p = successes / trials
    return p, wald_halfwidth(p, trials)


def analytic_h1_curve(config: SimConfig, boundaries: Optional[SfBoundaries] = None) -> List[float]:
    """Closed-form SNR-condition probability at every bin of the config."""
    if boundaries is None:
        boundaries = lora_params.resolve_sf_boundaries(config)
    curve = []
    for distance in config.bins:
        d = float(geometry.clamp_distance(distance))
        sf = lora_params.sf_for_distance(d, boundaries)
        curve.append(channel.analytic_conn_prob(
            config.fading_model, d, lora_params.snr_threshold_linear(sf), config.link_budget
        ))
    return curve


def run_sweep(config: SimConfig) -> CurveEstimate:
    """
    Estimate H1, H2 and success probability at every distance bin.

    Output depends only on the config; the worker count changes wall time only.
    """
    boundaries = lora_params.resolve_sf_boundaries(config)
    logger.log('info', 'Starting sweep', {
        'fading': config.fading.value,
        'bins': len(config.bins),
        'trials': config.trials,
        'workers': config.workers,
        'sf_boundaries_km': list(boundaries.d),
    })
    started = time.perf_counter()

    totals = _run_bins(config, list(enumerate(config.bins)), boundaries)
    analytic = analytic_h1_curve(config, boundaries)

    bins = []
    for distance, counts, oracle in zip(config.bins, totals, analytic):
        sf = lora_params.sf_for_distance(float(geometry.clamp_distance(distance)), boundaries)
        p_h1, p_h1_ci = _estimate(counts.h1, counts.trials)
        p_h2, p_h2_ci = _estimate(counts.h2, counts.trials)
        p_success, p_success_ci = _estimate(counts.success, counts.trials)
        bins.append(BinEstimate(
            distance_km=distance,
            sf=sf,
            p_h1=p_h1,
            p_h1_ci=p_h1_ci,
            p_h2=p_h2,
            p_h2_ci=p_h2_ci,
            p_success=p_success,
            p_success_ci=p_success_ci,
            trials=counts.trials,
            no_gateway=counts.no_gateway,
            throughput_bps=throughput(sf, p_success),
            analytic_h1=oracle,
        ))
        logger.log('debug', 'Bin finished', {
            'distance_km': distance, 'sf': sf, 'p_h1': p_h1, 'p_h2': p_h2, 'p_success': p_success,
        })

    logger.log('info', 'Sweep finished', {
        'fading': config.fading.value,
        'duration_s': round(time.perf_counter() - started, 3),
    })
    return CurveEstimate(config=config, boundaries=boundaries, bins=bins)


def run_coverage(config: SimConfig) -> CoverageEstimate:
    """
    Network-averaged success probability of the typical ED at the origin.

    Gateways are sampled unconditioned over the disk; realizations without
    any gateway count as failures.
    """
    boundaries = lora_params.resolve_sf_boundaries(config)
    logger.log('info', 'Starting coverage run', {'fading': config.fading.value, 'trials': config.trials})

    counts = _run_bins(config, [(COVERAGE_BIN, None)], boundaries)[0]
    p_h1, p_h1_ci = _estimate(counts.h1, counts.trials)
    p_h2, p_h2_ci = _estimate(counts.h2, counts.trials)
    p_success, p_success_ci = _estimate(counts.success, counts.trials)

    logger.log('info', 'Coverage run finished', {
        'p_success': p_success, 'no_gateway': counts.no_gateway,
    })
    return CoverageEstimate(
        trials=counts.trials,
        p_h1=p_h1,
        p_h1_ci=p_h1_ci,
        p_h2=p_h2,
        p_h2_ci=p_h2_ci,
        p_success=p_success,
        p_success_ci=p_success_ci,
        no_gateway=counts.no_gateway,
        mean_throughput_bps=counts.delivered_bps() / counts.trials,
    )
