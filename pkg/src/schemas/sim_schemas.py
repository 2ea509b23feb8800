"""
Simulation schemas.
These schemas define the simulation configuration, the channel and link
budget descriptions, and the shape of Monte Carlo results.
"""

from enum import Enum
from typing import List, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .lora_schemas import SfBoundaries

MAX_SEED = 2**64 - 1


class FadingKind(str, Enum):
    RAYLEIGH = 'rayleigh'
    RICIAN = 'rician'


class GatewayMode(str, Enum):
    NEAREST = 'nearest'
    UNION = 'union'


class InterferenceMode(str, Enum):
    CO_SF = 'co_sf'
    INTER_SF = 'inter_sf'


class FadingModel(BaseModel):
    """
    Small-scale fading of a link power gain |h|^2, normalised to unit mean.

    Attributes:
        kind (FadingKind): Rayleigh or Rician
        k_factor (float): Rician K-factor (linear); ignored for Rayleigh
    """
    model_config = ConfigDict(frozen=True)

    kind: FadingKind = FadingKind.RAYLEIGH
    k_factor: float = Field(4.0, ge=0, allow_inf_nan=False)


class LinkBudget(BaseModel):
    """
    Transmit power, receiver noise and path-loss parameters shared by every link.

    Attributes:
        tx_power_dbm (float): ED transmit power
        bandwidth_hz (float): Receiver bandwidth
        noise_figure_db (float): Receiver noise figure
        wavelength_km (float): Carrier wavelength
        eta (float): Path-loss exponent
    """
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    tx_power_dbm: float = 19.0
    bandwidth_hz: float = Field(125_000.0, gt=0)
    noise_figure_db: float = 6.0
    wavelength_km: float = Field(34.5e-5, gt=0)
    eta: float = Field(2.75, ge=2)


def _default_bins() -> Tuple[float, ...]:
    return tuple(round(0.25 * i, 2) for i in range(1, 33))


class SimConfig(BaseModel):
    """
    Complete, validated simulation configuration.

    Field names double as the keys of the flat configuration documents
    and of the run manifest.
    """
    model_config = ConfigDict(frozen=True, allow_inf_nan=False, use_enum_values=False)

    radius_km: float = Field(20.0, gt=0)
    gw_intensity: float = Field(0.005, ge=0)
    ed_intensity: float = Field(5.0, ge=0)
    tx_power_dbm: float = 19.0
    bandwidth_hz: float = Field(125_000.0, gt=0)
    noise_figure_db: float = 6.0
    wavelength_km: float = Field(34.5e-5, gt=0)
    eta: float = Field(2.75, ge=2)
    fading: FadingKind = FadingKind.RAYLEIGH
    rician_k: float = Field(4.0, ge=0)
    trials: int = Field(2000, ge=1)
    seed: int = Field(42, ge=0, le=MAX_SEED)
    gateway_mode: GatewayMode = GatewayMode.NEAREST
    interference_mode: InterferenceMode = InterferenceMode.CO_SF
    bins: Tuple[float, ...] = Field(default_factory=_default_bins)
    sf_boundaries: Optional[Tuple[float, ...]] = None
    independent_events: bool = False
    workers: int = Field(1, ge=1)

    @model_validator(mode='after')
    def _check_bins(self) -> 'SimConfig':
        if not self.bins:
            raise ValueError("bins: at least one distance bin is required")
        if any(b < 0 for b in self.bins):
            raise ValueError("bins: distances must be non-negative")
        if any(b <= a for a, b in zip(self.bins, self.bins[1:])):
            raise ValueError("bins: distances must be strictly increasing")
        if self.bins[-1] >= self.radius_km:
            raise ValueError(f"bins: distances must be below radius_km={self.radius_km}")
        if self.sf_boundaries is not None:
            try:
                SfBoundaries(d=self.sf_boundaries)
            except ValidationError as e:
                raise ValueError(f"sf_boundaries: {e.errors()[0]['msg']}") from e
        return self

    @property
    def link_budget(self) -> LinkBudget:
        return LinkBudget(
            tx_power_dbm=self.tx_power_dbm,
            bandwidth_hz=self.bandwidth_hz,
            noise_figure_db=self.noise_figure_db,
            wavelength_km=self.wavelength_km,
            eta=self.eta,
        )

    @property
    def fading_model(self) -> FadingModel:
        return FadingModel(kind=self.fading, k_factor=self.rician_k)


class TrialOutcome(BaseModel):
    """
    Result of one Monte Carlo trial for the tagged end device.

    h1, h2, snr_linear and sir_linear describe the link to the serving
    (nearest) gateway. In union mode success is the OR over all gateways
    and may hold while h1 or h2 at the serving gateway fails.
    """
    model_config = ConfigDict(frozen=True)

    h1: bool
    h2: bool
    success: bool
    snr_linear: float
    sir_linear: Optional[float] = None
    sf: Optional[int] = None
    no_gateway: bool = False


class BinEstimate(BaseModel):
    """
    Aggregated estimates at one tagged-to-gateway distance.

    Attributes:
        distance_km (float): Distance from the tagged ED to its nearest gateway
        sf (int): Spreading factor used at that distance
        p_h1, p_h2, p_success (float): Estimated probabilities
        p_h1_ci, p_h2_ci, p_success_ci (float): 3-sigma Wald half-widths
        trials (int): Trials aggregated into the bin
        no_gateway (int): Trials whose realization had no gateway
        throughput_bps (float): Expected delivered payload rate per ED
        analytic_h1 (float): Closed-form SNR-condition probability
    """
    model_config = ConfigDict(frozen=True)

    distance_km: float
    sf: int
    p_h1: float = Field(..., ge=0, le=1)
    p_h1_ci: float = Field(..., ge=0)
    p_h2: float = Field(..., ge=0, le=1)
    p_h2_ci: float = Field(..., ge=0)
    p_success: float = Field(..., ge=0, le=1)
    p_success_ci: float = Field(..., ge=0)
    trials: int = Field(..., ge=1)
    no_gateway: int = Field(0, ge=0)
    throughput_bps: float = Field(..., ge=0)
    analytic_h1: float = Field(..., ge=0, le=1)


class CurveEstimate(BaseModel):
    """Distance-swept estimates for one channel model."""
    model_config = ConfigDict(frozen=True)

    config: SimConfig
    boundaries: SfBoundaries
    bins: List[BinEstimate]


class CoverageEstimate(BaseModel):
    """
    Success probability of the typical ED averaged over the whole network,
    not conditioned on its distance to the nearest gateway.
    """
    model_config = ConfigDict(frozen=True)

    trials: int = Field(..., ge=1)
    p_h1: float = Field(..., ge=0, le=1)
    p_h1_ci: float = Field(..., ge=0)
    p_h2: float = Field(..., ge=0, le=1)
    p_h2_ci: float = Field(..., ge=0)
    p_success: float = Field(..., ge=0, le=1)
    p_success_ci: float = Field(..., ge=0)
    no_gateway: int = Field(..., ge=0)
    mean_throughput_bps: float = Field(..., ge=0)


class RunManifest(BaseModel):
    """
    Everything needed to reproduce one emitted curve file.

    Attributes:
        config (SimConfig): Resolved configuration, all defaults materialised
        version (str): Simulator version
        channel (str): Channel label used in the output file names
        duration_s (float): Wall-clock duration of the sweep
        trials_per_bin (List[int]): Trials aggregated in every bin
        no_gateway_trials (int): Trials without any gateway, all bins
        coverage (Optional[CoverageEstimate]): Network-averaged result, if run
    """
    config: SimConfig
    version: str
    channel: str
    duration_s: float = Field(..., ge=0)
    trials_per_bin: List[int]
    no_gateway_trials: int = Field(0, ge=0)
    coverage: Optional[CoverageEstimate] = None
