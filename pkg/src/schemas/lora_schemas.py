"""
Schemas for LoRa protocol constants.
These schemas hold the per-SF link characteristics, the SIR collision
thresholds between spreading factors and the SF distance rings.
"""

from typing import Tuple
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

MIN_SF = 7
MAX_SF = 12
NUM_SF = MAX_SF - MIN_SF + 1


class SfRow(BaseModel):
    """
    Link characteristics of one spreading factor for a 25-byte packet at 125 kHz.

    Attributes:
        sf (int): Spreading factor, 7..12
        bitrate_kbps (float): Raw bit rate in kb/s
        airtime_ms (float): Packet time on air in milliseconds
        tx_per_hour (int): Packets sent per hour
        sensitivity_dbm (float): Receiver sensitivity
        snr_threshold_db (float): Demodulation SNR threshold q_SF
    """
    model_config = ConfigDict(frozen=True)

    sf: int = Field(..., ge=MIN_SF, le=MAX_SF)
    bitrate_kbps: float = Field(..., gt=0)
    airtime_ms: float = Field(..., gt=0)
    tx_per_hour: int = Field(..., gt=0)
    sensitivity_dbm: float
    snr_threshold_db: float


class SirMatrix(BaseModel):
    """
    SIR collision thresholds in dB.

    Row is the spreading factor of the wanted signal, column the
    spreading factor of the interferer, both starting at SF7.
    """
    model_config = ConfigDict(frozen=True)

    thresholds_db: Tuple[Tuple[float, ...], ...]

    @field_validator('thresholds_db')
    @classmethod
    def _check_shape(cls, value: Tuple[Tuple[float, ...], ...]) -> Tuple[Tuple[float, ...], ...]:
        if len(value) != NUM_SF or any(len(row) != NUM_SF for row in value):
            raise ValueError(f"SIR matrix must be {NUM_SF}x{NUM_SF}")
        for i, row in enumerate(value):
            for j, entry in enumerate(row):
                if i == j and entry != 1.0:
                    raise ValueError(f"co-SF threshold at SF{i + MIN_SF} must be 1 dB, got {entry}")
                if i != j and entry >= 0:
                    raise ValueError(
                        f"inter-SF threshold SF{i + MIN_SF}/SF{j + MIN_SF} must be negative, got {entry}"
                    )
        return value

    def db(self, sf_tagged: int, sf_interferer: int) -> float:
        """Threshold in dB; SFs are assumed already range-checked."""
        return self.thresholds_db[sf_tagged - MIN_SF][sf_interferer - MIN_SF]


class SfBoundaries(BaseModel):
    """
    Radii d0..d6 in km delimiting the SF rings around a gateway.

    SF 7+k is used on [d_k, d_{k+1}); beyond d6 the largest SF is kept.
    """
    model_config = ConfigDict(frozen=True)

    d: Tuple[float, ...]

    @model_validator(mode='after')
    def _check_rings(self) -> 'SfBoundaries':
        if len(self.d) != NUM_SF + 1:
            raise ValueError(f"expected {NUM_SF + 1} boundary radii, got {len(self.d)}")
        if self.d[0] != 0.0:
            raise ValueError("first boundary radius must be 0")
        if any(b <= a for a, b in zip(self.d, self.d[1:])):
            raise ValueError("boundary radii must be strictly increasing")
        return self
