"""
Simulation schemas package.
"""

from .lora_schemas import SfRow, SirMatrix, SfBoundaries
from .sim_schemas import (
    FadingKind,
    GatewayMode,
    InterferenceMode,
    FadingModel,
    LinkBudget,
    SimConfig,
    TrialOutcome,
    BinEstimate,
    CurveEstimate,
    CoverageEstimate,
    RunManifest
)

__all__ = [
    'SfRow',
    'SirMatrix',
    'SfBoundaries',
    'FadingKind',
    'GatewayMode',
    'InterferenceMode',
    'FadingModel',
    'LinkBudget',
    'SimConfig',
    'TrialOutcome',
    'BinEstimate',
    'CurveEstimate',
    'CoverageEstimate',
    'RunManifest'
]
