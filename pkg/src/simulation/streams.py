"""
Counter-based random streams for reproducible parallel trials.

Every trial owns three independent Philox streams keyed by
(master seed, bin index, trial index, purpose). A trial's draws therefore
depend only on its coordinates, never on which worker runs it or in which
order. Geometry and activity draws do not touch the channel model, so a
Rayleigh and a Rician run with the same seed see identical deployments.
"""

from dataclasses import dataclass

import numpy as np

GEOMETRY, ACTIVITY, FADING = 0, 1, 2

# Bin coordinate reserved for network-averaged (unconditioned) trials
COVERAGE_BIN = 0xFFFFFFFF


@dataclass(frozen=True)
class TrialStreams:
    geometry: np.random.Generator
    activity: np.random.Generator
    fading: np.random.Generator

    @classmethod
    def shared(cls, rng: np.random.Generator) -> 'TrialStreams':
        """Route every purpose through one caller-owned generator."""
        return cls(geometry=rng, activity=rng, fading=rng)


def stream(seed: int, bin_index: int, trial_index: int, purpose: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(bin_index, trial_index, purpose))
    return np.random.Generator(np.random.Philox(sequence))


def trial_streams(seed: int, bin_index: int, trial_index: int) -> TrialStreams:
    return TrialStreams(
        geometry=stream(seed, bin_index, trial_index, GEOMETRY),
        activity=stream(seed, bin_index, trial_index, ACTIVITY),
        fading=stream(seed, bin_index, trial_index, FADING),
    )
