"""
Homogeneous Poisson point processes on a disk and nearest-neighbour queries.

Points are stored as float arrays of shape (n, 2) holding (x, y) in km.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import numpy.typing as npt

from .errors import InvalidArgumentError, NoGatewayError

# Friis gain diverges at d -> 0; every link distance is clamped to 1 m
MIN_DISTANCE_KM = 0.001

Points = npt.NDArray[np.float64]

ORIGIN = np.zeros(2)


@dataclass(frozen=True)
class Deployment:
    """
    One sampled deployment of gateways and end devices on a disk centred at the origin.

    The tagged ED sits at the origin and is not part of `end_devices`.
    """
    gateways: Points
    end_devices: Points
    radius: float
    gw_intensity: float
    ed_intensity: float


def _empty() -> Points:
    return np.empty((0, 2), dtype=float)


def _polar(r: npt.NDArray[np.float64], theta: npt.NDArray[np.float64]) -> Points:
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def sample_ppp(intensity: float, radius: float, rng: np.random.Generator) -> Points:
    """
    Sample a homogeneous PPP on the disk of `radius` km centred at the origin.

    The count is Poisson(intensity·π·radius²); radii are drawn as R·√u so the
    points are uniform over the disk area.

    Raises:
        InvalidArgumentError: If the intensity is negative or the radius not positive
    """
    if not intensity >= 0:
        raise InvalidArgumentError(f"intensity must be non-negative, got {intensity}")
    if not radius > 0:
        raise InvalidArgumentError(f"radius must be positive, got {radius}")
    return sample_annulus(intensity, 0.0, radius, rng)


def sample_annulus(intensity: float, inner: float, outer: float, rng: np.random.Generator) -> Points:
    """Homogeneous PPP on the annulus inner < r <= outer."""
    return place_uniform(poisson_count(intensity, inner, outer, rng), inner, outer, rng)


def poisson_count(intensity: float, inner: float, outer: float, rng: np.random.Generator) -> int:
    """Number of PPP points on the annulus inner < r <= outer."""
    if not intensity >= 0:
        raise InvalidArgumentError(f"intensity must be non-negative, got {intensity}")
    if not 0 <= inner < outer:
        raise InvalidArgumentError(f"annulus needs 0 <= inner < outer, got ({inner}, {outer})")
    return int(rng.poisson(intensity * math.pi * (outer * outer - inner * inner)))


def place_uniform(count: int, inner: float, outer: float, rng: np.random.Generator) -> Points:
    """
    Place `count` points uniformly over the annulus inner < r <= outer.

    Together with `poisson_count` this lets a caller thin a PPP before
    placing it: independently thinned PPPs are again PPPs.
    """
    if count == 0:
        return _empty()

    u = rng.random(count)
    theta = rng.uniform(0.0, 2.0 * math.pi, count)
    r = np.sqrt(inner * inner + u * (outer * outer - inner * inner))
    return _polar(r, theta)


def clamp_distance(d: npt.ArrayLike) -> npt.NDArray[np.float64]:
    return np.maximum(np.asarray(d, dtype=float), MIN_DISTANCE_KM)


def distances_from(origin: npt.ArrayLike, points: Points) -> npt.NDArray[np.float64]:
    """Clamped Euclidean distances from one point to each of `points`."""
    origin = np.asarray(origin, dtype=float)
    return clamp_distance(np.hypot(points[:, 0] - origin[0], points[:, 1] - origin[1]))


def nearest(origin: npt.ArrayLike, candidates: Points) -> Tuple[int, float]:
    """
    Index of and distance to the candidate closest to `origin`.

    Ties go to the lowest index; distances are clamped to 1 m.

    Raises:
        NoGatewayError: If there are no candidates
    """
    candidates = np.asarray(candidates, dtype=float).reshape(-1, 2)
    if len(candidates) == 0:
        raise NoGatewayError("no gateway in the realization")
    d = distances_from(origin, candidates)
    index = int(np.argmin(d))
    return index, float(d[index])


def nearest_distances(points: Points, gateways: Points) -> Tuple[npt.NDArray[np.int64], npt.NDArray[np.float64]]:
    """
    Nearest gateway of every point.

    Returns:
        Tuple of gateway indices and clamped distances, one entry per point
    """
    if len(gateways) == 0:
        raise NoGatewayError("no gateway in the realization")
    if len(points) == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=float)
    dx = points[:, 0, None] - gateways[None, :, 0]
    dy = points[:, 1, None] - gateways[None, :, 1]
    d = np.hypot(dx, dy)
    index = np.argmin(d, axis=1)
    return index.astype(np.int64), clamp_distance(d[np.arange(len(points)), index])


def pairwise_distances(points: Points, gateways: Points) -> npt.NDArray[np.float64]:
    """Clamped (n_points, n_gateways) distance matrix."""
    dx = points[:, 0, None] - gateways[None, :, 0]
    dy = points[:, 1, None] - gateways[None, :, 1]
    return clamp_distance(np.hypot(dx, dy))
