"""Synthetic measurement generation over configurable landmark layouts.

Two observation models are provided: log-distance pathloss (dBm readings with
log-normal shadowing, converted to linear milliwatt weights) and an
inverse-linear camera-style model (apparent size ~ 1/distance). Both emit
nonnegative weights that grow as the agent approaches a landmark, which is
the convention the rest of the package relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import LandmarkMap, MeasurementSet
from .errors import InvalidDimension

LAYOUT_KINDS = ("circle", "grid", "uniform_random")
MEASUREMENT_MODELS = ("pathloss", "inverse_linear")

DEFAULT_REGION_MARGIN = 0.1


@dataclass(frozen=True)
class Layout:
    """Landmark placement recipe.

    ``extent`` is the side length (meters) of the square the layout lives in.
    ``radius`` applies to the circle layout and defaults to 0.4 * extent;
    ``center`` defaults to the middle of the extent.
    """

    kind: str = "circle"
    landmarks: int = 30
    extent: float = 24.0
    seed: int = 0
    radius: float | None = None
    center: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in LAYOUT_KINDS:
            raise ValueError(f"layout kind must be one of {LAYOUT_KINDS}, got {self.kind!r}")
        if self.landmarks < 2:
            raise InvalidDimension(f"need at least 2 landmarks, got {self.landmarks}")
        if self.extent <= 0:
            raise ValueError("extent must be positive")
        if self.radius is not None and self.radius <= 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class PathlossParams:
    """Log-distance radio model parameters.

    ``tx_power`` (dBm) and ``exponent`` may be scalars or per-landmark
    sequences. ``noise_std`` is the dB standard deviation of the shadowing
    term; ``min_distance`` floors the distance to dodge the log singularity.
    """

    tx_power: float = 20.0
    exponent: float = 2.0
    noise_std: float = 2.0
    min_distance: float = 0.5

    def __post_init__(self):
        if np.any(np.asarray(self.exponent, dtype=float) <= 0):
            raise ValueError("pathloss exponent must be positive")
        if self.noise_std < 0:
            raise ValueError("noise_std must be nonnegative")
        if self.min_distance <= 0:
            raise ValueError("min_distance must be positive")


@dataclass(frozen=True)
class InverseLinearParams:
    """Camera-style model: observation = scale / distance plus additive noise."""

    scale: float = 10.0
    noise_std: float = 0.1
    min_distance: float = 0.5

    def __post_init__(self):
        if np.any(np.asarray(self.scale, dtype=float) <= 0):
            raise ValueError("scale must be positive")
        if self.noise_std < 0:
            raise ValueError("noise_std must be nonnegative")
        if self.min_distance <= 0:
            raise ValueError("min_distance must be positive")


def make_layout(layout: Layout) -> LandmarkMap:
    """Place landmarks per the layout recipe (always 2-D)."""
    L = layout.landmarks
    center = layout.center
    if center is None:
        center = (layout.extent / 2.0, layout.extent / 2.0)
    cx, cy = float(center[0]), float(center[1])
    if layout.kind == "circle":
        radius = layout.radius if layout.radius is not None else 0.4 * layout.extent
        angles = 2.0 * math.pi * np.arange(L) / L
        coords = np.column_stack(
            [cx + radius * np.cos(angles), cy + radius * np.sin(angles)]
        )
    elif layout.kind == "grid":
        rows = int(math.ceil(math.sqrt(L)))
        cols = int(math.ceil(L / rows))
        xs = (np.arange(cols) + 0.5) * layout.extent / cols
        ys = (np.arange(rows) + 0.5) * layout.extent / rows
        gx, gy = np.meshgrid(xs, ys)
        coords = np.column_stack([gx.ravel()[:L], gy.ravel()[:L]])
        coords = coords - layout.extent / 2.0 + np.array([cx, cy])
    else:  # uniform_random
        rng = np.random.default_rng(layout.seed)
        coords = rng.uniform(0.0, layout.extent, size=(L, 2))
        coords = coords - layout.extent / 2.0 + np.array([cx, cy])
    return LandmarkMap(coords)


def agent_region(
    lmap: LandmarkMap, margin: float = DEFAULT_REGION_MARGIN
) -> tuple[np.ndarray, np.ndarray]:
    """Sampling rectangle: the layout's bounding box grown by ``margin``."""
    low = lmap.coords.min(axis=0)
    high = lmap.coords.max(axis=0)
    span = np.maximum(high - low, 1.0)
    return low - margin * span, high + margin * span


def _distances(agents: np.ndarray, lmap: LandmarkMap, floor: float) -> np.ndarray:
    diff = agents[:, None, :] - lmap.coords[None, :, :]
    return np.maximum(np.sqrt((diff * diff).sum(axis=2)), floor)


def _sample_agents(rng, n_measurements, region, lmap):
    if n_measurements < 1:
        raise ValueError("need at least one measurement")
    low, high = region if region is not None else agent_region(lmap)
    low = np.asarray(low, dtype=float)
    high = np.asarray(high, dtype=float)
    return rng.uniform(low, high, size=(n_measurements, low.size))


def gen_pathloss(
    lmap: LandmarkMap,
    n_measurements: int,
    region=None,
    params: PathlossParams = PathlossParams(),
    seed: int = 0,
) -> MeasurementSet:
    """Sample agent positions and emit pathloss measurements.

    RSS in dBm is tx_power - 10 * exponent * log10(distance) plus Gaussian
    shadowing; the stored weights are the linear milliwatt values
    10^(RSS / 10), so closer landmarks always weigh more.
    """
    rng = np.random.default_rng(seed)
    agents = _sample_agents(rng, n_measurements, region, lmap)
    dist = _distances(agents, lmap, params.min_distance)
    tx = np.broadcast_to(np.asarray(params.tx_power, dtype=float), (lmap.landmark_count,))
    exp = np.broadcast_to(np.asarray(params.exponent, dtype=float), (lmap.landmark_count,))
    rss = tx[None, :] - 10.0 * exp[None, :] * np.log10(dist)
    if params.noise_std > 0:
        rss = rss + rng.normal(0.0, params.noise_std, size=rss.shape)
    weights = 10.0 ** (rss / 10.0)
    return MeasurementSet(weights, agents)


def gen_inverse_linear(
    lmap: LandmarkMap,
    n_measurements: int,
    region=None,
    params: InverseLinearParams = InverseLinearParams(),
    seed: int = 0,
) -> MeasurementSet:
    """Sample agent positions and emit inverse-linear (camera-like) measurements."""
    rng = np.random.default_rng(seed)
    agents = _sample_agents(rng, n_measurements, region, lmap)
    dist = _distances(agents, lmap, params.min_distance)
    scale = np.broadcast_to(np.asarray(params.scale, dtype=float), (lmap.landmark_count,))
    obs = scale[None, :] / dist
    if params.noise_std > 0:
        obs = obs + rng.normal(0.0, params.noise_std, size=obs.shape)
    return MeasurementSet(np.maximum(obs, 0.0), agents)
