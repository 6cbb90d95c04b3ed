"""Map evaluation: affine alignment residual, WCL baseline, cyclic order.

An estimated map is only meaningful up to scale, rotation/reflection, and
translation, so comparison against ground truth first solves the least-squares
affine fit from estimated onto true coordinates and then scores the residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import LandmarkMap, MeasurementSet, MeasurementVector
from .errors import (
    DegenerateConfiguration,
    DimensionMismatch,
    MissingGroundTruth,
    ZeroWeightLandmark,
    ZeroWeightMeasurement,
)

_SINGULARITY_RTOL = 1e-10


@dataclass(frozen=True)
class AffineFit:
    """Least-squares map alignment: true ~= A @ est + b with residual ssme."""

    A: np.ndarray
    b: np.ndarray
    ssme: float


def _check_same_shape(true_map: LandmarkMap, est_map: LandmarkMap) -> None:
    if true_map.landmark_count != est_map.landmark_count:
        raise DimensionMismatch(
            f"maps have {true_map.landmark_count} vs {est_map.landmark_count} landmarks"
        )
    if true_map.dim != est_map.dim:
        raise DimensionMismatch(f"maps have dim {true_map.dim} vs {est_map.dim}")


def fit_affine(true_map: LandmarkMap, est_map: LandmarkMap) -> AffineFit:
    """Solve min over (A, b) of sum_l ||true_l - A est_l - b||^2.

    Uses the normal equations on the design matrix [est_l^T, 1]; A is a fully
    general d x d matrix, so reflections and shears are absorbed by the fit.
    """
    _check_same_shape(true_map, est_map)
    d = true_map.dim
    L = true_map.landmark_count
    if L < d + 1:
        raise DegenerateConfiguration(f"need at least {d + 1} landmarks, got {L}")
    X = np.hstack([est_map.coords, np.ones((L, 1))])
    G = X.T @ X
    eigvals = np.linalg.eigvalsh(G)
    if eigvals[0] < _SINGULARITY_RTOL * eigvals[-1]:
        raise DegenerateConfiguration(
            "estimated landmarks are collinear/coplanar; affine fit is singular"
        )
    theta = np.linalg.solve(G, X.T @ true_map.coords)  # (d+1, d)
    residual = true_map.coords - X @ theta
    return AffineFit(
        A=theta[:d].T.copy(),
        b=theta[d].copy(),
        ssme=float((residual * residual).sum()),
    )


def ssme(true_map: LandmarkMap, est_map: LandmarkMap) -> float:
    """Residual of the best affine fit; invariant under invertible affine
    transforms of the estimated map."""
    return fit_affine(true_map, est_map).ssme


def true_map_variance(true_map: LandmarkMap) -> float:
    """Total variance sum_l ||c_l - mean||^2 of the true coordinates."""
    centered = true_map.coords - true_map.coords.mean(axis=0)
    return float((centered * centered).sum())


def wcl_landmarks(mset: MeasurementSet) -> LandmarkMap:
    """Supervised baseline: each landmark at the weighted centroid of the
    measurement coordinates, weighted by that landmark's signal column."""
    if mset.coords is None:
        raise MissingGroundTruth("weighted centroid needs measurement coordinates")
    weights = mset.values
    totals = weights.sum(axis=0)
    if np.any(totals <= 0):
        bad = int(np.argmin(totals))
        raise ZeroWeightLandmark(f"landmark {bad} has zero total weight")
    coords = (weights.T @ mset.coords) / totals[:, None]
    return LandmarkMap(coords)


def wcl_agent(landmarks: LandmarkMap, m: MeasurementVector) -> np.ndarray:
    """Position one agent at the weighted centroid of the landmark estimates."""
    if m.landmark_count != landmarks.landmark_count:
        raise DimensionMismatch(
            f"measurement has {m.landmark_count} weights for "
            f"{landmarks.landmark_count} landmarks"
        )
    total = m.values.sum()
    if total <= 0:
        raise ZeroWeightMeasurement("measurement has zero total weight")
    return (m.values @ landmarks.coords) / total


def _cyclic_adjacency(lmap: LandmarkMap) -> set[frozenset]:
    coords = lmap.coords
    centroid = coords.mean(axis=0)
    offsets = coords - centroid
    radii = np.hypot(offsets[:, 0], offsets[:, 1])
    if np.any(radii <= 1e-12 * max(1.0, radii.max())):
        raise DegenerateConfiguration("a landmark coincides with the map centroid")
    angles = np.arctan2(offsets[:, 1], offsets[:, 0])
    order = np.argsort(angles, kind="stable")
    L = order.size
    return {frozenset((int(order[k]), int(order[(k + 1) % L]))) for k in range(L)}


def cyclic_order_score(true_map: LandmarkMap, est_map: LandmarkMap) -> float:
    """Fraction of the true cyclic adjacencies preserved in the estimate.

    Landmarks are ordered by angle around each map's centroid; adjacency is
    compared as unordered index pairs, which makes the score invariant to
    rotation and reflection of the estimated cycle.
    """
    _check_same_shape(true_map, est_map)
    if true_map.dim != 2:
        raise DimensionMismatch("cyclic order is defined for 2-D maps only")
    if true_map.landmark_count < 3:
        raise DegenerateConfiguration("cyclic order needs at least 3 landmarks")
    adj_true = _cyclic_adjacency(true_map)
    adj_est = _cyclic_adjacency(est_map)
    return len(adj_true & adj_est) / true_map.landmark_count


def evaluation_report(true_map: LandmarkMap, est_map: LandmarkMap) -> dict:
    """Assemble the evaluation JSON payload for a (true, estimated) map pair."""
    fit = fit_affine(true_map, est_map)
    variance = true_map_variance(true_map)
    if variance <= 0:
        raise DegenerateConfiguration("true map has zero variance")
    score = None
    if true_map.dim == 2 and true_map.landmark_count >= 3:
        score = cyclic_order_score(true_map, est_map)
    return {
        "ssme": fit.ssme,
        "ssme_per_landmark": fit.ssme / true_map.landmark_count,
        "ssme_normalized": fit.ssme / variance,
        "cyclic_order_score": score,
        "A": fit.A.tolist(),
        "b": fit.b.tolist(),
    }
