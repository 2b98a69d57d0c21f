"""Block-fading downlink channel from a geometric multipath model.

Each user radiates over ``path_count`` rays whose departure angles follow a
truncated Gaussian around the user's mean angle of departure (AoD).  The
same density drives both the per-slot channel draws and the closed-form
spatial correlation matrices, so sample statistics converge to the reported
correlations by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import truncnorm

from .numerics import hermitian_eig, hermitian_part

# Truncation of the AoD density, in standard deviations around the mean.
AOD_TRUNCATION_SIGMAS = 2.0

# Entropy tag separating scenario draws from channel draws under one seed.
_SCENARIO_STREAM = 0x5CE


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array at the base station."""

    antenna_count: int
    element_spacing: float = 0.5  # wavelengths

    def __post_init__(self) -> None:
        if self.antenna_count < 1:
            raise ValueError(f"antenna_count must be >= 1, got {self.antenna_count}")
        if self.element_spacing <= 0:
            raise ValueError(f"element_spacing must be > 0, got {self.element_spacing}")


@dataclass(frozen=True)
class UserChannelParams:
    """Per-user multipath statistics: AoD density and mean power."""

    mean_aod: float  # radians, in (-pi/2, pi/2)
    angular_spread: float  # radians, std of the AoD density
    path_count: int
    mean_power: float = 1.0

    def __post_init__(self) -> None:
        if not -np.pi / 2 < self.mean_aod < np.pi / 2:
            raise ValueError(f"mean_aod must lie in (-pi/2, pi/2), got {self.mean_aod}")
        if self.angular_spread < 0:
            raise ValueError(f"angular_spread must be >= 0, got {self.angular_spread}")
        if self.path_count < 1:
            raise ValueError(f"path_count must be >= 1, got {self.path_count}")
        if self.mean_power <= 0:
            raise ValueError(f"mean_power must be > 0, got {self.mean_power}")


def steering_vector(theta: float, geometry: ArrayGeometry) -> np.ndarray:
    """Array response for departure angle ``theta``; entries unit modulus."""
    m = np.arange(geometry.antenna_count)
    return np.exp(2j * np.pi * geometry.element_spacing * m * np.sin(theta))


def _steering_matrix(thetas: np.ndarray, geometry: ArrayGeometry) -> np.ndarray:
    """Stack steering vectors column-wise for a batch of angles."""
    m = np.arange(geometry.antenna_count)[:, None]
    return np.exp(2j * np.pi * geometry.element_spacing * m * np.sin(np.asarray(thetas))[None, :])


def correlation_from_params(
    params: UserChannelParams,
    geometry: ArrayGeometry,
    quadrature_points: int = 256,
) -> np.ndarray:
    """Spatial correlation matrix E[h h^H] under the truncated-Gaussian AoD density.

    Midpoint quadrature over the truncated support, then symmetrization,
    PSD projection (negative eigenvalues clamped to zero, a 1e-12-scale
    quadrature artifact) and trace renormalization to M * mean_power.
    """
    if quadrature_points < 32:
        raise ValueError(f"quadrature_points must be >= 32, got {quadrature_points}")
    m_ant = geometry.antenna_count
    if params.angular_spread == 0.0:
        a = steering_vector(params.mean_aod, geometry)
        return hermitian_part(params.mean_power * np.outer(a, a.conj()))

    half_width = AOD_TRUNCATION_SIGMAS * params.angular_spread
    lo = params.mean_aod - half_width
    step = 2.0 * half_width / quadrature_points
    thetas = lo + (np.arange(quadrature_points) + 0.5) * step
    weights = np.exp(-0.5 * ((thetas - params.mean_aod) / params.angular_spread) ** 2)
    weights /= weights.sum()

    a = _steering_matrix(thetas, geometry)
    corr = (a * weights[None, :]) @ a.conj().T
    corr = hermitian_part(params.mean_power * corr)

    values, vectors = hermitian_eig(corr)
    clamped = np.maximum(values, 0.0)
    corr = (vectors * clamped[None, :]) @ vectors.conj().T
    corr = hermitian_part(corr)
    trace = float(np.real(np.trace(corr)))
    if trace > 0:
        corr *= (m_ant * params.mean_power) / trace
    return corr


def _draw_aods(params: UserChannelParams, rng: np.random.Generator) -> np.ndarray:
    """Sample path departure angles from the truncated-Gaussian density."""
    if params.angular_spread == 0.0:
        return np.full(params.path_count, params.mean_aod)
    u = rng.uniform(size=params.path_count)
    return truncnorm.ppf(
        u,
        -AOD_TRUNCATION_SIGMAS,
        AOD_TRUNCATION_SIGMAS,
        loc=params.mean_aod,
        scale=params.angular_spread,
    )


def draw_channel(
    params: Sequence[UserChannelParams],
    geometry: ArrayGeometry,
    seed: int,
    slot: int = 0,
) -> np.ndarray:
    """Draw one block-fading channel matrix H of shape (M, K).

    Column k is user k's channel: sqrt(mean_power / path_count) times the
    sum of CN(0,1)-weighted steering vectors at sampled AoDs.  Regeneration
    is bit-identical for the same (seed, user index, slot index).
    """
    if len(params) < 1:
        raise ValueError("need at least one user")
    if seed < 0 or slot < 0:
        raise ValueError("seed and slot must be non-negative")
    h = np.empty((geometry.antenna_count, len(params)), dtype=complex)
    for user, p in enumerate(params):
        rng = np.random.default_rng([seed, user, slot])
        thetas = _draw_aods(p, rng)
        gains = (rng.standard_normal(p.path_count) + 1j * rng.standard_normal(p.path_count)) / np.sqrt(2.0)
        a = _steering_matrix(thetas, geometry)
        h[:, user] = np.sqrt(p.mean_power / p.path_count) * (a @ gains)
    return h


def make_scenario(
    n_users: int,
    n_clusters: int,
    *,
    angular_spread: float = 0.1,
    path_count: int = 6,
    aod_jitter: float = 0.02,
    mean_power: float = 1.0,
    seed: int = 0,
) -> list[UserChannelParams]:
    """Clustered-user scenario: users share per-cluster AoD statistics.

    Cluster centers sit at the interior midpoints of an even split of
    (-pi/3, pi/3); users join clusters round-robin with a small uniform
    jitter on their mean AoD, so same-cluster users have nearly identical
    correlation matrices.
    """
    if n_clusters < 1 or n_clusters > n_users:
        raise ValueError(f"need 1 <= n_clusters <= n_users, got {n_clusters} and {n_users}")
    span = 2.0 * np.pi / 3.0
    centers = -np.pi / 3.0 + span * (np.arange(n_clusters) + 0.5) / n_clusters
    rng = np.random.default_rng([seed, _SCENARIO_STREAM])
    jitter = rng.uniform(-aod_jitter, aod_jitter, size=n_users)
    return [
        UserChannelParams(
            mean_aod=float(centers[u % n_clusters] + jitter[u]),
            angular_spread=angular_spread,
            path_count=path_count,
            mean_power=mean_power,
        )
        for u in range(n_users)
    ]


def scenario_correlations(
    params: Sequence[UserChannelParams],
    geometry: ArrayGeometry,
    quadrature_points: int = 256,
) -> list[np.ndarray]:
    """Per-user correlation matrices for a scenario."""
    return [correlation_from_params(p, geometry, quadrature_points) for p in params]
