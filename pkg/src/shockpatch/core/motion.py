"""Patch velocities.

Ordinary patches follow a discretised moving-mesh equation that relaxes the
macro nodes toward equidistribution of a curvature-based density. Meso-patches
relax toward the gradient-weighted centre of their own micro field. Every
moving micro point also picks up the chain-rule term ``V u_x``.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from shockpatch.core.geometry import MacroView, Patch
from shockpatch.typing.config import MotionParams

Vector = NDArray[np.float64]
Region = tuple[int, int]


def second_diff(
    u_prev: ArrayLike,
    u: ArrayLike,
    u_next: ArrayLike,
    h_prev: ArrayLike,
    h: ArrayLike,
) -> Vector:
    """Second derivative on a non-uniform three-point stencil.

    Args:
        u_prev (ArrayLike): ``U_{j-1}``.
        u (ArrayLike): ``U_j``.
        u_next (ArrayLike): ``U_{j+1}``.
        h_prev (ArrayLike): ``H_{j-1} = X_j - X_{j-1}``.
        h (ArrayLike): ``H_j = X_{j+1} - X_j``.

    Raises:
        ValueError: on a nonpositive spacing.

    Returns:
        Vector: ``2 (dU_right - dU_left) / (H_j + H_{j-1})`` with one-sided slopes.
    """
    h_prev = np.asarray(h_prev, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if np.any(h_prev <= 0.0) or np.any(h <= 0.0):
        raise ValueError("macro node spacings must be positive")
    slope_right = (np.asarray(u_next) - np.asarray(u)) / h
    slope_left = (np.asarray(u) - np.asarray(u_prev)) / h_prev
    return 2.0 * (slope_right - slope_left) / (h + h_prev)


def alpha(second: ArrayLike, spacings: ArrayLike, length: float) -> float:
    """Density scale from the trapezoid mean of ``|U''|^(2/3)``.

    Args:
        second (ArrayLike): ``U''`` at consecutive nodes.
        spacings (ArrayLike): Distances between those nodes.
        length (float): Length the integral is averaged over.

    Raises:
        ValueError: with fewer than two values of ``U''``.

    Returns:
        float: ``max(1, mean^3)``.
    """
    powered = np.abs(np.asarray(second, dtype=np.float64)) ** (2.0 / 3.0)
    if powered.size < 2:
        raise ValueError("alpha needs at least two second-derivative values")
    integral = float(np.sum(np.asarray(spacings) * 0.5 * (powered[1:] + powered[:-1])))
    return max(1.0, (integral / length) ** 3)


def density(second: ArrayLike, scale: float) -> Vector:
    """Mesh density ``(1 + U''^2 / alpha)^(1/3)``."""
    return np.cbrt(1.0 + np.asarray(second, dtype=np.float64) ** 2 / scale)


def motion_regions(view: MacroView) -> list[Region]:
    """Split the macro nodes at every node that the mesh equation does not move.

    Args:
        view (MacroView): Macro nodes.

    Returns:
        list[Region]: ``(first, last)`` node indices of each region that holds
            at least one movable node; both ends are fixed nodes.
    """
    anchors = [k for k in range(len(view)) if not view.movable[k]]
    if not anchors or anchors[0] != 0:
        anchors.insert(0, 0)
    if anchors[-1] != len(view) - 1:
        anchors.append(len(view) - 1)
    return [(lo, hi) for lo, hi in zip(anchors, anchors[1:]) if hi - lo >= 2]


def region_alpha(x: Vector, second: Vector) -> float:
    """Density scale of one region, averaged over its full node span.

    Args:
        x (Vector): Node positions of the region, ends included.
        second (Vector): ``U''`` at the interior nodes.

    Returns:
        float: ``alpha`` of the region; a single interior node uses
            ``max(1, U''^2)``.
    """
    if second.size < 2:
        return max(1.0, float(second[0]) ** 2)
    return alpha(second, np.diff(x)[1:-1], float(x[-1] - x[0]))


def region_velocities(x: Vector, u: Vector, tau: float) -> Vector:
    """Mesh velocities of the interior nodes of one region."""
    spacing = np.diff(x)
    second = second_diff(u[:-2], u[1:-1], u[2:], spacing[:-1], spacing[1:])
    scale = region_alpha(x, second)
    rho_inner = density(second, scale)
    # region ends copy the density of their interior neighbour
    rho = np.concatenate((rho_inner[:1], rho_inner, rho_inner[-1:]))
    nodes = x.size
    right = (rho[2:] + rho[1:-1]) * spacing[1:]
    left = (rho[1:-1] + rho[:-2]) * spacing[:-1]
    balance = right - left
    return (nodes - 1) ** 2 * balance / (2.0 * rho_inner * tau)


def ordinary_velocities(
    view: MacroView,
    params: MotionParams,
    regions: list[Region] | None = None,
) -> Vector:
    """Moving-mesh velocity of every macro node.

    Args:
        view (MacroView): Macro nodes, strictly increasing.
        params (MotionParams): Relaxation time and the motion switch.
        regions (list[Region] | None): Precomputed ``motion_regions(view)``.

    Raises:
        ValueError: if the nodes are not strictly increasing.

    Returns:
        Vector: One velocity per node, zero for fixed and meso nodes.
    """
    velocities = np.zeros(len(view))
    if not params.enabled:
        return velocities
    if np.any(np.diff(view.x) <= 0.0):
        raise ValueError("macro nodes must be strictly increasing")
    for lo, hi in motion_regions(view) if regions is None else regions:
        velocities[lo + 1 : hi] = region_velocities(
            view.x[lo : hi + 1], view.u[lo : hi + 1], params.tau
        )
    return velocities


def target_position(x: Vector, u: Vector, stride: int) -> float:
    """Gradient-weighted centre of a micro field.

    Args:
        x (Vector): Uniformly spaced positions, odd count.
        u (Vector): Field values.
        stride (int): Difference stride in micro points.

    Raises:
        ValueError: if the field is shorter than ``stride + 1`` points.

    Returns:
        float: Mean of stride midpoints weighted by squared stride slopes, or the
            middle point when the field is flat.
    """
    if x.size < stride + 1:
        raise ValueError(f"need at least {stride + 1} points for stride {stride}")
    midpoints = 0.5 * (x[stride:] + x[:-stride])
    weights = ((u[stride:] - u[:-stride]) / (x[stride:] - x[:-stride])) ** 2
    total = float(weights.sum())
    if total == 0.0:
        return float(x[x.size // 2])
    return float(midpoints @ weights / total)


def meso_target(patch: Patch, stride: int) -> float:
    """Steep-gradient location the meso-patch tracks."""
    return target_position(patch.x, patch.u, stride)


def meso_velocity(x_hat: float, x0: float, beta: float) -> float:
    """Velocity ``(x_hat - x0) / beta`` shared by every point of a meso-patch."""
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    return (x_hat - x0) / beta


def advect_correction(u: ArrayLike, velocity: ArrayLike, d: float) -> Vector:
    """Chain-rule term ``V u_x`` at the interior points of a moving patch.

    Args:
        u (ArrayLike): Patch field values, edges included.
        velocity (ArrayLike): Patch velocity, scalar or one per interior point.
        d (float): Micro spacing.

    Returns:
        Vector: ``V (u_{i+1} - u_{i-1}) / (2 d)`` at points ``1..len-2``.
    """
    values = np.asarray(u, dtype=np.float64)
    return np.asarray(velocity) * (values[2:] - values[:-2]) / (2.0 * d)


def clamp_to_domain(
    velocity: ArrayLike,
    left_edge: ArrayLike,
    right_edge: ArrayLike,
    domain: tuple[float, float],
    beta: float,
) -> Vector:
    """Keep meso-patches inside ``[a, b]``.

    Outward speed is capped at the remaining distance to the domain end over
    ``beta``, so a patch approaches an end no faster than it relaxes toward its
    target and a patch already on an end cannot move further out.

    Args:
        velocity (ArrayLike): Meso velocities.
        left_edge (ArrayLike): Left edge position of each patch.
        right_edge (ArrayLike): Right edge position of each patch.
        domain (tuple[float, float]): ``(a, b)``.
        beta (float): Meso tracking time.

    Returns:
        Vector: Velocities clipped to ``[(a - left) / beta, (b - right) / beta]``.
    """
    a, b = domain
    lower = np.minimum((a - np.asarray(left_edge)) / beta, 0.0)
    upper = np.maximum((b - np.asarray(right_edge)) / beta, 0.0)
    return np.clip(np.asarray(velocity, dtype=np.float64), lower, upper)
