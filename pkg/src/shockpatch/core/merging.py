"""Patch collisions and the construction of merged meso-patches."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import TypeVar

import numpy as np

from shockpatch.core.geometry import (
    TOUCH_TOLERANCE,
    Patch,
    PatchKind,
    PatchSystem,
    validate_system,
)
from shockpatch.logging import get_logger

logger = get_logger(__name__)

Payload = TypeVar("Payload")

MAX_BISECTIONS = 128


class CollisionError(RuntimeError):
    """A collision could not be located or the patches cannot be merged."""


@dataclass(frozen=True)
class MergeRecord:
    """One merge event.

    Attributes:
        t (float): Collision time.
        x (float): Collision position (the shared edge).
        s (int): Index of the left patch before the merge.
        n_left (int): Half-count of the left patch.
        n_right (int): Half-count of the right patch.
    """

    t: float
    x: float
    s: int
    n_left: int
    n_right: int


def min_gap(system: PatchSystem) -> tuple[int, float]:
    """Smallest gap between adjacent patches.

    Args:
        system (PatchSystem): At least two patches.

    Raises:
        ValueError: with fewer than two patches.

    Returns:
        tuple[int, float]: Index ``s`` of the left patch of the closest pair
            (lowest index on ties) and the gap.
    """
    gaps = system.gaps()
    if gaps.size == 0:
        raise ValueError("min_gap needs at least two patches")
    s = int(np.argmin(gaps))
    return s, float(gaps[s])


def locate_collision(
    probe: Callable[[float], tuple[float, Payload]],
    tolerance: float,
    max_iterations: int = MAX_BISECTIONS,
) -> tuple[float, Payload]:
    """Bisect a step fraction until the smallest gap vanishes to tolerance.

    Args:
        probe (Callable[[float], tuple[float, Payload]]): Re-integrates the
            fraction ``theta`` of the trial step and returns the smallest gap
            with whatever state the caller needs back.
        tolerance (float): Accept ``|gap| <= tolerance``.
        max_iterations (int): Bisection cap.

    Raises:
        CollisionError: if no fraction meets the tolerance.

    Returns:
        tuple[float, Payload]: Fraction of the step and the probe payload there.
    """
    lo, hi = 0.0, 1.0
    for _ in range(max_iterations):
        theta = 0.5 * (lo + hi)
        gap, payload = probe(theta)
        if abs(gap) <= tolerance:
            return theta, payload
        if gap > 0.0:
            lo = theta
        else:
            hi = theta
    raise CollisionError(
        f"collision not located within {max_iterations} bisections "
        f"(bracket [{lo:.17g}, {hi:.17g}] of the step)"
    )


def snap_pair(left: Patch, right: Patch) -> float:
    """Move one patch so the pair shares an edge point exactly.

    The right patch moves unless it is anchored.

    Returns:
        float: The shared edge position.
    """
    if right.anchored and not left.anchored:
        left.x0 = right.left_edge - left.half_width
        return right.left_edge
    right.x0 = left.right_edge + right.half_width
    return left.right_edge


def merge(left: Patch, right: Patch, kappa: int) -> Patch:
    """Join two touching patches into one meso-patch.

    The left field fills micro indices ``-n'..n_s - n_right``, the right field
    the rest, and the shared edge point takes the average of both edge values.

    Args:
        left (Patch): Patch ``s``.
        right (Patch): Patch ``s + 1``, its left edge on the right edge of ``left``.
        kappa (int): Heterogeneity period.

    Raises:
        CollisionError: if the edges do not coincide or the spacings differ.
        ValueError: if a half-count is not a multiple of kappa.

    Returns:
        Patch: The merged meso-patch with ``n' = n_s + n_right``.
    """
    for patch in (left, right):
        if patch.n % kappa:
            raise ValueError(
                f"patch half-count n={patch.n} is not a multiple of kappa={kappa}"
            )
    if left.d != right.d:
        raise CollisionError("cannot merge patches with different micro spacing")
    mismatch = right.left_edge - left.right_edge
    if abs(mismatch) > TOUCH_TOLERANCE * left.d:
        raise CollisionError(f"patch edges do not coincide (gap {mismatch:.3e})")
    n_merged = left.n + right.n
    shared = 0.5 * (left.u[-1] + right.u[0])
    return Patch(
        kind=PatchKind.MESO,
        x0=left.x0 + right.n * left.d,
        n=n_merged,
        d=left.d,
        u=np.concatenate((left.u[:-1], [shared], right.u[1:])),
        node_l=left.node_l + left.n - n_merged,
        node_r=right.node_r + left.n,
        anchored=left.anchored or right.anchored,
    )


def post_merge_reindex(system: PatchSystem, s: int, merged: Patch) -> PatchSystem:
    """Replace patches ``s`` and ``s + 1`` by their merge.

    Neighbour sets and motion regions are derived from the patch list, so
    callers rebuild them from the returned system.

    Returns:
        PatchSystem: The same system with one patch fewer.
    """
    system.patches[s : s + 2] = [merged]
    validate_system(system)
    return system


def merge_pair(system: PatchSystem, s: int, t: float) -> MergeRecord:
    """Snap, merge and reindex the pair ``(s, s + 1)`` at time ``t``."""
    left, right = system.patches[s], system.patches[s + 1]
    x = snap_pair(left, right)
    record = MergeRecord(t=t, x=x, s=s, n_left=left.n, n_right=right.n)
    post_merge_reindex(system, s, merge(left, right, system.kappa))
    logger.info(
        "patches merged",
        t=t,
        x=x,
        s=s,
        n_left=record.n_left,
        n_right=record.n_right,
        patches=len(system.patches),
    )
    return record


def merge_touching(system: PatchSystem, t: float) -> list[MergeRecord]:
    """Merge every adjacent pair whose gap is within tolerance, closest first.

    Returns:
        list[MergeRecord]: Merges in the order performed.
    """
    records: list[MergeRecord] = []
    while len(system.patches) > 1:
        s, gap = min_gap(system)
        if gap > TOUCH_TOLERANCE * system.d:
            break
        records.append(merge_pair(system, s, t))
    return records
