"""Error metrics of patch simulations against the full-domain reference."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np
from numpy.typing import ArrayLike, NDArray

Vector = NDArray[np.float64]


class Snapshot(Protocol):
    """Anything that exposes field samples at one time."""

    @property
    def t(self) -> float:
        """Snapshot time."""
        ...

    def micro_points(self) -> tuple[Vector, Vector]:
        """Positions and values of every micro point."""
        ...

    def macro_points(self) -> tuple[Vector, Vector]:
        """Positions and values of every macro node."""
        ...


@dataclass(frozen=True)
class MetricRow:
    """Errors at one snapshot time."""

    t: float
    macro_rmse: float
    micro_rmse: float
    l2_rel_err: float


@dataclass
class MetricSeries:
    """Errors over all snapshot times, in time order."""

    rows: list[MetricRow] = field(default_factory=list[MetricRow])

    def max_l2_rel_err(self) -> float:
        """Largest relative macro error over all times."""
        return max((row.l2_rel_err for row in self.rows), default=0.0)

    def max_macro_rmse(self) -> float:
        """Largest macro RMSE over all times."""
        return max((row.macro_rmse for row in self.rows), default=0.0)


def _rmse(values: Vector, reference: Vector) -> float:
    if values.size == 0:
        return 0.0
    return float(np.sqrt(np.mean((values - reference) ** 2)))


def compare(
    patches: Sequence[Snapshot], reference: Sequence[Snapshot]
) -> MetricSeries:
    """Score patch snapshots against reference snapshots.

    Reference values at patch points come from linear interpolation of the
    reference micro field.

    Args:
        patches (Sequence[Snapshot]): Simulation to score.
        reference (Sequence[Snapshot]): Reference simulation, same times.

    Raises:
        ValueError: if the snapshot times differ.

    Returns:
        MetricSeries: Macro RMSE, micro RMSE and relative macro L2 error per time.
    """
    if len(patches) != len(reference):
        raise ValueError(
            f"snapshot counts differ: {len(patches)} vs {len(reference)}"
        )
    series = MetricSeries()
    for sample, truth in zip(patches, reference):
        if abs(sample.t - truth.t) > 1e-12 * max(1.0, abs(truth.t)):
            raise ValueError(f"snapshot times differ: {sample.t} vs {truth.t}")
        ref_x, ref_u = truth.micro_points()
        micro_x, micro_u = sample.micro_points()
        macro_x, macro_u = sample.macro_points()
        micro_ref = np.interp(micro_x, ref_x, ref_u)
        macro_ref = np.interp(macro_x, ref_x, ref_u)
        error_norm = float(np.linalg.norm(macro_u - macro_ref))
        ref_norm = float(np.linalg.norm(macro_ref))
        series.rows.append(
            MetricRow(
                t=truth.t,
                macro_rmse=_rmse(macro_u, macro_ref),
                micro_rmse=_rmse(micro_u, micro_ref),
                l2_rel_err=error_norm / ref_norm if ref_norm > 0.0 else error_norm,
            )
        )
    return series


def convergence_order(errors: ArrayLike, spacings: ArrayLike) -> float:
    """Least-squares slope of ``log(error)`` against ``log(spacing)``.

    Args:
        errors (ArrayLike): Positive errors.
        spacings (ArrayLike): Matching macro spacings.

    Raises:
        ValueError: with fewer than two points or a nonpositive value.

    Returns:
        float: Observed order of convergence.
    """
    err = np.asarray(errors, dtype=np.float64)
    h = np.asarray(spacings, dtype=np.float64)
    if err.size < 2 or err.shape != h.shape:
        raise ValueError("need at least two matching (error, spacing) pairs")
    if np.any(err <= 0.0) or np.any(h <= 0.0):
        raise ValueError("errors and spacings must be positive")
    slope, _ = np.polyfit(np.log(h), np.log(err), 1)
    return float(slope)
