"""Initial and boundary conditions named in run configurations."""

from __future__ import annotations

from functools import partial

import numpy as np
from numpy.typing import NDArray

from shockpatch.core.geometry import PatchSystem, build_system
from shockpatch.core.heterogeneity import HeterogeneityProfile, profile_from_config
from shockpatch.core.lattice import (
    BoundaryCondition,
    FullDomainState,
    SpatialProfile,
    build_full_domain,
)
from shockpatch.harness.exact import exact_burgers_three_wave
from shockpatch.typing.config import (
    BoundaryConfig,
    ConstantCondition,
    DirichletBoundary,
    InitialCondition,
    RunConfig,
    SineSeriesCondition,
    ThreeWaveBoundary,
    ThreeWaveCondition,
)

Vector = NDArray[np.float64]


def _sine_series(terms: list[tuple[float, float]], x: Vector) -> Vector:
    return sum(
        (amplitude * np.sin(wavenumber * x) for amplitude, wavenumber in terms),
        start=np.zeros_like(x),
    )


def _constant(value: float, x: Vector) -> Vector:
    return np.full_like(x, value, dtype=np.float64)


def _constant_in_time(value: float, t: float) -> float:  # noqa: ARG001
    return value


def _evaluate_three_wave(eps: float, x: Vector) -> Vector:
    return exact_burgers_three_wave(x, 0.0, eps)


def _three_wave_at(eps: float, x: float, t: float) -> float:
    return float(exact_burgers_three_wave(x, t, eps))


def initial_profile(ic: InitialCondition) -> SpatialProfile:
    """Vectorised ``u0(x)`` of a configured initial condition.

    Args:
        ic (InitialCondition): Named initial condition.

    Raises:
        ValueError: on an unknown kind.

    Returns:
        SpatialProfile: Function of the positions.
    """
    match ic:
        case SineSeriesCondition(terms=terms):
            return partial(_sine_series, list(terms))
        case ThreeWaveCondition(eps=eps):
            return partial(_evaluate_three_wave, eps)
        case ConstantCondition(value=value):
            return partial(_constant, value)
    raise ValueError(f"unknown initial condition {ic!r}")


def boundary_condition(
    bc: BoundaryConfig, domain: tuple[float, float]
) -> BoundaryCondition:
    """Dirichlet data of a configured boundary condition.

    Args:
        bc (BoundaryConfig): Named boundary condition.
        domain (tuple[float, float]): ``(a, b)``.

    Raises:
        ValueError: on an unknown kind.

    Returns:
        BoundaryCondition: Values at both ends as functions of time.
    """
    a, b = domain
    match bc:
        case DirichletBoundary(left=left, right=right):
            return BoundaryCondition(
                left=partial(_constant_in_time, left),
                right=partial(_constant_in_time, right),
            )
        case ThreeWaveBoundary(eps=eps):
            return BoundaryCondition(
                left=partial(_three_wave_at, eps, a),
                right=partial(_three_wave_at, eps, b),
            )
    raise ValueError(f"unknown boundary condition {bc!r}")


def full_domain_intervals(config: RunConfig) -> int:
    """Intervals of the full-domain lattice, honouring ``full_points``."""
    if config.full_points is not None:
        return config.full_points - 1
    return config.lattice_intervals


def build_full_state(
    config: RunConfig, profile: HeterogeneityProfile | None = None
) -> FullDomainState:
    """Full-domain initial state of a run configuration."""
    profile = profile or profile_from_config(config.heterogeneity)
    return build_full_domain(
        config.domain,
        full_domain_intervals(config),
        profile,
        initial_profile(config.ic),
        boundary_condition(config.bc, config.domain),
    )


def build_patch_system(
    config: RunConfig, profile: HeterogeneityProfile | None = None
) -> PatchSystem:
    """Initial patch system of a run configuration."""
    profile = profile or profile_from_config(config.heterogeneity)
    return build_system(
        config,
        profile,
        initial_profile(config.ic),
        boundary_condition(config.bc, config.domain),
    )
