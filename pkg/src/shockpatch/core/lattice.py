"""Heterogeneous Burgers lattice and the full-domain reference solver.

Point k of a lattice with spacing d evolves as

    du_k/dt = [eps_k (u_{k+1} - u_k) - eps_{k-1} (u_k - u_{k-1})] / d^2
              - [gam_{k+1} u_{k+1}^2 - gam_{k-1} u_{k-1}^2] / (2 d)

which is the conservative difference of the interface flux returned by
``interface_flux``.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from shockpatch.core.heterogeneity import HeterogeneityProfile
from shockpatch.core.stepper import AdaptiveIntegrator, IntegrationError
from shockpatch.logging import get_logger
from shockpatch.typing.config import IntegratorConfig

logger = get_logger(__name__)

Vector = NDArray[np.float64]
SpatialProfile = Callable[[Vector], Vector]


@dataclass(frozen=True)
class BoundaryCondition:
    """Dirichlet values at ``x = a`` and ``x = b`` as functions of time."""

    left: Callable[[float], float]
    right: Callable[[float], float]

    def __call__(self, t: float) -> tuple[float, float]:
        """Return ``(u(a, t), u(b, t))``."""
        return float(self.left(t)), float(self.right(t))


@dataclass
class MicroSegment:
    """Field values on a uniformly spaced run of micro points.

    Attributes:
        x (Vector): Strictly increasing positions.
        u (Vector): Field values at ``x``.
        d (float): Micro spacing.
    """

    x: Vector
    u: Vector
    d: float

    def __post_init__(self) -> None:
        """Check shapes, spacing and finiteness."""
        self.x = np.asarray(self.x, dtype=np.float64)
        self.u = np.asarray(self.u, dtype=np.float64)
        if not self.d > 0.0:
            raise ValueError(f"micro spacing must be positive, got {self.d}")
        if self.x.shape != self.u.shape or self.x.ndim != 1:
            raise ValueError("x and u must be one-dimensional and of equal length")
        if self.x.size > 1:
            # positions carry round-off proportional to their magnitude
            tolerance = 1e-12 * self.d + 8.0 * np.finfo(np.float64).eps * float(
                np.max(np.abs(self.x))
            )
            if np.max(np.abs(np.diff(self.x) - self.d)) > tolerance:
                raise ValueError("micro points are not uniformly spaced by d")
        if not np.all(np.isfinite(self.u)):
            raise ValueError("field values must be finite")


@dataclass(frozen=True)
class FullDomainSnapshot:
    """Full-domain field at one snapshot time."""

    t: float
    x: Vector
    u: Vector

    def micro_points(self) -> tuple[Vector, Vector]:
        """Every lattice point."""
        return self.x, self.u

    def macro_points(self) -> tuple[Vector, Vector]:
        """Every lattice point; the full domain has no coarser level."""
        return self.x, self.u


@dataclass
class FullDomainState:
    """Reference simulation over the entire lattice.

    Attributes:
        segment (MicroSegment): Lattice spanning ``[a, b]``.
        profile (HeterogeneityProfile): Coefficients; point k has phase k mod kappa.
        bc (BoundaryCondition): Dirichlet data imposed on both end points.
        t (float): Current time.
    """

    segment: MicroSegment
    profile: HeterogeneityProfile
    bc: BoundaryCondition
    t: float = 0.0
    eps: Vector = field(init=False, repr=False)
    gam: Vector = field(init=False, repr=False)

    def __post_init__(self) -> None:
        """Tile the coefficients over the lattice and pin the end points."""
        if self.segment.x.size < 3:
            raise ValueError("full domain needs at least 3 lattice points")
        self.eps, self.gam = self.profile.tiled(0, self.segment.x.size)
        self.segment.u[0], self.segment.u[-1] = self.bc(self.t)

    def snapshot(self) -> FullDomainSnapshot:
        """Copy the current field."""
        return FullDomainSnapshot(
            t=self.t, x=self.segment.x.copy(), u=self.segment.u.copy()
        )


def micro_rhs(
    u_window: Sequence[float],
    coeffs: Sequence[float],
    d: float,
) -> float:
    """Time derivative of one lattice point.

    Args:
        u_window (Sequence[float]): ``(u_{k-1}, u_k, u_{k+1})``.
        coeffs (Sequence[float]): ``(eps_{k-1}, eps_k, gam_{k-1}, gam_{k+1})``.
        d (float): Micro spacing.

    Raises:
        ValueError: if d is not positive.

    Returns:
        float: ``du_k/dt``.
    """
    if not d > 0.0:
        raise ValueError(f"micro spacing must be positive, got {d}")
    u_left, u_mid, u_right = u_window
    eps_left, eps_mid, gam_left, gam_right = coeffs
    diffusion = eps_mid * (u_right - u_mid) - eps_left * (u_mid - u_left)
    advection = gam_right * u_right**2 - gam_left * u_left**2
    return diffusion / d**2 - advection / (2.0 * d)


def rhs_kernel(u: Vector, eps: Vector, gam: Vector, d: float) -> Vector:
    """Vectorised ``micro_rhs`` at points 1..len-2 of ``u``."""
    grad = np.diff(u)
    diffusion = eps[1:-1] * grad[1:] - eps[:-2] * grad[:-1]
    gu2 = gam * u * u
    return diffusion / (d * d) - (gu2[2:] - gu2[:-2]) / (2.0 * d)


def interface_flux(u: Vector, eps: Vector, gam: Vector, d: float) -> Vector:
    """Flux through each of the ``len(u) - 1`` interfaces of a segment.

    ``F_{k+1/2} = -eps_k (u_{k+1} - u_k) / d + (gam_{k+1} u_{k+1}^2 + gam_k u_k^2) / 2``
    so that the lattice right-hand side equals ``-(F_{k+1/2} - F_{k-1/2}) / d``.

    Args:
        u (Vector): Field values.
        eps (Vector): Diffusivity of the bond to the right of each point.
        gam (Vector): Advection weight of each point.
        d (float): Micro spacing.

    Returns:
        Vector: Interface fluxes.
    """
    gu2 = gam * u * u
    return -eps[:-1] * np.diff(u) / d + 0.5 * (gu2[1:] + gu2[:-1])


def segment_rhs(
    segment: MicroSegment,
    profile: HeterogeneityProfile,
    phase_of_first_point: int,
) -> Vector:
    """Evaluate the lattice right-hand side at the interior points of a segment.

    Args:
        segment (MicroSegment): Positions and values.
        profile (HeterogeneityProfile): Coefficient tables.
        phase_of_first_point (int): Coefficient phase of ``segment.x[0]``.

    Raises:
        ValueError: if the segment has fewer than 3 points.

    Returns:
        Vector: ``du/dt`` at points ``1..len-2``; end points are left to the
            caller (coupling or boundary data).
    """
    if segment.u.size < 3:
        raise ValueError("segment_rhs needs at least 3 points")
    eps, gam = profile.tiled(phase_of_first_point, segment.u.size)
    return rhs_kernel(segment.u, eps, gam, segment.d)


def full_domain_rhs(state: FullDomainState) -> Callable[[float, Vector], Vector]:
    """Right-hand side over the interior lattice points of a full-domain state."""
    eps, gam, d, bc = state.eps, state.gam, state.segment.d, state.bc
    padded = np.empty(state.segment.u.size)

    def rhs(t: float, interior: Vector) -> Vector:
        padded[0], padded[-1] = bc(t)
        padded[1:-1] = interior
        return rhs_kernel(padded, eps, gam, d)

    return rhs


def default_dt_max(profile: HeterogeneityProfile, d: float) -> float:
    """Diffusive step bound ``0.2 d^2 / max(eps)``."""
    return 0.2 * d * d / max(profile.eps)


def build_full_domain(
    domain: tuple[float, float],
    intervals: int,
    profile: HeterogeneityProfile,
    initial: SpatialProfile,
    bc: BoundaryCondition,
    t0: float = 0.0,
) -> FullDomainState:
    """Sample an initial condition on the full lattice.

    Args:
        domain (tuple[float, float]): ``(a, b)``.
        intervals (int): Number of micro intervals; the lattice has one more point.
        profile (HeterogeneityProfile): Coefficient tables.
        initial (SpatialProfile): Vectorised ``u0(x)``.
        bc (BoundaryCondition): Dirichlet data.
        t0 (float): Initial time.

    Returns:
        FullDomainState: State with end points set to ``bc(t0)``.
    """
    a, b = domain
    if intervals < 2:
        raise ValueError("full domain needs at least 2 intervals")
    x = np.linspace(a, b, intervals + 1)
    d = (b - a) / intervals
    segment = MicroSegment(x=x, u=np.asarray(initial(x), dtype=np.float64), d=d)
    return FullDomainState(segment=segment, profile=profile, bc=bc, t=t0)


def run_full_domain(
    state: FullDomainState,
    t_end: float,
    snapshots: Sequence[float],
    integrator: IntegratorConfig,
    *,
    progress_every: int = 50_000,
) -> list[FullDomainSnapshot]:
    """Integrate the full lattice and record the field at the snapshot times.

    Args:
        state (FullDomainState): Initial state, advanced in place.
        t_end (float): Final time.
        snapshots (Sequence[float]): Increasing times in ``[state.t, t_end]``.
        integrator (IntegratorConfig): Step control; ``dt_max`` defaults to the
            diffusive bound.
        progress_every (int): Accepted steps between progress log events.

    Raises:
        ValueError: if ``t_end`` precedes the current time.
        IntegrationError: when the step size underflows or the step cap is hit;
            the message names the time and the worst lattice position.

    Returns:
        list[FullDomainSnapshot]: One snapshot per requested time.
    """
    if t_end < state.t:
        raise ValueError(f"t_end={t_end} precedes the current time {state.t}")
    d = state.segment.d
    if integrator.dt_max is None:
        integrator = integrator.with_dt_max(default_dt_max(state.profile, d))
    stepper = AdaptiveIntegrator(
        integrator, label="full-domain", progress_every=progress_every
    )
    rhs = full_domain_rhs(state)
    logger.info(
        "full-domain run started",
        points=state.segment.x.size,
        d=d,
        t_end=t_end,
        dt_max=stepper.dt_max,
    )

    trajectory: list[FullDomainSnapshot] = []
    y = state.segment.u[1:-1].copy()
    for t_snap in snapshots:
        if t_snap > t_end:
            break
        try:
            reached = stepper.advance(rhs, state.t, y, t_snap)
        except IntegrationError as exc:
            where = (
                state.segment.x[exc.worst_index + 1]
                if exc.worst_index is not None
                else float("nan")
            )
            raise IntegrationError(
                f"{exc} near x={where:.6g}", t=exc.t, worst_index=exc.worst_index
            ) from exc
        y = reached.y
        state.t = reached.t
        state.segment.u[1:-1] = y
        state.segment.u[0], state.segment.u[-1] = state.bc(state.t)
        trajectory.append(state.snapshot())

    logger.info(
        "full-domain run finished",
        t=state.t,
        accepted=stepper.accepted_steps,
        rejected=stepper.rejected_steps,
    )
    return trajectory
