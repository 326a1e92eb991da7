"""Time integration of a moving patch system.

The ODE state is the interior field of every patch followed by one centre
position per patch. Edge values are not integrated: every right-hand-side
evaluation interpolates them from the current macro nodes. A ``PatchLayout``
holds the index arrays of one patch topology and is rebuilt after each merge.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray

from shockpatch.core.coupling import build_stencil, compute_edge_values
from shockpatch.core.geometry import (
    TOUCH_TOLERANCE,
    NodeSide,
    PatchKind,
    PatchSystem,
    macro_nodes,
    macro_view,
)
from shockpatch.core.lattice import (
    MicroSegment,
    default_dt_max,
    rhs_kernel,
    segment_rhs,
)
from shockpatch.core.merging import MergeRecord, locate_collision, merge_touching
from shockpatch.core.motion import (
    advect_correction,
    clamp_to_domain,
    meso_target,
    meso_velocity,
    motion_regions,
    ordinary_velocities,
    target_position,
)
from shockpatch.core.stepper import AdaptiveIntegrator, IntegrationError, StepResult
from shockpatch.logging import get_logger
from shockpatch.typing.config import IntegratorConfig, MotionParams

logger = get_logger(__name__)

Vector = NDArray[np.float64]


@dataclass(frozen=True)
class PatchFrame:
    """One patch at a snapshot time."""

    index: int
    kind: PatchKind
    x: Vector
    u: Vector
    node_l: int
    node_r: int

    @property
    def n(self) -> int:
        """Half-count of micro intervals."""
        return (self.x.size - 1) // 2

    def nodes(self) -> list[tuple[NodeSide, float, float]]:
        """Side, position and value of each macro node."""
        if self.kind is PatchKind.ORDINARY:
            return [(NodeSide.CENTRE, float(self.x[self.n]), float(self.u[self.n]))]
        return [
            (side, float(self.x[i + self.n]), float(self.u[i + self.n]))
            for side, i in ((NodeSide.LEFT, self.node_l), (NodeSide.RIGHT, self.node_r))
        ]


@dataclass(frozen=True)
class PatchSnapshot:
    """All patches at one snapshot time."""

    t: float
    patches: tuple[PatchFrame, ...]

    def micro_points(self) -> tuple[Vector, Vector]:
        """Positions and values of every patch micro point."""
        return (
            np.concatenate([frame.x for frame in self.patches]),
            np.concatenate([frame.u for frame in self.patches]),
        )

    def macro_points(self) -> tuple[Vector, Vector]:
        """Positions and values of every macro node."""
        nodes = [node for frame in self.patches for node in frame.nodes()]
        return (
            np.array([x for _, x, _ in nodes]),
            np.array([u for _, _, u in nodes]),
        )


@dataclass
class PatchRun:
    """Snapshots and merge log of a patch simulation."""

    snapshots: list[PatchSnapshot] = field(default_factory=list[PatchSnapshot])
    merges: list[MergeRecord] = field(default_factory=list[MergeRecord])


def snapshot_system(system: PatchSystem) -> PatchSnapshot:
    """Copy the patch fields of a system."""
    return PatchSnapshot(
        t=system.t,
        patches=tuple(
            PatchFrame(
                index=j,
                kind=patch.kind,
                x=patch.x,
                u=patch.u.copy(),
                node_l=patch.node_l,
                node_r=patch.node_r,
            )
            for j, patch in enumerate(system.patches)
        ),
    )


class PatchLayout:
    """Index arrays mapping a patch topology onto flat numpy vectors.

    Points of all patches are concatenated in order; the micro kernel and the
    chain-rule term run over the whole concatenation and only patch-interior
    entries are kept.
    """

    def __init__(self, system: PatchSystem, motion: MotionParams) -> None:
        """Compile the layout of the current patches.

        Args:
            system (PatchSystem): Patch system with fixed topology.
            motion (MotionParams): Motion parameters.
        """
        self.system = system
        self.motion = motion
        self.d = system.d
        patches = system.patches
        self.half = np.array([p.n for p in patches], dtype=np.int64)
        sizes = 2 * self.half + 1
        starts = np.concatenate(([0], np.cumsum(sizes)[:-1])).astype(np.int64)
        self.total_points = int(sizes.sum())
        self.left_slots = starts
        self.right_slots = starts + 2 * self.half

        self.interior_slots = np.concatenate(
            [np.arange(s + 1, s + 2 * n) for s, n in zip(starts, self.half)]
        ).astype(np.int64)
        self.interior_patch = np.repeat(np.arange(len(patches)), 2 * self.half - 1)
        self.interior_count = int(self.interior_slots.size)
        # kernel output position k holds point k + 1
        self.kernel_keep = self.interior_slots - 1
        self.kernel_patch = np.repeat(np.arange(len(patches)), sizes)[1:-1]

        eps, gam = zip(*(system.profile.tiled(0, int(size)) for size in sizes))
        self.eps = np.concatenate(eps)
        self.gam = np.concatenate(gam)

        self.view = macro_view(system)
        node_micro = [i for patch in patches for i, _ in macro_nodes(patch)]
        self.node_patch = self.view.patch
        self.node_micro = np.array(node_micro, dtype=np.int64)
        self.node_slots = (
            starts[self.node_patch] + self.half[self.node_patch] + self.node_micro
        )

        self.stencil = build_stencil(system, self.view)
        self.edge_slots = np.where(
            self.stencil.edge_sign < 0,
            self.left_slots[self.stencil.edge_patch],
            self.right_slots[self.stencil.edge_patch],
        )
        self.edge_offset = (
            self.stencil.edge_sign * self.half[self.stencil.edge_patch] * self.d
        )

        self.regions = motion_regions(self.view)
        self.movable_nodes = np.flatnonzero(self.view.movable)
        self.movable_patches = self.node_patch[self.movable_nodes]
        self.meso = [
            (
                j,
                slice(int(starts[j]), int(starts[j] + sizes[j])),
                self.d * np.arange(-patch.n, patch.n + 1),
            )
            for j, patch in enumerate(patches)
            if patch.kind is PatchKind.MESO
        ]
        self.meso_patches = np.array([j for j, _, _ in self.meso], dtype=np.int64)
        self.stride = motion.smoothing_stride or system.kappa
        self._full = np.empty(self.total_points)

    @property
    def size(self) -> int:
        """Length of the ODE state vector."""
        return self.interior_count + self.half.size

    def pack(self) -> Vector:
        """State vector of the system's current fields and positions."""
        interior = np.concatenate([patch.u[1:-1] for patch in self.system.patches])
        centres = np.array([patch.x0 for patch in self.system.patches])
        return np.concatenate((interior, centres))

    def assemble(self, t: float, y: Vector) -> tuple[Vector, Vector]:
        """All patch point values, edges included, and the centre positions.

        Args:
            t (float): Time, for the Dirichlet data.
            y (Vector): State vector.

        Returns:
            tuple[Vector, Vector]: Concatenated point values (a shared buffer)
                and patch centres.
        """
        full = self._full
        centres = y[self.interior_count :]
        full[self.interior_slots] = y[: self.interior_count]
        node_x = centres[self.node_patch] + self.d * self.node_micro
        node_u = full[self.node_slots]
        edge_x = centres[self.stencil.edge_patch] + self.edge_offset
        full[self.edge_slots] = self.stencil.evaluate(node_x, node_u, edge_x)
        full[self.left_slots[0]], full[self.right_slots[-1]] = self.system.bc(t)
        return full, centres

    def velocities(self, full: Vector, centres: Vector) -> Vector:
        """Velocity of every patch.

        Ordinary patches take the mesh velocity of their node; meso-patches
        relax toward their gradient-weighted target without leaving the domain.
        """
        velocity = np.zeros(self.half.size)
        if not self.motion.enabled:
            return velocity
        view = replace(
            self.view,
            x=centres[self.node_patch] + self.d * self.node_micro,
            u=full[self.node_slots],
        )
        node_velocity = ordinary_velocities(view, self.motion, self.regions)
        velocity[self.movable_patches] = node_velocity[self.movable_nodes]
        if not self.meso:
            return velocity
        for j, points, offsets in self.meso:
            x_hat = target_position(centres[j] + offsets, full[points], self.stride)
            velocity[j] = meso_velocity(x_hat, centres[j], self.motion.beta)
        meso = self.meso_patches
        widths = self.half[meso] * self.d
        velocity[meso] = clamp_to_domain(
            velocity[meso],
            centres[meso] - widths,
            centres[meso] + widths,
            self.system.domain,
            self.motion.beta,
        )
        return velocity

    def rhs(self, t: float, y: Vector) -> Vector:
        """Time derivative of the state vector."""
        full, centres = self.assemble(t, y)
        velocity = self.velocities(full, centres)
        du = rhs_kernel(full, self.eps, self.gam, self.d)
        if self.motion.enabled:
            du += advect_correction(full, velocity[self.kernel_patch], self.d)
        return np.concatenate((du[self.kernel_keep], velocity))

    def min_gap(self, t: float, y: Vector) -> float:  # noqa: ARG002
        """Smallest gap between adjacent patches in state ``y``."""
        centres = y[self.interior_count :]
        if centres.size < 2:
            return np.inf
        widths = self.half * self.d
        gaps = (centres[1:] - widths[1:]) - (centres[:-1] + widths[:-1])
        return float(gaps.min())

    def unpack(self, t: float, y: Vector) -> None:
        """Write fields, edges and positions of ``y`` back into the system."""
        full, centres = self.assemble(t, y)
        for j, patch in enumerate(self.system.patches):
            patch.u = full[self.left_slots[j] : self.right_slots[j] + 1].copy()
            patch.x0 = float(centres[j])
        self.system.t = t

    def locate(self, index: int) -> str:
        """Describe the state component ``index`` for diagnostics."""
        if index < self.interior_count:
            j = int(self.interior_patch[index])
            slot = int(self.interior_slots[index])
            micro = slot - int(self.left_slots[j]) - int(self.half[j])
            x = self.system.patches[j].position_of(micro)
            return f"patch {j} near x={x:.6g}"
        return f"position of patch {index - self.interior_count}"


def system_rhs(system: PatchSystem, motion: MotionParams, t: float) -> Vector:
    """Time derivative of a patch system snapshot, one patch at a time.

    Edge values come from ``compute_edge_values``, velocities from
    ``ordinary_velocities`` and ``meso_velocity``, and each patch interior from
    ``segment_rhs`` plus ``advect_correction``. ``PatchLayout.rhs`` computes the
    same vector on flat arrays.

    Args:
        system (PatchSystem): Patches and their fields.
        motion (MotionParams): Motion parameters.
        t (float): Time.

    Returns:
        Vector: Interior ``du/dt`` of every patch, then every patch velocity.
    """
    left, right = compute_edge_values(system, t)
    view = macro_view(system)
    node_velocity = ordinary_velocities(view, motion)
    stride = motion.smoothing_stride or system.kappa
    rates: list[Vector] = []
    velocities: list[float] = []
    for j, patch in enumerate(system.patches):
        u = patch.u.copy()
        u[0], u[-1] = left[j], right[j]
        if patch.kind is PatchKind.ORDINARY:
            velocity = float(node_velocity[view.node_of(j, NodeSide.CENTRE)])
        elif motion.enabled:
            x_hat = meso_target(replace(patch, u=u), stride)
            velocity = float(
                clamp_to_domain(
                    meso_velocity(x_hat, patch.x0, motion.beta),
                    patch.left_edge,
                    patch.right_edge,
                    system.domain,
                    motion.beta,
                )
            )
        else:
            velocity = 0.0
        rate = segment_rhs(MicroSegment(x=patch.x, u=u, d=patch.d), system.profile, 0)
        rates.append(rate + advect_correction(u, velocity, patch.d))
        velocities.append(velocity)
    return np.concatenate((*rates, velocities))


def run_patches(
    system: PatchSystem,
    t_end: float,
    snapshots: Sequence[float],
    integrator: IntegratorConfig,
    motion: MotionParams,
    *,
    progress_every: int = 50_000,
) -> PatchRun:
    """Integrate a patch system, merging patches whenever they collide.

    Args:
        system (PatchSystem): Initial system, advanced in place.
        t_end (float): Final time.
        snapshots (Sequence[float]): Increasing times in ``[system.t, t_end]``.
        integrator (IntegratorConfig): Step control; ``dt_max`` defaults to the
            diffusive bound of the micro lattice.
        motion (MotionParams): Motion parameters.
        progress_every (int): Accepted steps between progress log events.

    Raises:
        ValueError: if ``t_end`` precedes the current time.
        IntegrationError: on step-size underflow or when the step cap is hit.

    Returns:
        PatchRun: Snapshots and merge records.
    """
    if t_end < system.t:
        raise ValueError(f"t_end={t_end} precedes the current time {system.t}")
    if integrator.dt_max is None:
        integrator = integrator.with_dt_max(default_dt_max(system.profile, system.d))
    stepper = AdaptiveIntegrator(
        integrator, label="patches", progress_every=progress_every
    )
    tolerance = TOUCH_TOLERANCE * system.d
    run = PatchRun()
    run.merges.extend(merge_touching(system, system.t))
    layout = PatchLayout(system, motion)
    logger.info(
        "patch run started",
        patches=len(system.patches),
        points=system.total_points,
        coverage=system.coverage,
        t_end=t_end,
        dt_max=stepper.dt_max,
    )

    t, y = system.t, layout.pack()
    for t_snap in snapshots:
        if t_snap > t_end:
            break
        while True:
            try:
                reached = stepper.advance(
                    layout.rhs,
                    t,
                    y,
                    t_snap,
                    event=layout.min_gap if motion.enabled else None,
                    event_tol=tolerance,
                )
            except IntegrationError as exc:
                where = (
                    layout.locate(exc.worst_index)
                    if exc.worst_index is not None
                    else "unknown location"
                )
                raise IntegrationError(
                    f"{exc} ({where})", t=exc.t, worst_index=exc.worst_index
                ) from exc
            t, y = reached.t, reached.y
            if reached.event is None:
                break
            if reached.event == "crossed":
                t, y = _truncate_at_collision(
                    stepper, layout, t, y, reached.pending_dt, tolerance
                )
            layout.unpack(t, y)
            run.merges.extend(merge_touching(system, t))
            layout = PatchLayout(system, motion)
            y = layout.pack()
        layout.unpack(t, y)
        run.snapshots.append(snapshot_system(system))

    logger.info(
        "patch run finished",
        t=t,
        patches=len(system.patches),
        merges=len(run.merges),
        accepted=stepper.accepted_steps,
        rejected=stepper.rejected_steps,
    )
    return run


def _truncate_at_collision(
    stepper: AdaptiveIntegrator,
    layout: PatchLayout,
    t: float,
    y: Vector,
    dt: float,
    tolerance: float,
) -> tuple[float, Vector]:
    """Shorten a step that made patches overlap so it ends on the collision."""

    def probe(theta: float) -> tuple[float, StepResult]:
        trial = stepper.step(layout.rhs, t, y, theta * dt)
        return layout.min_gap(t + theta * dt, trial.y), trial

    theta, trial = locate_collision(probe, tolerance)
    stepper.accept_substep(theta * dt)
    return t + theta * dt, trial.y
