"""Patches, the ordered patch system and its initial layout."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from shockpatch.core.heterogeneity import HeterogeneityProfile
from shockpatch.core.lattice import BoundaryCondition, SpatialProfile
from shockpatch.typing.config import MesoPlacement, RunConfig

Vector = NDArray[np.float64]

# edges closer than this fraction of d count as touching
TOUCH_TOLERANCE = 1e-10


class PatchKind(str, Enum):
    """Ordinary patches carry one macro node, meso-patches two."""

    ORDINARY = "ordinary"
    MESO = "meso"


class NodeSide(str, Enum):
    """Which macro node of a patch an entry refers to."""

    CENTRE = "center"
    LEFT = "node_l"
    RIGHT = "node_r"


@dataclass
class Patch:
    """A rigid run of ``2n + 1`` micro points ``x0 + d i`` for ``i = -n..n``.

    Attributes:
        kind (PatchKind): Ordinary or meso.
        x0 (float): Position of micro index 0.
        n (int): Half-count of micro intervals.
        d (float): Micro spacing.
        u (Vector): Field values, ``u[i + n]`` at micro index ``i``.
        node_l (int): Micro index of the left macro node.
        node_r (int): Micro index of the right macro node.
        anchored (bool): Not moved by the mesh equation (boundary patches and
            merges with them); an anchored meso-patch still tracks its target
            without leaving the domain.
    """

    kind: PatchKind
    x0: float
    n: int
    d: float
    u: Vector
    node_l: int = 0
    node_r: int = 0
    anchored: bool = False

    def __post_init__(self) -> None:
        """Check the point count and node indices."""
        self.u = np.asarray(self.u, dtype=np.float64)
        if self.n < 1:
            raise ValueError(f"patch half-count must be positive, got {self.n}")
        if self.u.shape != (2 * self.n + 1,):
            raise ValueError(
                f"patch with n={self.n} needs {2 * self.n + 1} values, "
                f"got {self.u.shape}"
            )
        if not -self.n < self.node_l <= self.node_r < self.n:
            raise ValueError(
                f"macro nodes ({self.node_l}, {self.node_r}) must be interior "
                f"micro indices of a patch with n={self.n}"
            )
        if self.kind is PatchKind.ORDINARY and (self.node_l, self.node_r) != (0, 0):
            raise ValueError("ordinary patches have their macro node at the centre")

    @property
    def half_width(self) -> float:
        """``h = n d``."""
        return self.n * self.d

    @property
    def left_edge(self) -> float:
        """Position of micro index ``-n``."""
        return self.x0 - self.half_width

    @property
    def right_edge(self) -> float:
        """Position of micro index ``n``."""
        return self.x0 + self.half_width

    @property
    def x(self) -> Vector:
        """Micro point positions."""
        return self.x0 + self.d * np.arange(-self.n, self.n + 1)

    def value_at(self, index: int) -> float:
        """Field value at micro index ``index``."""
        return float(self.u[index + self.n])

    def position_of(self, index: int) -> float:
        """Position of micro index ``index``."""
        return self.x0 + self.d * index


@dataclass
class PatchSystem:
    """Ordered, non-overlapping patches covering part of ``[a, b]``.

    The first and last patches are anchored to the domain ends: their outer
    micro edges sit on ``a`` and ``b`` where the Dirichlet data applies. A
    meso-patch formed with a boundary patch may drift inward and keeps the
    Dirichlet data on its outer edge point.
    """

    patches: list[Patch]
    domain: tuple[float, float]
    gamma: int
    profile: HeterogeneityProfile
    bc: BoundaryCondition
    d: float
    t: float = 0.0

    @property
    def kappa(self) -> int:
        """Heterogeneity period."""
        return self.profile.kappa

    @property
    def total_points(self) -> int:
        """Number of micro points over all patches."""
        return sum(2 * patch.n + 1 for patch in self.patches)

    @property
    def coverage(self) -> float:
        """Fraction of the domain simulated by micro points."""
        a, b = self.domain
        return sum(2 * patch.half_width for patch in self.patches) / (b - a)

    def gaps(self) -> Vector:
        """Gap between each pair of adjacent patches."""
        left = np.array([patch.left_edge for patch in self.patches[1:]])
        right = np.array([patch.right_edge for patch in self.patches[:-1]])
        return left - right


@dataclass(frozen=True)
class MacroView:
    """Ordered macro nodes of a patch system.

    Attributes:
        x (Vector): Node positions, strictly increasing.
        u (Vector): Node values.
        patch (NDArray[np.int64]): Owning patch index of each node.
        side (tuple[NodeSide, ...]): Centre, left or right node of that patch.
        movable (NDArray[np.bool_]): Nodes moved by the moving-mesh equation.
    """

    x: Vector
    u: Vector
    patch: NDArray[np.int64]
    side: tuple[NodeSide, ...]
    movable: NDArray[np.bool_] = field(repr=False)

    def __len__(self) -> int:
        """Number of macro nodes."""
        return int(self.x.size)

    @property
    def is_meso(self) -> NDArray[np.bool_]:
        """Nodes belonging to meso-patches."""
        return np.array([side is not NodeSide.CENTRE for side in self.side])

    def node_of(self, patch: int, side: NodeSide) -> int:
        """Index of a patch's node in the view.

        Args:
            patch (int): Patch index.
            side (NodeSide): For meso-patches ``LEFT`` or ``RIGHT``; any side
                selects the single node of an ordinary patch.

        Raises:
            KeyError: if the patch has no such node.

        Returns:
            int: Position in the node list.
        """
        candidates = np.flatnonzero(self.patch == patch)
        if candidates.size == 1:
            return int(candidates[0])
        for index in candidates:
            if self.side[index] is side:
                return int(index)
        raise KeyError(f"patch {patch} has no {side.value} node")


def macro_nodes(patch: Patch) -> list[tuple[int, NodeSide]]:
    """Micro indices and sides of the macro nodes of one patch."""
    if patch.kind is PatchKind.ORDINARY:
        return [(0, NodeSide.CENTRE)]
    return [(patch.node_l, NodeSide.LEFT), (patch.node_r, NodeSide.RIGHT)]


def macro_view(system: PatchSystem) -> MacroView:
    """Project the system onto its macro nodes without modifying it.

    Args:
        system (PatchSystem): Patch system.

    Returns:
        MacroView: One entry per ordinary patch, two per meso-patch.
    """
    xs: list[float] = []
    us: list[float] = []
    owners: list[int] = []
    sides: list[NodeSide] = []
    movable: list[bool] = []
    for index, patch in enumerate(system.patches):
        for micro_index, side in macro_nodes(patch):
            xs.append(patch.position_of(micro_index))
            us.append(patch.value_at(micro_index))
            owners.append(index)
            sides.append(side)
            movable.append(patch.kind is PatchKind.ORDINARY and not patch.anchored)
    return MacroView(
        x=np.array(xs),
        u=np.array(us),
        patch=np.array(owners, dtype=np.int64),
        side=tuple(sides),
        movable=np.array(movable, dtype=bool),
    )


def validate_system(system: PatchSystem) -> None:
    """Check ordering, spacing and phase invariants of a patch system.

    Raises:
        ValueError: naming the first violated invariant.
    """
    if not system.patches:
        raise ValueError("a patch system needs at least one patch")
    a, b = system.domain
    tolerance = TOUCH_TOLERANCE * system.d
    for index, patch in enumerate(system.patches):
        if patch.n % system.kappa:
            raise ValueError(
                f"patch {index}: half-count n={patch.n} is not a multiple of "
                f"kappa={system.kappa}"
            )
        if abs(patch.d - system.d) > 1e-12 * system.d:
            raise ValueError(f"patch {index}: micro spacing differs from the system")
    first, last = system.patches[0], system.patches[-1]
    if first.left_edge < a - tolerance or last.right_edge > b + tolerance:
        raise ValueError("patches must stay inside the domain")
    on_ends = (
        first.kind is PatchKind.MESO or abs(first.left_edge - a) <= tolerance,
        last.kind is PatchKind.MESO or abs(last.right_edge - b) <= tolerance,
    )
    if not all(on_ends):
        raise ValueError("boundary patches must have their outer edges on a and b")
    gaps = system.gaps()
    if gaps.size and float(gaps.min()) < -tolerance:
        worst = int(np.argmin(gaps))
        raise ValueError(
            f"patches {worst} and {worst + 1} overlap by {-float(gaps[worst]):.3e}"
        )


def _snap_left_edge(edge: float, a: float, period_length: float) -> float:
    """Nearest lattice position ``a + m * period_length`` to ``edge``."""
    return a + round((edge - a) / period_length) * period_length


def _sample(
    kind: PatchKind,
    x0: float,
    n: int,
    d: float,
    initial: SpatialProfile,
    *,
    node_offset: int = 0,
    anchored: bool = False,
) -> Patch:
    x = x0 + d * np.arange(-n, n + 1)
    return Patch(
        kind=kind,
        x0=x0,
        n=n,
        d=d,
        u=np.asarray(initial(x), dtype=np.float64),
        node_l=-node_offset,
        node_r=node_offset,
        anchored=anchored,
    )


def default_node_offset(n: int, kappa: int) -> int:
    """Default node offset of a pre-placed meso-patch, about ``n / 2``."""
    offset = round(n / (2 * kappa)) * kappa
    return max(1, min(n - 1, offset))


def allocate_intervals(lengths: list[float], total: int) -> list[int]:
    """Split ``total`` intervals over gaps in proportion to their lengths.

    Every gap receives at least one interval; the rest follow the largest
    remainder rule, ties going to the leftmost gap.

    Args:
        lengths (list[float]): Positive gap lengths.
        total (int): Number of intervals, at least ``len(lengths)``.

    Raises:
        ValueError: on a nonpositive gap or too few intervals.

    Returns:
        list[int]: Intervals per gap.
    """
    if any(length <= 0.0 for length in lengths):
        raise ValueError("patch layout leaves no room between fixed patches")
    if total < len(lengths):
        raise ValueError("fewer intervals than gaps")
    spare = total - len(lengths)
    span = sum(lengths)
    shares = [spare * length / span for length in lengths]
    counts = [int(np.floor(share)) for share in shares]
    remainders = [share - count for share, count in zip(shares, counts)]
    order = sorted(range(len(lengths)), key=lambda g: (-remainders[g], g))
    for g in order[: spare - sum(counts)]:
        counts[g] += 1
    return [count + 1 for count in counts]


def build_system(
    config: RunConfig,
    profile: HeterogeneityProfile,
    initial: SpatialProfile,
    bc: BoundaryCondition,
) -> PatchSystem:
    """Lay out the initial patches and sample the initial condition.

    Boundary patches are centred at ``a + h`` and ``b - h``. Interior ordinary
    patches are spread evenly over the gaps between the boundary-patch centres
    and any pre-placed meso-patches, each gap receiving intervals in proportion
    to its length. Every left edge is then moved to the nearest lattice position
    ``a + m kappa d`` so patch coefficient phases match the full domain.

    Args:
        config (RunConfig): Run configuration.
        profile (HeterogeneityProfile): Coefficient tables.
        initial (SpatialProfile): Vectorised ``u0(x)``.
        bc (BoundaryCondition): Dirichlet data.

    Raises:
        ValueError: if patches overlap or a half-count is not a multiple of kappa.

    Returns:
        PatchSystem: The validated initial system.
    """
    a, b = config.domain
    d = config.lattice_spacing
    kappa = profile.kappa
    n = config.patches.n
    h = n * d
    if n % kappa:
        raise ValueError(f"patch half-count n={n} is not a multiple of kappa={kappa}")
    period_length = kappa * d

    mesos: list[MesoPlacement] = sorted(config.patches.meso, key=lambda m: m.centre)
    meso_patches = []
    for placement in mesos:
        if placement.n % kappa:
            raise ValueError(
                f"meso half-count n={placement.n} is not a multiple of kappa={kappa}"
            )
        left = _snap_left_edge(placement.centre - placement.n * d, a, period_length)
        offset = placement.node_offset or default_node_offset(placement.n, kappa)
        meso_patches.append(
            _sample(
                PatchKind.MESO, left + placement.n * d, placement.n, d, initial,
                node_offset=offset,
            )
        )

    # gaps run between boundary-patch centres and meso edges
    starts = [a + h] + [patch.right_edge for patch in meso_patches]
    stops = [patch.left_edge for patch in meso_patches] + [b - h]
    lengths = [stop - start for start, stop in zip(starts, stops)]
    interior = config.patches.count - 2
    intervals = allocate_intervals(lengths, interior + len(lengths))

    ordinary_centres: list[list[float]] = []
    for start, length, count in zip(starts, lengths, intervals):
        centres = [start + j * length / count for j in range(1, count)]
        ordinary_centres.append(
            [_snap_left_edge(c - h, a, period_length) + h for c in centres]
        )

    patches = [_sample(PatchKind.ORDINARY, a + h, n, d, initial, anchored=True)]
    for g, centres in enumerate(ordinary_centres):
        patches.extend(_sample(PatchKind.ORDINARY, c, n, d, initial) for c in centres)
        if g < len(meso_patches):
            patches.append(meso_patches[g])
    patches.append(_sample(PatchKind.ORDINARY, b - h, n, d, initial, anchored=True))

    system = PatchSystem(
        patches=patches,
        domain=(a, b),
        gamma=config.gamma,
        profile=profile,
        bc=bc,
        d=d,
    )
    patches[0].u[0], patches[-1].u[-1] = bc(0.0)
    validate_system(system)
    if np.any(system.gaps() <= 0.0):
        raise ValueError("initial patches touch or overlap; use fewer patches")
    return system
