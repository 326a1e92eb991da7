"""Patch-edge values by Lagrange interpolation of macro node values.

Interpolation stencils never reach across a meso-patch: a meso-patch enters a
stencil only through the macro node facing the query, and its own edges look
only outward from their nearer node.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from shockpatch.core.geometry import MacroView, NodeSide, PatchSystem, macro_view

Vector = NDArray[np.float64]


def lagrange_weights(nodes: Sequence[float] | Vector, target: float) -> Vector:
    """Cardinal Lagrange weights of ``nodes`` evaluated at ``target``.

    Args:
        nodes (Sequence[float] | Vector): Pairwise distinct node positions.
        target (float): Evaluation point.

    Raises:
        ValueError: on an empty node list or repeated positions.

    Returns:
        Vector: ``w_k = prod_{l != k} (target - X_l) / (X_k - X_l)``.
    """
    xs = np.asarray(nodes, dtype=np.float64)
    if xs.size == 0:
        raise ValueError("interpolation needs at least one node")
    differences = xs[:, None] - xs[None, :]
    np.fill_diagonal(differences, 1.0)
    if np.any(differences == 0.0):
        raise ValueError("interpolation nodes must be distinct")
    offsets = np.broadcast_to(target - xs[None, :], differences.shape).copy()
    np.fill_diagonal(offsets, 1.0)
    return np.prod(offsets / differences, axis=1)


def lagrange_value(nodes: Sequence[tuple[float, float]], target: float) -> float:
    """Interpolate ``(X_k, U_k)`` pairs at ``target``.

    Args:
        nodes (Sequence[tuple[float, float]]): Node positions and values.
        target (float): Evaluation point.

    Returns:
        float: Value of the interpolating polynomial.
    """
    xs = np.array([x for x, _ in nodes], dtype=np.float64)
    us = np.array([u for _, u in nodes], dtype=np.float64)
    return float(lagrange_weights(xs, target) @ us)


def _window(view: MacroView, query: int, gamma: int) -> range:
    """Node indices interpolating an edge whose own node is ``query``."""
    side = view.side[query]
    last = len(view) - 1
    lo = query if side is NodeSide.RIGHT else 0
    if side is not NodeSide.RIGHT:
        for k in range(query - 1, -1, -1):
            if view.side[k] is NodeSide.RIGHT:
                lo = k
                break
    hi = query if side is NodeSide.LEFT else last
    if side is not NodeSide.LEFT:
        for k in range(query + 1, last + 1):
            if view.side[k] is NodeSide.LEFT:
                hi = k
                break
    available = hi - lo + 1
    if available < 2:
        raise ValueError(
            f"edge interpolation at node {query} has only {available} node available"
        )
    width = min(2 * gamma + 1, available)
    start = min(max(query - gamma, lo), hi - width + 1)
    return range(start, start + width)


def _query_node(view: MacroView, patch: int, edge: NodeSide) -> int:
    if edge not in (NodeSide.LEFT, NodeSide.RIGHT):
        raise ValueError(f"edge must be left or right, got {edge}")
    return view.node_of(patch, edge)


def neighbor_set(
    j: int, edge: NodeSide, system: PatchSystem
) -> list[tuple[int, NodeSide]]:
    """Macro nodes interpolating one edge of patch ``j``.

    Args:
        j (int): Patch index.
        edge (NodeSide): ``LEFT`` or ``RIGHT`` edge.
        system (PatchSystem): Patch system.

    Raises:
        ValueError: if fewer than two nodes are available.

    Returns:
        list[tuple[int, NodeSide]]: ``(patch index, node side)`` in order.
    """
    view = macro_view(system)
    window = _window(view, _query_node(view, j, edge), system.gamma)
    return [(int(view.patch[k]), view.side[k]) for k in window]


@dataclass(frozen=True)
class CouplingStencil:
    """Interpolation stencils of every interior patch edge.

    Attributes:
        edge_patch (NDArray[np.int64]): Patch owning each coupled edge.
        edge_sign (NDArray[np.int64]): ``-1`` for left edges, ``+1`` for right.
        nodes (NDArray[np.int64]): ``(E, K)`` macro node indices, padded.
        mask (NDArray[np.bool_]): ``(E, K)`` true where ``nodes`` is real.
    """

    edge_patch: NDArray[np.int64]
    edge_sign: NDArray[np.int64]
    nodes: NDArray[np.int64]
    mask: NDArray[np.bool_]

    def weights(self, node_x: Vector, edge_x: Vector) -> Vector:
        """Lagrange weights ``(E, K)`` for the current node and edge positions."""
        selected = node_x[self.nodes]
        offsets = edge_x[:, None] - selected
        differences = selected[:, :, None] - selected[:, None, :]
        pair_mask = self.mask[:, :, None] & self.mask[:, None, :]
        diagonal = np.eye(self.nodes.shape[1], dtype=bool)[None, :, :]
        ignore = ~pair_mask | diagonal
        factors = np.where(
            ignore, 1.0, offsets[:, None, :] / np.where(ignore, 1.0, differences)
        )
        return np.where(self.mask, np.prod(factors, axis=2), 0.0)

    def evaluate(self, node_x: Vector, node_u: Vector, edge_x: Vector) -> Vector:
        """Interpolated value at each coupled edge."""
        return np.sum(self.weights(node_x, edge_x) * node_u[self.nodes], axis=1)


def build_stencil(
    system: PatchSystem, view: MacroView | None = None
) -> CouplingStencil:
    """Collect the neighbour sets of all edges not on the domain boundary.

    Args:
        system (PatchSystem): Patch system.
        view (MacroView | None): Its macro view, if already computed.

    Returns:
        CouplingStencil: Padded stencil arrays.
    """
    if view is None:
        view = macro_view(system)
    last = len(system.patches) - 1
    patches: list[int] = []
    signs: list[int] = []
    windows: list[range] = []
    for j in range(last + 1):
        if j > 0:
            patches.append(j)
            signs.append(-1)
            windows.append(_window(view, view.node_of(j, NodeSide.LEFT), system.gamma))
        if j < last:
            patches.append(j)
            signs.append(1)
            windows.append(_window(view, view.node_of(j, NodeSide.RIGHT), system.gamma))
    width = max((len(w) for w in windows), default=1)
    nodes = np.zeros((len(windows), width), dtype=np.int64)
    mask = np.zeros((len(windows), width), dtype=bool)
    for row, window in enumerate(windows):
        nodes[row, : len(window)] = list(window)
        mask[row, : len(window)] = True
    return CouplingStencil(
        edge_patch=np.array(patches, dtype=np.int64),
        edge_sign=np.array(signs, dtype=np.int64),
        nodes=nodes,
        mask=mask,
    )


def compute_edge_values(
    system: PatchSystem, t: float | None = None
) -> tuple[Vector, Vector]:
    """Edge values of every patch.

    Args:
        system (PatchSystem): Patch system.
        t (float | None): Time of the Dirichlet data, the system time if omitted.

    Returns:
        tuple[Vector, Vector]: Left and right edge values per patch; the outer
            edges of the boundary patches take the Dirichlet data.
    """
    view = macro_view(system)
    stencil = build_stencil(system, view)
    edge_x = np.array(
        [
            system.patches[p].x0 + s * system.patches[p].half_width
            for p, s in zip(stencil.edge_patch, stencil.edge_sign)
        ]
    )
    values = stencil.evaluate(view.x, view.u, edge_x)
    count = len(system.patches)
    left = np.empty(count)
    right = np.empty(count)
    left[stencil.edge_patch[stencil.edge_sign < 0]] = values[stencil.edge_sign < 0]
    right[stencil.edge_patch[stencil.edge_sign > 0]] = values[stencil.edge_sign > 0]
    left[0], right[-1] = system.bc(system.t if t is None else t)
    return left, right
