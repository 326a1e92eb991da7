from __future__ import annotations

from collections.abc import Callable
from typing import Any

import numpy as np
import pytest

from shockpatch.core.geometry import (
    NodeSide,
    Patch,
    PatchKind,
    PatchSystem,
    allocate_intervals,
    default_node_offset,
    macro_view,
    validate_system,
)
from shockpatch.core.heterogeneity import HeterogeneityProfile
from shockpatch.harness.examples import load_example
from shockpatch.harness.problem import build_patch_system
from shockpatch.settings import parse_run_config

ORDINARY = PatchKind.ORDINARY
MESO = PatchKind.MESO

SystemFactory = Callable[..., PatchSystem]


def _ordinary_runs(kinds: list[PatchKind]) -> list[int]:
    runs = [0]
    for kind in kinds[1:-1]:
        if kind is MESO:
            runs.append(0)
        else:
            runs[-1] += 1
    return runs


def _assert_on_lattice(system: PatchSystem) -> None:
    a, _ = system.domain
    period = system.kappa * system.d
    for patch in system.patches:
        cycles = (patch.left_edge - a) / period
        assert cycles == pytest.approx(round(cycles), abs=1e-6)


def test_patch_rejects_wrong_value_count() -> None:
    with pytest.raises(ValueError, match="needs 5 values"):
        Patch(kind=ORDINARY, x0=0.0, n=2, d=0.1, u=np.zeros(4))


def test_patch_rejects_nodes_on_edges() -> None:
    with pytest.raises(ValueError, match="interior"):
        Patch(kind=MESO, x0=0.0, n=2, d=0.1, u=np.zeros(5), node_l=-2, node_r=1)


def test_patch_positions() -> None:
    patch = Patch(kind=ORDINARY, x0=1.0, n=2, d=0.1, u=np.arange(5.0))

    np.testing.assert_allclose(patch.x, [0.8, 0.9, 1.0, 1.1, 1.2])
    assert patch.left_edge == pytest.approx(0.8)
    assert patch.right_edge == pytest.approx(1.2)
    assert patch.value_at(1) == 3.0


def test_build_system_example_one_layout() -> None:
    config = load_example(1)

    system = build_patch_system(config)

    assert len(system.patches) == 26
    assert all(patch.kind is ORDINARY for patch in system.patches)
    assert system.patches[0].anchored and system.patches[-1].anchored
    assert not any(patch.anchored for patch in system.patches[1:-1])
    assert system.patches[0].left_edge == pytest.approx(-np.pi, abs=1e-12)
    assert system.patches[-1].right_edge == pytest.approx(np.pi, abs=1e-12)
    assert system.total_points == 26 * 51
    assert system.coverage == pytest.approx(26 * 50 * system.d / (2 * np.pi))
    assert float(system.gaps().min()) > 0.0
    _assert_on_lattice(system)
    np.testing.assert_allclose(system.patches[5].u, -np.sin(system.patches[5].x))


def test_build_system_example_two_places_meso_patches() -> None:
    system = build_patch_system(load_example(2))

    kinds = [patch.kind for patch in system.patches]
    assert kinds.count(MESO) == 2
    assert kinds.count(ORDINARY) == 28
    assert _ordinary_runs(kinds) == [9, 7, 10]
    mesos = [patch for patch in system.patches if patch.kind is MESO]
    assert [patch.x0 for patch in mesos] == pytest.approx([2.0, 4.0], abs=3 * system.d)
    assert all(patch.n == 150 for patch in mesos)
    assert all((patch.node_l, patch.node_r) == (-75, 75) for patch in mesos)
    _assert_on_lattice(system)


def test_build_system_example_three_layout() -> None:
    system = build_patch_system(load_example(3))

    kinds = [patch.kind for patch in system.patches]
    assert _ordinary_runs(kinds) == [1, 1, 3]
    assert len(system.patches) == 9
    _assert_on_lattice(system)


def test_build_system_two_boundary_patches(
    small_config_payload: dict[str, Any],
) -> None:
    small_config_payload["patches"] = {"count": 2, "n": 3}
    system = build_patch_system(parse_run_config(small_config_payload))

    assert len(system.patches) == 2
    assert all(patch.anchored for patch in system.patches)
    assert not macro_view(system).movable.any()


def test_build_system_rejects_crowded_layout(
    small_config_payload: dict[str, Any],
) -> None:
    small_config_payload["patches"] = {"count": 30, "n": 3}

    with pytest.raises(ValueError, match="overlap"):
        build_patch_system(parse_run_config(small_config_payload))


def test_macro_view_of_ordinary_patches(make_system: SystemFactory) -> None:
    system = make_system([(ORDINARY, 0.02, 2), (ORDINARY, 0.5, 2), (ORDINARY, 0.98, 2)])

    view = macro_view(system)

    assert len(view) == 3
    assert view.side == (NodeSide.CENTRE,) * 3
    np.testing.assert_allclose(view.x, [0.02, 0.5, 0.98])
    np.testing.assert_allclose(view.u, np.sin(view.x))
    assert view.movable.tolist() == [False, True, False]


def test_macro_view_orders_meso_nodes(make_system: SystemFactory) -> None:
    system = make_system(
        [(ORDINARY, 0.02, 2), (MESO, 0.4, 10), (ORDINARY, 0.7, 2), (ORDINARY, 0.98, 2)]
    )
    before = [patch.u.copy() for patch in system.patches]

    view = macro_view(system)

    assert len(view) == 5
    assert view.side[1:3] == (NodeSide.LEFT, NodeSide.RIGHT)
    assert view.x[1] == pytest.approx(0.35)
    assert view.x[2] == pytest.approx(0.45)
    assert view.node_of(1, NodeSide.RIGHT) == 2
    assert view.node_of(2, NodeSide.LEFT) == 3
    assert view.is_meso.tolist() == [False, True, True, False, False]
    # projection leaves the system untouched
    for patch, values in zip(system.patches, before):
        np.testing.assert_array_equal(patch.u, values)


def test_macro_view_is_strictly_increasing_for_random_systems(
    make_system: SystemFactory,
) -> None:
    rng = np.random.default_rng(2)
    for _ in range(50):
        count = int(rng.integers(3, 12))
        halves = rng.integers(1, 6, size=count)
        kinds = [MESO if rng.random() < 0.3 and n > 1 else ORDINARY for n in halves]
        kinds[0] = kinds[-1] = ORDINARY
        gaps = rng.uniform(0.001, 0.05, size=count - 1)
        specs = []
        edge = 0.0
        for j, (kind, n) in enumerate(zip(kinds, halves)):
            specs.append((kind, edge + n * 0.01, int(n)))
            edge += 2 * n * 0.01 + (gaps[j] if j < count - 1 else 0.0)
        system = make_system(specs)

        view = macro_view(system)

        assert np.all(np.diff(view.x) > 0.0)
        assert len(view) == count + kinds.count(MESO)


def test_validate_system_reports_overlap(make_system: SystemFactory) -> None:
    system = make_system([(ORDINARY, 0.02, 2), (ORDINARY, 0.05, 2), (ORDINARY, 0.2, 2)])

    with pytest.raises(ValueError, match="patches 0 and 1 overlap"):
        validate_system(system)


def test_validate_system_reports_misaligned_half_count(
    make_system: SystemFactory,
) -> None:
    profile = HeterogeneityProfile(kappa=2, eps=(0.1, 0.1), gam=(1.0, 1.0))
    system = make_system(
        [(ORDINARY, 0.02, 2), (ORDINARY, 0.5, 3), (ORDINARY, 0.98, 2)],
        profile=profile,
    )

    with pytest.raises(ValueError, match="n=3 is not a multiple of kappa=2"):
        validate_system(system)


def test_validate_system_allows_boundary_meso_inside_domain(
    make_system: SystemFactory,
) -> None:
    specs = [(MESO, 0.1, 8), (ORDINARY, 0.5, 2), (ORDINARY, 0.98, 2)]
    system = make_system(specs, domain=(0.0, 1.0))

    validate_system(system)

    system.patches[0].x0 = 0.05
    with pytest.raises(ValueError, match="inside the domain"):
        validate_system(system)


def test_validate_system_pins_ordinary_boundary_patches(
    make_system: SystemFactory,
) -> None:
    specs = [(ORDINARY, 0.05, 2), (ORDINARY, 0.5, 2), (ORDINARY, 0.98, 2)]
    system = make_system(specs, domain=(0.0, 1.0))

    with pytest.raises(ValueError, match="outer edges on a and b"):
        validate_system(system)


def test_allocate_intervals_largest_remainder() -> None:
    assert allocate_intervals([1.0, 1.0, 2.0], 8) == [2, 2, 4]
    assert allocate_intervals([0.195, 0.15, 0.445], 8) == [2, 2, 4]
    assert sum(allocate_intervals([0.3, 0.7, 1.1, 0.2], 17)) == 17


def test_allocate_intervals_rejects_empty_gap() -> None:
    with pytest.raises(ValueError, match="no room"):
        allocate_intervals([1.0, 0.0], 4)


@pytest.mark.parametrize(
    ("n", "kappa", "expected"),
    [(150, 3, 75), (15, 3, 6), (10, 1, 5), (1, 1, 1)],
)
def test_default_node_offset(n: int, kappa: int, expected: int) -> None:
    assert default_node_offset(n, kappa) == expected
