from __future__ import annotations

from typing import Any

import numpy as np
import pytest

from shockpatch.core.geometry import PatchKind
from shockpatch.harness.exact import exact_burgers_three_wave
from shockpatch.harness.problem import (
    boundary_condition,
    build_full_state,
    build_patch_system,
    full_domain_intervals,
    initial_profile,
)
from shockpatch.settings import parse_run_config
from shockpatch.typing.config import (
    ConstantCondition,
    DirichletBoundary,
    SineSeriesCondition,
    ThreeWaveBoundary,
    ThreeWaveCondition,
)


def test_sine_series_sums_terms() -> None:
    profile = initial_profile(SineSeriesCondition(terms=[(1.0, 1.0), (0.5, 3.0)]))
    x = np.linspace(0.0, 2.0, 9)

    np.testing.assert_allclose(profile(x), np.sin(x) + 0.5 * np.sin(3.0 * x))


def test_constant_condition() -> None:
    profile = initial_profile(ConstantCondition(value=0.25))

    np.testing.assert_array_equal(profile(np.zeros(4)), np.full(4, 0.25))


def test_three_wave_condition_matches_exact_solution() -> None:
    profile = initial_profile(ThreeWaveCondition(eps=0.002))
    x = np.linspace(0.0, 1.0, 21)

    np.testing.assert_array_equal(profile(x), exact_burgers_three_wave(x, 0.0, 0.002))


def test_dirichlet_boundary_is_constant() -> None:
    bc = boundary_condition(DirichletBoundary(left=1.5, right=-0.5), (0.0, 1.0))

    assert bc(0.0) == (1.5, -0.5)
    assert bc(7.0) == (1.5, -0.5)


def test_three_wave_boundary_tracks_exact_solution() -> None:
    bc = boundary_condition(ThreeWaveBoundary(eps=0.01), (0.0, 1.0))

    left, right = bc(0.3)

    assert left == pytest.approx(float(exact_burgers_three_wave(0.0, 0.3, 0.01)))
    assert right == pytest.approx(float(exact_burgers_three_wave(1.0, 0.3, 0.01)))


def test_full_points_override(small_config_payload: dict[str, Any]) -> None:
    config = parse_run_config(small_config_payload)
    assert full_domain_intervals(config) == 100

    small_config_payload["full_points"] = 201
    assert full_domain_intervals(parse_run_config(small_config_payload)) == 200


def test_full_state_samples_initial_condition(
    small_config_payload: dict[str, Any],
) -> None:
    state = build_full_state(parse_run_config(small_config_payload))

    assert state.segment.x.size == 101
    assert state.segment.u[0] == 0.0
    assert state.segment.u[-1] == 0.0
    np.testing.assert_allclose(
        state.segment.u[1:-1], 0.1 * np.sin(np.pi * state.segment.x[1:-1])
    )


def test_patch_system_layout(small_config_payload: dict[str, Any]) -> None:
    system = build_patch_system(parse_run_config(small_config_payload))

    assert len(system.patches) == 5
    assert all(patch.kind is PatchKind.ORDINARY for patch in system.patches)
    assert system.patches[0].anchored
    assert system.patches[-1].anchored
    assert system.patches[0].x0 == pytest.approx(0.03)
    assert system.patches[-1].x0 == pytest.approx(0.97)
    for patch in system.patches:
        np.testing.assert_allclose(patch.u, 0.1 * np.sin(np.pi * patch.x), atol=1e-12)
