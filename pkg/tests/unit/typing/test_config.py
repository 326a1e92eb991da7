from __future__ import annotations

from typing import Any

import pytest
from pydantic import ValidationError

from shockpatch.typing.config import (
    HeterogeneityConfig,
    IntegratorConfig,
    PatchLayoutConfig,
    RunConfig,
    ThreeWaveCondition,
)


def test_run_config_defaults(small_config_payload: dict[str, Any]) -> None:
    config = RunConfig.model_validate(small_config_payload)

    assert config.gamma == 1
    assert config.motion.enabled
    assert config.integrator.dt_max is None
    assert config.output.metrics == "metrics.csv"
    assert config.lattice_intervals == 100
    assert config.lattice_spacing == pytest.approx(0.01)


def test_lattice_rounds_to_whole_periods(small_config_payload: dict[str, Any]) -> None:
    small_config_payload["heterogeneity"]["kappa"] = 3
    small_config_payload["patches"]["n"] = 3

    config = RunConfig.model_validate(small_config_payload)

    assert config.lattice_intervals == 99
    assert config.lattice_spacing == pytest.approx(1 / 99)


def test_snapshot_times_end_exactly_on_t_end(
    small_config_payload: dict[str, Any],
) -> None:
    small_config_payload["t_end"] = 0.012

    times = RunConfig.model_validate(small_config_payload).snapshot_times()

    assert times[:-1] == pytest.approx([0.0, 0.005, 0.01])
    assert times[-1] == 0.012


@pytest.mark.parametrize(
    ("path", "value", "message"),
    [
        (("patches", "n"), 16, "n=16 is not a multiple of kappa=5"),
        (("domain",), [1.0, 0.0], "a < b"),
        (("d",), 0.4, "too coarse"),
        (("Gamma",), 0, "Gamma"),
        (("mode",), "both", "mode"),
    ],
)
def test_run_config_rejects_inconsistent_values(
    small_config_payload: dict[str, Any],
    path: tuple[str, ...],
    value: Any,
    message: str,
) -> None:
    small_config_payload["heterogeneity"]["kappa"] = 5
    small_config_payload["patches"]["n"] = 5
    target = small_config_payload
    for key in path[:-1]:
        target = target[key]
    target[path[-1]] = value

    with pytest.raises(ValidationError, match=message):
        RunConfig.model_validate(small_config_payload)


def test_meso_placements_are_checked(small_config_payload: dict[str, Any]) -> None:
    small_config_payload["patches"]["meso"] = [{"centre": 1.5, "n": 3}]
    with pytest.raises(ValidationError, match="outside the domain"):
        RunConfig.model_validate(small_config_payload)

    small_config_payload["patches"]["meso"] = [
        {"centre": 0.5, "n": 3, "node_offset": 3}
    ]
    with pytest.raises(ValidationError, match="inside the patch"):
        RunConfig.model_validate(small_config_payload)


def test_unknown_keys_are_rejected(small_config_payload: dict[str, Any]) -> None:
    small_config_payload["motion"]["speed"] = 2.0

    with pytest.raises(ValidationError, match="speed"):
        RunConfig.model_validate(small_config_payload)


def test_heterogeneity_tables() -> None:
    config = HeterogeneityConfig(eps=[0.1, 0.2], gam=[1.0, 2.0], eps_target=0.01)

    assert config.explicit
    assert config.period == 2


@pytest.mark.parametrize(
    ("payload", "message"),
    [
        ({"eps_target": 0.01}, "either 'kappa'"),
        ({"eps": [0.1], "eps_target": 0.01}, "both 'eps' and 'gam'"),
        ({"eps": [0.1], "gam": [1.0, 2.0], "eps_target": 0.01}, "same length"),
        ({"eps": [0.1, -0.1], "gam": [1.0, 2.0], "eps_target": 0.01}, "positive"),
        (
            {"kappa": 3, "eps": [0.1, 0.2], "gam": [1.0, 2.0], "eps_target": 0.01},
            "kappa disagrees",
        ),
    ],
)
def test_heterogeneity_rejects_bad_tables(
    payload: dict[str, Any], message: str
) -> None:
    with pytest.raises(ValidationError, match=message):
        HeterogeneityConfig.model_validate(payload)


def test_unfixed_boundary_patches_are_rejected() -> None:
    with pytest.raises(ValidationError, match="periodic"):
        PatchLayoutConfig(count=4, n=2, boundary_patches_fixed=False)


def test_integrator_bounds() -> None:
    with pytest.raises(ValidationError, match="dt_min"):
        IntegratorConfig(dt_min=1e-3, dt_init=1e-4)
    with pytest.raises(ValidationError, match="dt_init"):
        IntegratorConfig(dt_init=1e-3, dt_max=1e-4)


def test_with_dt_max_clips_initial_step() -> None:
    updated = IntegratorConfig(dt_init=1e-3, dt_min=1e-6).with_dt_max(1e-4)

    assert updated.dt_max == 1e-4
    assert updated.dt_init == 1e-4
    assert updated.dt_min == 1e-6


def test_three_wave_default_viscosity() -> None:
    assert ThreeWaveCondition().eps == 0.001
