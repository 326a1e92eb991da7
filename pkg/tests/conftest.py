from __future__ import annotations

from collections.abc import Callable, Iterator
from typing import Any

import numpy as np
import pytest

from shockpatch.core.geometry import Patch, PatchKind, PatchSystem
from shockpatch.core.heterogeneity import HeterogeneityProfile
from shockpatch.core.lattice import BoundaryCondition

PatchSpec = tuple[PatchKind, float, int]
SystemFactory = Callable[..., PatchSystem]


def _zero(t: float) -> float:  # noqa: ARG001
    return 0.0


@pytest.fixture
def reset_logger_state() -> Iterator[None]:
    """Reset shockpatch logging configuration around a test."""
    from logging import getLogger

    from shockpatch.logging import configure_logger

    configure_logger.cache_clear()
    root_logger = getLogger()
    root_logger.handlers.clear()

    yield

    root_logger.handlers.clear()
    configure_logger.cache_clear()
    configure_logger()


@pytest.fixture
def reset_settings_cache() -> Iterator[None]:
    """Reset cached settings around a test."""
    from shockpatch.settings import get_settings

    get_settings.cache_clear()

    yield

    get_settings.cache_clear()


@pytest.fixture
def zero_bc() -> BoundaryCondition:
    """Homogeneous Dirichlet data."""
    return BoundaryCondition(left=_zero, right=_zero)


@pytest.fixture
def uniform_profile() -> HeterogeneityProfile:
    """Homogeneous coefficients eps=0.01, gam=1."""
    return HeterogeneityProfile(kappa=1, eps=(0.01,), gam=(1.0,))


@pytest.fixture
def make_system(
    zero_bc: BoundaryCondition, uniform_profile: HeterogeneityProfile
) -> SystemFactory:
    """Build a patch system from ``(kind, x0, n)`` triples on a lattice.

    Meso-patches get nodes at ``-n // 2`` and ``n // 2``; the first and last
    patches are anchored.
    """

    def factory(
        specs: list[PatchSpec],
        *,
        d: float = 0.01,
        gamma: int = 1,
        field: Callable[[np.ndarray], np.ndarray] = np.sin,
        profile: HeterogeneityProfile | None = None,
        domain: tuple[float, float] | None = None,
    ) -> PatchSystem:
        patches = []
        for index, (kind, x0, n) in enumerate(specs):
            offset = max(1, n // 2) if kind is PatchKind.MESO else 0
            x = x0 + d * np.arange(-n, n + 1)
            patches.append(
                Patch(
                    kind=kind,
                    x0=x0,
                    n=n,
                    d=d,
                    u=np.asarray(field(x), dtype=np.float64),
                    node_l=-offset,
                    node_r=offset,
                    anchored=index in (0, len(specs) - 1),
                )
            )
        if domain is None:
            domain = (patches[0].left_edge, patches[-1].right_edge)
        return PatchSystem(
            patches=patches,
            domain=domain,
            gamma=gamma,
            profile=profile or uniform_profile,
            bc=zero_bc,
            d=d,
        )

    return factory


@pytest.fixture
def small_config_payload() -> dict[str, Any]:
    """A quick compare-mode run on the unit interval."""
    return {
        "name": "small",
        "domain": [0.0, 1.0],
        "d": 0.01,
        "heterogeneity": {"kappa": 1, "eps_target": 0.05},
        "patches": {"count": 5, "n": 3},
        "Gamma": 1,
        "motion": {"tau": 10.0, "beta": 1.0},
        "ic": {"kind": "sine_series", "terms": [[0.1, 3.141592653589793]]},
        "bc": {"kind": "dirichlet"},
        "t_end": 0.01,
        "snapshot_dt": 0.005,
        "mode": "compare",
    }
