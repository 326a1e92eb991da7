"""Run modes: full-domain reference, patch scheme, or both compared."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from shockpatch.core.heterogeneity import profile_from_config
from shockpatch.core.integrate import PatchRun, run_patches
from shockpatch.core.lattice import FullDomainSnapshot, run_full_domain
from shockpatch.harness.metrics import MetricSeries, compare
from shockpatch.harness.output import (
    write_full_snapshots,
    write_manifest,
    write_merges,
    write_metrics,
    write_patch_snapshots,
)
from shockpatch.harness.problem import build_full_state, build_patch_system
from shockpatch.logging import get_logger
from shockpatch.typing.config import RunConfig

logger = get_logger(__name__)


@dataclass
class RunResult:
    """Everything a run produced."""

    config: RunConfig
    full: list[FullDomainSnapshot] | None = None
    patches: PatchRun | None = None
    metrics: MetricSeries | None = None
    files: list[Path] = field(default_factory=list[Path])


def simulate_full(
    config: RunConfig, progress_every: int = 50_000
) -> list[FullDomainSnapshot]:
    """Run the full-domain reference of a configuration."""
    state = build_full_state(config, profile_from_config(config.heterogeneity))
    return run_full_domain(
        state,
        config.t_end,
        config.snapshot_times(),
        config.integrator,
        progress_every=progress_every,
    )


def simulate_patches(config: RunConfig, progress_every: int = 50_000) -> PatchRun:
    """Run the moving patch scheme of a configuration."""
    system = build_patch_system(config, profile_from_config(config.heterogeneity))
    return run_patches(
        system,
        config.t_end,
        config.snapshot_times(),
        config.integrator,
        config.motion,
        progress_every=progress_every,
    )


def _simulate_both(
    config: RunConfig, *, parallel: bool, progress_every: int
) -> tuple[list[FullDomainSnapshot], PatchRun]:
    if not parallel:
        return (
            simulate_full(config, progress_every),
            simulate_patches(config, progress_every),
        )
    with ProcessPoolExecutor(max_workers=2) as pool:
        full = pool.submit(simulate_full, config, progress_every)
        patches = pool.submit(simulate_patches, config, progress_every)
        return full.result(), patches.result()


def execute(
    config: RunConfig,
    out_dir: Path | None = None,
    *,
    parallel: bool = False,
    progress_every: int = 50_000,
) -> RunResult:
    """Run a configuration in its mode and write the outputs.

    Args:
        config (RunConfig): Validated configuration.
        out_dir (Path | None): Output directory; nothing is written when None.
        parallel (bool): In compare mode, run both simulations in two processes.
        progress_every (int): Accepted steps between progress log events.

    Returns:
        RunResult: Trajectories, merge log, metrics and written files.
    """
    logger.info("run started", name=config.name, mode=config.mode, t_end=config.t_end)
    result = RunResult(config=config)
    if config.mode == "compare":
        result.full, result.patches = _simulate_both(
            config, parallel=parallel, progress_every=progress_every
        )
        result.metrics = compare(result.patches.snapshots, result.full)
    elif config.mode == "full":
        result.full = simulate_full(config, progress_every)
    else:
        result.patches = simulate_patches(config, progress_every)

    if out_dir is not None:
        result.files = write_outputs(result, out_dir)
    summary = _summary(result)
    logger.info("run finished", name=config.name, **summary)
    return result


def _summary(result: RunResult) -> dict[str, Any]:
    summary: dict[str, Any] = {}
    if result.patches is not None:
        summary["merges"] = len(result.patches.merges)
        if result.patches.snapshots:
            summary["final_patches"] = len(result.patches.snapshots[-1].patches)
    if result.metrics is not None:
        summary["max_l2_rel_err"] = result.metrics.max_l2_rel_err()
        summary["max_macro_rmse"] = result.metrics.max_macro_rmse()
    return summary


def write_outputs(result: RunResult, out_dir: Path) -> list[Path]:
    """Write the CSV files and manifest of a finished run.

    Returns:
        list[Path]: Files written, manifest last.
    """
    names = result.config.output
    files: list[Path] = []
    if result.full is not None:
        files.append(write_full_snapshots(out_dir / names.snapshots_full, result.full))
    if result.patches is not None:
        files.append(
            write_patch_snapshots(
                out_dir / names.snapshots_patches, result.patches.snapshots
            )
        )
        files.append(write_merges(out_dir / names.merges, result.patches.merges))
    if result.metrics is not None:
        files.append(write_metrics(out_dir / names.metrics, result.metrics))
    files.append(
        write_manifest(out_dir / names.manifest, result.config, files, _summary(result))
    )
    return files
