"""CSV and manifest writers for run outputs.

All numbers are written with 17 significant digits and nothing time-dependent
goes into any file, so repeated runs produce identical bytes.
"""

from __future__ import annotations

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import orjson

from shockpatch import __version__
from shockpatch.core.integrate import PatchSnapshot
from shockpatch.core.lattice import FullDomainSnapshot
from shockpatch.core.merging import MergeRecord
from shockpatch.harness.metrics import MetricSeries
from shockpatch.typing.config import RunConfig

SNAPSHOT_HEADER = ("t", "patch", "kind", "x", "u")
MERGE_HEADER = ("t", "x", "s", "n_left", "n_right")
METRIC_HEADER = ("t", "macro_rmse", "micro_rmse", "l2_rel_err")


def fmt(value: float) -> str:
    """Round-trippable decimal text of a float."""
    return format(float(value), ".17g")


def _write_rows(
    path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]
) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_full_snapshots(path: Path, snapshots: Sequence[FullDomainSnapshot]) -> Path:
    """Write full-domain snapshots, one row per lattice point with patch ``-1``."""

    def rows() -> Iterable[list[str]]:
        for snap in snapshots:
            t = fmt(snap.t)
            for x, u in zip(snap.x, snap.u):
                yield [t, "-1", "full", fmt(x), fmt(u)]

    return _write_rows(path, SNAPSHOT_HEADER, rows())


def write_patch_snapshots(path: Path, snapshots: Sequence[PatchSnapshot]) -> Path:
    """Write patch snapshots: every micro point, then the macro nodes of each patch."""

    def rows() -> Iterable[list[str]]:
        for snap in snapshots:
            t = fmt(snap.t)
            for frame in snap.patches:
                index = str(frame.index)
                for x, u in zip(frame.x, frame.u):
                    yield [t, index, "micro", fmt(x), fmt(u)]
                for side, x, u in frame.nodes():
                    yield [t, index, side.value, fmt(x), fmt(u)]

    return _write_rows(path, SNAPSHOT_HEADER, rows())


def write_merges(path: Path, merges: Sequence[MergeRecord]) -> Path:
    """Write the merge log."""
    rows = (
        [fmt(m.t), fmt(m.x), str(m.s), str(m.n_left), str(m.n_right)] for m in merges
    )
    return _write_rows(path, MERGE_HEADER, rows)


def write_metrics(path: Path, series: MetricSeries) -> Path:
    """Write one metrics row per snapshot time."""
    rows = (
        [fmt(r.t), fmt(r.macro_rmse), fmt(r.micro_rmse), fmt(r.l2_rel_err)]
        for r in series.rows
    )
    return _write_rows(path, METRIC_HEADER, rows)


def write_manifest(
    path: Path, config: RunConfig, outputs: Sequence[Path], extra: dict[str, Any]
) -> Path:
    """Write the run manifest: configuration echo, version, seed and file list.

    Args:
        path (Path): Manifest location.
        config (RunConfig): Configuration that was run.
        outputs (Sequence[Path]): Files written by the run.
        extra (dict[str, Any]): Summary values to record.

    Returns:
        Path: The manifest location.
    """
    payload = {
        "config": config.model_dump(mode="json", by_alias=True),
        "version": __version__,
        "seed": config.heterogeneity.seed,
        "mode": config.mode,
        "outputs": sorted(p.name for p in outputs),
        "summary": extra,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(
        orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS)
        + b"\n"
    )
    return path
