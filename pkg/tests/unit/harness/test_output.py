from __future__ import annotations

import csv
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
import orjson

from shockpatch import __version__
from shockpatch.core.geometry import PatchKind, PatchSystem
from shockpatch.core.integrate import snapshot_system
from shockpatch.core.lattice import FullDomainSnapshot
from shockpatch.core.merging import MergeRecord
from shockpatch.harness.metrics import MetricRow, MetricSeries
from shockpatch.harness.output import (
    MERGE_HEADER,
    METRIC_HEADER,
    SNAPSHOT_HEADER,
    fmt,
    write_full_snapshots,
    write_manifest,
    write_merges,
    write_metrics,
    write_patch_snapshots,
)
from shockpatch.settings import parse_run_config

SystemFactory = Callable[..., PatchSystem]


def _read(path: Path) -> list[list[str]]:
    with path.open(newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


def test_fmt_round_trips() -> None:
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(1 / 3)) == 1 / 3
    assert fmt(2) == "2"


def test_full_snapshots(tmp_path: Path) -> None:
    snap = FullDomainSnapshot(t=0.5, x=np.array([0.0, 0.5]), u=np.array([1.0, 2.0]))

    rows = _read(write_full_snapshots(tmp_path / "full.csv", [snap]))

    assert rows[0] == list(SNAPSHOT_HEADER)
    assert rows[1:] == [
        ["0.5", "-1", "full", "0", "1"],
        ["0.5", "-1", "full", "0.5", "2"],
    ]


def test_patch_snapshots_list_micro_points_then_nodes(
    tmp_path: Path, make_system: SystemFactory
) -> None:
    system = make_system([(PatchKind.ORDINARY, 0.02, 2), (PatchKind.MESO, 0.5, 4)])

    rows = _read(write_patch_snapshots(tmp_path / "p.csv", [snapshot_system(system)]))

    kinds = [(row[1], row[2]) for row in rows[1:]]
    assert kinds == (
        [("0", "micro")] * 5
        + [("0", "center")]
        + [("1", "micro")] * 9
        + [("1", "node_l"), ("1", "node_r")]
    )
    assert float(rows[6][3]) == 0.02
    assert float(rows[-1][3]) == 0.5 + 0.02


def test_merges_and_metrics(tmp_path: Path) -> None:
    merges = [MergeRecord(t=0.25, x=1.5, s=3, n_left=15, n_right=150)]
    row = MetricRow(t=0.0, macro_rmse=0.0, micro_rmse=0.5, l2_rel_err=1e-3)
    series = MetricSeries(rows=[row])

    merge_rows = _read(write_merges(tmp_path / "merges.csv", merges))
    metric_rows = _read(write_metrics(tmp_path / "metrics.csv", series))

    assert merge_rows == [list(MERGE_HEADER), ["0.25", "1.5", "3", "15", "150"]]
    assert metric_rows == [list(METRIC_HEADER), ["0", "0", "0.5", "0.001"]]


def test_empty_merge_log_keeps_header(tmp_path: Path) -> None:
    assert _read(write_merges(tmp_path / "nested" / "merges.csv", [])) == [
        list(MERGE_HEADER)
    ]


def test_manifest(tmp_path: Path, small_config_payload: dict[str, Any]) -> None:
    config = parse_run_config(small_config_payload)
    outputs = [tmp_path / "metrics.csv", tmp_path / "merges.csv"]

    path = write_manifest(tmp_path / "manifest.json", config, outputs, {"merges": 2})
    manifest = orjson.loads(path.read_bytes())

    assert manifest["version"] == __version__
    assert manifest["seed"] == 0
    assert manifest["mode"] == "compare"
    assert manifest["outputs"] == ["merges.csv", "metrics.csv"]
    assert manifest["summary"] == {"merges": 2}
    assert manifest["config"]["Gamma"] == 1
    assert parse_run_config(manifest["config"]) == config


def test_writers_are_deterministic(
    tmp_path: Path, small_config_payload: dict[str, Any]
) -> None:
    config = parse_run_config(small_config_payload)
    snap = FullDomainSnapshot(t=0.1, x=np.linspace(0, 1, 5), u=np.linspace(1, 2, 5) / 3)

    first = [
        write_full_snapshots(tmp_path / "a" / "full.csv", [snap]).read_bytes(),
        write_manifest(tmp_path / "a" / "m.json", config, [], {}).read_bytes(),
    ]
    second = [
        write_full_snapshots(tmp_path / "b" / "full.csv", [snap]).read_bytes(),
        write_manifest(tmp_path / "b" / "m.json", config, [], {}).read_bytes(),
    ]

    assert first == second
