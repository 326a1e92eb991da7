from __future__ import annotations

import numpy as np
import pytest

from shockpatch.core.lattice import FullDomainSnapshot
from shockpatch.harness.metrics import MetricSeries, compare, convergence_order


def _reference(t: float = 0.0) -> FullDomainSnapshot:
    x = np.linspace(0.0, 1.0, 101)
    return FullDomainSnapshot(t=t, x=x, u=1.0 + np.sin(np.pi * x))


def _sampled(t: float, offset: float) -> FullDomainSnapshot:
    x = np.linspace(0.0, 1.0, 11)
    return FullDomainSnapshot(t=t, x=x, u=1.0 + np.sin(np.pi * x) + offset)


def test_identical_fields_score_zero() -> None:
    series = compare([_reference()], [_reference()])

    row = series.rows[0]
    assert (row.macro_rmse, row.micro_rmse, row.l2_rel_err) == (0.0, 0.0, 0.0)


def test_constant_offset() -> None:
    series = compare([_sampled(0.5, 0.02)], [_reference(0.5)])

    row = series.rows[0]
    truth = 1.0 + np.sin(np.pi * np.linspace(0.0, 1.0, 11))
    assert row.t == 0.5
    assert row.macro_rmse == pytest.approx(0.02, rel=1e-3)
    assert row.micro_rmse == pytest.approx(0.02, rel=1e-3)
    assert row.l2_rel_err == pytest.approx(
        0.02 * np.sqrt(11) / np.linalg.norm(truth), rel=1e-3
    )


def test_series_maxima() -> None:
    series = compare(
        [_sampled(0.0, 0.0), _sampled(0.1, -0.05), _sampled(0.2, 0.01)],
        [_reference(0.0), _reference(0.1), _reference(0.2)],
    )

    assert [row.t for row in series.rows] == [0.0, 0.1, 0.2]
    assert series.max_macro_rmse() == pytest.approx(0.05, rel=1e-3)
    assert series.max_l2_rel_err() == series.rows[1].l2_rel_err
    assert MetricSeries().max_l2_rel_err() == 0.0


def test_mismatched_snapshots() -> None:
    with pytest.raises(ValueError, match="snapshot counts differ"):
        compare([_reference()], [])
    with pytest.raises(ValueError, match="snapshot times differ"):
        compare([_reference(0.1)], [_reference(0.2)])


def test_convergence_order_recovers_power_law() -> None:
    spacings = np.array([0.4, 0.2, 0.1, 0.05])

    assert convergence_order(3.0 * spacings**4, spacings) == pytest.approx(4.0)


@pytest.mark.parametrize(
    ("errors", "spacings", "message"),
    [
        ([0.1], [0.1], "at least two"),
        ([0.1, 0.2], [0.1], "at least two"),
        ([0.1, 0.0], [0.2, 0.1], "must be positive"),
    ],
)
def test_convergence_order_rejects_bad_input(
    errors: list[float], spacings: list[float], message: str
) -> None:
    with pytest.raises(ValueError, match=message):
        convergence_order(errors, spacings)
