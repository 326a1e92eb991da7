"""Closed-form Burgers solutions used for initial and boundary data."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

# (plateau value, front speed factor, x offset, width factor) of each wave
_THREE_WAVES = (
    (0.1, 4.95, 0.5, 20.0),
    (0.5, 0.75, 0.5, 4.0),
    (1.0, 0.0, 0.375, 2.0),
)


def exact_burgers_three_wave(
    x: ArrayLike, t: float, eps: float
) -> NDArray[np.float64]:
    """Three-plateau travelling-front solution of viscous Burgers.

    ``u = (0.1 w1 + 0.5 w2 + w3) / (w1 + w2 + w3)`` with
    ``w1 = exp((0.5 - x - 4.95 t) / (20 eps))``,
    ``w2 = exp((0.5 - x - 0.75 t) / (4 eps))`` and
    ``w3 = exp((0.375 - x) / (2 eps))``. The largest exponent is subtracted
    before exponentiating, so no term overflows.

    Args:
        x (ArrayLike): Positions.
        t (float): Time.
        eps (float): Viscosity.

    Raises:
        ValueError: if eps is not positive.

    Returns:
        NDArray[np.float64]: Field values with the shape of ``x``.
    """
    if not eps > 0.0:
        raise ValueError(f"viscosity must be positive, got {eps}")
    xs = np.asarray(x, dtype=np.float64)
    exponents = np.stack(
        [
            (offset - xs - speed * t) / (width * eps)
            for _, speed, offset, width in _THREE_WAVES
        ]
    )
    weights = np.exp(exponents - exponents.max(axis=0))
    plateaus = np.array([value for value, *_ in _THREE_WAVES]).reshape(
        (-1,) + (1,) * xs.ndim
    )
    return np.sum(plateaus * weights, axis=0) / np.sum(weights, axis=0)
