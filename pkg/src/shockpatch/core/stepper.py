"""Explicit adaptive Runge-Kutta stepping shared by every simulation.

``DormandPrince54`` holds the Butcher tableau of the 5(4) pair, and
``AdaptiveIntegrator`` wraps it with PI step-size control, first-same-as-last
stage reuse, exact stops at requested times and an optional event function
whose sign change interrupts the integration.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from shockpatch.logging import get_logger
from shockpatch.typing.config import IntegratorConfig

logger = get_logger(__name__)

Vector = NDArray[np.float64]
RightHandSide = Callable[[float, Vector], Vector]
EventFunction = Callable[[float, Vector], float]


class IntegrationError(RuntimeError):
    """The integrator could not continue.

    Attributes:
        t (float): Time at which integration stopped.
        worst_index (int | None): State component with the largest scaled
            error in the last rejected step, when known.
    """

    def __init__(self, message: str, *, t: float, worst_index: int | None = None):
        """Store the failure time and location alongside the message."""
        super().__init__(message)
        self.t = t
        self.worst_index = worst_index


@dataclass(frozen=True)
class StepResult:
    """Outcome of one embedded step.

    Attributes:
        y (Vector): Fifth-order solution at ``t + dt``.
        error (float): RMS of the scaled local error estimate.
        worst_index (int): Component with the largest scaled error.
        k_last (Vector): Last stage derivative, equal to ``f(t + dt, y)``.
        accepted (bool): Whether ``error <= 1`` and the solution is finite.
    """

    y: Vector
    error: float
    worst_index: int
    k_last: Vector
    accepted: bool


class DormandPrince54:
    """Dormand-Prince 5(4) pair, seven stages with the last one reusable."""

    order = 5

    # intermediate evaluation times
    c = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)

    # extended butcher table
    a = {
        1: (1 / 5,),
        2: (3 / 40, 9 / 40),
        3: (44 / 45, -56 / 15, 32 / 9),
        4: (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
        5: (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
        6: (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
    }

    # fifth-order minus embedded fourth-order weights
    e = (
        71 / 57600,
        0.0,
        -71 / 16695,
        71 / 1920,
        -17253 / 339200,
        22 / 525,
        -1 / 40,
    )

    def step(
        self,
        fun: RightHandSide,
        t: float,
        y: Vector,
        dt: float,
        *,
        rel_tol: float,
        abs_tol: float,
        k_first: Vector | None = None,
    ) -> StepResult:
        """Advance ``y`` by ``dt`` and estimate the local error.

        Args:
            fun (RightHandSide): ``f(t, y)``.
            t (float): Current time.
            y (Vector): Current state.
            dt (float): Step size.
            rel_tol (float): Relative tolerance of the error norm.
            abs_tol (float): Absolute tolerance of the error norm.
            k_first (Vector | None): ``f(t, y)`` if already known.

        Returns:
            StepResult: The trial solution and its error estimate.
        """
        stages: list[Vector] = [fun(t, y) if k_first is None else k_first]
        for index in range(1, 7):
            increment = sum(
                (coef * k for coef, k in zip(self.a[index], stages) if coef != 0.0),
                start=np.zeros_like(y),
            )
            stages.append(fun(t + self.c[index] * dt, y + dt * increment))
        # row 6 of the tableau is the propagated solution
        y_new = y + dt * sum(
            (coef * k for coef, k in zip(self.a[6], stages) if coef != 0.0),
            start=np.zeros_like(y),
        )
        err = dt * sum(
            (coef * k for coef, k in zip(self.e, stages) if coef != 0.0),
            start=np.zeros_like(y),
        )
        if not np.all(np.isfinite(y_new)):
            return StepResult(
                y=y_new, error=np.inf, worst_index=0, k_last=stages[-1], accepted=False
            )
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        scaled = np.abs(err) / scale
        error = float(np.sqrt(np.mean(scaled**2))) if scaled.size else 0.0
        return StepResult(
            y=y_new,
            error=error,
            worst_index=int(np.argmax(scaled)) if scaled.size else 0,
            k_last=stages[-1],
            accepted=error <= 1.0,
        )


@dataclass(frozen=True)
class Advance:
    """Where an ``advance`` call stopped.

    Attributes:
        t (float): Time reached.
        y (Vector): State at ``t``.
        event (str | None): ``None`` when ``t_stop`` was reached, ``"touched"``
            when the event function ended within tolerance of zero, and
            ``"crossed"`` when an accurate trial step of size ``pending_dt``
            from ``(t, y)`` drove it below ``-event_tol``.
        pending_dt (float): Size of the crossing trial step (0 otherwise).
    """

    t: float
    y: Vector
    event: Literal["touched", "crossed"] | None = None
    pending_dt: float = 0.0


class AdaptiveIntegrator:
    """PI-controlled adaptive stepping over a right-hand side.

    The integrator object carries the step-size history between calls, so a
    simulation split into snapshot intervals keeps a smooth step sequence.
    """

    safety = 0.9
    min_factor = 0.2
    max_factor = 5.0
    # PI exponents for a fifth-order pair
    alpha = 0.7 / 5
    beta = 0.4 / 5

    def __init__(
        self,
        config: IntegratorConfig,
        *,
        label: str = "integrate",
        progress_every: int = 50_000,
    ) -> None:
        """Prepare the stepper.

        Args:
            config (IntegratorConfig): Tolerances and step bounds; ``dt_max``
                must already be resolved.
            label (str): Name used in log events.
            progress_every (int): Accepted steps between progress log events.

        Raises:
            ValueError: if ``config.dt_max`` is unset.
        """
        if config.dt_max is None:
            raise ValueError("dt_max must be resolved before integrating")
        self.config = config
        self.dt_max: float = config.dt_max
        self.dt = config.dt_init
        self.label = label
        self.progress_every = progress_every
        self.method = DormandPrince54()
        self.accepted_steps = 0
        self.rejected_steps = 0
        self._previous_error = 1e-4

    @property
    def total_steps(self) -> int:
        """Accepted plus rejected steps so far."""
        return self.accepted_steps + self.rejected_steps

    def step(
        self,
        fun: RightHandSide,
        t: float,
        y: Vector,
        dt: float,
        k_first: Vector | None = None,
    ) -> StepResult:
        """Take one trial step of size ``dt`` without touching the controller.

        Args:
            fun (RightHandSide): ``f(t, y)``.
            t (float): Current time.
            y (Vector): Current state.
            dt (float): Step size.
            k_first (Vector | None): ``f(t, y)`` if already known.

        Returns:
            StepResult: Trial solution, error estimate and acceptance flag.
        """
        return self.method.step(
            fun,
            t,
            y,
            dt,
            rel_tol=self.config.rel_tol,
            abs_tol=self.config.abs_tol,
            k_first=k_first,
        )

    def _grow(self, error: float) -> float:
        if error == 0.0:
            return self.max_factor
        factor = (
            self.safety
            * error ** (-self.alpha)
            * self._previous_error**self.beta
        )
        return float(min(self.max_factor, max(self.min_factor, factor)))

    def _shrink(self, error: float) -> float:
        if not np.isfinite(error):
            return self.min_factor
        factor = self.safety * error ** (-1 / self.method.order)
        return float(max(self.min_factor, factor))

    def advance(
        self,
        fun: RightHandSide,
        t: float,
        y: Vector,
        t_stop: float,
        *,
        event: EventFunction | None = None,
        event_tol: float = 0.0,
    ) -> Advance:
        """Integrate from ``t`` to ``t_stop`` or until the event fires.

        Args:
            fun (RightHandSide): ``f(t, y)``.
            t (float): Start time.
            y (Vector): Start state.
            t_stop (float): Time to reach exactly.
            event (EventFunction | None): Function that must stay positive.
            event_tol (float): Values in ``[-event_tol, event_tol]`` count as zero.

        Raises:
            IntegrationError: on step-size underflow or too many steps.

        Returns:
            Advance: The state where integration stopped.
        """
        k_first: Vector | None = None
        while t < t_stop:
            if self.total_steps >= self.config.max_steps:
                raise IntegrationError(
                    f"{self.label}: exceeded max_steps={self.config.max_steps}", t=t
                )
            dt = min(self.dt, self.dt_max)
            # absorb a sliver of less than 0.1% of a step into this one
            last = t + dt * (1.0 + 1e-3) >= t_stop
            if last:
                dt = t_stop - t
            trial = self.step(fun, t, y, dt, k_first)
            if not trial.accepted:
                self.rejected_steps += 1
                self.dt = dt * self._shrink(trial.error)
                logger.debug(
                    "step rejected", label=self.label, t=t, dt=dt, error=trial.error
                )
                if self.dt < self.config.dt_min:
                    raise IntegrationError(
                        f"{self.label}: step size underflow at t={t:.17g} "
                        f"(dt={self.dt:.3e} < dt_min={self.config.dt_min:.3e})",
                        t=t,
                        worst_index=trial.worst_index,
                    )
                continue

            t_new = t_stop if last else t + dt
            if event is not None:
                gap = event(t_new, trial.y)
                if gap < -event_tol:
                    return Advance(t=t, y=y, event="crossed", pending_dt=dt)
            self._accept(trial.error, dt, last=last)
            t, y, k_first = t_new, trial.y, trial.k_last
            if event is not None and abs(event(t, y)) <= event_tol:
                return Advance(t=t, y=y, event="touched")
        return Advance(t=t, y=y)

    def _accept(self, error: float, dt: float, *, last: bool) -> None:
        self.accepted_steps += 1
        factor = self._grow(error)
        # a step shortened to land on t_stop says little about the next one
        self.dt = max(self.dt, dt * factor) if last else dt * factor
        self._previous_error = max(error, 1e-4)
        if self.accepted_steps % self.progress_every == 0:
            logger.info(
                "integrator progress",
                label=self.label,
                accepted=self.accepted_steps,
                rejected=self.rejected_steps,
                dt=dt,
            )

    def accept_substep(self, dt: float) -> None:
        """Count a truncated step taken by event localization as accepted."""
        self.accepted_steps += 1
        self.dt = max(self.dt, dt)
