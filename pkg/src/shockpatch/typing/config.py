"""Pydantic models for run configuration documents."""

from __future__ import annotations

import math
from typing import Annotated, Literal, TypeAlias

from pydantic import BaseModel, ConfigDict, Field, model_validator


class HeterogeneityConfig(BaseModel):
    """Heterogeneous lattice coefficients, sampled or given as a table.

    Either ``kappa`` with the log-normal strengths and ``seed`` (sampled), or
    explicit ``eps``/``gam`` tables of equal length. Diffusivities are always
    rescaled to the harmonic mean ``eps_target``; sampled advection
    coefficients are rescaled to mean one, tabulated ones are kept as given.
    """

    model_config = ConfigDict(extra="forbid")

    kappa: int | None = Field(default=None, ge=1, description="Sampling period.")
    sigma_eps: float = Field(default=0.0, ge=0.0, description="Log-normal std of eps.")
    sigma_gam: float = Field(default=0.0, ge=0.0, description="Log-normal std of gam.")
    seed: int = Field(default=0, description="Seed of the coefficient sampler.")
    eps: list[float] | None = Field(default=None, description="Diffusivity table.")
    gam: list[float] | None = Field(default=None, description="Advection table.")
    eps_target: float = Field(gt=0.0, description="Harmonic mean of diffusivities.")

    @model_validator(mode="after")
    def _sampled_or_explicit(self) -> HeterogeneityConfig:
        explicit = self.eps is not None or self.gam is not None
        if explicit:
            if self.eps is None or self.gam is None:
                raise ValueError("explicit tables need both 'eps' and 'gam'")
            if len(self.eps) != len(self.gam) or not self.eps:
                raise ValueError("'eps' and 'gam' tables must have the same length")
            if any(value <= 0.0 for value in self.eps):
                raise ValueError("diffusivities must be positive")
            if self.kappa is not None and self.kappa != len(self.eps):
                raise ValueError("kappa disagrees with the table length")
        elif self.kappa is None:
            raise ValueError("either 'kappa' or explicit 'eps'/'gam' tables needed")
        return self

    @property
    def explicit(self) -> bool:
        """Whether the coefficients come from explicit tables."""
        return self.eps is not None

    @property
    def period(self) -> int:
        """Heterogeneity period in micro cells."""
        if self.eps is not None:
            return len(self.eps)
        assert self.kappa is not None  # noqa: S101 - guaranteed by the validator
        return self.kappa


class MesoPlacement(BaseModel):
    """A meso-patch placed before the run starts."""

    model_config = ConfigDict(extra="forbid")

    centre: float = Field(description="Requested centre position.")
    n: int = Field(gt=0, description="Half-count of micro intervals.")
    node_offset: int | None = Field(
        default=None,
        gt=0,
        description="Micro index of the right node (left node is its negative).",
    )


class PatchLayoutConfig(BaseModel):
    """Initial patch layout.

    count: ordinary patches, including the two boundary patches.
    n: half-count of micro intervals of every ordinary patch.
    """

    model_config = ConfigDict(extra="forbid")

    count: int = Field(ge=2, description="Number of ordinary patches.")
    n: int = Field(gt=0, description="Half-count of micro intervals per patch.")
    meso: list[MesoPlacement] = Field(
        default_factory=list[MesoPlacement], description="Pre-placed meso-patches."
    )
    boundary_patches_fixed: bool = Field(
        default=True, description="Pin the first and last patch to the boundary."
    )

    @model_validator(mode="after")
    def _fixed_boundaries(self) -> PatchLayoutConfig:
        if not self.boundary_patches_fixed:
            raise ValueError(
                "boundary_patches_fixed=false needs periodic domains, "
                "which are not supported"
            )
        return self


class MotionParams(BaseModel):
    """Patch motion parameters.

    tau: relaxation time of the moving-mesh equation.
    beta: relaxation time of meso-patches toward their steep-gradient target.
    smoothing_stride: difference stride of the meso target (defaults to kappa).
    enabled: when false every patch stays where it was placed.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    tau: float = Field(default=10.0, gt=0.0, description="Mesh relaxation time.")
    beta: float = Field(default=1.0, gt=0.0, description="Meso tracking time.")
    smoothing_stride: int | None = Field(
        default=None, ge=1, description="Stride of the meso gradient estimate."
    )
    enabled: bool = Field(default=True, description="Move patches at all.")


class IntegratorConfig(BaseModel):
    """Adaptive time-stepping settings.

    ``dt_max`` defaults to ``0.2 d^2 / max(eps)`` when left unset.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    rel_tol: float = Field(default=1e-6, gt=0.0)
    abs_tol: float = Field(default=1e-8, gt=0.0)
    dt_init: float = Field(default=1e-7, gt=0.0)
    dt_min: float = Field(default=1e-14, gt=0.0)
    dt_max: float | None = Field(default=None, gt=0.0)
    max_steps: int = Field(default=50_000_000, gt=0)

    @model_validator(mode="after")
    def _ordered_bounds(self) -> IntegratorConfig:
        if self.dt_min > self.dt_init:
            raise ValueError("dt_min must not exceed dt_init")
        if self.dt_max is not None and self.dt_init > self.dt_max:
            raise ValueError("dt_init must not exceed dt_max")
        return self

    def with_dt_max(self, dt_max: float) -> IntegratorConfig:
        """Return a copy with ``dt_max`` set and ``dt_init`` clipped below it."""
        dt_init = min(self.dt_init, dt_max)
        dt_min = min(self.dt_min, dt_init)
        return self.model_copy(
            update={"dt_max": dt_max, "dt_init": dt_init, "dt_min": dt_min}
        )


class SineSeriesCondition(BaseModel):
    """u(x) = sum of amplitude * sin(wavenumber * x)."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["sine_series"] = "sine_series"
    terms: list[tuple[float, float]] = Field(
        min_length=1, description="(amplitude, wavenumber) pairs."
    )


class ThreeWaveCondition(BaseModel):
    """Exact three-wave Burgers solution evaluated at t."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["three_wave"] = "three_wave"
    eps: float = Field(default=0.001, gt=0.0)


class ConstantCondition(BaseModel):
    """Spatially constant field."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["constant"] = "constant"
    value: float = 0.0


InitialCondition: TypeAlias = Annotated[
    SineSeriesCondition | ThreeWaveCondition | ConstantCondition,
    Field(discriminator="kind"),
]


class DirichletBoundary(BaseModel):
    """Constant Dirichlet values at both ends."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["dirichlet"] = "dirichlet"
    left: float = 0.0
    right: float = 0.0


class ThreeWaveBoundary(BaseModel):
    """Time-dependent Dirichlet values taken from the three-wave solution."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["three_wave"] = "three_wave"
    eps: float = Field(default=0.001, gt=0.0)


BoundaryConfig: TypeAlias = Annotated[
    DirichletBoundary | ThreeWaveBoundary, Field(discriminator="kind")
]


class OutputConfig(BaseModel):
    """Output file names, relative to the output directory."""

    model_config = ConfigDict(extra="forbid")

    out_dir: str | None = Field(default=None, description="Output directory.")
    snapshots_full: str = "snapshots_full.csv"
    snapshots_patches: str = "snapshots_patches.csv"
    metrics: str = "metrics.csv"
    merges: str = "merges.csv"
    manifest: str = "manifest.json"


RunMode: TypeAlias = Literal["full", "patches", "compare"]


class RunConfig(BaseModel):
    """A complete simulation run."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    name: str = Field(default="run", description="Free-form run label.")
    domain: tuple[float, float] = Field(description="Spatial domain [a, b].")
    d: float = Field(gt=0.0, description="Requested micro-grid spacing.")
    full_points: int | None = Field(
        default=None, ge=3, description="Override of the full-domain point count."
    )
    heterogeneity: HeterogeneityConfig
    patches: PatchLayoutConfig
    gamma: int = Field(alias="Gamma", ge=1, description="Coupling half-width.")
    motion: MotionParams = Field(default_factory=MotionParams)
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    ic: InitialCondition
    bc: BoundaryConfig
    t_end: float = Field(gt=0.0)
    snapshot_dt: float = Field(gt=0.0)
    output: OutputConfig = Field(default_factory=OutputConfig)
    mode: RunMode = "compare"

    @model_validator(mode="after")
    def _consistent_layout(self) -> RunConfig:
        a, b = self.domain
        if not b > a:
            raise ValueError(f"domain must satisfy a < b, got [{a}, {b}]")
        kappa = self.heterogeneity.period
        if self.patches.n % kappa:
            raise ValueError(
                f"patch half-count n={self.patches.n} is not a multiple of "
                f"kappa={kappa}"
            )
        for meso in self.patches.meso:
            if meso.n % kappa:
                raise ValueError(
                    f"meso half-count n={meso.n} is not a multiple of kappa={kappa}"
                )
            if meso.node_offset is not None and meso.node_offset >= meso.n:
                raise ValueError("meso node_offset must lie inside the patch")
            if not a < meso.centre < b:
                raise ValueError(f"meso centre {meso.centre} lies outside the domain")
        if self.lattice_intervals < 2 * kappa:
            raise ValueError("micro spacing d is too coarse for the domain")
        return self

    @property
    def lattice_intervals(self) -> int:
        """Number of micro intervals of the shared lattice over [a, b].

        Rounded to a whole number of heterogeneity periods so both domain ends
        sit at phase zero.
        """
        a, b = self.domain
        kappa = self.heterogeneity.period
        return kappa * round((b - a) / (kappa * self.d))

    @property
    def lattice_spacing(self) -> float:
        """Micro spacing adjusted so the lattice ends exactly on b."""
        a, b = self.domain
        return (b - a) / self.lattice_intervals

    def snapshot_times(self) -> list[float]:
        """Return the snapshot schedule 0, dt, 2 dt, ... ending exactly at t_end."""
        count = math.floor(self.t_end / self.snapshot_dt + 1e-9)
        times = [k * self.snapshot_dt for k in range(count + 1)]
        times = [t for t in times if t < self.t_end * (1.0 - 1e-12)]
        times.append(self.t_end)
        return times
