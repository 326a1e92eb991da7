"""Periodic heterogeneous lattice coefficients.

The lattice carries a diffusivity ``eps[k]`` on the bond between points k and
k+1 and an advection weight ``gam[k]`` on point k, both periodic in k with
period ``kappa``. Inside a patch the cycle is anchored at the left edge, so
patch micro index ``i`` in ``[-n, n]`` has phase ``(i + n) mod kappa``.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from shockpatch.typing.config import HeterogeneityConfig


class HeterogeneityProfile(BaseModel):
    """Immutable kappa-periodic coefficient tables.

    Attributes:
        kappa (int): Period in micro cells.
        eps (tuple[float, ...]): Diffusivities, one per phase.
        gam (tuple[float, ...]): Advection weights, one per phase.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kappa: int = Field(ge=1, description="Period in micro cells.")
    eps: tuple[float, ...] = Field(description="Diffusivities per phase.")
    gam: tuple[float, ...] = Field(description="Advection weights per phase.")

    @model_validator(mode="after")
    def _check_tables(self) -> HeterogeneityProfile:
        if len(self.eps) != self.kappa or len(self.gam) != self.kappa:
            raise ValueError(f"coefficient tables must have kappa={self.kappa} entries")
        if any(not value > 0.0 for value in self.eps):
            raise ValueError("diffusivities must be positive")
        if any(not math.isfinite(value) for value in (*self.eps, *self.gam)):
            raise ValueError("coefficients must be finite")
        return self

    @property
    def eps_harmonic_mean(self) -> float:
        """Harmonic mean of the diffusivities."""
        return self.kappa / sum(1.0 / value for value in self.eps)

    @property
    def eps_array(self) -> NDArray[np.float64]:
        """Diffusivities as a numpy array."""
        return np.asarray(self.eps, dtype=np.float64)

    @property
    def gam_array(self) -> NDArray[np.float64]:
        """Advection weights as a numpy array."""
        return np.asarray(self.gam, dtype=np.float64)

    def tiled(
        self, first_phase: int, count: int
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Coefficients of ``count`` consecutive points starting at a phase.

        Args:
            first_phase (int): Phase of the first point.
            count (int): Number of points.

        Returns:
            tuple[NDArray, NDArray]: ``(eps, gam)`` per point.
        """
        phases = (first_phase + np.arange(count)) % self.kappa
        return self.eps_array[phases], self.gam_array[phases]


def sample_profile(
    kappa: int, sigma_eps: float, sigma_gam: float, seed: int
) -> HeterogeneityProfile:
    """Draw log-normal coefficients, not yet normalised.

    Args:
        kappa (int): Period in micro cells.
        sigma_eps (float): Standard deviation of ``log(eps)``.
        sigma_gam (float): Standard deviation of ``log(gam)``.
        seed (int): Seed; equal seeds give identical profiles.

    Raises:
        ValueError: if kappa is not positive or a strength is negative.

    Returns:
        HeterogeneityProfile: The sampled profile.
    """
    if kappa < 1:
        raise ValueError(f"kappa must be a positive integer, got {kappa}")
    if sigma_eps < 0.0 or sigma_gam < 0.0:
        raise ValueError("log-normal strengths must be non-negative")
    rng = np.random.default_rng(seed)
    eps = np.exp(rng.normal(0.0, sigma_eps, size=kappa))
    gam = np.exp(rng.normal(0.0, sigma_gam, size=kappa))
    return HeterogeneityProfile(
        kappa=kappa, eps=tuple(eps.tolist()), gam=tuple(gam.tolist())
    )


def normalize(
    profile: HeterogeneityProfile,
    eps_target: float,
    *,
    rescale_gam: bool = True,
) -> HeterogeneityProfile:
    """Rescale diffusivities to a harmonic mean and advection to mean one.

    Args:
        profile (HeterogeneityProfile): Profile to rescale.
        eps_target (float): Required harmonic mean of the diffusivities.
        rescale_gam (bool): Also scale ``gam`` to arithmetic mean one.

    Raises:
        ValueError: on a nonpositive target or an advection table with zero mean.

    Returns:
        HeterogeneityProfile: The rescaled profile.
    """
    if not eps_target > 0.0:
        raise ValueError(f"eps_target must be positive, got {eps_target}")
    eps = profile.eps_array * (eps_target / profile.eps_harmonic_mean)
    gam = profile.gam_array
    if rescale_gam:
        mean_gam = float(gam.mean())
        if mean_gam == 0.0:
            raise ValueError("cannot scale advection weights with zero mean")
        gam = gam / mean_gam
    return HeterogeneityProfile(
        kappa=profile.kappa, eps=tuple(eps.tolist()), gam=tuple(gam.tolist())
    )


def coeff_at(
    profile: HeterogeneityProfile, patch_micro_index: int, patch_half_count: int
) -> tuple[float, float]:
    """Coefficients seen by one point of a patch.

    Args:
        profile (HeterogeneityProfile): Coefficient tables.
        patch_micro_index (int): Micro index ``i`` within ``[-n, n]``.
        patch_half_count (int): Patch half-count ``n``.

    Raises:
        ValueError: if n is not a multiple of kappa or i lies outside the patch.

    Returns:
        tuple[float, float]: ``(eps, gam)`` at that point's phase.
    """
    if patch_half_count % profile.kappa:
        raise ValueError(
            f"patch half-count n={patch_half_count} is not a multiple of "
            f"kappa={profile.kappa}"
        )
    if abs(patch_micro_index) > patch_half_count:
        raise ValueError(
            f"micro index {patch_micro_index} outside patch of half-count "
            f"{patch_half_count}"
        )
    phase = (patch_micro_index + patch_half_count) % profile.kappa
    return profile.eps[phase], profile.gam[phase]


def profile_from_config(config: HeterogeneityConfig) -> HeterogeneityProfile:
    """Build the normalised profile described by a configuration block.

    Args:
        config (HeterogeneityConfig): Sampled or explicit coefficient block.

    Returns:
        HeterogeneityProfile: Profile with eps rescaled to ``eps_target``.
    """
    if config.eps is not None and config.gam is not None:
        raw = HeterogeneityProfile(
            kappa=len(config.eps), eps=tuple(config.eps), gam=tuple(config.gam)
        )
        return normalize(raw, config.eps_target, rescale_gam=False)
    raw = sample_profile(
        config.period, config.sigma_eps, config.sigma_gam, config.seed
    )
    return normalize(raw, config.eps_target)
