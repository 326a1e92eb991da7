"""shockpatch - moving and merging patch simulations of emergent shocks.

The package couples small micro-scale simulations of a heterogeneous
advection-diffusion lattice through macro-scale interpolation, moves the
patches with a discretised moving-mesh equation and merges colliding patches
into meso-patches that track shocks.
"""

__version__ = "0.1.0"
