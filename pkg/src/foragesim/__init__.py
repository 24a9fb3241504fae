"""Foraging particle systems on a triangular torus.

Two local controllers move anonymous particles toward (and away from) an
adversarially managed food site: a stochastic compression controller biased
by a Metropolis rule, and a structured spiraling controller that grows a
minimum-perimeter winding around the food.  The package also ships the
analysis metrics used to argue their correctness, a deterministic
move-sequence oracle that flattens any connected cluster to a line, a
seeded replayable run engine, and a live steering service.
"""

from .lattice import Lattice, World, OFFSETS, rotate, opposite

__all__ = ["Lattice", "World", "OFFSETS", "rotate", "opposite"]
__version__ = "0.1.0"
