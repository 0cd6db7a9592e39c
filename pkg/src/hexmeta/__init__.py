"""Metropolis dynamics of the Ising model on a hexagonal-lattice torus, with
polyiamond isoperimetry and exact small-chain oracles."""

__version__ = "0.1.0"
