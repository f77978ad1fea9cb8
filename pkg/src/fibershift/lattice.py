"""Truncation lattice: the finite grid on which all computations live.

A lattice fixes n_lambda equispaced points on the unit circle (the fiber
grid), the retained z-degrees 0..n_z-1 inside each fiber, and the coordinate
dimension k of the fiber value space. Fibers are elements of C^{n_z x k},
flattened row-major so coefficient (j, i) sits at index j*k + i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TruncationLattice:
    """Grid sizes and numerical tolerances for one problem instance.

    Parameters
    ----------
    n_lambda : number of grid points on the circle, lambda_m = exp(2 pi i m / n_lambda)
    n_z : number of retained z-degrees per fiber
    k : dimension of the fiber coordinate space
    rank_tol : relative singular value cutoff for rank decisions
    orth_tol : residual tolerance for orthogonality and membership checks
    """

    n_lambda: int
    n_z: int
    k: int
    rank_tol: float = 1e-9
    orth_tol: float = 1e-8

    def __post_init__(self):
        if self.n_lambda < 1 or self.n_z < 1 or self.k < 1:
            raise ValueError("lattice sizes must be positive")
        if not (0.0 < self.rank_tol < 1.0) or not (0.0 < self.orth_tol < 1.0):
            raise ValueError("tolerances must lie in (0, 1)")

    @property
    def ambient(self) -> int:
        """Dimension n_z * k of one flattened fiber."""
        return self.n_z * self.k

    def lambdas(self) -> np.ndarray:
        """All grid points as a complex vector."""
        m = np.arange(self.n_lambda)
        return np.exp(2j * np.pi * m / self.n_lambda)

    def lambda_power(self, p: int) -> np.ndarray:
        """lambda_m ** p for every m, with the exponent reduced on the grid.

        Reducing m*p modulo n_lambda before exponentiating keeps the values
        on the canonical grid angles, so repeated evaluations are bitwise
        reproducible.
        """
        m = (np.arange(self.n_lambda) * int(p)) % self.n_lambda
        return np.exp(2j * np.pi * m / self.n_lambda)


def frozen_array(a: np.ndarray, dtype=complex) -> np.ndarray:
    """Own a contiguous read-only copy of ``a``."""
    out = np.ascontiguousarray(a, dtype=dtype)
    out.setflags(write=False)
    return out
