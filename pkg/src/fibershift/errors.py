"""Exception types shared across the toolkit.

Every error raised by a fiberwise computation carries the fiber index at which
it was detected (or None for global conditions) so pipeline drivers can report
the offending grid point.
"""

from __future__ import annotations


class FibershiftError(Exception):
    """Base class for all toolkit errors."""

    def __init__(self, message: str, fiber: int | None = None):
        self.fiber = fiber
        if fiber is not None:
            message = f"{message} (fiber {fiber})"
        super().__init__(message)


class DegreeOverflow(FibershiftError):
    """A z-degree lies outside the retained range 0..n_z-1."""


class CoordinateOverflow(FibershiftError):
    """A fiber coordinate index lies outside 1..k."""


class ToleranceAmbiguity(FibershiftError):
    """A singular value fell inside the guard band around the rank cutoff.

    The rank decision would not be stable under small perturbations of
    rank_tol; the caller must adjust the tolerance or the input.
    """


class NotOrthogonal(FibershiftError):
    """Summands expected to be orthogonal are not, beyond orth_tol."""


class NotInvariant(FibershiftError):
    """A range function expected to be shift invariant leaks outside itself."""


class RankTooLarge(FibershiftError):
    """A wandering rank exceeds the fiber coordinate dimension k."""


class BandExceeded(FibershiftError):
    """A requested shift depth would leave the reliable degree band."""


class BaseNotConstant(FibershiftError):
    """Recovered wandering vectors carry nonzero higher-degree components.

    Signals a subspace that is invariant for the fiber shift and reducing for
    the grid rotation without being reducing for the fiber shift.
    """


class WanderingRankNotOne(FibershiftError):
    """A scalar invariant subspace has wandering dimension different from 1."""


class NotInner(FibershiftError):
    """Boundary modulus of an extracted function strays from 1."""


class NotUnimodular(FibershiftError):
    """A fiberwise quotient expected to be unimodular is not."""


class RangesDiffer(FibershiftError):
    """Two inputs that must generate the same range function do not."""


class ImagesDiffer(FibershiftError):
    """Two factorizations do not target the same subspace."""


class NotPartialIsometry(FibershiftError):
    """Singular values of an operator field stray from {0, 1}."""


class ParseError(FibershiftError):
    """A problem file is syntactically malformed."""


class BoundsError(FibershiftError):
    """A problem file entry violates the declared lattice bounds."""
