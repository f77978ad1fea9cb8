"""Scalar specialization: one-dimensional coordinate space.

For k = 1 every fiber subspace story collapses to classical Hardy space
material: a shift-invariant subspace is generated by a single inner
function, a decomposition is described by one field of inner functions
phi(lambda), and two describing fields differ by a unimodular constant per
fiber. Coefficients live on degrees 0..n_z-1; boundary modulus checks run
on an oversampled circle grid to avoid aliasing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotInner, NotUnimodular, RangesDiffer, WanderingRankNotOne
from .lattice import TruncationLattice, frozen_array
from .ranges import RangeFunctionH, spectrum
from .shifts import shift_columns
from .subspaces import _phase_normalize, orthonormal_frame, subspace_distance
from .wandering import _fiber_wandering

INNER_TOL_DEFAULT = 1e-6


@dataclass(frozen=True)
class ScalarH2:
    """A scalar analytic polynomial, coefficients indexed by z-degree."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = frozen_array(self.coeffs)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a nonempty vector")
        object.__setattr__(self, "coeffs", c)

    @property
    def n_z(self) -> int:
        return self.coeffs.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def boundary_values(self, grid_size: int | None = None) -> np.ndarray:
        """h evaluated at grid_size-th roots of unity (default 4*n_z).

        Sum_j c_j z_t^j at z_t = exp(2 pi i t/N) is N times the inverse DFT
        of the zero-padded coefficient vector.
        """
        n = 4 * self.n_z if grid_size is None else int(grid_size)
        if n < 2 * self.n_z:
            raise ValueError("grid must oversample: need at least 2*n_z points")
        padded = np.zeros(n, dtype=complex)
        padded[: self.n_z] = self.coeffs
        return np.fft.ifft(padded) * n

    def inner_defect(self) -> float:
        """Worst deviation of the boundary modulus from 1."""
        return float(np.max(np.abs(np.abs(self.boundary_values()) - 1.0)))


def _shift_stack(coeffs: np.ndarray) -> np.ndarray:
    """Columns z^j h for all retained degrees j (top coefficients drop)."""
    n_z = coeffs.size
    cols = np.zeros((n_z, n_z), dtype=complex)
    col = coeffs.astype(complex)
    for j in range(n_z):
        cols[:, j] = col
        col = shift_columns(col[:, None], n_z, 1)[:, 0]
    return cols


def inner_from_invariant(gens: list[ScalarH2],
                         rank_tol: float = 1e-9) -> tuple[ScalarH2, float]:
    """Extract the inner generator of the invariant span of ``gens``.

    The span of all shifts of the generators is closed by the rank cutoff,
    which discards the geometrically small directions a finite truncation
    cannot distinguish from zero; what remains is the invariant subspace
    generated by the inner part alone. Its wandering part must be one
    dimensional (WanderingRankNotOne otherwise) and the unit wandering
    vector, phase normalized, is the inner function. The returned defect is
    the worst boundary-modulus deviation on a 4*n_z grid; it carries the
    geometric truncation tail of non-polynomial inner functions.
    """
    if not gens:
        raise ValueError("need at least one generator")
    n_z = gens[0].n_z
    if any(g.n_z != n_z for g in gens):
        raise ValueError("generators disagree on n_z")
    stack = np.hstack([_shift_stack(g.coeffs) for g in gens])
    frame = orthonormal_frame(stack, rank_tol)
    wander = _fiber_wandering(frame, n_z, 1, rank_tol, None)
    if wander.shape[1] != 1:
        raise WanderingRankNotOne(
            f"wandering part has rank {wander.shape[1]}, expected 1")
    h = ScalarH2(_phase_normalize(wander[:, :1])[:, 0])
    return h, h.inner_defect()


@dataclass(frozen=True)
class InnerField:
    """A field of scalar inner functions over the lambda grid.

    Fibers off the support are exactly zero; fibers on the support must be
    inner within ``inner_tol`` (NotInner otherwise, reporting the worst
    fiber). The describing field of a k = 1 decomposition has this form.
    """

    lattice: TruncationLattice
    fibers: tuple[ScalarH2, ...]
    support: frozenset[int]
    inner_tol: float = INNER_TOL_DEFAULT

    def __post_init__(self):
        if self.lattice.k != 1:
            raise ValueError("inner fields require k = 1")
        if len(self.fibers) != self.lattice.n_lambda:
            raise ValueError("one fiber per grid point required")
        if any(f.n_z != self.lattice.n_z for f in self.fibers):
            raise ValueError("fiber length must equal n_z")
        object.__setattr__(self, "fibers", tuple(self.fibers))
        object.__setattr__(self, "support", frozenset(int(m) for m in self.support))
        if not self.support <= set(range(self.lattice.n_lambda)):
            raise ValueError("support indices out of range")
        worst, worst_m = 0.0, -1
        for m, f in enumerate(self.fibers):
            if m not in self.support:
                if np.any(f.coeffs != 0):
                    raise ValueError(f"fiber {m} off the support is not zero")
                continue
            d = f.inner_defect()
            if d > worst:
                worst, worst_m = d, m
        if worst > self.inner_tol:
            raise NotInner(
                f"boundary modulus deviates by {worst:.3e}", fiber=worst_m)

    def inner_defects(self) -> np.ndarray:
        """Per-fiber boundary defects (zero fibers report 0)."""
        return np.array([f.inner_defect() if m in self.support else 0.0
                         for m, f in enumerate(self.fibers)])

    def coeff_matrix(self) -> np.ndarray:
        return np.stack([f.coeffs for f in self.fibers])


def phi_representation(res, inner_tol: float = INNER_TOL_DEFAULT) -> InnerField:
    """The describing inner field of a k = 1 decomposition.

    phi(lambda_m) is the image of the constant function 1 under the fiber
    operator, which is the degree-zero column of F. Supported exactly on
    the spectrum of the base; the InnerField constructor enforces the inner
    invariant on every supported fiber.
    """
    lat = res.base.lattice
    if lat.k != 1:
        raise ValueError("phi representation requires a k = 1 decomposition")
    supp = frozenset(spectrum(res.base))
    fibers = tuple(ScalarH2(res.field.ops[m][:, 0]) for m in range(lat.n_lambda))
    return InnerField(lat, fibers, supp, inner_tol)


def range_of_phi(phi: InnerField) -> RangeFunctionH:
    """The range function of the subspace phi multiplies out of the full
    Hardy space: per supported fiber, the closed span of all shifts of
    phi(lambda_m)."""
    lat = phi.lattice
    frames = []
    for m in range(lat.n_lambda):
        if m in phi.support:
            stack = _shift_stack(phi.fibers[m].coeffs)
            frames.append(orthonormal_frame(stack, lat.rank_tol, fiber=m))
        else:
            frames.append(np.zeros((lat.n_z, 0), dtype=complex))
    return RangeFunctionH(lat, tuple(frames))


def inner_quotient(phi1: InnerField, phi2: InnerField,
                   inner_tol: float = INNER_TOL_DEFAULT) -> InnerField:
    """The unimodular constant field relating two describing fields of the
    same subspace: psi with phi1(lambda_m) = psi(lambda_m) phi2(lambda_m).

    Supports and ranges must agree (RangesDiffer otherwise). Per supported
    fiber the constant is the inner product of phi1 against phi2; it must be
    unimodular within inner_tol and reproduce phi1 coefficientwise within
    orth_tol (NotUnimodular otherwise).
    """
    lat = phi1.lattice
    if phi2.lattice != lat:
        raise ValueError("lattice mismatch")
    if phi1.support != phi2.support:
        raise RangesDiffer("supports differ")
    r1 = range_of_phi(phi1)
    r2 = range_of_phi(phi2)
    for m in range(lat.n_lambda):
        if subspace_distance(r1.frames[m], r2.frames[m]) > 10.0 * lat.orth_tol:
            raise RangesDiffer("range functions differ", fiber=m)
    fibers = []
    for m in range(lat.n_lambda):
        coeffs = np.zeros(lat.n_z, dtype=complex)
        if m in phi1.support:
            c1 = phi1.fibers[m].coeffs
            c2 = phi2.fibers[m].coeffs
            c = np.vdot(c2, c1)
            if abs(abs(c) - 1.0) > inner_tol:
                raise NotUnimodular(
                    f"quotient modulus {abs(c):.6f}", fiber=m)
            if np.max(np.abs(c1 - c * c2)) > lat.orth_tol:
                raise NotUnimodular(
                    "fibers are not unimodular multiples", fiber=m)
            coeffs[0] = c
        fibers.append(ScalarH2(coeffs))
    return InnerField(lat, tuple(fibers), phi1.support, inner_tol)
