"""Range functions: measurable families of per-fiber subspaces, and
operator fields acting on them.

A range function assigns to every grid point an orthonormal frame. Two
ambient sizes occur: frames inside the truncated fiber Hardy space
(dimension n_z*k, ``RangeFunctionH``) and frames inside the coordinate
space C^k alone (``RangeFunctionK``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotOrthogonal, ToleranceAmbiguity
from .fields import FiberedField
from .lattice import TruncationLattice, frozen_array
from .parallel import fiber_map
from .subspaces import (
    canonical_columns,
    complement_frame,
    op_norm,
    orthonormal_frame,
    residual_norms,
    robust_svd,
)


class _RangeFunction:
    """Shared behavior of range functions; subclasses fix the ambient size."""

    lattice: TruncationLattice
    frames: tuple[np.ndarray, ...]

    def _check(self, ambient: int):
        if len(self.frames) != self.lattice.n_lambda:
            raise ValueError("one frame per grid point required")
        fixed = []
        for m, q in enumerate(self.frames):
            q = np.asarray(q, dtype=complex)
            if q.ndim != 2 or q.shape[0] != ambient:
                raise ValueError(f"frame {m} must have {ambient} rows")
            if q.shape[1]:
                gram = q.conj().T @ q
                if not np.allclose(gram, np.eye(q.shape[1]), atol=1e-10):
                    raise ValueError(f"frame {m} is not orthonormal")
            fixed.append(frozen_array(q))
        object.__setattr__(self, "frames", tuple(fixed))

    def rank(self, m: int) -> int:
        return self.frames[m].shape[1]

    def ranks(self) -> np.ndarray:
        return np.array([q.shape[1] for q in self.frames], dtype=int)

    @property
    def ambient(self) -> int:
        return self.frames[0].shape[0]


@dataclass(frozen=True)
class RangeFunctionH(_RangeFunction):
    """Range function with fibers inside the truncated Hardy space C^{n_z*k}."""

    lattice: TruncationLattice
    frames: tuple[np.ndarray, ...]

    def __post_init__(self):
        self._check(self.lattice.ambient)


@dataclass(frozen=True)
class RangeFunctionK(_RangeFunction):
    """Range function with fibers inside the coordinate space C^k."""

    lattice: TruncationLattice
    frames: tuple[np.ndarray, ...]

    def __post_init__(self):
        self._check(self.lattice.k)


@dataclass(frozen=True)
class OperatorField:
    """One (n_z*k) x (n_z*k) matrix per grid point, acting fiberwise."""

    lattice: TruncationLattice
    ops: np.ndarray

    def __post_init__(self):
        a = self.lattice.ambient
        ops = np.asarray(self.ops, dtype=complex)
        if ops.shape != (self.lattice.n_lambda, a, a):
            raise ValueError(f"ops must have shape ({self.lattice.n_lambda}, {a}, {a})")
        object.__setattr__(self, "ops", frozen_array(ops))

    def op(self, m: int) -> np.ndarray:
        return self.ops[m]

    def sup_norm(self) -> float:
        """max over fibers of the operator 2-norm."""
        return max(op_norm(self.ops[m]) for m in range(self.lattice.n_lambda))


def range_from_generators(gens: list[FiberedField], lattice: TruncationLattice,
                          threads: int = 1) -> RangeFunctionH:
    """Pointwise span of the generators' fibers.

    Per fiber, the generator vectors are stacked as columns and reduced to a
    canonical orthonormal frame. Raises ToleranceAmbiguity when a rank
    decision falls inside the guard band.
    """
    if not gens:
        raise ValueError("at least one generator required")
    for g in gens:
        if g.lattice != lattice:
            raise ValueError("generator lattice mismatch")
    stacks = np.stack([g.flat() for g in gens], axis=2)  # (n_lambda, ambient, n_gens)

    def one(m: int) -> np.ndarray:
        return orthonormal_frame(stacks[m], lattice.rank_tol, fiber=m)

    frames = fiber_map(one, lattice.n_lambda, threads)
    return RangeFunctionH(lattice, tuple(frames))


def member(f: FiberedField, range_fn: RangeFunctionH) -> tuple[bool, float]:
    """Whether f(lambda_m) lies in the fiber subspace at every grid point.

    Returns (verdict, max residual). The residual at fiber m is the norm of
    the component of f(lambda_m) outside the frame; the verdict is true when
    the largest residual is at most orth_tol * max(1, ||f||).
    """
    lat = range_fn.lattice
    flat = f.flat()
    worst = 0.0
    for m in range(lat.n_lambda):
        r = residual_norms(range_fn.frames[m], flat[m][:, None])
        worst = max(worst, float(r[0]))
    ok = worst <= lat.orth_tol * max(1.0, f.norm())
    return ok, worst


def complement_range(range_fn: RangeFunctionH) -> RangeFunctionH:
    """Pointwise orthogonal complement within the truncated fiber space."""
    lat = range_fn.lattice
    ambient = lat.ambient
    frames = []
    for m in range(lat.n_lambda):
        q = range_fn.frames[m]
        r = q.shape[1]
        if r == 0:
            frames.append(canonical_columns(np.eye(ambient, dtype=complex)))
            continue
        if r == ambient:
            frames.append(np.zeros((ambient, 0), dtype=complex))
            continue
        frames.append(canonical_columns(complement_frame(q)))
    return RangeFunctionH(lat, tuple(frames))


def direct_sum_ranges(parts: list[RangeFunctionH]) -> RangeFunctionH:
    """Fiberwise orthogonal direct sum.

    Raises NotOrthogonal when any two summand fibers have a cross inner
    product above orth_tol.
    """
    if not parts:
        raise ValueError("at least one summand required")
    lat = parts[0].lattice
    for p in parts:
        if p.lattice != lat:
            raise ValueError("summand lattice mismatch")
    frames = []
    for m in range(lat.n_lambda):
        blocks = [p.frames[m] for p in parts]
        for a in range(len(blocks)):
            for b in range(a + 1, len(blocks)):
                if blocks[a].shape[1] and blocks[b].shape[1]:
                    cross = np.abs(blocks[a].conj().T @ blocks[b]).max()
                    if cross > lat.orth_tol:
                        raise NotOrthogonal(
                            f"summands {a} and {b} overlap ({cross:.3e})", fiber=m)
        stacked = np.concatenate(blocks, axis=1)
        total = sum(b.shape[1] for b in blocks)
        q = orthonormal_frame(stacked, lat.rank_tol, fiber=m)
        if q.shape[1] != total:
            raise NotOrthogonal("summands are not independent", fiber=m)
        frames.append(q)
    return RangeFunctionH(lat, tuple(frames))


def spectrum(range_fn) -> list[int]:
    """Sorted grid indices where the fiber subspace is nonzero."""
    return [m for m in range(range_fn.lattice.n_lambda) if range_fn.rank(m) > 0]


def apply_opfield(field_op: OperatorField, f: FiberedField) -> FiberedField:
    """Apply the operator field fiberwise to a field."""
    lat = field_op.lattice
    if f.lattice != lat:
        raise ValueError("lattice mismatch")
    flat = np.einsum("mab,mb->ma", field_op.ops, f.flat())
    return FiberedField(lat, flat.reshape(lat.n_lambda, lat.n_z, lat.k))


def image_and_kernel_ranges(field_op: OperatorField, range_fn: RangeFunctionH,
                            threads: int = 1) -> tuple[RangeFunctionH, RangeFunctionH]:
    """Pointwise image of the restriction to ``range_fn`` and pointwise kernel.

    The image frame spans F(lambda_m) applied to the fiber subspace; the
    kernel frame spans the full null space of F(lambda_m) (right singular
    vectors at singular values below the cutoff).
    """
    lat = field_op.lattice
    if range_fn.lattice != lat:
        raise ValueError("lattice mismatch")
    ambient = lat.ambient

    def one(m: int) -> tuple[np.ndarray, np.ndarray]:
        op = field_op.ops[m]
        img = orthonormal_frame(op @ range_fn.frames[m], lat.rank_tol, fiber=m)
        u, s, vh = robust_svd(op)
        smax = float(s[0]) if s.size else 0.0
        if smax == 0.0:
            ker = canonical_columns(np.eye(ambient, dtype=complex))
        else:
            cutoff = lat.rank_tol * smax
            in_band = (s >= 0.5 * cutoff) & (s <= 2.0 * cutoff)
            if np.any(in_band):
                raise ToleranceAmbiguity(
                    f"kernel rank decision ambiguous at cutoff {cutoff:.3e}", fiber=m)
            rank = int(np.count_nonzero(s > cutoff))
            ker = canonical_columns(vh[rank:].conj().T)
        return img, ker

    pairs = fiber_map(one, lat.n_lambda, threads)
    images = tuple(p[0] for p in pairs)
    kernels = tuple(p[1] for p in pairs)
    return RangeFunctionH(lat, images), RangeFunctionH(lat, kernels)
