"""Wandering subspaces of shift-invariant range functions.

For an invariant fiber subspace J the wandering part is J minus its shifted
image. Its dimension never exceeds k, the shifted copies of its frame are
orthogonal while they stay inside the reliable band, and stacking those
copies reconstructs the original subspace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BandExceeded, NotInvariant, RankTooLarge
from .fields import FiberedField, z_degree
from .ranges import RangeFunctionH, direct_sum_ranges
from .shifts import is_S_invariant, shift_columns
from .subspaces import DEGREE_TOL, orthonormal_frame


@dataclass(frozen=True)
class DimensionPartition:
    """Grid indices grouped by wandering dimension.

    ``classes[n]`` is the sorted tuple of fiber indices with dimension n;
    the classes partition 0..n_lambda-1.
    """

    classes: dict[int, tuple[int, ...]]

    def __post_init__(self):
        seen: list[int] = []
        fixed = {}
        for n in sorted(self.classes):
            idx = tuple(sorted(int(m) for m in self.classes[n]))
            if idx:
                fixed[n] = idx
                seen.extend(idx)
        object.__setattr__(self, "classes", fixed)
        if sorted(seen) != list(range(len(seen))) or len(set(seen)) != len(seen):
            raise ValueError("classes must partition the fiber indices")

    def dimension_at(self, m: int) -> int:
        for n, idx in self.classes.items():
            if m in idx:
                return n
        raise KeyError(m)

    def dimensions(self) -> np.ndarray:
        total = sum(len(idx) for idx in self.classes.values())
        out = np.zeros(total, dtype=int)
        for n, idx in self.classes.items():
            out[list(idx)] = n
        return out


@dataclass(frozen=True)
class FrameFields:
    """Measurable frame fields phi_1 .. phi_k attached to a partition.

    On a fiber of dimension n the first n fields give an orthonormal basis
    of the subspace there and the remaining fields vanish identically.
    """

    phis: tuple[FiberedField, ...]
    partition: DimensionPartition


def _fiber_wandering(frame: np.ndarray, n_z: int, k: int, rank_tol: float,
                     fiber: int | None = None) -> np.ndarray:
    """Frame of J minus (fiber shift applied to J) for one fiber."""
    if frame.shape[1] == 0:
        return frame
    shifted = shift_columns(frame, n_z, k)
    sj = orthonormal_frame(shifted, rank_tol, fiber=fiber)
    rest = frame - sj @ (sj.conj().T @ frame)
    return orthonormal_frame(rest, rank_tol, fiber=fiber)


def wandering_range(range_fn: RangeFunctionH) -> RangeFunctionH:
    """Pointwise wandering subspace of a shift-invariant range function.

    Raises NotInvariant when the input leaks under the fiber shift beyond
    orth_tol on the reliable band.
    """
    lat = range_fn.lattice
    ok, leak = is_S_invariant(range_fn)
    if not ok:
        raise NotInvariant(f"input is not shift invariant (leak {leak:.3e})")
    frames = tuple(
        _fiber_wandering(range_fn.frames[m], lat.n_z, lat.k, lat.rank_tol, fiber=m)
        for m in range(lat.n_lambda)
    )
    return RangeFunctionH(lat, frames)


def dimension_partition(range_fn: RangeFunctionH) -> DimensionPartition:
    """Group fibers by rank; ranks above k are rejected.

    Wandering subspaces of invariant range functions never exceed dimension
    k, so a larger rank signals a non-wandering input (RankTooLarge).
    """
    k = range_fn.lattice.k
    classes: dict[int, list[int]] = {}
    for m in range(range_fn.lattice.n_lambda):
        r = range_fn.rank(m)
        if r > k:
            raise RankTooLarge(f"rank {r} exceeds k = {k}", fiber=m)
        classes.setdefault(r, []).append(m)
    return DimensionPartition({n: tuple(v) for n, v in classes.items()})


def frame_fields(range_fn: RangeFunctionH) -> FrameFields:
    """Package a low-rank range function as k frame fields.

    Field i takes the i-th frame column on fibers of rank >= i and vanishes
    elsewhere, so each field is supported exactly on its dimension classes.
    """
    lat = range_fn.lattice
    partition = dimension_partition(range_fn)
    data = np.zeros((lat.k, lat.n_lambda, lat.n_z, lat.k), dtype=complex)
    for m in range(lat.n_lambda):
        q = range_fn.frames[m]
        for i in range(q.shape[1]):
            data[i, m] = q[:, i].reshape(lat.n_z, lat.k)
    phis = tuple(FiberedField(lat, data[i]) for i in range(lat.k))
    return FrameFields(phis, partition)


def reconstruct_from_wandering(wandering: RangeFunctionH, depth: int) -> RangeFunctionH:
    """Direct sum of the wandering frames shifted 0..depth times.

    The depth must keep every shifted copy inside the reliable band:
    depth <= n_z - 1 - (max effective degree over all wandering columns),
    otherwise BandExceeded is raised. Orthogonality of the shifted copies is
    checked (NotOrthogonal on failure).
    """
    lat = wandering.lattice
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    max_deg = -1
    for m in range(lat.n_lambda):
        q = wandering.frames[m]
        for c in range(q.shape[1]):
            max_deg = max(max_deg, z_degree(q[:, c].reshape(lat.n_z, lat.k), DEGREE_TOL))
    if depth > lat.n_z - 1 - max_deg:
        raise BandExceeded(
            f"depth {depth} exceeds band limit {lat.n_z - 1 - max_deg}")
    layers = [wandering]
    current = wandering
    for _ in range(depth):
        frames = tuple(
            shift_columns(current.frames[m], lat.n_z, lat.k)
            for m in range(lat.n_lambda)
        )
        current = RangeFunctionH(lat, frames)
        layers.append(current)
    return direct_sum_ranges(layers)
