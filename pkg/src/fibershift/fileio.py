"""Problem-file ingestion, report rendering, result persistence.

Problem files are line-oriented text. Blank lines and ``#`` comments are
ignored; every other line is ``key: value``. Header keys come first:

    schema: fibershift-problem/1        (required, exactly this value)
    n_lambda: 8                         (required)
    n_z: 4                              (required)
    k: 2                                (required)
    rank_tol: 1e-9                      (optional, default 1e-9)
    orth_tol: 1e-8                      (optional, default 1e-8)
    inner_tol: 1e-6                     (optional, default 1e-6)

then one or more generator blocks:

    generator: label                    (label optional)
    term: m j i re im                   (coefficient re+im*1j on lambda^m z^j e_i)

Degrees j run over 0..n_z-1 and coordinates i over 1..k (BoundsError
otherwise); the lambda exponent m may be any integer since powers wrap on
the grid.

Persisted decompositions are little-endian binary: magic ``FSHD``, version,
lattice sizes and tolerances, per-fiber wandering and range ranks, the four
diagnostics, the operator field F as complex doubles in C order, then the
target range frames. Frame fields are not stored; they are the degree-zero
columns of F.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, ParseError
from .factorization import DIAGNOSTIC_KEYS, DecompositionResult
from .fields import FiberedField, LaurentPolyField, eval_field
from .lattice import TruncationLattice
from .ranges import OperatorField, RangeFunctionH, RangeFunctionK
from .wandering import DimensionPartition, FrameFields

SCHEMA = "fibershift-problem/1"
MAGIC = b"FSHD"
BINARY_VERSION = 1

_HEADER = struct.Struct("<4sIIIIdd")


@dataclass(frozen=True)
class ProblemFile:
    schema: str
    lattice: TruncationLattice
    inner_tol: float
    generators: tuple[LaurentPolyField, ...]
    labels: tuple[str, ...]
    digest: str


def _parse_kv(line: str, lineno: int) -> tuple[str, str]:
    if ":" not in line:
        raise ParseError(f"line {lineno}: expected 'key: value', got {line!r}")
    key, _, value = line.partition(":")
    return key.strip(), value.strip()


def _parse_int(value: str, key: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"line {lineno}: {key} wants an integer, got {value!r}") from None


def _parse_float(value: str, key: str, lineno: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"line {lineno}: {key} wants a number, got {value!r}") from None


def load_problem(path: str) -> ProblemFile:
    """Parse and validate a problem file; defaults fill omitted tolerances."""
    with open(path, "rb") as fh:
        raw = fh.read()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not utf-8 text: {exc}") from None

    header: dict[str, object] = {}
    gens: list[list[tuple[int, int, int, complex]]] = []
    labels: list[str] = []
    int_keys = {"n_lambda", "n_z", "k"}
    float_keys = {"rank_tol", "orth_tol", "inner_tol"}

    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        key, value = _parse_kv(line, lineno)
        if key == "schema":
            if value != SCHEMA:
                raise ParseError(f"line {lineno}: unsupported schema {value!r}")
            header["schema"] = value
        elif key in int_keys or key in float_keys:
            if gens:
                raise ParseError(f"line {lineno}: header key {key!r} after generators")
            if key in header:
                raise ParseError(f"line {lineno}: duplicate key {key!r}")
            header[key] = (_parse_int if key in int_keys else _parse_float)(value, key, lineno)
        elif key == "generator":
            gens.append([])
            labels.append(value if value else f"g{len(gens)}")
        elif key == "term":
            if not gens:
                raise ParseError(f"line {lineno}: term outside a generator block")
            parts = value.split()
            if len(parts) != 5:
                raise ParseError(f"line {lineno}: term wants 'm j i re im', got {value!r}")
            m = _parse_int(parts[0], "term m", lineno)
            j = _parse_int(parts[1], "term j", lineno)
            i = _parse_int(parts[2], "term i", lineno)
            re = _parse_float(parts[3], "term re", lineno)
            im = _parse_float(parts[4], "term im", lineno)
            gens[-1].append((m, j, i, complex(re, im)))
        else:
            raise ParseError(f"line {lineno}: unknown key {key!r}")

    if "schema" not in header:
        raise ParseError("missing schema line")
    for key in int_keys:
        if key not in header:
            raise ParseError(f"missing required key {key!r}")
    if not gens:
        raise ParseError("no generator blocks")

    try:
        lattice = TruncationLattice(
            n_lambda=header["n_lambda"], n_z=header["n_z"], k=header["k"],
            rank_tol=header.get("rank_tol", 1e-9),
            orth_tol=header.get("orth_tol", 1e-8))
    except ValueError as exc:
        raise ParseError(str(exc)) from None

    for label, terms in zip(labels, gens):
        for m, j, i, _ in terms:
            if not 0 <= j < lattice.n_z:
                raise BoundsError(
                    f"generator {label!r}: term (m={m}, j={j}, i={i}) has "
                    f"degree outside 0..{lattice.n_z - 1}")
            if not 1 <= i <= lattice.k:
                raise BoundsError(
                    f"generator {label!r}: term (m={m}, j={j}, i={i}) has "
                    f"coordinate outside 1..{lattice.k}")

    polys = tuple(LaurentPolyField(tuple(terms)) for terms in gens)
    return ProblemFile(header["schema"], lattice, float(header.get("inner_tol", 1e-6)),
                       polys, tuple(labels), digest)


def problem_fields(pf: ProblemFile) -> list[FiberedField]:
    """Evaluate every generator polynomial on the lattice."""
    return [eval_field(p, pf.lattice) for p in pf.generators]


@dataclass(frozen=True)
class Report:
    """Everything a command run wants to say, in aggregation order.

    Rendering is deterministic: tuples keep fiber order, dict sections are
    emitted in fixed key order, floats print via repr (shortest roundtrip).
    """

    command: str
    version: str
    digest: str
    lattice: TruncationLattice
    inner_tol: float
    notes: tuple[str, ...] = ()
    s_invariant: bool | None = None
    s_leak: float | None = None
    spectrum: tuple[int, ...] = ()
    ranks_jm: tuple[int, ...] = ()
    ranks_jr: tuple[int, ...] | None = None
    partition: tuple[tuple[int, int], ...] = ()   # (dimension, fiber count)
    diagnostics: tuple[tuple[str, float], ...] = ()
    inner_defects: tuple[float, ...] | None = None


def _fmt(x: float) -> str:
    return repr(float(x))


def render_text(report: Report) -> str:
    lat = report.lattice
    lines = [
        f"fibershift report ({report.command})",
        f"version: {report.version}",
        f"input: sha256:{report.digest}",
        f"lattice: n_lambda={lat.n_lambda} n_z={lat.n_z} k={lat.k}",
        "tolerances: rank_tol={} orth_tol={} inner_tol={}".format(
            _fmt(lat.rank_tol), _fmt(lat.orth_tol), _fmt(report.inner_tol)),
    ]
    for note in report.notes:
        lines.append(f"note: {note}")
    if report.s_invariant is not None:
        verdict = "yes" if report.s_invariant else "NO"
        lines.append(f"s-invariant: {verdict} (leak {_fmt(report.s_leak)})")
    if report.ranks_jm:
        lines.append(f"spectrum: {len(report.spectrum)} of {lat.n_lambda} fibers")
    for dim, count in report.partition:
        lines.append(f"partition: dimension {dim} on {count} fibers")
    if report.diagnostics:
        lines.append("diagnostics:")
        for key, val in report.diagnostics:
            lines.append(f"  {key} {_fmt(val)}")
    if report.inner_defects is not None:
        lines.append(f"max inner defect: {_fmt(max(report.inner_defects, default=0.0))}")
    if report.ranks_jm:
        lines.append("fibers:")
        for m, r in enumerate(report.ranks_jm):
            row = f"  fiber {m}: rank_jm {r}"
            if report.ranks_jr is not None:
                row += f", rank_jr {report.ranks_jr[m]}"
            if report.inner_defects is not None:
                row += f", inner_defect {_fmt(report.inner_defects[m])}"
            lines.append(row)
    return "\n".join(lines) + "\n"


def render_csv(report: Report) -> str:
    lines = ["fiber,rank_jm,rank_jr,class,inner_defect"]
    for m, r in enumerate(report.ranks_jm):
        jr = "" if report.ranks_jr is None else str(report.ranks_jr[m])
        defect = "" if report.inner_defects is None else _fmt(report.inner_defects[m])
        lines.append(f"{m},{r},{jr},{jr},{defect}")
    return "\n".join(lines) + "\n"


def save_decomposition(res: DecompositionResult, jm: RangeFunctionH,
                       path: str) -> None:
    """Write a decomposition and its target range to the binary layout."""
    lat = res.base.lattice
    ranks_jr = np.array([res.base.rank(m) for m in range(lat.n_lambda)], dtype="<u4")
    ranks_jm = np.array(jm.ranks(), dtype="<u4")
    diag = np.array([res.diagnostics.get(key, 0.0) for key in DIAGNOSTIC_KEYS],
                    dtype="<f8")
    blobs = [
        _HEADER.pack(MAGIC, BINARY_VERSION, lat.n_lambda, lat.n_z, lat.k,
                     lat.rank_tol, lat.orth_tol),
        ranks_jr.tobytes(), ranks_jm.tobytes(), diag.tobytes(),
        np.ascontiguousarray(res.field.ops, dtype="<c16").tobytes(),
    ]
    for m in range(lat.n_lambda):
        blobs.append(np.ascontiguousarray(jm.frames[m], dtype="<c16").tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(blobs))


def load_decomposition(path: str) -> tuple[DecompositionResult, RangeFunctionH]:
    """Reconstruct a persisted decomposition and its target range."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size or raw[:4] != MAGIC:
        raise ParseError(f"{path}: not a decomposition file")
    magic, version, n_lambda, n_z, k, rank_tol, orth_tol = _HEADER.unpack_from(raw)
    if version != BINARY_VERSION:
        raise ParseError(f"{path}: unsupported version {version}")
    lat = TruncationLattice(n_lambda=n_lambda, n_z=n_z, k=k,
                            rank_tol=rank_tol, orth_tol=orth_tol)
    amb = lat.ambient
    off = _HEADER.size

    def take(dtype, count, shape=None):
        nonlocal off
        try:
            arr = np.frombuffer(raw, dtype=dtype, count=count, offset=off)
        except ValueError:
            raise ParseError(f"{path}: truncated file") from None
        off += arr.nbytes
        return arr if shape is None else arr.reshape(shape)

    ranks_jr = take("<u4", n_lambda).astype(int)
    ranks_jm = take("<u4", n_lambda).astype(int)
    diag_vals = take("<f8", len(DIAGNOSTIC_KEYS))
    ops = take("<c16", n_lambda * amb * amb, (n_lambda, amb, amb)).astype(complex)
    jm_frames = tuple(take("<c16", amb * int(r), (amb, int(r))).astype(complex)
                      for r in ranks_jm)

    if np.any(ranks_jr > k):
        raise ParseError(f"{path}: wandering rank exceeds k")
    eye = np.eye(k, dtype=complex)
    base = RangeFunctionK(lat, tuple(eye[:, : int(r)] for r in ranks_jr))
    field = OperatorField(lat, ops)
    classes = {}
    for m, r in enumerate(ranks_jr):
        classes.setdefault(int(r), []).append(m)
    partition = DimensionPartition({d: tuple(ms) for d, ms in classes.items()})

    phis = []
    for i in range(k):
        data = np.zeros((n_lambda, n_z, k), dtype=complex)
        for m in range(n_lambda):
            if i < ranks_jr[m]:
                data[m] = ops[m][:, i].reshape(n_z, k)
        phis.append(FiberedField(lat, data))
    frames = FrameFields(tuple(phis), partition)

    diagnostics = {key: float(v) for key, v in zip(DIAGNOSTIC_KEYS, diag_vals)}
    res = DecompositionResult(base, field, partition, frames, diagnostics)
    return res, RangeFunctionH(lat, jm_frames)
