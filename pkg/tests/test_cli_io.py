"""Problem files, persistence, report rendering, command drivers."""

import shutil
import subprocess

import numpy as np
import pytest

from fibershift import (TruncationLattice, decompose_range,
                        range_from_generators, shat_closure)
from fibershift.errors import BoundsError, ParseError
from fibershift.factorization import verify_decomposition
from fibershift.fileio import (Report, load_decomposition, load_problem,
                               problem_fields, render_csv, render_text,
                               save_decomposition)
from fibershift.fields import eval_field

from helpers import grid_seeds, laurent_seeds, run_cli, write_problem

GOLDEN = """\
# comment lines and blanks are ignored
schema: fibershift-problem/1
n_lambda: 4
n_z: 8
k: 2
orth_tol: 1e-7

generator: first
term: 0 1 1 1.0 0.0
term: -3 2 2 0.5 -0.25   # lambda exponent may be negative
generator:
term: 2 0 1 0.0 1.0
"""


def _write(tmp_path, text, name="problem.txt"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_load_problem_golden(tmp_path):
    pf = load_problem(_write(tmp_path, GOLDEN))
    assert pf.schema == "fibershift-problem/1"
    assert (pf.lattice.n_lambda, pf.lattice.n_z, pf.lattice.k) == (4, 8, 2)
    assert pf.lattice.rank_tol == 1e-9          # default
    assert pf.lattice.orth_tol == 1e-7          # from the file
    assert pf.inner_tol == 1e-6                 # default
    assert pf.labels == ("first", "g2")
    assert pf.generators[0].terms == ((0, 1, 1, 1.0 + 0.0j),
                                      (-3, 2, 2, 0.5 - 0.25j))
    assert pf.generators[1].terms == ((2, 0, 1, 1.0j),)
    assert len(pf.digest) == 64


BAD_PROBLEMS = (
    ("n_lambda: 4\nn_z: 8\nk: 1\ngenerator: g\nterm: 0 0 1 1 0\n", "schema"),
    ("schema: fibershift-problem/2\n", "unsupported schema"),
    ("schema: fibershift-problem/1\nn_lambda: 4\nn_z: 8\n", "required key"),
    ("schema: fibershift-problem/1\nn_lambda: 4\nn_lambda: 4\n", "duplicate"),
    ("schema: fibershift-problem/1\nn_lambda: x\n", "integer"),
    ("schema: fibershift-problem/1\nterm: 0 0 1 1 0\n", "outside a generator"),
    ("schema: fibershift-problem/1\nn_lambda: 4\nn_z: 8\nk: 1\n"
     "generator: g\nterm: 0 0 1\n", "term wants"),
    ("schema: fibershift-problem/1\nn_lambda: 4\nn_z: 8\nk: 1\n"
     "generator: g\nterm: 0 0 1 1 0\nn_z: 8\n", "after generators"),
    ("schema: fibershift-problem/1\nn_lambda: 4\nn_z: 8\nk: 1\nbogus: 1\n",
     "unknown key"),
    ("schema: fibershift-problem/1\nn_lambda: 4\nn_z: 8\nk: 1\n", "no generator"),
    ("schema: fibershift-problem/1\nn_lambda: 0\nn_z: 8\nk: 1\n"
     "generator: g\nterm: 0 0 1 1 0\n", "positive"),
)


@pytest.mark.parametrize("text,needle", BAD_PROBLEMS)
def test_load_problem_parse_errors(tmp_path, text, needle):
    with pytest.raises(ParseError, match=needle):
        load_problem(_write(tmp_path, text))


def test_load_problem_bounds(tmp_path):
    head = "schema: fibershift-problem/1\nn_lambda: 4\nn_z: 8\nk: 2\ngenerator: g\n"
    with pytest.raises(BoundsError, match="degree"):
        load_problem(_write(tmp_path, head + "term: 0 8 1 1 0\n"))
    with pytest.raises(BoundsError, match="coordinate"):
        load_problem(_write(tmp_path, head + "term: 0 0 3 1 0\n"))


def test_problem_fields_match_eval(tmp_path):
    rng = np.random.default_rng(60)
    lat = TruncationLattice(8, 16, 2)
    polys = laurent_seeds(rng, lat, 2)
    path = tmp_path / "p.txt"
    write_problem(path, lat, polys)
    pf = load_problem(str(path))
    assert pf.lattice == lat
    for poly, loaded in zip(polys, pf.generators):
        direct = eval_field(poly, lat)
        roundtrip = eval_field(loaded, lat)
        assert np.array_equal(direct.data, roundtrip.data)
    fields = problem_fields(pf)
    assert np.array_equal(fields[0].data, eval_field(polys[0], lat).data)


def test_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(61)
    lat = TruncationLattice(4, 32, 2)
    gens = shat_closure(grid_seeds(rng, lat, 2))
    jm = range_from_generators(gens, lat)
    res = decompose_range(jm)
    path = str(tmp_path / "out.fshd")
    save_decomposition(res, jm, path)
    res2, jm2 = load_decomposition(path)
    assert res2.diagnostics == res.diagnostics
    assert np.array_equal(res2.field.ops, res.field.ops)
    assert res2.partition.classes == res.partition.classes
    for m in range(4):
        assert np.array_equal(jm2.frames[m], jm.frames[m])
        assert np.array_equal(res2.base.frames[m], res.base.frames[m])
    rechecked = verify_decomposition(res2, jm2)
    assert max(rechecked.values()) < 1e-8


def test_load_decomposition_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.fshd"
    bad.write_bytes(b"NOPE" + b"\0" * 64)
    with pytest.raises(ParseError, match="not a decomposition"):
        load_decomposition(str(bad))


def test_load_decomposition_rejects_truncation(tmp_path):
    rng = np.random.default_rng(62)
    lat = TruncationLattice(2, 8, 1)
    gens = shat_closure(grid_seeds(rng, lat, 1))
    jm = range_from_generators(gens, lat)
    res = decompose_range(jm)
    path = tmp_path / "t.fshd"
    save_decomposition(res, jm, str(path))
    whole = path.read_bytes()
    path.write_bytes(whole[: len(whole) // 2])
    with pytest.raises(ParseError, match="truncated"):
        load_decomposition(str(path))


def test_render_text_layout():
    lat = TruncationLattice(2, 4, 1)
    report = Report(command="analyze", version="0.1.0", digest="ab" * 32,
                    lattice=lat, inner_tol=1e-6,
                    notes=("shat-closure: applied (1 -> 3 generators)",),
                    s_invariant=False, s_leak=0.25,
                    spectrum=(0,), ranks_jm=(3, 0),
                    diagnostics=(("isometry_defect", 1e-15),))
    text = render_text(report)
    assert text.startswith("fibershift report (analyze)\n")
    assert "s-invariant: NO (leak 0.25)" in text
    assert "  isometry_defect 1e-15" in text
    assert "  fiber 1: rank_jm 0" in text
    assert text.endswith("\n")


def test_render_csv_layout():
    lat = TruncationLattice(2, 4, 1)
    report = Report(command="beurling", version="0.1.0", digest="cd" * 32,
                    lattice=lat, inner_tol=1e-6, ranks_jm=(4, 0),
                    ranks_jr=(1, 0), inner_defects=(0.0, 0.0))
    csv = render_csv(report)
    lines = csv.splitlines()
    assert lines[0] == "fiber,rank_jm,rank_jr,class,inner_defect"
    assert lines[1] == "0,4,1,1,0.0"
    assert lines[2] == "1,0,0,0,0.0"


CONSTANT_PROBLEM = """\
schema: fibershift-problem/1
n_lambda: 4
n_z: 8
k: 1
generator: one
term: 0 0 1 1.0 0.0
"""


def test_cli_analyze_constant(tmp_path):
    path = _write(tmp_path, CONSTANT_PROBLEM)
    code, out = run_cli(["analyze", path])
    assert code == 0
    assert "s-invariant: yes" in out
    assert "partition: dimension 1 on 4 fibers" in out
    assert "spectrum: 4 of 4 fibers" in out
    assert all(f"fiber {m}: rank_jm 8, rank_jr 1" in out for m in range(4))


def test_cli_spectrum_and_seed_note(tmp_path):
    path = _write(tmp_path, CONSTANT_PROBLEM)
    code, out = run_cli(["spectrum", path, "--seed", "7"])
    assert code == 0
    assert "note: seed: 7" in out
    assert "note: shat-closure: applied (1 -> 8 generators)" in out


def test_cli_decompose_verify_roundtrip(tmp_path):
    path = _write(tmp_path, CONSTANT_PROBLEM)
    outdir = str(tmp_path / "result")
    code, out = run_cli(["decompose", path, "--out", outdir])
    assert code == 0
    assert "persisted: decomposition.fshd" in out
    assert (tmp_path / "result" / "report.txt").read_text() == out

    code, vout = run_cli(["verify", outdir])
    assert code == 0
    assert "fibershift report (verify)" in vout
    # the .fshd file directly is also accepted
    code, _ = run_cli(["verify", outdir + "/decomposition.fshd"])
    assert code == 0


BLASCHKE_PROBLEM = """\
schema: fibershift-problem/1
n_lambda: 2
n_z: 64
k: 1
generator: blaschke
term: 0 0 1 -0.5 0.0
term: 0 1 1 1.0 0.0
"""


def test_cli_beurling_blaschke(tmp_path):
    path = _write(tmp_path, BLASCHKE_PROBLEM)
    code, out = run_cli(["beurling", path, "--format", "csv",
                         "--out", str(tmp_path / "b")])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "fiber,rank_jm,rank_jr,class,inner_defect"
    defects = [float(row.split(",")[4]) for row in lines[1:]]
    assert max(defects) < 1e-8
    assert (tmp_path / "b" / "report.csv").read_text() == out


def test_cli_exit_codes(tmp_path):
    code, _ = run_cli(["analyze", str(tmp_path / "missing.txt")])
    assert code == 3
    bad = _write(tmp_path, CONSTANT_PROBLEM.replace("term: 0 0 1", "term: 0 9 1"))
    code, _ = run_cli(["analyze", bad])
    assert code == 3
    # the constant problem decomposes with exactly zero diagnostics, so it
    # cannot trip any tolerance; the Blaschke one leaves rounding residue
    good = _write(tmp_path, BLASCHKE_PROBLEM, name="good.txt")
    code, _ = run_cli(["decompose", good, "--orth-tol", "1e-16"])
    assert code == 2


def test_console_script(tmp_path):
    exe = shutil.which("fibershift")
    if exe is None:
        pytest.skip("console script not on PATH")
    path = _write(tmp_path, CONSTANT_PROBLEM)
    proc = subprocess.run([exe, "spectrum", path], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "fibershift report (spectrum)" in proc.stdout
