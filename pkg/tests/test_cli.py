import json
import subprocess
import sys

import pytest

from tlstrip import cli, schramm
from tlstrip.transfer import ground_state_exact


def _run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_no_subcommand_is_usage_error(capsys):
    code, out, err = _run([], capsys)
    assert code == 2
    assert out == ""
    assert "usage" in err


def test_argparse_rejects_even_width():
    with pytest.raises(SystemExit) as ei:
        cli.main(["pleft", "--L", "4"])
    assert ei.value.code == 2


def test_usage_error_exit_code(capsys):
    code, _, err = _run(["groundstate", "--L", "3", "--z", "1,1,1"], capsys)
    assert code == 2
    assert "tlstrip:" in err


def test_computation_error_exit_code(capsys):
    # odd height fails downstream of argparse, in the sampler
    code, _, err = _run(
        ["mc", "--L", "3", "--height", "3", "--samples", "10"], capsys
    )
    assert code == 1
    assert "tlstrip:" in err


def test_counts_output(capsys):
    code, out, _ = _run(["counts", "--kind", "asm", "--L", "6"], capsys)
    assert code == 0
    meta, value = out.splitlines()
    assert meta.startswith("# tlstrip ")
    assert "counts kind=asm L=6" in meta
    assert value == "7436"


def test_chi_homogeneous_json(capsys):
    code, out, _ = _run(["chi", "--L", "4"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["value_re"] == 27.0
    assert doc["value_im"] == 0.0
    assert doc["cond"] == 0.0
    assert doc["meta"]["command"] == "chi"


def test_groundstate_exact_json(capsys):
    code, out, _ = _run(["groundstate", "--L", "5"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["patterns"] == ["|()()", "|(())", "()|()", "()()|", "(())|"]
    assert doc["coeffs"] == [int(v) for v in ground_state_exact(5)]
    assert doc["sum"] == 11


def test_pleft_exact_csv_cells(capsys):
    code, out, _ = _run(["pleft", "--L", "3"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "j,X,Xhat,Y,P_cum,P_smooth,P_osc"
    assert lines[2] == "0,,147/256,147/256,0/1,,"
    assert lines[3] == "1,3/4,57/128,159/256,3/4,3/8,3/8"
    assert lines[4] == "2,1/2,95/128,159/256,1/4,1/2,-1/4"
    assert lines[5] == "3,3/4,57/128,147/256,1/1,5/8,3/8"


def test_pleft_float_mode_serializes_floats(capsys):
    code, out, _ = _run(["pleft", "--L", "3", "--mode", "float"], capsys)
    assert code == 0
    row1 = out.splitlines()[3].split(",")
    assert row1[1] == "0.75"
    assert "/" not in out.splitlines()[3]


def test_pleft_json_round_trip(capsys):
    code, out, _ = _run(["pleft", "--L", "3", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["Z"] == 2
    assert doc["rows"][1]["X"] == "3/4"
    assert len(doc["rows"]) == 4


def test_invocations_are_byte_identical(capsys):
    _, first, _ = _run(["pleft", "--L", "5", "--mode", "float"], capsys)
    _, second, _ = _run(["pleft", "--L", "5", "--mode", "float"], capsys)
    assert first == second
    _, m1, _ = _run(["mc", "--L", "3", "--samples", "200", "--threads", "1"], capsys)
    _, m2, _ = _run(["mc", "--L", "3", "--samples", "200", "--threads", "2"], capsys)
    assert m1 == m2


def test_schramm_grid_antisymmetry(capsys):
    code, out, _ = _run(["schramm", "--grid", "9"], capsys)
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[2:]]
    assert len(rows) == 9
    vals = [float(v) for _, v in rows]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    for v, vr in zip(vals, reversed(vals)):
        assert v + vr == pytest.approx(1.0, abs=1e-12)


def test_asymconst_matches_module(capsys):
    code, out, _ = _run(["asymconst"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["C"] == schramm.pb_amplitude()
    assert doc["Chat"] == schramm.pbhat_amplitude()


def test_xxz_profile_columns(capsys):
    from tlstrip.observables import profile_exact

    code, out, _ = _run(["xxz", "--L", "5"], capsys)
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[2:]]
    assert len(rows) == 5
    _, _, prof = profile_exact(5)
    for row, xj in zip(rows, prof.x):
        assert float(row[3]) == pytest.approx(float(xj), abs=1e-9)
    assert float(rows[-1][4]) == pytest.approx(1.0, abs=1e-9)


def test_mc_meta_is_thread_free(capsys):
    code, out, _ = _run(
        ["mc", "--L", "3", "--samples", "100", "--seed", "2"], capsys
    )
    assert code == 0
    meta = out.splitlines()[0]
    assert "samples=100" in meta and "seed=2" in meta and "height=24" in meta
    assert "threads" not in meta


def test_verify_small_run_is_green(capsys):
    code, out, _ = _run(
        ["verify", "--suite", "identities", "--L", "3", "--draws", "2"], capsys
    )
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 9
    assert all(line.endswith(" ok") for line in lines[1:])


def test_output_file_matches_stdout(tmp_path, capsys):
    _, direct, _ = _run(["counts", "--kind", "csscpp", "--L", "8"], capsys)
    target = tmp_path / "counts.txt"
    code, out, _ = _run(
        ["counts", "--kind", "csscpp", "--L", "8", "--output", str(target)], capsys
    )
    assert code == 0
    assert out == ""
    assert target.read_text() == direct


def test_report_writes_figures_and_tables(tmp_path, capsys):
    outdir = tmp_path / "rep"
    code, out, _ = _run(
        ["report", "--outdir", str(outdir), "--L", "5", "--grid", "40"], capsys
    )
    assert code == 0
    listed = out.splitlines()[1:]
    assert [p.rsplit("/", 1)[1] for p in listed] == [
        "pleft_L5.csv",
        "schramm.csv",
        "profile_L5.png",
        "staggered_L5.png",
    ]
    for name in ("pleft_L5.csv", "schramm.csv"):
        assert (outdir / name).stat().st_size > 0
    for name in ("profile_L5.png", "staggered_L5.png"):
        assert (outdir / name).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "tlstrip", "--version"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("tlstrip ")
