from __future__ import annotations

import re
import subprocess
import sys

import numpy as np
import pytest

from qcover.cli import main, parse_range
from qcover.design import Design
from qcover.designs import part_slices
from qcover.qcdfile import read_design, write_design


@pytest.fixture(scope="module")
def qcd632(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "c632.qcd"
    assert main(["construct", "--family", "632", "--q", "2", "--out", str(path), "--no-verify"]) == 0
    return path


def test_construct_and_verify(tmp_path, capsys):
    out = tmp_path / "d.qcd.gz"
    assert main(["construct", "--family", "842", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "size=346 predicted=346" in text
    assert re.search(r"^uncovered +0$", text, re.M)
    assert main(["verify", str(out), "--multiplicity", "--kv"]) == 0
    kv = capsys.readouterr().out
    assert "total_targets=10795" in kv and "histogram=1:10400,3:360,18:35" in kv


def test_verify_detects_removed_block(tmp_path, qcd632, capsys):
    d = read_design(qcd632)
    z = part_slices(d)["Z"]
    keep = np.ones(d.size, dtype=bool)
    keep[z.start] = False
    meta = dict(d.meta)
    meta.pop("parts", None)
    holed = Design(d.field, d.n, d.k, d.r, d.gens[keep], d.family, meta)
    path = tmp_path / "holed.qcd"
    write_design(holed, path)
    assert main(["verify", str(path)]) == 1
    out = capsys.readouterr().out
    assert "uncovered: Subspace(" in out
    assert main(["verify", str(path), "--kv"]) == 1
    assert "uncovered_key=" in capsys.readouterr().out


def test_xset_export_and_reimport(tmp_path, capsys):
    a, b, x = tmp_path / "a.qcd", tmp_path / "b.qcd", tmp_path / "x.qcd"
    assert main(["construct", "--family", "632", "--out", str(a), "--export-xset", str(x), "--no-verify"]) == 0
    assert main(["construct", "--family", "632", "--out", str(b), "--xset", str(x), "--no-verify"]) == 0
    capsys.readouterr()
    da, db = read_design(a), read_design(b)
    assert (da.gens == db.gens).all()
    assert read_design(x).size == 56


def test_resource_cap_exit_code(capsys):
    assert main(["construct", "--family", "842", "--q", "7"]) == 3
    assert "use --no-verify" in capsys.readouterr().err
    assert main(["construct", "--family", "2n43", "--n", "5", "--cap", "1000"]) == 3


def test_usage_errors(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "missing.qcd")]) == 2
    bad = tmp_path / "bad.qcd"
    bad.write_text("# qcd design file\n{}\n")
    assert main(["verify", str(bad)]) == 2
    assert main(["construct", "--family", "2n32", "--q", "2"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["construct", "--family", "nope"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_bounds_tables(capsys):
    assert main(["bounds", "--family", "2n32", "--n", "3..4", "--q", "2,3"]) == 0
    out = capsys.readouterr().out
    assert "1657" in out and "884" in out and "93" in out
    assert main(["bounds", "--family", "43", "--q", "2"]) == 0
    out = capsys.readouterr().out
    assert "6477" in out and "423181" in out and "457585" in out
    assert main(["bounds", "--family", "3n8-42", "--n", "0..1", "--q", "2"]) == 0
    out = capsys.readouterr().out
    assert "346" in out and "20986" in out


def test_stats(tmp_path, qcd632, capsys):
    assert main(["stats", str(qcd632)]) == 0
    assert "census_X1=0=17" in capsys.readouterr().out
    p = tmp_path / "c843.qcd"
    assert main(["construct", "--family", "843", "--out", str(p), "--no-verify"]) == 0
    capsys.readouterr()
    assert main(["stats", str(p)]) == 0
    assert "alpha=81 betas=[561, 561, 561]" in capsys.readouterr().out


def test_parse_range():
    assert parse_range("3..6,8") == [3, 4, 5, 6, 8]
    assert parse_range("2") == [2]


def test_module_entry_point(qcd632):
    res = subprocess.run([sys.executable, "-m", "qcover", "verify", str(qcd632)], capture_output=True, text=True)
    assert res.returncode == 0
    assert "targets" in res.stdout and "651" in res.stdout
