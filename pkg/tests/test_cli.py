import subprocess
import sys

import pytest

from lsig.cli import main


def _pipeline(tmp_path, monkeypatch, scheme="schnorr-tiny", t=3, seed="1"):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("LSIG_SEED", seed)
    for i in range(t):
        assert main(["keygen", "--scheme", scheme, "--out", f"k{i}"]) == 0
    (tmp_path / "msg").write_bytes(b"transfer 10 coins")
    assert main(["aggregate", "--keys", *[f"k{i}.pub" for i in range(t)], "--out", "agg"]) == 0
    rc = main(["sign", "--keys-with-secrets", *[f"k{i}.key" for i in range(t)],
               "--message-file", "msg", "--out-sig", "sig"])
    return rc


def test_pipeline_schnorr(tmp_path, monkeypatch):
    assert _pipeline(tmp_path, monkeypatch) == 0
    assert main(["verify", "--agg-key", "agg", "--message-file", "msg", "--sig", "sig"]) == 0
    (tmp_path / "other").write_bytes(b"transfer 99 coins")
    assert main(["verify", "--agg-key", "agg", "--message-file", "other", "--sig", "sig"]) == 1


def test_pipeline_rlwe(tmp_path, monkeypatch):
    for seed in range(10):
        if _pipeline(tmp_path, monkeypatch, "rlwe", 2, str(seed)) == 0:
            break
    else:
        pytest.fail("every seed aborted")
    assert main(["verify", "--agg-key", "agg", "--message-file", "msg", "--sig", "sig"]) == 0


def test_truncated_signature(tmp_path, monkeypatch, capsys):
    _pipeline(tmp_path, monkeypatch)
    data = (tmp_path / "sig").read_bytes()
    (tmp_path / "short").write_bytes(data[:-3])
    assert main(["verify", "--agg-key", "agg", "--message-file", "msg", "--sig", "short"]) == 1
    assert "checksum" in capsys.readouterr().err


def test_scheme_mismatch(tmp_path, monkeypatch, capsys):
    _pipeline(tmp_path, monkeypatch)
    monkeypatch.setenv("LSIG_SEED", "2")
    main(["keygen", "--scheme", "schnorr-desk", "--out", "d0"])
    main(["keygen", "--scheme", "schnorr-desk", "--out", "d1"])
    main(["aggregate", "--keys", "d0.pub", "d1.pub", "--out", "dagg"])
    assert main(["verify", "--agg-key", "dagg", "--message-file", "msg", "--sig", "sig"]) == 1
    assert "different scheme" in capsys.readouterr().err
    assert main(["aggregate", "--keys", "k0.pub", "d0.pub", "--out", "mixed"]) == 1


def test_params_file(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "g.params").write_text("p = 23\nq = 11\ng = 2\n")
    assert main(["keygen", "--params-file", "g.params", "--out", "k"]) == 0
    (tmp_path / "bad.params").write_text("p = 23\nq = 11\ng = 5\n")
    assert main(["keygen", "--params-file", "bad.params", "--out", "k"]) == 1
    assert main(["keygen", "--params-file", "missing.params", "--out", "k"]) == 1


def test_missing_file(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(["verify", "--agg-key", "nope", "--message-file", "nope", "--sig", "nope"]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_forklab_csv(capsys):
    assert main(["forklab", "--adversary", "always,threshold", "--trials", "500", "--seed", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("adversary,q,N")
    assert len(lines) == 3 and all(line.endswith("true") for line in lines[1:])
    assert main(["forklab", "--adversary", "bogus", "--trials", "5"]) == 1


def test_bench_sizes_constant(capsys):
    assert main(["bench", "--scheme", "schnorr-desk", "--t-list", "2,5", "--trials", "2"]) == 0
    rows = [line.split() for line in capsys.readouterr().out.strip().splitlines()[1:]]
    assert rows[0][4:6] == rows[1][4:6]


def test_entry_point_runs():
    out = subprocess.run([sys.executable, "-m", "lsig.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "keygen" in out.stdout


def test_determinism(tmp_path, monkeypatch):
    runs = []
    for d in ("a", "b"):
        (tmp_path / d).mkdir()
        _pipeline(tmp_path / d, monkeypatch, "schnorr-desk", 3, "77")
        runs.append({p.name: p.read_bytes() for p in (tmp_path / d).iterdir()})
    assert runs[0] == runs[1]
