import pytest

from hopcache.cli import (EXIT_CONFIG, EXIT_FAIL, EXIT_OK, main,
                          parse_n_list)
from hopcache.config import ConfigError

SMALL_SET = ["--set", "num_ues=12", "--set", "num_uavs=2",
             "--set", "max_relay_rues=3", "--drops", "2"]

OUT_FILES = {"results.csv", "means.csv", "summary.json", "manifest.json"}


def run_cli(*argv):
    return main(list(argv))


def test_parse_n_list():
    assert parse_n_list("30") == [30]
    assert parse_n_list("5,10,20") == [5, 10, 20]
    assert parse_n_list("1..4") == [1, 2, 3, 4]
    assert parse_n_list("1..3,7") == [1, 2, 3, 7]
    assert parse_n_list("3,1..2,3") == [1, 2, 3]
    for bad in ("", "x", "4..1", "1..x"):
        with pytest.raises(ConfigError):
            parse_n_list(bad)


def test_validate_echoes_config(capsys):
    assert run_cli("validate", "--set", "num_requesting=7") == EXIT_OK
    out = capsys.readouterr().out
    assert "num_requesting = 7" in out
    assert "# config_hash = " in out


def test_validate_rejects_bad_config(capsys):
    code = run_cli("validate", "--set", "cache_capacity=100")
    assert code == EXIT_CONFIG
    assert "config error:" in capsys.readouterr().err


def test_run_writes_only_into_out(tmp_path, monkeypatch, capsys):
    work = tmp_path / "work"
    work.mkdir()
    monkeypatch.chdir(work)
    out = tmp_path / "out"
    code = run_cli("run", "--n", "2", *SMALL_SET, "--out", str(out))
    assert code == EXIT_OK
    assert {p.name for p in out.iterdir()} == OUT_FILES
    assert list(work.iterdir()) == []
    stdout = capsys.readouterr().out
    assert "n=2 greedy-pa: mean" in stdout


def test_out_env_fallback(tmp_path, monkeypatch):
    out = tmp_path / "envout"
    monkeypatch.setenv("HOPCACHE_OUT", str(out))
    assert run_cli("run", "--n", "2", *SMALL_SET) == EXIT_OK
    assert {p.name for p in out.iterdir()} == OUT_FILES


def test_missing_out_is_config_error(monkeypatch, capsys):
    monkeypatch.delenv("HOPCACHE_OUT", raising=False)
    assert run_cli("run", "--n", "2", *SMALL_SET) == EXIT_CONFIG
    assert "output directory" in capsys.readouterr().err


def test_unknown_algo_is_config_error(tmp_path, capsys):
    code = run_cli("run", "--n", "2", *SMALL_SET,
                   "--algos", "nope", "--out", str(tmp_path / "x"))
    assert code == EXIT_CONFIG
    assert "unknown algorithm" in capsys.readouterr().err


def test_policy_override_lands_in_manifest(tmp_path):
    out = tmp_path / "pol"
    code = run_cli("run", "--n", "2", *SMALL_SET, "--policy", "sequential",
                   "--algos", "greedy", "--out", str(out))
    assert code == EXIT_OK
    rows = (out / "results.csv").read_text().strip().splitlines()
    assert all(r.split(",")[3] == "sequential" for r in rows[1:])


def test_sweep_covers_requested_ns(tmp_path):
    out = tmp_path / "sweep"
    code = run_cli("sweep", "--n", "2,3", *SMALL_SET, "--out", str(out))
    assert code == EXIT_OK
    rows = (out / "results.csv").read_text().strip().splitlines()
    assert len(rows) == 1 + 2 * (2 + 3) * 3       # drops * ues * algos
    assert {r.split(",")[1] for r in rows[1:]} == {"2", "3"}


def test_replay_reproduces_bytes(tmp_path, capsys):
    original = tmp_path / "orig"
    assert run_cli("run", "--n", "2", *SMALL_SET, "--out", str(original)) == EXIT_OK
    capsys.readouterr()

    replayed = tmp_path / "replayed"
    code = run_cli("replay", "--manifest", str(original), "--out", str(replayed))
    assert code == EXIT_OK
    assert "replay verified" in capsys.readouterr().out
    for name in OUT_FILES:
        assert (original / name).read_bytes() == (replayed / name).read_bytes()


def test_replay_detects_tampering(tmp_path, capsys):
    original = tmp_path / "orig"
    run_cli("run", "--n", "2", *SMALL_SET, "--out", str(original))
    results = original / "results.csv"
    results.write_text(results.read_text() + "# edited\n")

    code = run_cli("replay", "--manifest", str(original / "manifest.json"),
                   "--out", str(tmp_path / "replayed"))
    assert code == EXIT_FAIL
    assert "MISMATCH" in capsys.readouterr().err


def test_replay_missing_manifest(tmp_path, capsys):
    code = run_cli("replay", "--manifest", str(tmp_path / "nowhere"),
                   "--out", str(tmp_path / "o"))
    assert code == EXIT_CONFIG


def test_cdf_curve_and_point(tmp_path, capsys):
    out = tmp_path / "run"
    run_cli("run", "--n", "2", *SMALL_SET, "--out", str(out))
    capsys.readouterr()

    assert run_cli("cdf", "--results", str(out), "--algo", "greedy",
                   "--n", "2") == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "duration_s,cdf"
    assert len(lines) >= 2
    assert lines[-1].endswith("1.0")

    assert run_cli("cdf", "--results", str(out / "results.csv"),
                   "--algo", "greedy", "--n", "2", "--at", "1e12") == EXIT_OK
    assert capsys.readouterr().out.strip() == "1.0"

    assert run_cli("cdf", "--results", str(out), "--algo", "brute",
                   "--n", "2") == EXIT_CONFIG
