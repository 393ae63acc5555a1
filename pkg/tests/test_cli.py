import json

import numpy as np
import pytest

import chunkbench.cli as cli
from chunkbench.analysis import ThroughputResult
from chunkbench.cli import main, parse_override, parse_size, read_records
from chunkbench.spec import ConfigError, DivisorSet, TuningError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fsc_chunk_csv(capsys):
    code, out, _ = run(capsys, "chunk", "--alg", "fsc", "--size", "4096", "--len", "64M")
    assert code == 0
    lines = out.splitlines()
    meta = json.loads(lines[0][2:])
    assert lines[1] == "ordinal,size,fingerprint,trailing"
    rows = lines[2:]
    assert len(rows) == 16385
    assert rows[-1].startswith("16384,0,") and rows[-1].endswith(",1")
    assert all(r.split(",")[1] == "4096" for r in rows[:-1])
    assert rows[0].split(",")[2] == rows[0].split(",")[2].lower()
    assert meta["version"] and meta["spec"]["params"] == {"fixed_size": 4096}
    assert meta["seed"] == 0 and len(meta["input"]["sha256"]) == 64


def test_chunk_deterministic(capsys):
    args = ("chunk", "--alg", "ae", "--target", "2048", "--len", "2M", "--seed", "5")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_seed_env(capsys, monkeypatch):
    monkeypatch.setenv("CHUNKBENCH_SEED", "77")
    _, out, _ = run(capsys, "tune", "--alg", "ram", "--target", "2048", "--len", "1K")
    assert json.loads(out)["metadata"]["seed"] == 77
    monkeypatch.setenv("CHUNKBENCH_SEED", "x")
    assert run(capsys, "tune", "--alg", "ram", "--target", "2048", "--len", "1K")[0] == 2


def test_ae_mean_end_to_end(capsys):
    _, out, _ = run(capsys, "analyze", "--alg", "ae", "--target", "2048", "--len", "16M", "--seed", "3")
    summary = json.loads(out)["summary"]
    assert abs(summary["mean"] - 2048) / 2048 < 0.03
    assert summary["dedup_ratio"] < 0.001


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_analyze_file_equals_pipeline(capsys, tmp_path, fmt):
    path = tmp_path / f"chunks.{fmt}"
    args = ["--alg", "gear-nc", "--target", "1024", "--len", "3M", "--seed", "11"]
    assert run(capsys, "chunk", *args, "--format", fmt, "--output", str(path))[0] == 0
    _, from_file, _ = run(capsys, "analyze", "--from-file", str(path))
    _, pipeline, _ = run(capsys, "analyze", *args)
    assert from_file == pipeline


def test_analyze_doubled_input(capsys, tmp_path):
    p = tmp_path / "x.bin"
    p.write_bytes(np.random.default_rng(0).integers(0, 256, 8192 * 10, dtype=np.uint8).tobytes())
    _, out, _ = run(capsys, "analyze", "--alg", "fsc", "--size", "8192", "--input", str(p), "--input", str(p))
    summary = json.loads(out)["summary"]
    assert summary["dedup_ratio"] == 0.5 and summary["sd"] == 0


def test_tune_outputs(capsys):
    doc = json.loads(run(capsys, "tune", "--alg", "ae", "--target", "512", "--len", "1K")[1])
    assert doc["params"]["horizon"] == 348 and doc["provenance"] == "table"
    doc = json.loads(run(capsys, "tune", "--alg", "mii", "--target", "770", "--len", "1K")[1])
    assert doc["interval_length"] == 6
    doc = json.loads(run(capsys, "tune", "--alg", "ram", "--target", "2048", "--len", "1K")[1])
    assert abs(doc["predicted_mean"] - 2048) <= 1
    doc = json.loads(
        run(capsys, "tune", "--alg", "ae", "--target", "512", "--len", "1K", "--override", "horizon=9")[1]
    )
    assert doc["params"]["horizon"] == 9 and doc["provenance"] == "table+override"
    assert doc["metadata"]["spec"]["params"]["horizon"] == 9


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--alg", "gear", "--target", "2048", "--len", "2M", "--reps", "3")
    doc = json.loads(out)
    assert code == 0 and doc["n"] == 3 and doc["sum_of_sizes"] == 2 << 20
    assert doc["median_MiBps"] > 0 and doc["iqr_MiBps"] >= 0
    assert cli.build_parser().parse_args(["bench", "--alg", "fsc", "--size", "4"]).reps == 10


def test_bench_self_check(capsys, monkeypatch):
    monkeypatch.setattr(cli, "throughput_run", lambda *a, **k: ThroughputResult(1.0, 0.0, 1, 5, [1.0]))
    code, _, err = run(capsys, "bench", "--alg", "fsc", "--size", "64", "--len", "1K")
    assert code == 1 and "self-check" in err


def test_exit_codes(capsys, monkeypatch, tmp_path):
    assert run(capsys, "tune", "--alg", "ae", "--target", "100", "--len", "1K")[0] == 2
    assert run(capsys, "chunk", "--alg", "nope", "--target", "1024")[0] == 2
    assert run(capsys, "chunk", "--alg", "ae", "--len", "1K")[0] == 2
    assert run(capsys, "chunk", "--alg", "ae", "--target", "2048", "--input", str(tmp_path / "no"))[0] == 3

    def fail(*a, **k):
        raise TuningError("no candidate")

    monkeypatch.setattr(cli, "resolve_spec", fail)
    assert run(capsys, "tune", "--alg", "pci", "--target", "3000", "--len", "1K")[0] == 4


def test_gen(tmp_path, capsys):
    out, man = tmp_path / "r.bin", tmp_path / "m.json"
    assert run(capsys, "gen", "--seed", "4", "--len", "1000", "--output", str(out), "--manifest", str(man))[0] == 0
    assert out.stat().st_size == 1000
    doc = json.loads(man.read_text())
    assert doc["corpus"]["prng"] == "philox4x64-10" and doc["total_length"] == 1000
    a, b = tmp_path / "a", tmp_path / "b"
    a.write_bytes(b"abc")
    b.write_bytes(b"defgh")
    run(capsys, "gen", "--input", str(a), "--input", str(b), "--output", str(out), "--manifest", str(man))
    assert out.read_bytes() == b"abcdefgh"
    assert [f["offset"] for f in json.loads(man.read_text())["files"]] == [0, 3]


def test_parsers():
    assert parse_size("64M") == 64 << 20 and parse_size("1KiB") == 1024 and parse_size("17") == 17
    assert parse_override("horizon=0x10") == ("horizon", 16)
    assert parse_override("divisors=6162,0a0a")[1] == DivisorSet([0x6162, 0x0A0A])
    for bad in ("horizon", "bogus=1", "horizon=x"):
        with pytest.raises(ConfigError):
            parse_override(bad)
    with pytest.raises(ConfigError):
        parse_size("-3")


def test_read_records_rejects_garbage():
    with pytest.raises(ConfigError):
        read_records("1,2,3\n")
