import csv
import json

import numpy as np
import pytest

from fuzzymark import cli, core, watermark


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture()
def cover(tmp_path, camera):
    path = tmp_path / "cover.pgm"
    core.save_pgm(camera, path)
    return path


def test_embed_then_extract(tmp_path, cover, capsys):
    out = tmp_path / "marked.pgm"
    assert run("embed", cover, "-o", out, "--seed", 5) == 0
    report = capsys.readouterr().out
    assert "psnr" in report and "mssim" in report
    payload_path = tmp_path / "marked.payload.txt"
    strength_path = tmp_path / "marked.strength.pgm"
    assert payload_path.exists() and strength_path.exists()
    assert core.load_pgm(strength_path).shape == (64, 64)

    got = tmp_path / "got.txt"
    assert run("extract", out, "-o", got) == 0
    assert got.read_text() == payload_path.read_text()


def test_embed_payload_matches_seed(tmp_path, cover):
    out = tmp_path / "m.pgm"
    assert run("embed", cover, "-o", out, "--seed", 11) == 0
    text = (tmp_path / "m.payload.txt").read_text().strip()
    assert text == watermark.format_payload(watermark.random_payload(11))


def test_embed_accepts_payload_file(tmp_path, cover, capsys):
    bits = watermark.random_payload(77)
    payload = tmp_path / "bits.txt"
    payload.write_text(watermark.format_payload(bits) + "\n")
    out = tmp_path / "m.pgm"
    assert run("embed", cover, "-o", out, "--payload", payload) == 0
    capsys.readouterr()
    assert run("extract", out) == 0
    line = capsys.readouterr().out.splitlines()[0]
    assert line == watermark.format_payload(bits)


def test_features_writes_all_maps(tmp_path, cover):
    out_dir = tmp_path / "maps"
    out_dir.mkdir()
    assert run("features", cover, "--out-dir", out_dir) == 0
    for name in ("saliency", "intensity", "edge", "strength"):
        img = core.load_pgm(out_dir / f"{name}.pgm")
        assert img.shape == (64, 64)


def test_embed_honors_config(tmp_path, cover):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"embed": {"margin_floor": 80.0}}))
    out = tmp_path / "m.pgm"
    assert run("embed", cover, "-o", out, "--config", config, "--seed", 1) == 0
    # a weaker floor leaves a fainter mark than the default
    default_out = tmp_path / "d.pgm"
    assert run("embed", cover, "-o", default_out, "--seed", 1) == 0
    cam = core.load_pgm(cover)
    weak = float(np.abs(core.load_pgm(out) - cam).sum())
    strong = float(np.abs(core.load_pgm(default_out) - cam).sum())
    assert weak < strong


def _bench_config(tmp_path, cover, **extra):
    payload = {
        "bench": {
            "images": [str(cover)],
            "attacks": [
                {"name": "none"},
                {"name": "awgn", "params": {"sigma": 5}},
                {"name": "crop", "params": {"percent": 10, "mode": "center"}},
            ],
            "trials": 2,
            "seed": 9,
            **extra,
        }
    }
    path = tmp_path / "bench.json"
    path.write_text(json.dumps(payload))
    return path


def test_bench_report_layout(tmp_path, cover):
    config = _bench_config(tmp_path, cover)
    out = tmp_path / "report.csv"
    assert run("bench", "--config", config, "-o", out) == 0
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == list(cli.CSV_FIELDS)
    # three settings, two trials plus a mean row each
    assert len(rows) == 9
    by_attack = {}
    for row in rows:
        by_attack.setdefault((row["attack"], row["params"]), []).append(row)
    for group in by_attack.values():
        trials = [r for r in group if r["trial"] != "mean"]
        mean = [r for r in group if r["trial"] == "mean"]
        assert len(trials) == 2 and len(mean) == 1
        expected = np.mean([float(r["ber"]) for r in trials])
        assert float(mean[0]["ber"]) == pytest.approx(expected, abs=5e-4)
        assert mean[0]["seed"] == ""
    none_rows = by_attack[("none", "")]
    assert all(r["ber"] == "0.0000" for r in none_rows)
    assert all(r["psnr"] == "inf" for r in none_rows)


def test_bench_is_deterministic(tmp_path, cover):
    config = _bench_config(tmp_path, cover)
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run("bench", "--config", config, "-o", a) == 0
    assert run("bench", "--config", config, "-o", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_bench_seed_changes_stochastic_rows(tmp_path, cover):
    config = _bench_config(tmp_path, cover)
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run("bench", "--config", config, "-o", a, "--seed", 1) == 0
    assert run("bench", "--config", config, "-o", b, "--seed", 2) == 0
    assert a.read_bytes() != b.read_bytes()


def test_bench_records_row_errors(tmp_path, cover):
    payload = {
        "bench": {
            "images": [str(cover)],
            "attacks": [{"name": "crop", "params": {"percent": 150}}],
            "trials": 1,
        }
    }
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps(payload))
    out = tmp_path / "report.csv"
    assert run("bench", "--config", config, "-o", out) == 0
    rows = list(csv.DictReader(open(out, newline="")))
    assert len(rows) == 1  # failed trials leave no mean row
    assert "percent" in rows[0]["error"]
    assert rows[0]["nc"] == ""


def test_cli_exit_codes(tmp_path, cover):
    assert run("extract", tmp_path / "missing.pgm") == 3
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P6\n1 1\n255\n\x00")
    assert run("extract", bad) == 2
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"embed": {"mystery": 1}}))
    assert run("extract", cover, "--config", config) == 2
    config.write_text("{not json")
    assert run("extract", cover, "--config", config) == 2
    assert run("bench", "--trials", 1) == 2
    config.write_text(json.dumps({"bench": {"images": ["x.pgm"], "attacks": [{"name": "vortex"}]}}))
    assert run("bench", "--config", config) == 2


def test_cli_help_exits_cleanly(capsys):
    assert run("--help") == 0
    assert "embed" in capsys.readouterr().out
