import json

import numpy as np
import pytest

from lrfcm import cli
from lrfcm.errors import DivergenceError, StageError
from lrfcm.image import read_image, write_image
from lrfcm.metrics import entropy_information, segmentation_accuracy
from lrfcm.synth import generate_four_level, impulse_count


def run(argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def synthetic(tmp_path):
    d = tmp_path / "gen"
    assert run(["generate", d, "--height", 64, "--width", 64, "--std", 20, "--density", 0.1, "--seed", 3]) == 0
    return d


def test_generate_outputs(synthetic, tmp_path):
    assert sorted(p.name for p in synthetic.iterdir()) == ["clean.pgm", "noisy.pgm", "truth.pgm"]
    clean, truth = read_image(synthetic / "clean.pgm"), read_image(synthetic / "truth.pgm")
    np.testing.assert_array_equal(clean, generate_four_level((64, 64))[0])
    np.testing.assert_array_equal(truth, clean)
    noisy = read_image(synthetic / "noisy.pgm")
    assert np.count_nonzero(noisy != clean) >= impulse_count(0.1, 64 * 64)
    again = tmp_path / "again"
    run(["generate", again, "--height", 64, "--width", 64, "--std", 20, "--density", 0.1, "--seed", 3])
    for name in ("clean.pgm", "noisy.pgm", "truth.pgm"):
        assert (again / name).read_bytes() == (synthetic / name).read_bytes()


def test_generate_impulse_count_exact(tmp_path):
    run(["generate", tmp_path, "--height", 64, "--width", 64, "--noise", "impulse", "--density", 0.3])
    diff = read_image(tmp_path / "noisy.pgm") != read_image(tmp_path / "clean.pgm")
    # pixels already at 0 or 255 may be redrawn to the same value
    assert diff.sum() <= impulse_count(0.3, 64 * 64)
    assert diff.sum() >= impulse_count(0.3, 64 * 64) // 2


def test_generate_noise_free(tmp_path):
    run(["generate", tmp_path, "--height", 64, "--width", 64, "--std", 0, "--density", 0])
    assert (tmp_path / "noisy.pgm").read_bytes() == (tmp_path / "clean.pgm").read_bytes()


def test_segment_writes_everything(synthetic, tmp_path):
    out = tmp_path / "seg.pgm"
    args = ["segment", synthetic / "noisy.pgm", "-o", out, "--labels", tmp_path / "lab.pgm"]
    args += ["--report", tmp_path / "r.json", "--trace", tmp_path / "t.csv", "--truth", synthetic / "truth.pgm"]
    assert run(args) == 0
    report = json.loads((tmp_path / "r.json").read_text())
    assert report["iterations"] >= 1
    assert report["metrics"]["sa_percent"] > 95.0
    assert report["outputs"]["labels"] == str(tmp_path / "lab.pgm")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "iteration,objective,delta_u,nonzero_residuals"
    assert len(lines) == report["iterations"] + 1
    assert set(np.unique(read_image(tmp_path / "lab.pgm"))) <= {0.0, 85.0, 170.0, 255.0}


def test_segment_config_file_and_override(synthetic, tmp_path):
    cfgp = tmp_path / "cfg.json"
    cfgp.write_text(json.dumps({"clusters": 3, "max_iter": 4, "enable_l0": True}))
    args = ["segment", synthetic / "clean.pgm", "-o", tmp_path / "s.pgm", "--report", tmp_path / "r.json"]
    assert run(args + ["--config", cfgp, "--clusters", 2, "--no-l0"]) == 0
    cfg = json.loads((tmp_path / "r.json").read_text())["config"]
    assert cfg["clusters"] == 2 and cfg["max_iter"] == 4 and cfg["enable_l0"] is False


def test_segment_deterministic(synthetic, tmp_path):
    for tag in ("a", "b"):
        run(["segment", synthetic / "noisy.pgm", "-o", tmp_path / f"{tag}.pgm", "--labels", tmp_path / f"{tag}_l.pgm"])
    assert (tmp_path / "a.pgm").read_bytes() == (tmp_path / "b.pgm").read_bytes()
    assert (tmp_path / "a_l.pgm").read_bytes() == (tmp_path / "b_l.pgm").read_bytes()


def test_exit_codes(tmp_path, capsys):
    assert run(["segment", tmp_path / "missing.pgm", "-o", tmp_path / "o.pgm"]) == 1
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P5\n2 x\n")
    assert run(["segment", bad, "-o", tmp_path / "o.pgm"]) == 3
    good = tmp_path / "g.pgm"
    write_image(np.zeros((8, 8)), good)
    assert run(["segment", good, "-o", tmp_path / "o.pgm", "--se-size", 4]) == 2
    with pytest.raises(SystemExit) as ei:
        run(["segment", good])
    assert ei.value.code == 2
    assert "error" in capsys.readouterr().err


def test_divergence_exit_code(tmp_path, monkeypatch):
    def boom(img, cfg):
        raise StageError("clustering", DivergenceError(3, float("nan")))

    monkeypatch.setattr(cli, "run_pipeline", boom)
    good = tmp_path / "g.pgm"
    write_image(np.zeros((8, 8)), good)
    assert run(["segment", good, "-o", tmp_path / "o.pgm"]) == 4


def test_partial_outputs_removed(synthetic, tmp_path):
    wrong = tmp_path / "wrong.pgm"
    write_image(np.ones((10, 10)), wrong)
    out, lab = tmp_path / "seg.pgm", tmp_path / "lab.pgm"
    code = run(["segment", synthetic / "clean.pgm", "-o", out, "--labels", lab, "--truth", wrong])
    assert code == 2
    assert not out.exists() and not lab.exists()


def test_evaluate(tmp_path, capsys):
    truth = tmp_path / "t.pgm"
    write_image(np.array([[0.0, 255.0], [255.0, 255.0]]), truth)
    assert run(["evaluate", "--pred", truth, "--truth", truth]) == 0
    assert json.loads(capsys.readouterr().out)["sa_percent"] == 100.0

    flat = tmp_path / "flat.pgm"
    write_image(np.full((2, 2), 7.0), flat)
    run(["evaluate", "--pred", flat, "--seg", flat])
    assert json.loads(capsys.readouterr().out)["ei"] == 0.0

    pred, seg = tmp_path / "p.pgm", tmp_path / "s.pgm"
    write_image(np.array([[1.0, 1.0], [2.0, 2.0]]), pred)
    write_image(np.array([[0.0, 0.0], [10.0, 10.0]]), seg)
    run(["evaluate", "--pred", pred, "--truth", truth, "--seg", seg])
    rep = json.loads(capsys.readouterr().out)
    p = np.array([[1, 1], [2, 2]])
    assert rep["sa_percent"] == segmentation_accuracy(p, np.array([[0, 255], [255, 255]]))[0] == 75.0
    assert rep["ei"] == entropy_information(np.array([[0.0, 0.0], [10.0, 10.0]]), p)[2]


def test_evaluate_dimension_mismatch(tmp_path):
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    write_image(np.zeros((2, 2)), a)
    write_image(np.zeros((3, 3)), b)
    assert run(["evaluate", "--pred", a, "--truth", b]) == 2


def test_decompose(tmp_path, capsys):
    src = tmp_path / "in.pgm"
    write_image(np.random.default_rng(0).integers(0, 256, (12, 10)).astype(float), src)
    out = tmp_path / "ch"
    assert run(["decompose", src, out]) == 0
    assert len(list(out.iterdir())) == 9
    err = float(capsys.readouterr().out.split(":")[1])
    assert err <= 1e-10

    flat = tmp_path / "flat.pgm"
    write_image(np.full((6, 6), 50.0), flat)
    run(["decompose", flat, tmp_path / "flat"])
    assert float(capsys.readouterr().out.split(":")[1]) <= 1e-10
    for k in range(1, 9):
        p, q = divmod(k, 3)
        assert np.ptp(read_image(tmp_path / "flat" / f"channel_k{p}{q}.pgm")) == 0


def test_ablate_cli(tmp_path, capsys):
    code = run(["ablate", "--height", 64, "--width", 64, "--std", 0, "--density", 0, "--json", tmp_path / "a.json"])
    assert code == 0
    table = capsys.readouterr().out.splitlines()
    assert len(table) == 11
    rows = json.loads((tmp_path / "a.json").read_text())
    assert [r["sa_percent"] for r in rows] == [100.0] * 10


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "lrfcm", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "segment" in out.stdout
