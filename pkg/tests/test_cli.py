import json
import subprocess
import sys

import pytest

from boxensemble import parse_predictions_csv
from boxensemble.cli import main, parse_thresholds

PRED_HEADER = "patientId,PredictionString\n"
GT_HEADER = "patientId,x,y,width,height,Target\n"


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


def test_parse_thresholds():
    assert parse_thresholds("0.40:0.75:0.05") == (0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75)
    assert parse_thresholds("0.5:0.5:0.1") == (0.5,)
    for bad in ("0.4:0.75", "0.75:0.4:0.05", "0.4:0.75:0", "0.4:0.77:0.05", "0:0.5:0.1", "a:b:c"):
        with pytest.raises(Exception):
            parse_thresholds(bad)


def test_score_summary(files, capsys):
    gt = files("gt.csv", GT_HEADER + "a,0,0,10,10,1\nb,0,0,20,10,1\nc,,,,,0\n")
    perfect = files("p.csv", PRED_HEADER + "a,0.9 0 0 10 10\nb,0.9 0 0 20 10\n")
    assert main(["score", "--predictions", perfect, "--ground-truth", gt]) == 0
    assert "1.0000" in capsys.readouterr().out

    empty = files("e.csv", PRED_HEADER)
    assert main(["score", "--predictions", empty, "--ground-truth", gt]) == 0
    assert "0.0000" in capsys.readouterr().out

    half = files("h.csv", PRED_HEADER + "b,0.9 0 0 10 10\n")
    gt_b = files("gtb.csv", GT_HEADER + "b,0,0,20,10,1\n")
    assert main(["score", "--predictions", half, "--ground-truth", gt_b]) == 0
    assert "0.3750" in capsys.readouterr().out


def test_score_formats_and_output_file(files, tmp_path, capsys):
    gt = files("gt.csv", GT_HEADER + "a,0,0,10,10,1\n")
    pred = files("p.csv", PRED_HEADER + "a,0.9 0 0 10 10\n")
    out = tmp_path / "r.jsonl"
    assert main(["score", "--predictions", pred, "--ground-truth", gt, "--format", "json",
                 "--output", str(out)]) == 0
    assert json.loads(out.read_text())["c_i"] == 1.0
    assert main(["score", "--predictions", pred, "--ground-truth", gt, "--format", "csv",
                 "--thresholds", "0.5:0.6:0.1"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 3


def test_score_errors(files, capsys):
    gt = files("gt.csv", GT_HEADER + "a,,,,,0\n")
    pred = files("p.csv", PRED_HEADER + "a,\n")
    assert main(["score", "--predictions", pred, "--ground-truth", gt]) == 1
    assert "no image" in capsys.readouterr().err
    bad = files("bad.csv", PRED_HEADER + "a,0.9 1 2 3\n")
    assert main(["score", "--predictions", bad, "--ground-truth", gt]) == 1
    assert "line 2" in capsys.readouterr().err
    assert main(["score", "--predictions", "/nonexistent.csv", "--ground-truth", gt]) == 1


def test_ensemble_command(files, tmp_path, capsys):
    rows = "x,0.9 10 10 100 120 0.55 400 400 50 50 0.3 700 100 40 40\ny,1 5 5 20 20\n"
    inputs = [files(f"m{i}.csv", PRED_HEADER + rows) for i in range(4)]
    out = tmp_path / "out.csv"
    args = ["ensemble", "--output", str(out)]
    for p in inputs:
        args += ["--input", p]
    assert main(args) == 0
    stdout = capsys.readouterr().out
    assert "clusters formed: 3" in stdout and "survivors: 3" in stdout
    assert out.read_text() == PRED_HEADER + "x,0.9 10 10 100 120 0.55 400 400 50 50\ny,1 5 5 20 20\n"

    assert main(["ensemble", "--input", inputs[0], "--output", str(out)]) == 0
    # only the input box scored 1.0 survives, carrying 1.0 / n_scale
    fused = parse_predictions_csv(out.read_bytes())
    assert [(img, d.box.as_tuple(), d.score) for img, v in fused.entries.items() for d in v] == [
        ("y", (5, 5, 25, 25), 0.25)
    ]


def test_ensemble_rejects_bad_flags_and_duplicates(files, tmp_path, capsys):
    p = files("m.csv", PRED_HEADER + "x,\n")
    with pytest.raises(SystemExit) as info:
        main(["ensemble", "--input", p, "--output", str(tmp_path / "o.csv"), "--alpha", "x"])
    assert info.value.code != 0
    assert "usage" in capsys.readouterr().err
    assert main(["ensemble", "--input", p, "--input", p, "--output", str(tmp_path / "o.csv")]) == 1
    assert "appears more than once" in capsys.readouterr().err
    assert main(["ensemble", "--input", p, "--output", str(tmp_path / "o.csv"),
                 "--cluster-iou", "1.5"]) == 1


def test_compare_identical_models(files, capsys):
    gt = files("gt.csv", GT_HEADER + "x,10,10,100,120,1\ny,0,0,30,30,1\nz,,,,,0\n")
    rows = "x,0.9 12 10 100 118\ny,0.7 50 50 30 30\nz,0.8 1 1 5 5\n"
    inputs = [files(f"m{i}.csv", PRED_HEADER + rows) for i in range(4)]
    argv = ["compare", "--ground-truth", gt, "--json"]
    for p in inputs:
        argv += ["--input", p]
    assert main(argv) == 0
    r = json.loads(capsys.readouterr().out)
    assert r["model_average"] == r["ensemble_score"]
    assert len(r["per_model_scores"]) == 4

    assert main(["compare", "--ground-truth", gt, "--input", inputs[0]]) == 0
    table = capsys.readouterr().out
    assert "Model Average" in table and "Ensemble" in table


def test_generate_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["generate", "--images", "30", "--models", "2", "--seed", "4",
                     "--jitter", "6", "--output-dir", str(d)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == ["ground_truth.csv", "model_0.csv", "model_1.csv"]
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_generate_noiseless_scores_one(tmp_path, capsys):
    d = tmp_path / "g"
    assert main(["generate", "--images", "40", "--models", "2", "--seed", "1", "--jitter", "0",
                 "--drop-rate", "0", "--spurious-rate", "0", "--output-dir", str(d)]) == 0
    for m in ("model_0.csv", "model_1.csv"):
        capsys.readouterr()
        assert main(["score", "--predictions", str(d / m), "--ground-truth",
                     str(d / "ground_truth.csv")]) == 0
        assert "1.0000" in capsys.readouterr().out
    assert main(["generate", "--images", "-3", "--output-dir", str(d)]) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "boxensemble", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "score" in proc.stdout
