import csv
import json

import numpy as np
import pytest

from lipevent import io
from lipevent.cli import main
from lipevent.errors import FormatError
from lipevent.geometry import LandmarkSequence
from lipevent.synth import SynthConfig, generate


@pytest.fixture
def sample():
    return generate(SynthConfig(frame_count=120, open_start=30, close_end=90, noise_sigma=0.1, seed=4))


def test_csv_roundtrip_is_exact(tmp_path, sample):
    path = tmp_path / "s.csv"
    io.write_csv(sample.sequence, path)
    back = io.read_csv(path)
    assert np.array_equal(back.points, sample.sequence.points)
    assert path.read_text().splitlines()[0] == "frame,landmark,x,y,z"


def test_json_roundtrip(tmp_path, sample):
    path = tmp_path / "s.json"
    io.write_json(sample.sequence.with_points(sample.sequence.points), path)
    back = io.read_sequence(path)
    assert np.array_equal(back.points, sample.sequence.points)
    assert back.frame_rate == 250.0


def test_ragged_csv_names_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("frame,landmark,x,y,z\n0,0,1,0,0\n0,1,-1,0,0\n1,0,1,0,0\n2,0,1,0,0\n")
    with pytest.raises(FormatError, match="row 5"):
        io.read_csv(path)
    path.write_text("frame,landmark,x,y,z\n0,0,1,0,0\n0,1,-1,0\n")
    with pytest.raises(FormatError, match="row 3"):
        io.read_csv(path)
    path.write_text("f,l,x,y,z\n")
    with pytest.raises(FormatError, match="header"):
        io.read_csv(path)
    with pytest.raises(FormatError):
        io.read_sequence(tmp_path / "x.txt")


def test_ragged_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"frame_rate": 250, "frames": [[[1, 0, 0], [-1, 0, 0]], [[1, 0, 0]]]}))
    with pytest.raises(FormatError, match="frame 1"):
        io.read_json(path)


def test_truth_and_result_files(tmp_path, sample):
    io.write_truth(sample.truth, tmp_path / "a.truth.json")
    assert io.read_truth(tmp_path / "a.truth.json").to_dict() == sample.truth.to_dict()
    assert io.sequence_id(tmp_path / "a.truth.json") == "a"
    assert io.sequence_id("dir/b.result.json") == "b"
    (tmp_path / "r.result.json").write_text("{}")
    with pytest.raises(FormatError):
        io.read_result(tmp_path / "r.result.json")


def test_lexicographic_listing(tmp_path, sample):
    for name in ["b", "a10", "a2"]:
        io.write_csv(sample.sequence, tmp_path / f"{name}.csv")
    io.write_truth(sample.truth, tmp_path / "a2.truth.json")
    assert [p.name for p in io.list_sequences([tmp_path])] == ["a10.csv", "a2.csv", "b.csv"]


def run(*argv):
    return main([str(a) for a in argv])


def test_static_fixture_gives_null_events(tmp_path):
    shape = generate(SynthConfig()).sequence.points[0]
    io.write_csv(LandmarkSequence(np.repeat(shape[None], 100, axis=0)), tmp_path / "still.csv")
    assert run("detect", tmp_path / "still.csv", "--out", tmp_path / "out") == 0
    result = json.loads((tmp_path / "out" / "still.result.json").read_text())
    assert result["opening_frame"] is None and result["closing_frame"] is None
    assert set(result["states"]) == {"static"}
    summary = (tmp_path / "out" / "summary.csv").read_text().splitlines()
    assert summary == ["sequence,opening,closing,open_res,close_res", "still,,,,"]


def test_synth_detect_evaluate_pipeline(tmp_path, capsys):
    data, res, ev = tmp_path / "data", tmp_path / "res", tmp_path / "ev"
    assert run("synth", "--count", 5, "--seed", 3, "--out", data) == 0
    assert sorted(p.name for p in data.glob("*.csv")) == [f"seq_00{i}.csv" for i in range(5)]
    assert run("detect", data, "--out", res) == 0
    assert run("evaluate", res, data, "--out", ev) == 0
    report = json.loads((ev / "report.json").read_text())
    assert report["e_rr"] == 1.0 and report["tolerance"] == 40
    curve = list(csv.reader((ev / "recall_curve.csv").read_text().splitlines()))
    assert curve[0] == ["tolerance", "e_rr"]
    values = [float(v) for _, v in curve[1:]]
    assert values == sorted(values) and len(values) == 21
    manifest = json.loads((res / "manifest.json").read_text())
    assert manifest["command"] == "detect" and manifest["detection_config"]["resolution_ladder"] == [30, 15, 7, 3, 1]
    assert "E-RR 1.0" in capsys.readouterr().out


def test_detect_is_byte_identical_on_rerun(tmp_path):
    run("synth", "--count", 3, "--seed", 9, "--noise", "0.3", "--out", tmp_path / "d")
    run("detect", tmp_path / "d", "--out", tmp_path / "r1")
    run("detect", tmp_path / "d", "--out", tmp_path / "r2", "--jobs", 2)
    for f in sorted((tmp_path / "r1").glob("*.result.json")) + [tmp_path / "r1" / "summary.csv"]:
        assert f.read_bytes() == (tmp_path / "r2" / f.name).read_bytes()


def test_states_output(tmp_path, capsys):
    run("synth", "--frames", 60, "--open-start", 10, "--close-end", 50, "--out", tmp_path)
    capsys.readouterr()
    assert run("states", tmp_path / "seq_000.csv", "--smooth", 1) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "frame,div_total,div_left,div_right,state"
    assert len(lines) == 61
    rows = list(csv.DictReader(lines))
    assert rows[0]["state"] == "static"
    # raised-cosine steps 0.48, 1.25, 1.55, 1.25, 0.48 mm: only the middle three clear eps_silence
    assert [r["state"] for r in rows[11:16]] == ["static"] + ["opening"] * 3 + ["static"]
    assert run("states", tmp_path / "seq_000.csv", "--out", tmp_path / "st") == 0
    assert (tmp_path / "st" / "seq_000.states.csv").exists()


def test_detnum_output(tmp_path, capsys):
    assert run("detnum", "--gt-range", "1:5", "--ladders", "30-15-7-3-1,1") == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "gt0,ladder,detnum" and len(lines) == 11
    assert lines[-1] == "5,1,5"
    assert run("detnum", "--out", tmp_path) == 0
    assert len((tmp_path / "detnum.csv").read_text().splitlines()) == 1 + 300 * 5


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("frame,landmark,x,y,z\n0,0,a,b,c\n")
    assert run("detect", bad, "--out", tmp_path / "o") == 1
    assert "row 2" in capsys.readouterr().err
    assert run("detect", tmp_path / "missing.csv", "--out", tmp_path / "o") == 1
    assert run("detnum", "--ladders", "30-15-2") == 2
    assert run("synth", "--landmarks", 3, "--out", tmp_path / "s") == 2
    cfg = tmp_path / "c.cfg"
    cfg.write_text("eps_silence = -1\n")
    assert run("states", bad, "--config", cfg) == 2
    with pytest.raises(SystemExit):
        run("detect")
