import json

import numpy as np
import pandas as pd
import pytest

from ais import generate_targets
from main import build_overrides, main
from raster_io import load_label_image, save_float_raster, save_label_image, save_prediction_stack
from tests.factories import disk_labels, square_labels, write_manifest


@pytest.fixture
def square_dataset(tmp_path):
    gt = square_labels(24, 24, [(2, 2, 10, 10), (12, 12, 22, 20)])
    save_label_image(gt, tmp_path / "gt" / "a.lbl")
    save_label_image(gt, tmp_path / "pred" / "a.lbl")
    return write_manifest(tmp_path / "manifest.json", [{"sample_id": "a", "gt_labels_path": "gt/a.lbl"}])


def test_build_overrides_nests_flags():
    overrides = build_overrides({
        "center_threshold": 0.4, "sigma": None, "tile": 256, "jobs": 2, "verbose": True,
    })
    assert overrides == {"ais": {"center_threshold": 0.4}, "wsi": {"tile": 256}, "jobs": 2}


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    out = capsys.readouterr().out
    for command in ("segment", "grid-search", "evaluate", "amg", "interactive", "wsi", "semantic-eval"):
        assert command in out


def test_threshold_above_one_is_a_config_error(square_dataset, tmp_path, capsys):
    code = main([
        "evaluate", "--manifest", str(square_dataset), "--pred", str(tmp_path / "pred"),
        "--out", str(tmp_path / "out"), "--thresholds", "0.5,1.2",
    ])
    assert code == 1
    assert "1.2" in capsys.readouterr().err


def test_unknown_predictor_lists_valid_names(tmp_path, capsys):
    code = main(["amg", "--predictor", "sam", "--out", str(tmp_path / "x.lbl")])
    assert code == 1
    assert "file, oracle, regiongrow" in capsys.readouterr().err


def test_bad_value_list_and_unknown_flag(tmp_path):
    assert main(["evaluate", "--thresholds", "a,b"]) == 1
    assert main(["segment", "--colour", "blue"]) == 1


def test_missing_manifest_file(tmp_path):
    code = main([
        "evaluate", "--manifest", str(tmp_path / "missing.json"),
        "--pred", str(tmp_path), "--out", str(tmp_path / "out"),
    ])
    assert code == 2


def test_corrupt_stack_exits_two(tmp_path):
    stack = tmp_path / "bad.psf3"
    stack.write_bytes(b"NOPE" + bytes(32))
    assert main(["segment", "--stack", str(stack), "--out", str(tmp_path / "out.lbl")]) == 2


def test_evaluate_writes_csv(square_dataset, tmp_path, capsys):
    out = tmp_path / "out"
    code = main([
        "evaluate", "--manifest", str(square_dataset), "--pred", str(tmp_path / "pred"),
        "--out", str(out), "--curve", "--jobs", "1",
    ])
    assert code == 0
    rows = pd.read_csv(out / "evaluate.csv")
    assert rows.loc[0, "msa"] == 1.0 and rows.loc[0, "n_gt"] == 2
    assert len(pd.read_csv(out / "evaluate_curve.csv")) == 10
    config = json.loads((out / "run_config.json").read_text())
    assert config["curve"] is True
    assert str(out / "evaluate.csv") in capsys.readouterr().out


def test_dimension_mismatch_is_a_partial_failure(square_dataset, tmp_path, capsys):
    save_label_image(square_labels(30, 24, [(2, 2, 10, 10)]), tmp_path / "pred" / "a.lbl")
    code = main([
        "evaluate", "--manifest", str(square_dataset), "--pred", str(tmp_path / "pred"),
        "--out", str(tmp_path / "out"),
    ])
    assert code == 3
    assert "Dimension mismatch" in capsys.readouterr().err
    row = pd.read_csv(tmp_path / "out" / "evaluate.csv").iloc[0]
    assert pd.isna(row["msa"])


def test_config_file_round_trip(square_dataset, tmp_path):
    first = tmp_path / "first"
    assert main([
        "evaluate", "--manifest", str(square_dataset), "--pred", str(tmp_path / "pred"),
        "--out", str(first), "--thresholds", "0.5:0.9:0.2",
    ]) == 0
    second = tmp_path / "second"
    assert main(["evaluate", "--config", str(first / "run_config.json"), "--out", str(second)]) == 0
    config = json.loads((second / "run_config.json").read_text())
    assert config["thresholds"] == [0.5, 0.7, 0.9]
    assert config["paths"]["out"] == str(second)


def test_segment_single_stack(tmp_path, capsys):
    gt = disk_labels(48, 48, [(14, 14), (32, 33)], 8)
    save_prediction_stack(generate_targets(gt), tmp_path / "s.psf3")
    save_label_image(gt, tmp_path / "s_gt.lbl")
    out = tmp_path / "labels" / "s.lbl"
    code = main([
        "segment", "--stack", str(tmp_path / "s.psf3"), "--gt", str(tmp_path / "s_gt.lbl"),
        "--out", str(out), "--center-threshold", "0.5", "--min-size", "10",
    ])
    assert code == 0
    assert load_label_image(out).num_instances == 2
    assert pd.read_csv(tmp_path / "labels" / "segment.csv").loc[0, "msa"] >= 0.9


def test_interactive_golden_row(two_lobe, tmp_path):
    guidance, gt = two_lobe
    save_label_image(gt, tmp_path / "lobes.lbl")
    save_float_raster(guidance, tmp_path / "lobes.psf3")
    manifest = write_manifest(tmp_path / "m.json", [{
        "sample_id": "lobes", "gt_labels_path": "lobes.lbl", "guidance_path": "lobes.psf3",
    }], name="fixture")

    out = tmp_path / "out"
    code = main([
        "interactive", "--manifest", str(manifest), "--out", str(out),
        "--predictor", "RegionGrow", "--region-grow-threshold", "0.1",
    ])
    assert code == 0
    (row,) = pd.read_csv(out / "interactive.csv").to_dict("records")
    expected = {"dataset": "fixture", "n_objects": 1, "point": 0.75, "box": 0.25, "I_P": 1.0, "I_B": 1.0}
    expected.update({f"iter_{k}": 0.75 if k == 0 else 1.0 for k in range(8)})
    expected.update({f"box_iter_{k}": 0.25 if k == 0 else 1.0 for k in range(8)})
    assert row == expected


def test_interactive_point_only(tmp_path):
    gt = disk_labels(40, 40, [(12, 12), (28, 27)], 6)
    save_label_image(gt, tmp_path / "d.lbl")
    manifest = write_manifest(tmp_path / "m.json", [{"sample_id": "d", "gt_labels_path": "d.lbl"}])
    out = tmp_path / "out"
    assert main([
        "interactive", "--manifest", str(manifest), "--out", str(out),
        "--start", "point", "--iterations", "3", "--format", "json",
    ]) == 0
    report = json.loads((out / "interactive_report.json").read_text())
    (row,) = report["tables"]["interactive"]
    assert row["point"] == 1.0 and row["box"] is None
    assert [k for k in row if k.startswith("iter_")] == ["iter_0", "iter_1", "iter_2", "iter_3"]


def test_wsi_requires_an_output(tmp_path):
    gt = disk_labels(32, 32, [(16, 16)], 6)
    save_prediction_stack(generate_targets(gt), tmp_path / "s.psf3")
    assert main(["wsi", "--stack", str(tmp_path / "s.psf3")]) == 1


def test_wsi_tiled_output(tmp_path):
    gt = disk_labels(200, 200, [(50, 50), (100, 100), (150, 60)], 8)
    save_prediction_stack(generate_targets(gt), tmp_path / "s.psf3")
    tiles = tmp_path / "tiles"
    assert main([
        "wsi", "--stack", str(tmp_path / "s.psf3"), "--tiled-output", str(tiles),
        "--tile", "100", "--halo", "20",
    ]) == 0
    table = json.loads((tiles / "stitch_table.json").read_text())
    assert table["n_instances"] == 3
    assert len(table["tiles"]) == 4
    assert (tiles / "resource_report.csv").exists()


def test_amg_file_predictor_uses_confidence_map(tmp_path):
    proposals = square_labels(24, 24, [(2, 2, 10, 10), (12, 12, 22, 20)])
    save_label_image(proposals, tmp_path / "proposals.lbl")
    confidence = np.where(proposals.labels == 1, 0.9, np.where(proposals.labels == 2, 0.1, 0.0))
    save_float_raster(confidence, tmp_path / "confidence.psf3")
    args = [
        "amg", "--predictor", "file", "--proposals", str(tmp_path / "proposals.lbl"),
        "--guidance", str(tmp_path / "confidence.psf3"), "--points-per-side", "8",
    ]

    assert main(args + ["--out", str(tmp_path / "strict.lbl")]) == 0
    strict = load_label_image(tmp_path / "strict.lbl")
    assert strict.num_instances == 1
    assert strict.labels[5, 5] == 1
    assert not strict.labels[15, 15]

    assert main(args + ["--confidence-min", "0.05", "--out", str(tmp_path / "loose.lbl")]) == 0
    assert load_label_image(tmp_path / "loose.lbl").num_instances == 2


def test_undecodable_manifest_is_a_data_error(tmp_path, capsys):
    manifest = tmp_path / "manifest.json"
    manifest.write_bytes(b'{"samples": "\xff\xfe"}')
    code = main(["evaluate", "--manifest", str(manifest), "--pred", str(tmp_path), "--out", str(tmp_path / "out")])
    assert code == 2
    err = capsys.readouterr().err
    assert "not UTF-8" in err
    assert "StageError" not in err and "UnicodeDecodeError" not in err
