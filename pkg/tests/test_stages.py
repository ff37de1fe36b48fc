"""Command stages driven through the orchestrator"""

import json

import numpy as np
import pandas as pd
import pytest

from ais import generate_targets
from config import resolve_run_config
from core.exceptions import ConfigError, DataError, PipelineError
from core.models import LabelImage, RunConfig
from orchestrator import Orchestrator
from raster_io import (
    load_label_image, load_prediction_stack, save_float_raster, save_label_image,
    save_prediction_stack,
)
from stages import AutoSegmenter, Evaluator
from ui.progress import SilentProgress
from tests.factories import disk_labels, separated_centers, square_labels, write_manifest


@pytest.fixture
def orchestrator() -> Orchestrator:
    return Orchestrator(progress=SilentProgress())


@pytest.fixture
def blob_dataset(tmp_path, rng):
    """Three blob images with gt labels and exact prediction stacks"""
    samples = []
    for i in range(3):
        gt = disk_labels(64, 64, separated_centers(rng, 64, 64, 3, 8), 8)
        gt_path = tmp_path / "gt" / f"img{i}.lbl"
        stack_path = tmp_path / "stacks" / f"img{i}.psf3"
        save_label_image(gt, gt_path)
        save_prediction_stack(generate_targets(gt), stack_path)
        samples.append({
            "sample_id": f"img{i}",
            "gt_labels_path": str(gt_path),
            "prediction_stack_path": str(stack_path),
        })
    return write_manifest(tmp_path / "manifest.json", samples, name="blobs")


def _config(command: str, **overrides) -> RunConfig:
    return resolve_run_config(command, {"jobs": 2, **overrides})


@pytest.mark.asyncio
async def test_targets_writes_stack(orchestrator, tmp_path):
    gt_path = tmp_path / "gt.lbl"
    save_label_image(square_labels(20, 30, [(2, 2, 10, 12), (15, 5, 25, 15)]), gt_path)
    out = tmp_path / "out" / "targets.psf3"
    result = await orchestrator.run(_config("targets", paths={"gt": str(gt_path), "out": str(out)}))

    stack, clamped = load_prediction_stack(out)
    assert stack.shape == (20, 30) and clamped == 0
    assert result.report.tables["targets"][0]["n_instances"] == 2
    assert (tmp_path / "out" / "run_config.json").exists()


@pytest.mark.asyncio
async def test_segment_manifest(orchestrator, blob_dataset, tmp_path):
    out = tmp_path / "seg"
    result = await orchestrator.run(_config("segment", paths={"manifest": str(blob_dataset), "out": str(out)}))

    rows = result.report.tables["segment"]
    assert [r["sample_id"] for r in rows] == ["img0", "img1", "img2"]
    assert all(r["msa"] >= 0.9 for r in rows)
    assert load_label_image(out / "img0.lbl").num_instances == 3
    (summary,) = result.report.tables["segment_summary"]
    assert summary["dataset"] == "blobs" and summary["n_images"] == 3

    table = pd.read_csv(out / "segment.csv")
    assert list(table["sample_id"]) == ["img0", "img1", "img2"]


@pytest.mark.asyncio
async def test_segment_reports_failed_sample(orchestrator, blob_dataset, tmp_path):
    manifest = json.loads(blob_dataset.read_text())
    manifest["samples"][1]["prediction_stack_path"] = str(tmp_path / "missing.psf3")
    blob_dataset.write_text(json.dumps(manifest))

    result = await orchestrator.run(
        _config("segment", paths={"manifest": str(blob_dataset), "out": str(tmp_path / "seg")})
    )
    assert len(result.failures) == 1 and result.failures[0].startswith("img1:")
    assert result.output.n_failures == 1
    assert result.report.tables["segment_summary"][0]["n_images"] == 2


@pytest.mark.asyncio
async def test_segment_single_stack(orchestrator, tmp_path):
    gt = disk_labels(48, 48, [(15, 15), (33, 32)], 8)
    stack_path = tmp_path / "one.psf3"
    save_prediction_stack(generate_targets(gt), stack_path)
    out = tmp_path / "labels" / "one.pgm"
    result = await orchestrator.run(_config(
        "segment", label_format="pgm", paths={"stack": str(stack_path), "out": str(out)},
    ))
    (row,) = result.report.tables["segment"]
    assert row["sample_id"] == "one" and row["n_instances"] == 2
    assert out.read_bytes().startswith(b"P5")


@pytest.mark.asyncio
async def test_evaluate_with_curve_as_json(orchestrator, blob_dataset, tmp_path):
    manifest = json.loads(blob_dataset.read_text())
    pred_dir = tmp_path / "pred"
    for sample in manifest["samples"]:
        save_label_image(load_label_image(sample["gt_labels_path"]), pred_dir / f"{sample['sample_id']}.lbl")

    out = tmp_path / "eval"
    result = await orchestrator.run(_config(
        "evaluate", curve=True, report_format="json",
        paths={"manifest": str(blob_dataset), "pred_dir": str(pred_dir), "out": str(out)},
    ))
    assert all(r["msa"] == 1.0 for r in result.report.tables["evaluate"])
    assert len(result.report.tables["evaluate_curve"]) == 3 * 10

    report = json.loads((out / "evaluate_report.json").read_text())
    assert report["config"]["command"] == "evaluate"
    assert report["tables"]["evaluate_summary"][0]["msa"] == 1.0
    assert report["failures"] == []


@pytest.mark.asyncio
async def test_evaluate_dimension_mismatch_is_a_sample_failure(orchestrator, tmp_path):
    gt_path = tmp_path / "a.lbl"
    save_label_image(square_labels(10, 10, [(2, 2, 6, 6)]), gt_path)
    save_label_image(square_labels(12, 10, [(2, 2, 6, 6)]), tmp_path / "pred" / "a.lbl")
    manifest = write_manifest(tmp_path / "m.json", [{"sample_id": "a", "gt_labels_path": str(gt_path)}])

    result = await orchestrator.run(_config(
        "evaluate", paths={"manifest": str(manifest), "pred_dir": str(tmp_path / "pred"), "out": str(tmp_path)},
    ))
    (row,) = result.report.tables["evaluate"]
    assert row["msa"] is None
    assert "Dimension mismatch" in row["error"]


@pytest.mark.asyncio
async def test_grid_search(orchestrator, blob_dataset, tmp_path):
    result = await orchestrator.run(_config(
        "grid-search", center_grid=[0.4, 0.6], boundary_grid=[0.5],
        paths={"manifest": str(blob_dataset), "out": str(tmp_path / "grid")},
    ))
    rows = result.report.tables["grid_search"]
    assert len(rows) == 2
    assert sum(r["is_best"] for r in rows) == 1
    assert result.report.console_table.startswith("Best cell of 2:")


@pytest.mark.asyncio
async def test_amg_with_oracle(orchestrator, tmp_path):
    gt = square_labels(64, 64, [(4, 4, 24, 24), (36, 8, 60, 28), (10, 40, 30, 60)])
    gt_path = tmp_path / "gt.lbl"
    save_label_image(gt, gt_path)
    out = tmp_path / "amg" / "masks.lbl"
    result = await orchestrator.run(_config(
        "amg", amg={"points_per_side": 16}, paths={"gt": str(gt_path), "out": str(out)},
    ))
    (row,) = result.report.tables["amg"]
    assert row["predictor"] == "oracle"
    assert row["n_instances"] == 3
    assert row["msa"] == 1.0
    assert load_label_image(out).num_instances == 3


@pytest.mark.asyncio
async def test_interactive_regiongrow_report(orchestrator, two_lobe, tmp_path):
    guidance, gt = two_lobe
    save_label_image(gt, tmp_path / "lobes.lbl")
    save_float_raster(guidance, tmp_path / "lobes.psf3")
    manifest = write_manifest(tmp_path / "m.json", [{
        "sample_id": "lobes", "gt_labels_path": "lobes.lbl", "guidance_path": "lobes.psf3",
    }], name="fixture")

    out = tmp_path / "interactive"
    result = await orchestrator.run(_config(
        "interactive", predictor={"name": "regiongrow"},
        paths={"manifest": str(manifest), "out": str(out)},
    ))
    (row,) = pd.read_csv(out / "interactive.csv").to_dict("records")
    assert (row["point"], row["box"], row["I_P"], row["I_B"]) == (0.75, 0.25, 1.0, 1.0)
    assert row["iter_1"] == 1.0 and row["box_iter_7"] == 1.0

    details = json.loads((out / "interactive_details.json").read_text())
    (sample,) = details["traces"]
    assert [len(t["steps"]) for t in sample["traces"]] == [2, 2]


@pytest.mark.asyncio
async def test_wsi_full_raster(orchestrator, rng, tmp_path):
    gt = disk_labels(256, 256, separated_centers(rng, 256, 256, 8, 9), 9)
    stack_path = tmp_path / "slide.psf3"
    save_prediction_stack(generate_targets(gt), stack_path)
    out = tmp_path / "wsi" / "slide.lbl"
    result = await orchestrator.run(_config(
        "wsi", wsi={"tile": 128, "halo": 32}, paths={"stack": str(stack_path), "out": str(out)},
    ))
    assert load_label_image(out).num_instances == 8
    resources = json.loads((tmp_path / "wsi" / "resource_report.json").read_text())
    assert resources["n_tiles"] == 4
    stages = [r["stage"] for r in result.report.tables["resource_report"]]
    assert stages == ["load", "segment", "stitch", "write"]


@pytest.mark.asyncio
async def test_semantic_eval(orchestrator, tmp_path):
    classes = np.zeros((10, 10), dtype=np.uint32)
    classes[:5, :5] = 1
    classes[5:, 5:] = 2
    save_label_image(LabelImage(classes), tmp_path / "gt_sem.lbl")
    save_label_image(LabelImage(classes), tmp_path / "pred" / "s.lbl")
    manifest = write_manifest(tmp_path / "m.json", [{
        "sample_id": "s", "gt_labels_path": "gt_sem.lbl", "semantic_gt_path": "gt_sem.lbl",
    }])
    result = await orchestrator.run(_config(
        "semantic-eval", num_classes=2,
        paths={"manifest": str(manifest), "pred_dir": str(tmp_path / "pred"), "out": str(tmp_path / "sem")},
    ))
    (row,) = result.report.tables["semantic"]
    assert row["weighted_dice"] == 1.0
    assert (row["freq_class_0"], row["freq_class_1"], row["freq_class_2"]) == (0.5, 0.25, 0.25)


@pytest.mark.asyncio
async def test_semantic_eval_needs_num_classes(orchestrator, tmp_path):
    with pytest.raises(ConfigError):
        await orchestrator.run(_config("semantic-eval", paths={"out": str(tmp_path)}))


@pytest.mark.asyncio
async def test_missing_manifest_option(orchestrator, tmp_path):
    with pytest.raises(ConfigError):
        await orchestrator.run(_config("evaluate", paths={"out": str(tmp_path)}))


@pytest.mark.asyncio
async def test_empty_manifest(orchestrator, tmp_path):
    manifest = write_manifest(tmp_path / "m.json", [])
    with pytest.raises(DataError):
        await orchestrator.run(_config("segment", paths={"manifest": str(manifest), "out": str(tmp_path)}))


@pytest.mark.asyncio
async def test_unknown_command(orchestrator):
    with pytest.raises(PipelineError):
        await orchestrator.run(RunConfig(command="nope"))


def test_stages_only_accept_their_command():
    config = RunConfig(command="segment")
    assert AutoSegmenter().validate_input(config)
    assert not Evaluator().validate_input(config)
    assert not Evaluator().validate_input({"command": "evaluate"})


def test_orchestrator_knows_every_command(orchestrator):
    assert sorted(orchestrator.commands) == sorted([
        "targets", "segment", "grid-search", "evaluate", "amg", "interactive", "wsi", "semantic-eval",
    ])
