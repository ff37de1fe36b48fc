"""Stage 1: Automatic instance segmentation"""

import logging
from pathlib import Path
from typing import Optional

from ais.segmenter import instance_segmentation
from core.exceptions import DataError
from core.models import CommandReport, LabelImage, ManifestSample, RunConfig
from metrics.instance import mean_segmentation_accuracy
from raster_io.receiver import label_path, load_label_image, save_label_image
from raster_io.stacks import load_prediction_stack
from stages.base import SAMPLE_ERRORS, CommandStage
from utils.parallel import map_ordered

logger = logging.getLogger(__name__)


class AutoSegmenter(CommandStage):
    """Stage 1: seeded-watershed segmentation of one stack or a manifest"""

    command = "segment"

    @property
    def name(self) -> str:
        return "Automatic Instance Segmentation"

    @property
    def stage_number(self) -> int:
        return 1

    async def execute(self, input_data: RunConfig) -> CommandReport:
        if input_data.paths.stack:
            return self._single(input_data)
        return self._dataset(input_data)

    def _segment(self, config: RunConfig, stack_path: str, out_path: Path, gt_path: Optional[str]) -> dict:
        stack, clamped = load_prediction_stack(stack_path)
        labels = instance_segmentation(stack, config.ais)
        save_label_image(labels, out_path, config.label_format)
        row = {"n_instances": labels.num_instances, "clamped_values": clamped, "output": str(out_path)}
        if gt_path:
            gt = load_label_image(gt_path)
            row["msa"] = mean_segmentation_accuracy(labels, gt, config.thresholds)
        return row

    def _single(self, config: RunConfig) -> CommandReport:
        out_path = Path(self._require(config.paths.out, "--out"))
        row = {"sample_id": Path(config.paths.stack).stem}
        row.update(self._segment(config, config.paths.stack, out_path, config.paths.gt))
        return CommandReport(
            command=self.command,
            tables={"segment": [row]},
            outputs=[str(out_path)],
            report_dir=str(out_path.parent),
        )

    def _dataset(self, config: RunConfig) -> CommandReport:
        manifest = self._manifest(config)
        out_dir = self._out_dir(config)
        samples = manifest.sorted_samples()
        tick = self._ticker(len(samples))

        def _run(sample: ManifestSample) -> dict:
            row = {"sample_id": sample.sample_id, "dataset": manifest.dataset_of(sample), "msa": None, "error": None}
            try:
                if not sample.prediction_stack_path:
                    raise DataError("sample has no prediction_stack_path")
                out_path = label_path(out_dir, sample.sample_id, config.label_format)
                row.update(self._segment(config, sample.prediction_stack_path, out_path, sample.gt_labels_path))
            except SAMPLE_ERRORS as e:
                row["error"] = str(e)
                logger.warning("Sample %s failed: %s", sample.sample_id, e)
            tick(sample.sample_id)
            return row

        rows = map_ordered(_run, samples, config.jobs)
        failures = [f"{r['sample_id']}: {r['error']}" for r in rows if r["error"]]
        return CommandReport(
            command=self.command,
            tables={"segment": rows, "segment_summary": self._dataset_means(rows, "msa")},
            outputs=[r["output"] for r in rows if r.get("output")],
            failures=failures,
            report_dir=str(out_dir),
        )
