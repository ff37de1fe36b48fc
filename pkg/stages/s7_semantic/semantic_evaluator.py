"""Stage 7: Semantic segmentation evaluation"""

import logging

from core.exceptions import ConfigError, DataError
from core.models import CommandReport, ManifestSample, RunConfig, SemanticLabelImage
from metrics.semantic import semantic_argmax, weighted_dice
from raster_io.receiver import find_label_file, load_semantic_labels
from raster_io.stacks import load_semantic_probs
from stages.base import SAMPLE_ERRORS, CommandStage
from utils.parallel import map_ordered

logger = logging.getLogger(__name__)


class SemanticEvaluator(CommandStage):
    """Stage 7: frequency-weighted dice over a manifest"""

    command = "semantic-eval"

    @property
    def name(self) -> str:
        return "Semantic Evaluation"

    @property
    def stage_number(self) -> int:
        return 7

    def _prediction(self, config: RunConfig, sample: ManifestSample, num_classes: int) -> SemanticLabelImage:
        if sample.semantic_prob_path:
            probs = load_semantic_probs(sample.semantic_prob_path)
            if probs.num_classes != num_classes:
                raise DataError(
                    f"probability map has {probs.num_classes} classes, expected {num_classes}"
                )
            return semantic_argmax(probs)
        if config.paths.pred_dir:
            return load_semantic_labels(find_label_file(config.paths.pred_dir, sample.sample_id), num_classes)
        raise DataError("sample has no semantic_prob_path and no --pred directory was given")

    async def execute(self, input_data: RunConfig) -> CommandReport:
        num_classes = input_data.num_classes
        if num_classes is None:
            raise ConfigError("semantic-eval needs --num-classes", field="num_classes")
        manifest = self._manifest(input_data)
        out_dir = self._out_dir(input_data)
        samples = manifest.sorted_samples()
        tick = self._ticker(len(samples))

        def _run(sample: ManifestSample) -> dict:
            row = {"sample_id": sample.sample_id, "dataset": manifest.dataset_of(sample)}
            for k in range(num_classes + 1):
                row[f"dice_class_{k}"] = None
            for k in range(num_classes + 1):
                row[f"freq_class_{k}"] = None
            row.update(weighted_dice=None, error=None)
            try:
                if not sample.semantic_gt_path:
                    raise DataError("sample has no semantic_gt_path")
                gt = load_semantic_labels(sample.semantic_gt_path, num_classes)
                report = weighted_dice(self._prediction(input_data, sample, num_classes), gt, num_classes)
                for k, (score, frequency) in enumerate(zip(report.dice, report.frequencies)):
                    row[f"dice_class_{k}"] = score
                    row[f"freq_class_{k}"] = frequency
                row["weighted_dice"] = report.weighted_dice
            except SAMPLE_ERRORS as e:
                row["error"] = str(e)
                logger.warning("Sample %s failed: %s", sample.sample_id, e)
            tick(sample.sample_id)
            return row

        rows = map_ordered(_run, samples, input_data.jobs)
        return CommandReport(
            command=self.command,
            tables={"semantic": rows, "semantic_summary": self._dataset_means(rows, "weighted_dice")},
            failures=[f"{r['sample_id']}: {r['error']}" for r in rows if r["error"]],
            report_dir=str(out_dir),
        )
