"""Stage 3: Instance segmentation evaluation"""

import logging

from core.masks import check_same_shape
from core.models import CommandReport, ManifestSample, RunConfig
from metrics.instance import curve_from_table, segmentation_accuracy
from metrics.matching import match_table
from raster_io.receiver import find_label_file, load_label_image
from stages.base import SAMPLE_ERRORS, CommandStage
from utils.parallel import map_ordered

logger = logging.getLogger(__name__)


class Evaluator(CommandStage):
    """Stage 3: score a directory of predicted labelings against a manifest"""

    command = "evaluate"

    @property
    def name(self) -> str:
        return "Evaluation"

    @property
    def stage_number(self) -> int:
        return 3

    async def execute(self, input_data: RunConfig) -> CommandReport:
        manifest = self._manifest(input_data)
        pred_dir = self._require(input_data.paths.pred_dir, "--pred")
        out_dir = self._out_dir(input_data)
        thresholds = input_data.thresholds
        samples = manifest.sorted_samples()
        tick = self._ticker(len(samples))

        def _run(sample: ManifestSample) -> tuple[dict, list[dict]]:
            row = {
                "sample_id": sample.sample_id,
                "dataset": manifest.dataset_of(sample),
                "n_gt": None,
                "n_pred": None,
                "msa": None,
                "empty_gt": None,
                "error": None,
            }
            curve_rows = []
            try:
                pred = load_label_image(find_label_file(pred_dir, sample.sample_id))
                gt = load_label_image(sample.gt_labels_path)
                check_same_shape(pred.labels, gt.labels)
                table = match_table(pred, gt, thresholds)
                scores = segmentation_accuracy(table)
                row.update(
                    n_gt=table.n_gt,
                    n_pred=table.n_pred,
                    msa=sum(scores) / len(scores),
                    empty_gt=table.n_gt == 0,
                )
                if input_data.curve:
                    for point, sa in zip(curve_from_table(table).points, scores):
                        curve_rows.append({
                            "sample_id": sample.sample_id,
                            "dataset": row["dataset"],
                            **point.model_dump(),
                            "sa": sa,
                            "empty_gt": table.n_gt == 0,
                        })
            except SAMPLE_ERRORS as e:
                row["error"] = str(e)
                logger.warning("Sample %s failed: %s", sample.sample_id, e)
            tick(sample.sample_id)
            return row, curve_rows

        results = map_ordered(_run, samples, input_data.jobs)
        rows = [row for row, _ in results]
        tables = {"evaluate": rows, "evaluate_summary": self._dataset_means(rows, "msa")}
        if input_data.curve:
            tables["evaluate_curve"] = [r for _, curve in results for r in curve]

        return CommandReport(
            command=self.command,
            tables=tables,
            failures=[f"{r['sample_id']}: {r['error']}" for r in rows if r["error"]],
            report_dir=str(out_dir),
        )
