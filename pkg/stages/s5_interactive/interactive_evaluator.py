"""Stage 5: Simulated interactive segmentation"""

import logging
from typing import Optional

from tabulate import tabulate

from amg.predictors import build_predictor
from core.enums import PredictorName
from core.models import CommandReport, DatasetManifest, ManifestSample, RunConfig
from interactive.report import InteractiveSample, dataset_interactive_report
from raster_io.receiver import find_label_file, load_label_image
from raster_io.stacks import load_guidance
from stages.base import SAMPLE_ERRORS, CommandStage

logger = logging.getLogger(__name__)


class InteractiveEvaluator(CommandStage):
    """Stage 5: point/box start plus corrective clicks for every gt object"""

    command = "interactive"

    @property
    def name(self) -> str:
        return "Interactive Evaluation"

    @property
    def stage_number(self) -> int:
        return 5

    def _sample(self, config: RunConfig, manifest: DatasetManifest, sample: ManifestSample) -> InteractiveSample:
        gt = load_label_image(sample.gt_labels_path)
        name = config.predictor.name
        guidance = proposals = confidence = None
        if name == PredictorName.REGIONGROW and sample.guidance_path:
            guidance = load_guidance(sample.guidance_path)
        elif name == PredictorName.FILE:
            pred_dir = self._require(config.paths.pred_dir, "--pred")
            proposals = load_label_image(find_label_file(pred_dir, sample.sample_id))
            if sample.guidance_path:
                confidence = load_guidance(sample.guidance_path)
        predictor = build_predictor(
            config.predictor, gt=gt, guidance=guidance, proposals=proposals, confidence=confidence,
        )
        return InteractiveSample(sample.sample_id, manifest.dataset_of(sample), gt, predictor)

    async def execute(self, input_data: RunConfig) -> CommandReport:
        manifest = self._manifest(input_data)
        out_dir = self._out_dir(input_data)

        samples, failures = [], []
        for entry in manifest.sorted_samples():
            try:
                samples.append(self._sample(input_data, manifest, entry))
            except SAMPLE_ERRORS as e:
                failures.append(f"{entry.sample_id}: {e}")
                logger.warning("Skipping sample %s: %s", entry.sample_id, e)

        tick = self._ticker(len(samples))
        report = dataset_interactive_report(
            samples, input_data.interactive, jobs=input_data.jobs, on_sample=tick,
        )
        rows = [summary.to_row() for summary in report.summaries]
        return CommandReport(
            command=self.command,
            tables={"interactive": rows},
            details={"traces": [s.model_dump(mode="json") for s in report.samples]},
            failures=failures + report.failures,
            console_table=_console(rows),
            report_dir=str(out_dir),
        )


def _console(rows: list[dict]) -> Optional[str]:
    if not rows:
        return None
    columns = ["dataset", "n_objects", "point", "box", "I_P", "I_B"]
    return tabulate([[row[c] for c in columns] for row in rows], headers=columns, floatfmt=".4f")
