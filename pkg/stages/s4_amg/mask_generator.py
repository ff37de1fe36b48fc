"""Stage 4: Automatic mask generation"""

from pathlib import Path

from amg.generator import amg_generate
from amg.predictors import build_predictor
from core.enums import PredictorName
from core.models import CommandReport, RunConfig
from metrics.instance import mean_segmentation_accuracy
from raster_io.receiver import load_label_image, save_label_image
from raster_io.stacks import load_guidance
from stages.base import CommandStage


class MaskGenerator(CommandStage):
    """Stage 4: prompt a predictor on a point grid and merge the masks"""

    command = "amg"

    @property
    def name(self) -> str:
        return "Automatic Mask Generation"

    @property
    def stage_number(self) -> int:
        return 4

    async def execute(self, input_data: RunConfig) -> CommandReport:
        paths = input_data.paths
        out_path = Path(self._require(paths.out, "--out"))

        gt = load_label_image(paths.gt) if paths.gt else None
        guidance = load_guidance(paths.guidance) if paths.guidance else None
        proposals = load_label_image(paths.proposals) if paths.proposals else None
        # the file predictor reads the guidance raster as its per-pixel confidence
        confidence = guidance if input_data.predictor.name == PredictorName.FILE else None
        predictor = build_predictor(
            input_data.predictor, gt=gt, guidance=guidance, proposals=proposals, confidence=confidence,
        )

        tick = self._ticker(input_data.amg.points_per_side ** 2)
        result = amg_generate(
            predictor,
            params=input_data.amg,
            jobs=input_data.jobs,
            on_point=lambda point: tick(f"({point.x}, {point.y})"),
        )
        save_label_image(result.labels, out_path, input_data.label_format)

        row = {
            "predictor": predictor.name,
            "n_points": result.n_points,
            "n_candidates": result.n_candidates,
            "n_kept": result.n_kept,
            "n_failures": result.n_failures,
            "n_instances": result.labels.num_instances,
            "msa": mean_segmentation_accuracy(result.labels, gt, input_data.thresholds) if gt else None,
            "output": str(out_path),
        }
        details = {"point_failures": [
            {"index": f.index, "x": f.x, "y": f.y, "message": f.message} for f in result.failures
        ]}
        return CommandReport(
            command=self.command,
            tables={"amg": [row]},
            details=details,
            outputs=[str(out_path)],
            report_dir=str(out_path.parent),
        )
