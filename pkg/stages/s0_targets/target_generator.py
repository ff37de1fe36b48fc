"""Stage 0: Synthetic target generation"""

from pathlib import Path

from ais.targets import generate_targets
from core.models import CommandReport, RunConfig
from raster_io.receiver import load_label_image
from raster_io.stacks import save_prediction_stack
from stages.base import CommandStage


class TargetGenerator(CommandStage):
    """Stage 0: derive a prediction stack from a ground-truth labeling"""

    command = "targets"

    @property
    def name(self) -> str:
        return "Target Generation"

    @property
    def stage_number(self) -> int:
        return 0

    async def execute(self, input_data: RunConfig) -> CommandReport:
        gt_path = self._require(input_data.paths.gt, "--gt")
        out_path = Path(self._require(input_data.paths.out, "--out"))

        gt = load_label_image(gt_path)
        stack = generate_targets(gt)
        save_prediction_stack(stack, out_path)

        row = {
            "gt": str(gt_path),
            "out": str(out_path),
            "width": gt.width,
            "height": gt.height,
            "n_instances": gt.num_instances,
        }
        return CommandReport(
            command=self.command,
            tables={"targets": [row]},
            outputs=[str(out_path)],
            report_dir=str(out_path.parent),
        )
