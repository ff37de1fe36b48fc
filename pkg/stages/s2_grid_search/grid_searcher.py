"""Stage 2: Watershed threshold grid search"""

import logging

from tabulate import tabulate

from ais.grid_search import grid_search
from core.exceptions import DataError
from core.models import CommandReport, RunConfig
from raster_io.receiver import load_label_image
from raster_io.stacks import load_prediction_stack
from stages.base import SAMPLE_ERRORS, CommandStage

logger = logging.getLogger(__name__)


class GridSearcher(CommandStage):
    """Stage 2: detection scores for every (center, boundary) threshold pair"""

    command = "grid-search"

    @property
    def name(self) -> str:
        return "Grid Search"

    @property
    def stage_number(self) -> int:
        return 2

    async def execute(self, input_data: RunConfig) -> CommandReport:
        manifest = self._manifest(input_data)
        out_dir = self._out_dir(input_data)

        pairs, failures = [], []
        for sample in manifest.sorted_samples():
            try:
                if not sample.prediction_stack_path:
                    raise DataError("sample has no prediction_stack_path")
                stack, _ = load_prediction_stack(sample.prediction_stack_path)
                gt = load_label_image(sample.gt_labels_path)
                if stack.shape != gt.shape:
                    raise DataError(f"stack {stack.shape} and gt {gt.shape} differ")
                pairs.append((stack, gt))
            except SAMPLE_ERRORS as e:
                failures.append(f"{sample.sample_id}: {e}")
                logger.warning("Skipping sample %s: %s", sample.sample_id, e)
        if not pairs:
            raise DataError("No usable samples for the grid search")

        rows = grid_search(
            pairs,
            input_data.center_grid,
            input_data.boundary_grid,
            base_params=input_data.ais,
            iou_threshold=input_data.iou_threshold,
            jobs=input_data.jobs,
        )
        best = next(row for row in rows if row.is_best)
        console = tabulate(
            [[best.center_threshold, best.boundary_threshold, best.precision, best.recall, best.f1]],
            headers=["center", "boundary", "precision", "recall", "f1"],
            floatfmt=".4f",
        )
        return CommandReport(
            command=self.command,
            tables={"grid_search": [row.model_dump() for row in rows]},
            failures=failures,
            console_table=f"Best cell of {len(rows)}:\n{console}",
            report_dir=str(out_dir),
        )
