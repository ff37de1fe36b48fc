"""Stage 6: Whole-slide tiled segmentation"""

import json
import logging
import time
from pathlib import Path

from tabulate import tabulate

from core.enums import ResourceStage
from core.exceptions import ConfigError
from core.models import CommandReport, ResourceReport, RunConfig
from raster_io.receiver import save_label_image
from stages.base import CommandStage
from wsi.segmenter import segment_tiled
from wsi.source import Psf3StackSource
from wsi.tiling import make_tile_grid

logger = logging.getLogger(__name__)


class SlideSegmenter(CommandStage):
    """Stage 6: segment a slide tile by tile and stitch across halos"""

    command = "wsi"

    @property
    def name(self) -> str:
        return "Whole-Slide Segmentation"

    @property
    def stage_number(self) -> int:
        return 6

    async def execute(self, input_data: RunConfig) -> CommandReport:
        params = input_data.wsi
        stack_path = self._require(input_data.paths.stack, "--stack")
        tiled_output = params.tiled_output
        if not tiled_output and not input_data.paths.out:
            raise ConfigError("wsi needs --out or --tiled-output", field="out")

        out_path = Path(input_data.paths.out) if input_data.paths.out else None
        report_dir = Path(tiled_output) if tiled_output else out_path.parent
        report_dir.mkdir(parents=True, exist_ok=True)

        source = Psf3StackSource(stack_path)
        grid = make_tile_grid(source.width, source.height, params.tile, params.halo)
        logger.info(
            "Slide %dx%d: %d tiles of %d px with %d px halo",
            source.width, source.height, len(grid.tiles), params.tile, params.halo,
        )
        tick = self._ticker(len(grid.tiles))
        result = segment_tiled(
            source,
            grid,
            params=input_data.ais,
            jobs=input_data.jobs,
            merge_iou=params.merge_iou,
            tiled_output=tiled_output,
            on_tile=lambda index: tick(f"tile {index}"),
        )
        if source.clamped:
            logger.warning("Clamped %d stack values into [0, 1]", source.clamped)

        outputs = []
        if result.labels is not None and out_path is not None:
            started = time.perf_counter()
            save_label_image(result.labels, out_path, input_data.label_format)
            write = result.report.stage(ResourceStage.WRITE)
            write.wall_time_s = time.perf_counter() - started
            write.tiles_processed = len(grid.tiles)
            write.peak_tile_bytes = grid.width * grid.height * 4
            outputs.append(str(out_path))
        if result.stitch_table_path is not None:
            outputs.append(str(result.stitch_table_path))

        report = result.report
        if report.flagged_instances:
            logger.warning(
                "%d instances touch a tile's outer edge and may be truncated", len(report.flagged_instances)
            )
        report_path = report_dir / "resource_report.json"
        report_path.write_text(json.dumps(report.model_dump(mode="json"), indent=2), encoding="utf-8")
        outputs.append(str(report_path))

        return CommandReport(
            command=self.command,
            tables={"resource_report": _stage_rows(report)},
            details={"resource_report": report.model_dump(mode="json")},
            outputs=outputs,
            failures=[f"tile {f.tile_index}: {f.message}" for f in report.failures],
            console_table=_console(report),
            report_dir=str(report_dir),
        )


def _stage_rows(report: ResourceReport) -> list[dict]:
    return [
        {
            "stage": entry.stage.value,
            "wall_time_s": entry.wall_time_s,
            "tiles_processed": entry.tiles_processed,
            "peak_tile_bytes": entry.peak_tile_bytes,
            "parallelism": entry.parallelism,
        }
        for entry in report.stages
    ]


def _console(report: ResourceReport) -> str:
    table = tabulate(
        [[e.stage.value, e.wall_time_s, e.peak_tile_bytes / 2**20, e.parallelism] for e in report.stages],
        headers=["stage", "time (s)", "peak tile (MiB)", "jobs"],
        floatfmt=".2f",
    )
    return (
        f"{report.n_tiles} tiles, {report.n_instances} instances, "
        f"{len(report.flagged_instances)} flagged\n{table}"
    )
