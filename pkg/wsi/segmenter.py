"""Tile-and-stitch segmentation of whole-slide prediction stacks"""

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from ais.segmenter import instance_segmentation
from core.enums import ResourceStage
from core.exceptions import HistosegError, PreconditionError
from core.interfaces import StackSource
from core.models import AisParams, LabelImage, ResourceReport, TileFailure, TileGrid
from utils.parallel import map_ordered
from .stitching import StitchTable, build_stitch_table, local_slices, stitch
from .store import DiskTileStore, MemoryTileStore, write_tiled_output

logger = logging.getLogger(__name__)

# stack (3 x f32) + two smoothed planes (f32) + labels (u32) + markers (i32) + mask (bool)
BYTES_PER_OUTER_PIXEL = 12 + 8 + 4 + 4 + 1
STACK_BYTES_PER_PIXEL = 12


@dataclass
class TileOutcome:
    index: int
    labels: Optional[np.ndarray]
    error: Optional[str] = None
    load_s: float = 0.0
    segment_s: float = 0.0


@dataclass
class TiledSegmentation:
    """Stitched labeling (None in tiled-output mode) with its report and stitch table"""
    labels: Optional[LabelImage]
    report: ResourceReport
    table: StitchTable
    stitch_table_path: Optional[Path] = None


def _tiled_order(grid: TileGrid, store, table: StitchTable) -> list[int]:
    """Provisional ids by first appearance, tiles in index order, row-major inside a tile"""
    seen: dict[int, None] = {}
    for tile in grid.tiles:
        labels = store.get(tile.index)
        if labels is None:
            continue
        inner = table.lookup(tile.index)[labels[local_slices(tile.inner, tile.outer)]].reshape(-1)
        ids, first = np.unique(inner, return_index=True)
        for pid in ids[np.argsort(first, kind="stable")].tolist():
            if pid and pid not in seen:
                seen[pid] = None
    return list(seen)


def segment_tiled(
    source: StackSource,
    grid: TileGrid,
    params: AisParams = AisParams(),
    jobs: int = 1,
    merge_iou: float = 0.5,
    tiled_output: Optional[Union[str, Path]] = None,
    on_tile: Optional[Callable[[int], None]] = None,
) -> TiledSegmentation:
    """
    Segment every outer window, then stitch

    Tiles are segmented independently (concurrently with `jobs` > 1); stitching runs
    afterwards in tile-index order, so the result does not depend on `jobs`. With
    `tiled_output`, labelings are spilled to disk and the result is written as one
    LBL1 per tile plus a stitch table instead of a full raster.

    Raises:
        PreconditionError: Source and grid dimensions differ
    """
    if (source.width, source.height) != (grid.width, grid.height):
        raise PreconditionError(
            f"Source is {source.width}x{source.height}, grid is {grid.width}x{grid.height}"
        )
    report = ResourceReport(n_tiles=len(grid.tiles))
    store = DiskTileStore(Path(tiled_output) / "outer") if tiled_output else MemoryTileStore()

    def _segment(tile) -> TileOutcome:
        start = time.perf_counter()
        try:
            window = source.read(tile.outer, tile.inner)
        except (HistosegError, OSError) as e:
            return TileOutcome(tile.index, None, f"read failed: {e}", time.perf_counter() - start)
        loaded = time.perf_counter()
        try:
            labels = instance_segmentation(window, params).labels
            store.put(tile.index, labels)
        except (HistosegError, OSError) as e:
            return TileOutcome(tile.index, None, f"segmentation failed: {e}", loaded - start)
        if on_tile:
            on_tile(tile.index)
        # the disk store owns spilled labelings
        kept = None if tiled_output else labels
        return TileOutcome(tile.index, kept, None, loaded - start, time.perf_counter() - loaded)

    started = time.perf_counter()
    outcomes = map_ordered(_segment, grid.tiles, jobs)
    elapsed = time.perf_counter() - started

    largest_outer = max(t.outer.area for t in grid.tiles)
    load = report.stage(ResourceStage.LOAD)
    load.wall_time_s = sum(o.load_s for o in outcomes)
    load.tiles_processed = len(outcomes)
    load.peak_tile_bytes = largest_outer * STACK_BYTES_PER_PIXEL
    load.parallelism = jobs

    segment = report.stage(ResourceStage.SEGMENT)
    segment.wall_time_s = elapsed
    segment.tiles_processed = sum(1 for o in outcomes if o.error is None)
    segment.peak_tile_bytes = largest_outer * BYTES_PER_OUTER_PIXEL
    segment.parallelism = jobs

    for outcome in outcomes:
        if outcome.error:
            report.failures.append(TileFailure(tile_index=outcome.index, message=outcome.error))
            logger.warning("Tile %d: %s", outcome.index, outcome.error)

    started = time.perf_counter()
    if tiled_output:
        table = build_stitch_table(grid, store, merge_iou)
        table = table.renumbered(_tiled_order(grid, store, table))
        labels = None
    else:
        tile_labels = [o.labels for o in outcomes]
        labels, table = stitch(grid, tile_labels, merge_iou)
    stitch_stage = report.stage(ResourceStage.STITCH)
    stitch_stage.wall_time_s = time.perf_counter() - started
    stitch_stage.tiles_processed = len(grid.tiles)
    stitch_stage.peak_tile_bytes = 0 if tiled_output else grid.width * grid.height * 4
    stitch_stage.parallelism = 1

    stitch_table_path = None
    if tiled_output:
        started = time.perf_counter()
        stitch_table_path = write_tiled_output(tiled_output, grid, store, table)
        write = report.stage(ResourceStage.WRITE)
        write.wall_time_s = time.perf_counter() - started
        write.tiles_processed = len(grid.tiles)
        write.peak_tile_bytes = max(t.inner.area for t in grid.tiles) * 4
        write.parallelism = 1

    report.n_instances = table.n_instances
    report.flagged_instances = sorted(table.flagged)
    logger.info(
        "Tiled segmentation: %d tiles, %d instances, %d flagged, %d failed tiles",
        len(grid.tiles), report.n_instances, len(report.flagged_instances), len(report.failures),
    )
    return TiledSegmentation(labels=labels, report=report, table=table, stitch_table_path=stitch_table_path)
