"""Where per-tile labelings live between segmentation and stitching"""

import json
from pathlib import Path
from typing import Optional, Union

import numpy as np

from core.enums import LabelFormat
from core.models import LabelImage, TileGrid
from raster_io.receiver import load_label_image, save_label_image
from .stitching import StitchTable, local_slices


class MemoryTileStore:
    """Keeps outer-rect labelings in a dict"""

    def __init__(self):
        self._labels: dict[int, np.ndarray] = {}

    def put(self, index: int, labels: np.ndarray) -> None:
        self._labels[index] = labels

    def get(self, index: int) -> Optional[np.ndarray]:
        return self._labels.get(index)


class DiskTileStore:
    """Spills outer-rect labelings to LBL1 files, one per tile"""

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._written: set[int] = set()

    def path(self, index: int) -> Path:
        return self.directory / f"outer_{index:05d}.lbl"

    def put(self, index: int, labels: np.ndarray) -> None:
        save_label_image(LabelImage(labels), self.path(index), LabelFormat.LBL1)
        self._written.add(index)

    def get(self, index: int) -> Optional[np.ndarray]:
        if index not in self._written:
            return None
        return load_label_image(self.path(index)).labels


def write_tiled_output(
    directory: Union[str, Path],
    grid: TileGrid,
    store,
    table: StitchTable,
) -> Path:
    """
    One LBL1 per tile holding its inner rect in stitched ids, plus stitch_table.json

    Returns the stitch table path.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for tile in grid.tiles:
        labels = store.get(tile.index)
        inner = np.zeros((tile.inner.height, tile.inner.width), dtype=np.uint32)
        if labels is not None:
            inner = table.lookup(tile.index)[labels[local_slices(tile.inner, tile.outer)]]
        name = f"tile_{tile.index:05d}.lbl"
        save_label_image(LabelImage(inner), directory / name, LabelFormat.LBL1)
        entries.append({
            "index": tile.index,
            "file": name,
            "inner": list(tile.inner.as_tuple()),
            "outer": list(tile.outer.as_tuple()),
            "offset": table.offsets[tile.index],
            "local_to_global": table.lookup(tile.index).tolist()[1:],
            "failed": labels is None,
        })

    path = directory / "stitch_table.json"
    path.write_text(json.dumps({
        "width": grid.width,
        "height": grid.height,
        "tile_shape": list(grid.tile_shape),
        "halo": grid.halo,
        "n_instances": table.n_instances,
        "flagged_instances": sorted(table.flagged),
        "tiles": entries,
    }, indent=2))
    return path
