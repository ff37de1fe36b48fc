"""Cross-tile instance stitching"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from core.exceptions import PreconditionError
from core.masks import relabel_sequential
from core.models import BoundingBox, LabelImage, Tile, TileGrid
from metrics.matching import iou_table

logger = logging.getLogger(__name__)


def local_slices(box: BoundingBox, origin: BoundingBox) -> tuple[slice, slice]:
    """Slices of `box` inside an array covering `origin`"""
    return (
        slice(box.y_min - origin.y_min, box.y_max - origin.y_min),
        slice(box.x_min - origin.x_min, box.x_max - origin.x_min),
    )


def _check_tile(tile: Tile, labels: np.ndarray) -> None:
    if labels.shape != (tile.outer.height, tile.outer.width):
        raise PreconditionError(
            f"Tile {tile.index} labeling has shape {labels.shape}, "
            f"outer rect is {tile.outer.height}x{tile.outer.width}"
        )
    if not tile.outer.contains(tile.inner):
        raise PreconditionError(f"Tile {tile.index} inner rect is not inside its outer rect")


def truncated_ids(tile: Tile, labels: np.ndarray, width: int, height: int) -> set[int]:
    """Local ids touching an outer edge that is not the image border"""
    edges = []
    if tile.outer.y_min > 0:
        edges.append(labels[0, :])
    if tile.outer.y_max < height:
        edges.append(labels[-1, :])
    if tile.outer.x_min > 0:
        edges.append(labels[:, 0])
    if tile.outer.x_max < width:
        edges.append(labels[:, -1])
    if not edges:
        return set()
    ids = np.unique(np.concatenate(edges))
    return set(ids[ids != 0].tolist())


@dataclass
class StitchTable:
    """
    Mapping from (tile, local id) to stitched ids

    Local ids are global ids minus the tile's offset. `provisional` maps every global
    id to its merged component id, 0 for background and for components that
    own no pixel.
    """
    offsets: list[int]
    counts: list[int]
    provisional: np.ndarray
    flagged: set[int] = field(default_factory=set)
    n_merges: int = 0

    def lookup(self, tile_index: int) -> np.ndarray:
        """Array indexed by local id giving the provisional id"""
        start = self.offsets[tile_index]
        table = np.zeros(self.counts[tile_index] + 1, dtype=np.uint32)
        table[1:] = self.provisional[start + 1:start + 1 + self.counts[tile_index]]
        return table

    def renumbered(self, order: Sequence[int]) -> "StitchTable":
        """Replace provisional ids by 1..N following `order`"""
        mapping = np.zeros(int(self.provisional.max()) + 1, dtype=np.uint32)
        for new_id, old_id in enumerate(order, start=1):
            mapping[old_id] = new_id
        return StitchTable(
            offsets=self.offsets,
            counts=self.counts,
            provisional=mapping[self.provisional],
            flagged={int(mapping[f]) for f in self.flagged if mapping[f]},
            n_merges=self.n_merges,
        )

    @property
    def n_instances(self) -> int:
        return int(np.unique(self.provisional[self.provisional != 0]).size)


def _getter(tile_labels) -> Callable[[int], Optional[np.ndarray]]:
    if hasattr(tile_labels, "get"):
        return tile_labels.get
    return lambda index: tile_labels[index]


def build_stitch_table(
    grid: TileGrid,
    tile_labels: Sequence[Optional[np.ndarray]],
    merge_iou: float = 0.5,
) -> StitchTable:
    """
    Merge instances across neighbouring tiles

    For each pair of tiles whose outer rects overlap, instances are compared on the
    shared strip only; pairs with strip IoU >= merge_iou join one component. Failed
    tiles (None) contribute nothing. `tile_labels` is a sequence indexed by tile or
    a store exposing `get(index)`.
    """
    if not hasattr(tile_labels, "get") and len(tile_labels) != len(grid.tiles):
        raise PreconditionError(f"{len(tile_labels)} tile labelings for {len(grid.tiles)} tiles")
    get = _getter(tile_labels)

    counts, offsets = [], []
    total = 0
    for tile in grid.tiles:
        labels = get(tile.index)
        n = 0
        if labels is not None:
            _check_tile(tile, labels)
            n = int(labels.max())
        offsets.append(total)
        counts.append(n)
        total += n

    rows, cols = [], []
    for a, b in grid.neighbours():
        labels_a, labels_b = get(a), get(b)
        if labels_a is None or labels_b is None:
            continue
        tile_a, tile_b = grid.tiles[a], grid.tiles[b]
        strip = tile_a.outer.intersection(tile_b.outer)
        if strip is None:
            continue
        crop_a = labels_a[local_slices(strip, tile_a.outer)]
        crop_b = labels_b[local_slices(strip, tile_b.outer)]
        if not crop_a.any() or not crop_b.any():
            continue
        table = iou_table(LabelImage(crop_b), LabelImage(crop_a))
        for (id_a, id_b), iou in sorted(table.ious.items()):
            if iou >= merge_iou:
                rows.append(offsets[a] + id_a)
                cols.append(offsets[b] + id_b)

    n_nodes = total + 1
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n_nodes, n_nodes))
    _, component = connected_components(graph, directed=False)

    owned = np.zeros(n_nodes, dtype=bool)
    flagged_nodes = []
    for tile in grid.tiles:
        labels = get(tile.index)
        if labels is None:
            continue
        inner_ids = np.unique(labels[local_slices(tile.inner, tile.outer)])
        inner_ids = inner_ids[inner_ids != 0]
        owned[offsets[tile.index] + inner_ids] = True
        cut = truncated_ids(tile, labels, grid.width, grid.height)
        flagged_nodes.extend(offsets[tile.index] + i for i in sorted(cut.intersection(inner_ids.tolist())))

    # components of owning nodes become provisional ids 1..K
    owning = np.unique(component[owned])
    to_provisional = np.zeros(int(component.max()) + 1, dtype=np.uint32)
    to_provisional[owning] = np.arange(1, owning.size + 1, dtype=np.uint32)
    provisional = to_provisional[component]

    logger.debug("Stitched %d tile instances with %d merge edges", total, len(rows))
    return StitchTable(
        offsets=offsets,
        counts=counts,
        provisional=provisional,
        flagged={int(provisional[n]) for n in flagged_nodes},
        n_merges=len(rows),
    )


def compose(grid: TileGrid, tile_labels: Sequence[Optional[np.ndarray]], table: StitchTable) -> np.ndarray:
    """Paint each tile's inner rect with provisional ids"""
    canvas = np.zeros((grid.height, grid.width), dtype=np.uint32)
    for tile, labels in zip(grid.tiles, tile_labels):
        if labels is None:
            continue
        canvas[tile.inner.slices] = table.lookup(tile.index)[labels[local_slices(tile.inner, tile.outer)]]
    return canvas


def stitch(
    grid: TileGrid,
    tile_labels: Sequence[Optional[np.ndarray]],
    merge_iou: float = 0.5,
) -> tuple[LabelImage, StitchTable]:
    """
    Stitch per-tile labelings of outer rects into one labeling

    Each pixel is taken from the tile whose inner rect contains it. Output ids are
    contiguous 1..N in row-major first-pixel order; the returned table uses the same ids.
    """
    table = build_stitch_table(grid, tile_labels, merge_iou)
    canvas = compose(grid, tile_labels, table)

    flat = canvas.reshape(-1)
    ids, first = np.unique(flat, return_index=True)
    keep = ids != 0
    order = ids[keep][np.argsort(first[keep], kind="stable")].tolist()
    table = table.renumbered(order)
    labels = relabel_sequential(canvas)
    return LabelImage(labels), table
