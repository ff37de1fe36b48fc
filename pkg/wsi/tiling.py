"""Halo tiling geometry"""

import math

from core.exceptions import InvalidValueError
from core.models import BoundingBox, Tile, TileGrid


def make_tile_grid(width: int, height: int, tile: int = 512, halo: int = 64) -> TileGrid:
    """
    Row-major tiles whose inner rects partition the image

    Outer rects extend each inner rect by `halo` on every side, clamped to the image.
    The last row and column may be narrower than `tile`.
    """
    if width <= 0 or height <= 0:
        raise InvalidValueError(f"cannot tile a {width}x{height} image", field="grid")
    if tile <= 0:
        raise InvalidValueError("tile size must be positive", field="tile")
    if halo < 0:
        raise InvalidValueError("halo must be nonnegative", field="halo")

    n_rows = math.ceil(height / tile)
    n_cols = math.ceil(width / tile)
    tiles = []
    for row in range(n_rows):
        y0, y1 = row * tile, min((row + 1) * tile, height)
        for col in range(n_cols):
            x0, x1 = col * tile, min((col + 1) * tile, width)
            tiles.append(Tile(
                index=row * n_cols + col,
                row=row,
                col=col,
                inner=BoundingBox(x_min=x0, y_min=y0, x_max=x1, y_max=y1),
                outer=BoundingBox(
                    x_min=max(x0 - halo, 0),
                    y_min=max(y0 - halo, 0),
                    x_max=min(x1 + halo, width),
                    y_max=min(y1 + halo, height),
                ),
            ))
    return TileGrid(
        width=width,
        height=height,
        tile_shape=(tile, tile),
        halo=halo,
        n_rows=n_rows,
        n_cols=n_cols,
        tiles=tiles,
    )


def tile_count(width: int, height: int, tile: int = 512) -> int:
    """Number of tiles without building the grid"""
    return math.ceil(width / tile) * math.ceil(height / tile)
