"""Shared plumbing for command stages"""

import threading
from pathlib import Path
from typing import Callable, Optional

from core.exceptions import ConfigError, DataError, HistosegError
from core.interfaces import Stage
from core.models import CommandReport, DatasetManifest, RunConfig
from metrics.aggregate import aggregate_dataset
from raster_io.manifest import load_manifest

ItemCallback = Callable[[int, int, str], None]

# errors that turn into a per-sample error row instead of aborting the run
SAMPLE_ERRORS = (HistosegError, OSError)


class CommandStage(Stage[RunConfig, CommandReport]):
    """A CLI command: RunConfig in, CommandReport out"""

    command: str = ""
    on_item: Optional[ItemCallback] = None

    def validate_input(self, input_data: RunConfig) -> bool:
        return isinstance(input_data, RunConfig) and input_data.command == self.command

    def _ticker(self, total: int) -> Callable[[str], None]:
        """Thread-safe per-item progress callback"""
        lock = threading.Lock()
        state = {"done": 0}

        def tick(item: str = "") -> None:
            with lock:
                state["done"] += 1
                done = state["done"]
            if self.on_item:
                self.on_item(done, total, item)

        return tick

    @staticmethod
    def _require(value: Optional[str], flag: str) -> str:
        if not value:
            raise ConfigError(f"Missing required option {flag}", field=flag.lstrip("-"))
        return value

    @staticmethod
    def _manifest(config: RunConfig) -> DatasetManifest:
        manifest = load_manifest(CommandStage._require(config.paths.manifest, "--manifest"))
        if not manifest.samples:
            raise DataError(f"Manifest {config.paths.manifest} has no samples")
        return manifest

    @staticmethod
    def _out_dir(config: RunConfig) -> Path:
        out = Path(CommandStage._require(config.paths.out, "--out"))
        out.mkdir(parents=True, exist_ok=True)
        return out

    @staticmethod
    def _dataset_means(rows: list[dict], score: str) -> list[dict]:
        """Per-dataset mean of a per-image score, failed rows excluded"""
        by_dataset: dict[str, dict[str, float]] = {}
        for row in rows:
            if row.get(score) is None:
                continue
            by_dataset.setdefault(row["dataset"], {})[row["sample_id"]] = row[score]
        summary = []
        for dataset in sorted(by_dataset):
            result = aggregate_dataset(by_dataset[dataset])
            summary.append({"dataset": dataset, "n_images": len(result.per_image), score: result.mean})
        return summary
