"""Configuration and environment settings"""

from pydantic import ValidationError
from pydantic_settings import BaseSettings
from typing import Any, Dict, Optional, List, Union
from pathlib import Path
import json
import os

from core.exceptions import ConfigError, InvalidValueError
from core.models import RunConfig


class Settings(BaseSettings):
    """Application configuration"""

    # Automatic instance segmentation (seeded watershed)
    AIS_CENTER_THRESHOLD: float = 0.5
    AIS_BOUNDARY_THRESHOLD: float = 0.6
    AIS_FOREGROUND_THRESHOLD: float = 0.5
    AIS_SMOOTHING_SIGMA: float = 1.6  # pixels
    AIS_MIN_INSTANCE_SIZE: float = 25  # pixels

    # Automatic mask generation
    AMG_POINTS_PER_SIDE: int = 32
    AMG_CONFIDENCE_MIN: float = 0.5
    AMG_DEDUP_IOU: float = 0.7
    AMG_MIN_AREA: int = 25

    # Interactive segmentation
    INTERACTIVE_N_CORRECTIONS: int = 7
    INTERACTIVE_USE_MASK_PROMPT: bool = False
    INTERACTIVE_SAMPLING: str = "interior"  # interior | random
    PREDICTOR: str = "oracle"
    REGION_GROW_THRESHOLD: float = 0.1

    # Whole-slide tiling
    WSI_TILE: int = 512
    WSI_HALO: int = 64
    WSI_MERGE_IOU: float = 0.5

    # Evaluation
    EVAL_THRESHOLDS: str = "0.5,0.55,0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95"
    GRID_VALUES: str = "0.3:0.9:0.1"  # start:stop:step, inclusive
    GRID_IOU_THRESHOLD: float = 0.5

    # Execution
    JOBS: Optional[int] = None  # defaults to the CPU count
    SEED: Optional[int] = None

    # Output
    OUTPUT_DIR: str = "./output"
    REPORT_FORMAT: str = "csv"
    LABEL_FORMAT: str = "lbl1"
    LOG_LEVEL: str = "INFO"

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = True
        extra = "ignore"

    def get_eval_thresholds(self) -> List[float]:
        """IoU thresholds for mean segmentation accuracy"""
        return parse_value_list(self.EVAL_THRESHOLDS)

    def get_grid_values(self) -> List[float]:
        """Threshold grid used on both watershed axes"""
        return parse_value_list(self.GRID_VALUES)

    def get_jobs(self) -> int:
        return self.JOBS or os.cpu_count() or 1

    def get_output_path(self, subdir: str = "") -> Path:
        """Get output directory path"""
        path = Path(self.OUTPUT_DIR) / subdir
        path.mkdir(parents=True, exist_ok=True)
        return path


def parse_value_list(text: str) -> List[float]:
    """Parse "a,b,c" or an inclusive "start:stop:step" range, rounded to 6 decimals"""
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ValueError(f"Invalid range '{text}', expected start:stop:step")
        start, stop, step = parts
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 6) for i in range(max(count, 0))]
    return [round(float(p), 6) for p in text.split(",") if p.strip()]


def deep_merge(base: dict, override: dict) -> dict:
    """Recursively merge `override` into a copy of `base`; None values are skipped"""
    merged = dict(base)
    for key, value in override.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def default_run_config(command: str, source: Optional[Settings] = None) -> Dict[str, Any]:
    """Built-in defaults for a command, taken from the environment settings"""
    s = source or settings
    try:
        thresholds = s.get_eval_thresholds()
        grid = s.get_grid_values()
    except ValueError as e:
        raise ConfigError(str(e), field="settings") from e
    return {
        "command": command,
        "ais": {
            "center_threshold": s.AIS_CENTER_THRESHOLD,
            "boundary_threshold": s.AIS_BOUNDARY_THRESHOLD,
            "foreground_threshold": s.AIS_FOREGROUND_THRESHOLD,
            "smoothing_sigma": s.AIS_SMOOTHING_SIGMA,
            "min_instance_size": s.AIS_MIN_INSTANCE_SIZE,
        },
        "amg": {
            "points_per_side": s.AMG_POINTS_PER_SIDE,
            "confidence_min": s.AMG_CONFIDENCE_MIN,
            "dedup_iou": s.AMG_DEDUP_IOU,
            "min_area": s.AMG_MIN_AREA,
        },
        "predictor": {
            "name": s.PREDICTOR,
            "region_grow_threshold": s.REGION_GROW_THRESHOLD,
        },
        "interactive": {
            "n_corrections": s.INTERACTIVE_N_CORRECTIONS,
            "use_mask_prompt": s.INTERACTIVE_USE_MASK_PROMPT,
            "sampling": s.INTERACTIVE_SAMPLING,
            "seed": s.SEED,
        },
        "wsi": {
            "tile": s.WSI_TILE,
            "halo": s.WSI_HALO,
            "merge_iou": s.WSI_MERGE_IOU,
        },
        "thresholds": thresholds,
        "iou_threshold": s.GRID_IOU_THRESHOLD,
        "center_grid": grid,
        "boundary_grid": grid,
        "jobs": s.get_jobs(),
        "seed": s.SEED,
        "report_format": s.REPORT_FORMAT,
        "label_format": s.LABEL_FORMAT,
    }


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a JSON run configuration (a previous run_config.json works as-is)"""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}", field="config") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}", field="config") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object", field="config")
    return raw


def resolve_run_config(
    command: str,
    overrides: Optional[Dict[str, Any]] = None,
    config_path: Optional[Union[str, Path]] = None,
) -> RunConfig:
    """
    Defaults <- JSON config file <- CLI flags, validated once

    Raises:
        ConfigError: Unreadable config file or a value failing validation
    """
    merged = default_run_config(command)
    if config_path:
        from_file = load_config_file(config_path)
        from_file.pop("command", None)
        merged = deep_merge(merged, from_file)
    merged = deep_merge(merged, overrides or {})
    merged["command"] = command
    if config_path:
        merged.setdefault("paths", {})["config"] = str(config_path)
    if merged.get("seed") is not None and merged["interactive"].get("seed") is None:
        merged["interactive"]["seed"] = merged["seed"]

    try:
        return RunConfig.model_validate(merged)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first["loc"]) or None
        message = f"{field}: {first['msg']}" if field else first["msg"]
        raise ConfigError(f"Invalid configuration - {message}", field=field) from e
    except InvalidValueError as e:
        raise ConfigError(f"Invalid configuration - {e}", field=e.field) from e


settings = Settings()
