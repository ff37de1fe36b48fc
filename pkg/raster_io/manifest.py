"""Dataset manifest loading"""

import json
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from core.exceptions import InvalidValueError, SchemaError
from core.models import DatasetManifest

PathLike = Union[str, Path]

_PATH_FIELDS = (
    "gt_labels_path",
    "prediction_stack_path",
    "semantic_gt_path",
    "semantic_prob_path",
    "guidance_path",
)


def load_manifest(path: PathLike) -> DatasetManifest:
    """
    Load and validate a manifest JSON file

    Args:
        path: Manifest file; relative sample paths resolve against its directory

    Returns:
        Validated manifest with absolute paths
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except UnicodeDecodeError as e:
        raise SchemaError(f"Manifest is not UTF-8 text: byte {e.start}: {e.reason}", str(path)) from e
    except json.JSONDecodeError as e:
        raise SchemaError(f"Manifest is not valid JSON: {e}", str(path)) from e

    if not isinstance(raw, dict):
        raise SchemaError("Manifest must be a JSON object", str(path))

    base = path.parent
    for sample in raw.get("samples") or []:
        if not isinstance(sample, dict):
            continue
        for key in _PATH_FIELDS:
            value = sample.get(key)
            if isinstance(value, str) and not Path(value).is_absolute():
                sample[key] = str((base / value).resolve())

    try:
        return DatasetManifest.model_validate(raw)
    except InvalidValueError as e:
        raise SchemaError(str(e), str(path), e.field) from e
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first["loc"])
        raise SchemaError(f"{field}: {first['msg']}", str(path), field) from e


def save_manifest(manifest: DatasetManifest, path: PathLike) -> None:
    Path(path).write_text(manifest.model_dump_json(indent=2, exclude_none=True), encoding="utf-8")
