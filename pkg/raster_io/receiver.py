"""Label image reception: format sniffing, loading and saving"""

import logging
from pathlib import Path
from typing import Union

from core.enums import LabelFormat
from core.exceptions import BadMagicError
from core.models import LabelImage, SemanticLabelImage
from .parsers import LBL1Parser, PGMParser, RasterParser

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

LABEL_EXTENSIONS = {
    LabelFormat.LBL1: ".lbl",
    LabelFormat.PGM: ".pgm",
}


class LabelReceiver:
    """Pick a parser from the leading bytes of a label file"""

    def __init__(self):
        self.parsers: dict[LabelFormat, RasterParser] = {
            LabelFormat.PGM: PGMParser(),
            LabelFormat.LBL1: LBL1Parser(),
        }

    def sniff(self, data: bytes, path: str) -> RasterParser:
        for parser in self.parsers.values():
            if data[:len(parser.magic)] == parser.magic:
                return parser
        supported = ", ".join(repr(p.magic) for p in self.parsers.values())
        raise BadMagicError(f"Unknown label format, supported magics: {supported}", path, 0)

    def load(self, path: PathLike) -> LabelImage:
        data = Path(path).read_bytes()
        parser = self.sniff(data, str(path))
        return LabelImage(parser.parse(data, str(path)))

    def save(self, labels: LabelImage, path: PathLike, fmt: LabelFormat = LabelFormat.LBL1) -> None:
        payload = self.parsers[LabelFormat(fmt)].serialize(labels.labels)
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_bytes(payload)
        logger.debug("Wrote %s label image %s", LabelFormat(fmt).value, path)


_receiver = LabelReceiver()


def load_label_image(path: PathLike) -> LabelImage:
    """Load a PGM (P5) or LBL1 label image"""
    return _receiver.load(path)


def save_label_image(labels: LabelImage, path: PathLike, fmt: LabelFormat = LabelFormat.LBL1) -> None:
    """Save a label image; PGM only holds ids up to 65535"""
    _receiver.save(labels, path, fmt)


def load_semantic_labels(path: PathLike, num_classes: int) -> SemanticLabelImage:
    """Class-id maps reuse the label image formats"""
    return SemanticLabelImage(load_label_image(path).labels.astype("int64"), num_classes)


def label_path(directory: PathLike, sample_id: str, fmt: LabelFormat = LabelFormat.LBL1) -> Path:
    return Path(directory) / f"{sample_id}{LABEL_EXTENSIONS[LabelFormat(fmt)]}"


def find_label_file(directory: PathLike, sample_id: str) -> Path:
    """Locate `<sample_id>.lbl` or `<sample_id>.pgm` in a prediction directory"""
    for fmt in LabelFormat:
        candidate = label_path(directory, sample_id, fmt)
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"No label file for sample '{sample_id}' in {directory}")
