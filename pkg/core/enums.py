"""Core enumerations for Histoseg"""

from enum import Enum


class LabelFormat(str, Enum):
    """On-disk label image formats"""
    PGM = "pgm"
    LBL1 = "lbl1"


class ReportFormat(str, Enum):
    """Report serialisation"""
    CSV = "csv"
    JSON = "json"


class StartKind(str, Enum):
    """Initial prompt of an interactive run"""
    POINT = "point"
    BOX = "box"


class StartSelection(str, Enum):
    """Which start kinds an interactive report runs"""
    POINT = "point"
    BOX = "box"
    BOTH = "both"

    def kinds(self) -> list[StartKind]:
        if self is StartSelection.BOTH:
            return [StartKind.POINT, StartKind.BOX]
        return [StartKind(self.value)]


class SamplingMode(str, Enum):
    """How prompt points are picked inside a region"""
    INTERIOR = "interior"
    RANDOM = "random"


class PredictorName(str, Enum):
    """Registered predictor implementations"""
    ORACLE = "oracle"
    REGIONGROW = "regiongrow"
    FILE = "file"


class Split(str, Enum):
    """Dataset split tag"""
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


class ResourceStage(str, Enum):
    """Stages timed by the whole-slide resource report"""
    LOAD = "load"
    SEGMENT = "segment"
    STITCH = "stitch"
    WRITE = "write"
