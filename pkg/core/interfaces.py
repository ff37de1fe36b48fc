"""Abstract base classes for Histoseg components"""

from abc import ABC, abstractmethod
from typing import Generic, Optional, Sequence, TypeVar

import numpy as np

InputT = TypeVar("InputT")
OutputT = TypeVar("OutputT")


class Stage(ABC, Generic[InputT, OutputT]):
    """Abstract base class for all command stages"""

    @property
    @abstractmethod
    def name(self) -> str:
        """Human-readable stage name"""
        pass

    @property
    @abstractmethod
    def stage_number(self) -> int:
        """Stage number (0-8)"""
        pass

    @abstractmethod
    async def execute(self, input_data: InputT) -> OutputT:
        """Execute the stage"""
        pass

    @abstractmethod
    def validate_input(self, input_data: InputT) -> bool:
        """Validate input before processing"""
        pass


class RasterParser(ABC):
    """Abstract base class for raster file parsers"""

    @property
    @abstractmethod
    def magic(self) -> bytes:
        """Leading bytes identifying the format"""
        pass

    @abstractmethod
    def parse(self, data: bytes, path: Optional[str] = None) -> np.ndarray:
        """Decode file contents into an array"""
        pass

    @abstractmethod
    def serialize(self, array: np.ndarray) -> bytes:
        """Encode an array into file contents"""
        pass


class Predictor(ABC):
    """Promptable segmenter bound to one image"""

    @property
    @abstractmethod
    def name(self) -> str:
        pass

    @property
    @abstractmethod
    def shape(self) -> tuple[int, int]:
        """(height, width) of the bound image"""
        pass

    @property
    def capabilities(self) -> dict:
        """Prompt kinds this predictor takes into account"""
        return {
            "positive_point": True,
            "negative_point": False,
            "box": True,
            "mask": False,
        }

    @abstractmethod
    def predict(
        self,
        prompts: Sequence["Prompt"],
        prior_mask: Optional[np.ndarray] = None,
    ) -> "Prediction":
        """Return (mask, confidence) for the prompts"""
        pass


class StackSource(ABC):
    """Random-access provider of prediction-stack windows"""

    @property
    @abstractmethod
    def width(self) -> int:
        pass

    @property
    @abstractmethod
    def height(self) -> int:
        pass

    @abstractmethod
    def read(self, box: "BoundingBox", counted: Optional["BoundingBox"] = None) -> "PredictionStack":
        """Return the stack cropped to `box`; `counted` limits value accounting to a sub-rect"""
        pass
