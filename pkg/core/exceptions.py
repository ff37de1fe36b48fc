"""Custom exceptions for Histoseg"""

from typing import Optional


class HistosegError(Exception):
    """Base exception for all Histoseg errors"""
    pass


class ConfigError(HistosegError):
    """Invalid run configuration or command usage"""
    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class DataError(HistosegError):
    """Input data cannot be used as given"""
    pass


class FormatError(DataError):
    """Error decoding a file or an in-memory interchange format"""
    def __init__(self, message: str, path: Optional[str] = None, offset: Optional[int] = None):
        location = []
        if path:
            location.append(str(path))
        if offset is not None:
            location.append(f"byte {offset}")
        super().__init__(f"{message} ({', '.join(location)})" if location else message)
        self.path = path
        self.offset = offset


class BadMagicError(FormatError):
    """File does not start with the expected magic bytes"""
    pass


class TruncatedPayloadError(FormatError):
    """File ends before the declared payload"""
    pass


class DimensionOverflowError(FormatError):
    """Declared dimensions are zero, unparsable or too large"""
    pass


class IdOverflowError(FormatError):
    """Instance ids do not fit the requested file format"""
    pass


class SchemaError(DataError):
    """Manifest or report does not follow its schema"""
    def __init__(self, message: str, path: Optional[str] = None, field: Optional[str] = None):
        super().__init__(message)
        self.path = path
        self.field = field


class DimensionMismatchError(DataError):
    """Two rasters that must align have different shapes"""
    def __init__(self, shape_a: tuple, shape_b: tuple):
        super().__init__(f"Dimension mismatch: {tuple(shape_a)} vs {tuple(shape_b)}")
        self.shape_a = tuple(shape_a)
        self.shape_b = tuple(shape_b)


class EmptyObjectError(DataError):
    """Operation needs at least one set pixel"""
    pass


class InvalidValueError(DataError):
    """Value rejected when constructing a domain type"""
    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class PreconditionError(DataError):
    """Inputs violate an operation's precondition"""
    pass


class UnsupportedThresholdError(DataError):
    """IoU threshold below 0.5, where greedy matching is not exact"""
    def __init__(self, threshold: float):
        super().__init__(f"IoU threshold {threshold} is below 0.5")
        self.threshold = threshold


class PredictorError(HistosegError):
    """A predictor failed to answer a prompt"""
    def __init__(self, message: str, predictor: Optional[str] = None):
        super().__init__(message)
        self.predictor = predictor


class StageError(HistosegError):
    """Error in a specific stage"""
    def __init__(self, stage: int, message: str):
        super().__init__(f"Stage {stage}: {message}")
        self.stage = stage
        self.message = message


class PipelineError(HistosegError):
    """Error in pipeline execution"""
    def __init__(self, message: str, stage: int = None):
        super().__init__(message)
        self.stage = stage


class PartialFailureError(HistosegError):
    """Some samples or tiles failed; the report lists them"""
    def __init__(self, message: str, failures: Optional[list] = None):
        super().__init__(message)
        self.failures = failures or []
