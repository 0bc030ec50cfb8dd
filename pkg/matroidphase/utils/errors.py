"""
Domain hata sınıfları
"""

from typing import Optional, Sequence


class MatroidPhaseError(Exception):
    """Tüm paket hatalarının kökü"""


class FieldError(MatroidPhaseError, ValueError):
    pass


class FieldMismatchError(FieldError):
    pass


class FieldDivisionError(MatroidPhaseError, ZeroDivisionError):
    pass


class DimensionError(MatroidPhaseError, ValueError):
    pass


class UnknownLabelError(MatroidPhaseError, KeyError):
    pass


class SingularMatrixError(MatroidPhaseError, ArithmeticError):
    """Tersi alınamayan matris; rank bilgisini taşır"""

    def __init__(self, message: str, rank: int):
        super().__init__(message)
        self.rank = rank


class MatrixFormatError(MatroidPhaseError, ValueError):
    pass


class DistributionError(MatroidPhaseError, ValueError):
    pass


class OutOfRangeError(MatroidPhaseError, ValueError):
    pass


class ThresholdError(MatroidPhaseError, ArithmeticError):
    pass


class InstanceTooLargeError(MatroidPhaseError, ValueError):
    pass


class TargetError(MatroidPhaseError, ValueError):
    pass


class HypothesisError(MatroidPhaseError, ValueError):
    """İnşa hipotezi sağlanmadı; eksik vektörü taşır"""

    def __init__(self, message: str, missing_vector: Optional[Sequence[int]] = None):
        super().__init__(message)
        self.missing_vector = tuple(missing_vector) if missing_vector is not None else None


class PipelineError(MatroidPhaseError, RuntimeError):
    def __init__(self, message: str, code: str):
        super().__init__(message)
        self.code = code


class DegreeSequenceError(MatroidPhaseError, ValueError):
    pass
