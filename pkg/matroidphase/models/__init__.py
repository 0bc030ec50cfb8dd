from matroidphase.models.schemas import (
    CSV_COLUMNS,
    DistributionSpec,
    FindMinorRequest,
    FindMinorResponse,
    HealthResponse,
    MatrixUploadResponse,
    PeelResponse,
    RankLimitResult,
    SweepConfig,
    SweepSummaryRow,
    ThresholdReport,
    TrialRecord,
    WitnessSummary,
)

__all__ = [
    "CSV_COLUMNS",
    "DistributionSpec",
    "FindMinorRequest",
    "FindMinorResponse",
    "HealthResponse",
    "MatrixUploadResponse",
    "PeelResponse",
    "RankLimitResult",
    "SweepConfig",
    "SweepSummaryRow",
    "ThresholdReport",
    "TrialRecord",
    "WitnessSummary",
]
