from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from matroidphase.config import settings

FinderMode = Literal["random", "brute"]
DistributionKind = Literal["uniform", "all-ones", "atoms"]

CSV_COLUMNS = (
    "k",
    "q",
    "n",
    "m",
    "ratio",
    "seed",
    "rank",
    "full_rank",
    "core_rows",
    "core_cols",
    "minor_found",
    "failure_code",
    "time_ms",
)


class ThresholdReport(BaseModel):
    k: int
    d: Optional[float] = None
    rho: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    d_star: float
    d_k: float
    ratio: float
    d_star_bracket: Tuple[float, float]
    d_k_bracket: Tuple[float, float]
    core_row_frac: Optional[float] = None
    core_col_frac: Optional[float] = None
    pi: Optional[float] = None
    rank_limit: Optional[float] = None
    red_fraction: Optional[float] = None
    mu: Optional[float] = None
    beta: Optional[float] = None
    tolerances: Dict[str, float] = {}

    @model_validator(mode="after")
    def _ordered(self):
        if self.d_star > self.d_k:
            raise ValueError(f"d_star={self.d_star} > d_k={self.d_k}")
        return self


class RankLimitResult(BaseModel):
    k: int
    d: float
    limit: float
    alpha_star: float = Field(ge=0.0, le=1.0)


class AtomSpec(BaseModel):
    values: List[int]
    p: float = Field(ge=0.0)


class DistributionSpec(BaseModel):
    kind: DistributionKind = "uniform"
    atoms: List[AtomSpec] = []


class SweepConfig(BaseModel):
    p: int = 2
    e: int = Field(default=1, ge=1)
    k: int = Field(default=3, ge=2)
    n: int = Field(ge=1)
    ratios: List[float] = []
    trials: int = Field(default=1, ge=1)
    target: str = "u23"
    distribution: DistributionSpec = DistributionSpec()
    finder: FinderMode = "random"
    budget: int = Field(default_factory=lambda: settings.FINDER_BUDGET, ge=1)
    master_seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)
    output: Optional[str] = None
    diagnostics: bool = False
    record_time: bool = False

    @field_validator("ratios")
    @classmethod
    def _nonnegative(cls, ratios: List[float]) -> List[float]:
        for r in ratios:
            if r < 0:
                raise ValueError(f"oran negatif olamaz: {r}")
        return ratios

    @model_validator(mode="after")
    def _n_at_least_k(self):
        if self.n < self.k:
            raise ValueError(f"n={self.n} < k={self.k}")
        return self

    @property
    def q(self) -> int:
        return self.p**self.e


class WitnessSummary(BaseModel):
    contract_set: List[Any]
    delete_size: int
    embedding: Dict[str, Any]
    scalars: List[int] = []
    verified: Optional[bool] = None


class TrialRecord(BaseModel):
    k: int
    q: int
    n: int
    m: int
    ratio: float
    seed: int
    rank: int
    full_rank: bool
    core_rows: int
    core_cols: int
    minor_found: bool
    failure_code: str = "none"
    time_ms: int = 0
    ratio_index: int = 0
    trial_index: int = 0
    witness: Optional[WitnessSummary] = None
    diagnostics: Optional[Dict[str, Any]] = None

    @model_validator(mode="after")
    def _consistent(self):
        if self.rank > min(self.n, self.m):
            raise ValueError(f"rank={self.rank} > min(n, m)")
        if self.core_rows > self.n or self.core_cols > self.m:
            raise ValueError("çekirdek boyutu matristen büyük")
        if self.full_rank != (self.rank == self.m):
            raise ValueError("full_rank bayrağı rank == m ile uyuşmuyor")
        return self

    def csv_row(self) -> List[str]:
        row = []
        for name in CSV_COLUMNS:
            value = getattr(self, name)
            if isinstance(value, bool):
                value = "true" if value else "false"
            row.append(str(value))
        return row


class SweepSummaryRow(BaseModel):
    ratio: float
    trials: int
    found_freq: float
    found_stderr: float
    full_rank_freq: float
    mean_rank_frac: float
    mean_core_row_frac: float
    mean_core_col_frac: float
    predicted_rank_limit: float


# --- HTTP ---


class MatrixUploadResponse(BaseModel):
    mat_id: str
    q: int
    rows: int
    cols: int
    nnz: int


class PeelResponse(BaseModel):
    mat_id: str
    core_rows: int
    core_cols: int
    peeled_cols: int
    rank: int
    row_fraction: float
    col_fraction: float


class FindMinorRequest(BaseModel):
    mat_id: str
    target: str = "u23"
    mode: FinderMode = "random"
    budget: int = Field(default_factory=lambda: settings.FINDER_BUDGET, ge=1, le=100_000)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)


class FindMinorResponse(BaseModel):
    mat_id: str
    target: str
    found: bool
    failure_code: str
    attempts: int
    witness: Optional[WitnessSummary] = None


class HealthResponse(BaseModel):
    status: str
    version: str
    matrices: int
