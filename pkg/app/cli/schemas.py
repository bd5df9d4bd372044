import math
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer


class SweepRange(BaseModel):
    """Error-rate sweep start, end (inclusive) and step."""

    start: float = Field(ge=0.0, le=1.0)
    end: float = Field(ge=0.0, le=1.0)
    step: float = Field(gt=0.0)


class RunSpec(BaseModel):
    """Fully resolved command line, echoed into every report header."""

    model_config = ConfigDict(extra="forbid")

    subcommand: str
    protocol: Optional[str] = None
    qber: Optional[float] = None
    q11: Optional[str] = None
    noise_p: Optional[str] = None
    codes: Optional[List[str]] = None
    formulas: Optional[List[str]] = None
    variant: Optional[str] = None
    sweep: Optional[SweepRange] = None
    family: Optional[str] = None
    max_n: Optional[int] = None
    resolution: Optional[float] = None
    closed_form: Optional[bool] = None
    samples: Optional[int] = None
    shards: Optional[int] = None
    n: Optional[int] = None
    k: Optional[int] = None
    weight: Optional[int] = None
    patterns: Optional[List[str]] = None
    trials: Optional[int] = None
    failure: Optional[float] = None
    format: str = "text"
    seed: int = 42
    precision: int = 6
    out: Optional[str] = None


class ConsumptionModel(BaseModel):
    """Key consumed per group, in bits."""

    model_config = ConfigDict(populate_by_name=True)

    bit: float = Field(alias="I_b_j")
    phase: float = Field(alias="avg_I_p")
    total: float = Field(alias="R_j")


class SyndromeEntryModel(BaseModel):
    """One bit syndrome of a key-rate report."""

    syndrome: str
    q_j: float
    r_j: float
    kept: bool
    consumption: ConsumptionModel
    branches: Optional[List[float]] = None


class ParamsModel(BaseModel):
    q11: Optional[float] = None
    noise_p: Optional[float] = None


class KeyRateReportModel(BaseModel):
    """Key-rate report of one code and formula at one error rate."""

    code: str
    code_label: str
    protocol: str
    qber: float
    formula: str
    entries: List[SyndromeEntryModel]
    total_rate_raw: float
    total_rate: float
    params: ParamsModel


class SweepRowModel(BaseModel):
    """One row of the sweep table."""

    qber: float
    code: str
    formula: str
    q11: Optional[float] = None
    noise_p: Optional[float] = None
    key_rate: float
    key_rate_raw: float


class WitnessModel(BaseModel):
    q: float
    n: int
    rate: float
    log_rate: Optional[float] = None


class ThresholdModel(BaseModel):
    """Threshold search result, with the analytic limit when one exists."""

    protocol: str
    formula: str
    family: str
    max_n: int
    resolution: float
    closed_form: bool
    threshold_q: float
    limit_q: Optional[float] = None
    witness: Optional[WitnessModel] = None
    violations: List[float] = []


class CodeRangeModel(BaseModel):
    q_start: float
    q_end: float
    code: str


class SyndromeStatModel(BaseModel):
    syndrome: str
    empirical: float
    analytic: float
    z_score: float

    @field_serializer("z_score")
    def _finite_z_score(self, value: float) -> Optional[float]:
        # zero-variance syndromes off their exact q_j have no finite z
        return value if math.isfinite(value) else None


class HashLabModel(BaseModel):
    """Hash identification experiment outcome."""

    n: int
    k: int
    error_set_size: int
    trials: int
    failures: int
    empirical_failure: float
    bound: float
    within_bound: bool
    required_tag_length: Optional[int] = None
