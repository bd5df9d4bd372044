import math
from typing import List, Optional, Tuple

from app.cli.schemas import (
    CodeRangeModel,
    ConsumptionModel,
    HashLabModel,
    KeyRateReportModel,
    ParamsModel,
    SweepRowModel,
    SyndromeEntryModel,
    SyndromeStatModel,
    ThresholdModel,
    WitnessModel,
)
from app.qkd.base.channel import BB84, PROTOCOLS, SIX_STATE
from app.qkd.base.codes import LinearCode
from app.qkd.base.notation import parse_code_selector
from app.qkd.errors import KeyRateError
from app.qkd.lab.hashing import HashLabResult
from app.qkd.lab.montecarlo import SyndromeStat
from app.qkd.rates.formulas import KeyRateReport
from app.qkd.rates.noise import MAX_NOISE
from app.qkd.search.optimizer import CodeRange
from app.qkd.search.thresholds import ThresholdResult

AUTO = "auto"
MAX_SWEEP_POINTS = 10_001
DEFAULT_PRECISION = 6
MIN_PRECISION = 0
MAX_PRECISION = 17
SIX_STATE_MAX_QBER = 2.0 / 3.0

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNWRITABLE = 3


class CliError(Exception):
    """Command-line failure carrying its exit status and a short detail."""

    def __init__(self, status: int, detail: str):
        super().__init__(detail)
        self.status = status
        self.detail = detail


def usage_error(detail: str) -> CliError:
    return CliError(EXIT_USAGE, detail)


def validate_protocol(protocol: str) -> str:
    if protocol not in PROTOCOLS:
        raise usage_error(f"invalid_protocol: {protocol!r}")
    return protocol


def validate_qber(protocol: str, qber: float) -> float:
    """Checks the error rate against the protocol's admissible range."""
    upper = SIX_STATE_MAX_QBER if protocol == SIX_STATE else 1.0
    if not math.isfinite(qber) or qber < 0.0 or qber > upper:
        raise usage_error(f"invalid_qber: {qber!r} outside [0, {upper:.6g}]")
    return qber


def resolve_q11(protocol: str, text: str) -> Optional[float]:
    """Resolves ``--q11``: None means minimize over the valid interval.

    The six-state channel has no free parameter, so anything other than
    ``auto`` is rejected there.
    """
    if text == AUTO:
        return None
    if protocol != BB84:
        raise usage_error("invalid_q11: q11 applies to bb84 only")
    try:
        value = float(text)
    except ValueError as exc:
        raise usage_error(f"invalid_q11: {text!r} is neither auto nor a number") from exc
    if not math.isfinite(value) or value < 0.0:
        raise usage_error(f"invalid_q11: {text!r}")
    return value


def resolve_noise_p(text: str) -> Optional[float]:
    """Resolves ``--noise-p``: None means optimize over [0, 0.5]."""
    if text == AUTO:
        return None
    try:
        value = float(text)
    except ValueError as exc:
        raise usage_error(f"invalid_noise_p: {text!r} is neither auto nor a number") from exc
    if not 0.0 <= value <= MAX_NOISE:
        raise usage_error(f"invalid_noise_p: {text!r} outside [0, {MAX_NOISE}]")
    return value


def resolve_codes(selectors: List[str]) -> List[Tuple[str, LinearCode]]:
    """Expands every ``--code`` selector, keeping command-line order."""
    codes: List[Tuple[str, LinearCode]] = []
    for selector in selectors:
        try:
            codes.extend(parse_code_selector(selector))
        except KeyRateError as exc:
            raise usage_error(str(exc)) from exc
    if not codes:
        raise usage_error("invalid_code: no code selected")
    return codes


def sweep_values(start: float, end: float, step: float) -> List[float]:
    """Inclusive error-rate grid; counts steps so float drift cannot drop the end point."""
    if not step > 0.0:
        raise usage_error(f"invalid_step: {step!r}")
    if end < start:
        raise usage_error(f"invalid_sweep: end {end!r} is below start {start!r}")
    count = int(math.floor((end - start) / step + 1e-9)) + 1
    if count > MAX_SWEEP_POINTS:
        raise usage_error(f"invalid_sweep: {count} points exceed {MAX_SWEEP_POINTS}")
    return [round(start + index * step, 12) for index in range(count)]


def validate_precision(precision: int) -> int:
    if not MIN_PRECISION <= precision <= MAX_PRECISION:
        raise usage_error(f"invalid_precision: {precision}")
    return precision


def build_report_model(report: KeyRateReport, selector: str, protocol: str, qber: float) -> KeyRateReportModel:
    """Converts a library report into its wire model."""
    entries = [
        SyndromeEntryModel(
            syndrome=str(entry.syndrome),
            q_j=entry.q_j,
            r_j=entry.r_j,
            kept=entry.kept,
            consumption=ConsumptionModel(
                bit=entry.consumption.bit,
                phase=entry.consumption.phase,
                total=entry.consumption.total,
            ),
            branches=list(entry.branches) if entry.branches is not None else None,
        )
        for entry in report.entries
    ]
    return KeyRateReportModel(
        code=selector,
        code_label=report.code_label,
        protocol=protocol,
        qber=qber,
        formula=report.formula,
        entries=entries,
        total_rate_raw=report.total_rate_raw,
        total_rate=report.total_rate,
        params=ParamsModel(q11=report.q11, noise_p=report.noise_p),
    )


def build_sweep_row(report: KeyRateReport, selector: str, qber: float) -> SweepRowModel:
    return SweepRowModel(
        qber=qber,
        code=selector,
        formula=report.formula,
        q11=report.q11,
        noise_p=report.noise_p,
        key_rate=report.total_rate,
        key_rate_raw=report.total_rate_raw,
    )


def build_threshold_model(result: ThresholdResult, limit_q: Optional[float]) -> ThresholdModel:
    witness = None
    if result.witness is not None:
        witness = WitnessModel(
            q=result.witness.q,
            n=result.witness.n,
            rate=result.witness.rate,
            log_rate=result.witness.log_rate,
        )
    return ThresholdModel(
        protocol=result.protocol,
        formula=result.formula,
        family=result.family,
        max_n=result.max_n,
        resolution=result.resolution,
        closed_form=result.closed_form,
        threshold_q=result.threshold_q,
        limit_q=limit_q,
        witness=witness,
        violations=list(result.violations),
    )


def build_range_model(code_range: CodeRange) -> CodeRangeModel:
    return CodeRangeModel(q_start=code_range.q_start, q_end=code_range.q_end, code=code_range.code_label)


def build_stat_model(stat: SyndromeStat) -> SyndromeStatModel:
    return SyndromeStatModel(
        syndrome=str(stat.syndrome),
        empirical=stat.empirical,
        analytic=stat.analytic,
        z_score=stat.z_score,
    )


def build_hash_model(result: HashLabResult, tag_length: Optional[int]) -> HashLabModel:
    return HashLabModel(
        n=result.n,
        k=result.k,
        error_set_size=result.error_set_size,
        trials=result.trials,
        failures=result.failures,
        empirical_failure=result.empirical_failure,
        bound=result.bound,
        within_bound=result.within_bound,
        required_tag_length=tag_length,
    )
