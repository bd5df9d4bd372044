"""Tolerable error rates.

The zero-syndrome rate of the [n 1 n] repetition code has a closed form
that stays cheap for thousands of qubits; everything else goes through the
generic rate pipeline. Thresholds are found by scanning q for a positive
witness and bisecting the last sign change.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.special import entr, log_expit

from app.qkd.base.channel import BB84, SIX_STATE, BellDiagonal, conditional_phase, from_bb84, six_state
from app.qkd.base.codes import ENUMERATION_GUARD, LinearCode, make_full, make_repetition, make_single_parity
from app.qkd.errors import ParameterError
from app.qkd.rates.entropy import binary_entropy
from app.qkd.rates.formulas import FORMULAS, NO_OTP
from app.qkd.search.optimizer import evaluate_rate

logger = logging.getLogger(__name__)

REPETITION = "rep"
SINGLE_PARITY = "spc"
FULL = "full"
FAMILIES = (REPETITION, SINGLE_PARITY, FULL)

CLOSED_FORM_MAX_N = 10_000
MIN_RESOLUTION = 1e-5
SCAN_POINTS = 26
SCAN_MAX_Q = 0.5
SERIES_CUTOFF = 0.1
SERIES_TERMS = 12
LN2 = math.log(2.0)


@dataclass(frozen=True)
class Witness:
    """A positive-rate point: error rate, block length and rate.

    ``log_rate`` is the natural log of the rate, set when the rate itself
    underflows.
    """

    q: float
    n: int
    rate: float
    log_rate: Optional[float] = None


@dataclass(frozen=True)
class ThresholdResult:
    """Largest error rate (to ``resolution``) with a positive witness.

    ``violations`` lists scanned error rates with no positive witness that
    lie below a positive one, i.e. places where positivity is not a left
    interval.
    """

    protocol: str
    formula: str
    family: str
    max_n: int
    resolution: float
    closed_form: bool
    threshold_q: float
    witness: Optional[Witness]
    violations: Tuple[float, ...] = field(default_factory=tuple)


def _log_gap(log_abs_t: np.ndarray) -> np.ndarray:
    """ln(1 - h((1 + t) / 2)) given ln|t|, accurate for tiny t."""
    log_abs_t = np.asarray(log_abs_t, dtype=np.float64)
    result = np.full(log_abs_t.shape, -np.inf)
    small = log_abs_t < math.log(SERIES_CUTOFF)
    if np.any(small):
        t2 = np.exp(2.0 * log_abs_t[small])
        series = np.zeros_like(t2)
        for m in range(SERIES_TERMS, 0, -1):
            series = 1.0 / (m * (2 * m - 1)) + t2 * series
        result[small] = 2.0 * log_abs_t[small] + np.log(series) - math.log(2.0 * LN2)
    large = ~small & np.isfinite(log_abs_t)
    if np.any(large):
        half = (1.0 + np.exp(log_abs_t[large])) / 2.0
        result[large] = np.log(np.maximum(1.0 - (entr(half) + entr(1.0 - half)) / LN2, 0.0))
    return result


def _gap(log_abs_t: np.ndarray) -> np.ndarray:
    return np.exp(_log_gap(log_abs_t))


def _log_binary_entropy(log_w: np.ndarray) -> np.ndarray:
    """ln h(w) given ln w, for w <= 1/2."""
    log_w = np.asarray(log_w, dtype=np.float64)
    result = np.full(log_w.shape, -np.inf)
    tiny = np.isfinite(log_w) & (log_w < -30.0)
    # h(w) ~ w (1 - ln w) / ln 2 when w is tiny
    result[tiny] = log_w[tiny] + np.log1p(-log_w[tiny]) - math.log(LN2)
    regular = np.isfinite(log_w) & ~tiny
    w = np.exp(log_w[regular])
    result[regular] = np.log((entr(w) + entr(1.0 - w)) / LN2)
    return result


def _repetition_terms(n: np.ndarray, channel: BellDiagonal):
    """Log weights and log |t| of the two zero-syndrome branches."""
    q = channel.delta_b
    cond = conditional_phase(channel)
    with np.errstate(divide="ignore"):
        log_x = math.log(q) - math.log1p(-q) if 0.0 < q < 1.0 else (-math.inf if q == 0.0 else math.inf)
        exponent = n * log_x
        log_w1 = log_expit(exponent)
        log_w0 = log_expit(-exponent)
        log_t0 = n * np.log(abs(1.0 - 2.0 * cond.delta_p0))
        log_t1 = n * np.log(abs(1.0 - 2.0 * cond.delta_p1))
    return log_w0, log_w1, log_t0, log_t1


def _check_n(n) -> np.ndarray:
    values = np.atleast_1d(np.asarray(n, dtype=np.float64))
    if np.any(values < 2) or np.any(values != np.floor(values)):
        raise ParameterError(f"invalid_length: repetition closed form needs integer n >= 2, got {n!r}")
    return values


def repetition_r0_closed_form(n: int, channel: BellDiagonal) -> float:
    """Net zero-syndrome gain R^0 = n r^0 of the [n 1 n] code without OTP.

    R^0 = w0 (1 - h((1+t0)/2)) + w1 (1 - h((1+t1)/2)) - h(w1) where w1 is
    the weight of the all-ones pattern in the zero coset and
    t_a = (1 - 2 delta_pa)^n.

    Args:
        n: Block length, at least 2.
        channel: Bell-diagonal channel.

    Returns:
        R^0 in bits per group; may underflow to 0 for very large n, see
        repetition_r0_log_margin.
    """
    log_w0, log_w1, log_t0, log_t1 = _repetition_terms(_check_n(n), channel)
    gain = np.exp(log_w0) * _gap(log_t0) + np.exp(log_w1) * _gap(log_t1)
    cost = np.exp(_log_binary_entropy(np.minimum(log_w1, log_w0)))
    return float((gain - cost)[0])


def repetition_r0_log_margin(n, channel: BellDiagonal) -> Tuple[np.ndarray, np.ndarray]:
    """Natural logs of the positive and negative parts of R^0.

    R^0 > 0 exactly when ``log_gain > log_cost``; both stay finite where
    the rate itself underflows.

    Args:
        n: Block length or array of block lengths.
        channel: Bell-diagonal channel.

    Returns:
        (log_gain, log_cost), arrays shaped like ``n``.
    """
    log_w0, log_w1, log_t0, log_t1 = _repetition_terms(_check_n(n), channel)
    log_gain = np.logaddexp(log_w0 + _log_gap(log_t0), log_w1 + _log_gap(log_t1))
    log_cost = _log_binary_entropy(np.minimum(log_w1, log_w0))
    return log_gain, log_cost


def repetition_r0_lower_bound(n: int, q: float, q11: float) -> float:
    """Concavity lower bound on R^0 for BB84 with delta_b = delta_p = q.

    Replaces the branch average of phase-syndrome entropies by the entropy
    of the averaged branch probability.
    """
    _check_n(n)
    if not 0.0 <= q < 1.0:
        raise ParameterError(f"invalid_qber: {q!r}")
    from_bb84(q, q, q11)  # rejects q11 outside its interval
    x_n = (q / (1.0 - q)) ** n
    w1 = x_n / (1.0 + x_n)
    t0 = abs((1.0 - 3.0 * q + 2.0 * q11) / (1.0 - q)) ** n
    t1 = abs(q - 2.0 * q11) ** n / (1.0 - q) ** n
    mean = min(0.5 + (t0 + t1) / (2.0 * (1.0 + x_n)), 1.0)
    return 1.0 - binary_entropy(w1) - binary_entropy(mean)


def _smallest_root(a: float, b: float, c: float) -> float:
    disc = math.sqrt(b * b - 4.0 * a * c)
    # numerically stable form of (-b - disc) / (2a) for b < 0
    return (2.0 * c) / (-b + disc)


def analytic_threshold_bb84() -> float:
    """Limit threshold of repetition codes under BB84: (1 - 2x)^2 = x, q = x/(1+x)."""
    x = _smallest_root(4.0, -5.0, 1.0)
    return x / (1.0 + x)


def analytic_threshold_six_state() -> float:
    """Limit threshold under the six-state protocol: (1 - x)^2 = x, q = x/(1+x)."""
    x = _smallest_root(1.0, -3.0, 1.0)
    return x / (1.0 + x)


def _closed_form_channel(protocol: str, q: float) -> BellDiagonal:
    if protocol == SIX_STATE:
        return six_state(q)
    return from_bb84(q, q, 0.0)


def _closed_form_witness(protocol: str, max_n: int) -> Callable[[float], Optional[Witness]]:
    lengths = np.arange(2, max_n + 1, dtype=np.float64)

    def witness(q: float) -> Optional[Witness]:
        channel = _closed_form_channel(protocol, q)
        log_gain, log_cost = repetition_r0_log_margin(lengths, channel)
        positive = log_gain > log_cost
        if not np.any(positive):
            return None
        with np.errstate(divide="ignore", invalid="ignore"):
            log_rate = log_gain + np.log1p(-np.exp(log_cost - log_gain))
        log_rate = np.where(positive, log_rate, -np.inf)
        best = int(np.argmax(log_rate))
        n = int(lengths[best])
        return Witness(q, n, repetition_r0_closed_form(n, channel), float(log_rate[best]))

    return witness


def family_codes(family: str, max_n: int) -> List[LinearCode]:
    if family == REPETITION:
        return [make_repetition(n) for n in range(2, max_n + 1)]
    if family == SINGLE_PARITY:
        return [make_single_parity(m) for m in range(2, max_n + 1)]
    if family == FULL:
        return [make_full(1)]
    raise ParameterError(f"invalid_family: {family!r}")


def _generic_witness(protocol: str, formula: str, family: str, max_n: int) -> Callable[[float], Optional[Witness]]:
    codes = family_codes(family, max_n)

    def witness(q: float) -> Optional[Witness]:
        for code in codes:
            rate = evaluate_rate(code, protocol, q, formula).total_rate_raw
            if rate > 0.0:
                return Witness(q, code.n, rate)
        return None

    return witness


def numeric_threshold(
    protocol: str,
    formula: str,
    family: str,
    max_n: int,
    resolution: float = 1e-4,
    closed_form: bool = False,
) -> ThresholdResult:
    """Bisects for the largest error rate at which some family member has a positive rate.

    A coarse scan over [0, 0.5] brackets the last sign change and reports
    non-monotone regions; bisection then refines the bracket to
    ``resolution``. BB84 rates are minimized over q11, except in the closed
    form, which fixes q11 = 0.

    Args:
        protocol: "bb84" or "six-state".
        formula: One of FORMULAS; the closed form requires "no-otp".
        family: "rep", "spc" or "full".
        max_n: Largest block length searched.
        resolution: Bisection resolution, at least 1e-5.
        closed_form: Use the repetition closed form instead of enumeration.

    Returns:
        The ThresholdResult; threshold 0 without a witness when no rate is positive.
    """
    if protocol not in (BB84, SIX_STATE):
        raise ParameterError(f"invalid_protocol: {protocol!r}")
    if resolution < MIN_RESOLUTION:
        raise ParameterError(f"invalid_resolution: {resolution!r} below {MIN_RESOLUTION}")
    if formula not in FORMULAS:
        raise ParameterError(f"invalid_formula: {formula!r}")
    if closed_form:
        if family != REPETITION or formula != NO_OTP:
            raise ParameterError("invalid_closed_form: only the repetition family with no-otp has a closed form")
        if not 2 <= max_n <= CLOSED_FORM_MAX_N:
            raise ParameterError(f"invalid_max_n: closed form needs 2 <= max_n <= {CLOSED_FORM_MAX_N}")
        witness_at = _closed_form_witness(protocol, max_n)
    else:
        if family != FULL and not 2 <= max_n <= ENUMERATION_GUARD:
            raise ParameterError(f"invalid_max_n: enumeration needs 2 <= max_n <= {ENUMERATION_GUARD}")
        witness_at = _generic_witness(protocol, formula, family, max_n)

    grid = np.linspace(0.0, SCAN_MAX_Q, SCAN_POINTS)
    scan = [witness_at(float(q)) for q in grid]
    positive = [w is not None for w in scan]
    if not any(positive):
        logger.info("no positive rate for %s %s %s", protocol, formula, family)
        return ThresholdResult(protocol, formula, family, max_n, resolution, closed_form, 0.0, None)
    last = max(i for i, flag in enumerate(positive) if flag)
    violations = tuple(float(grid[i]) for i in range(last) if not positive[i])
    if violations:
        logger.warning("positive-rate region is not a left interval: %s", violations)

    best = scan[last]
    low = float(grid[last])
    high = float(grid[last + 1]) if last + 1 < len(grid) else low
    while high - low > resolution:
        middle = 0.5 * (low + high)
        found = witness_at(middle)
        logger.debug("bisect q=%.6f positive=%s", middle, found is not None)
        if found is None:
            high = middle
        else:
            low, best = middle, found
    logger.info("threshold %s %s %s: q=%.6f (n=%d)", protocol, formula, family, low, best.n)
    return ThresholdResult(protocol, formula, family, max_n, resolution, closed_form, low, best, violations)
