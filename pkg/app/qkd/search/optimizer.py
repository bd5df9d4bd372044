import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from app.qkd.base.channel import BB84, PROTOCOLS, SIX_STATE, from_bb84, q11_interval, six_state
from app.qkd.base.codes import LinearCode
from app.qkd.base.scalar import grid_then_refine
from app.qkd.errors import ParameterError
from app.qkd.rates.distribution import syndrome_distribution
from app.qkd.rates.formulas import KeyRateReport, compute_rate
from app.qkd.rates.noise import (
    MAX_NOISE,
    NOISE_GRID_POINTS,
    NOISE_TOLERANCE,
    optimize_noise,
    rate_adding_noise,
)

logger = logging.getLogger(__name__)

Q11_GRID_POINTS = 201
Q11_TOLERANCE = 1e-6
JOINT_Q11_POINTS = 41
CROSSOVER_XTOL = 1e-5
CROSSOVER_GRID_POINTS = 25


@dataclass(frozen=True, eq=False)
class OptimizationOutcome:
    """Result of a one-parameter search.

    Args:
        objective: Human-readable tag: formula, code and protocol.
        q11: Minimizing free parameter, when one was searched.
        noise_p: Maximizing noise weight, when one was searched.
        value: Raw total rate at the reported parameters.
        report: Report re-evaluated at the reported parameters.
        grid: Scanned parameter values.
        values: Objective on the grid.
    """

    objective: str
    q11: Optional[float]
    noise_p: Optional[float]
    value: float
    report: KeyRateReport
    grid: np.ndarray
    values: np.ndarray


class CodeRange(NamedTuple):
    """A run of error rates sharing the same best code."""

    q_start: float
    q_end: float
    code_label: str


def _rate_at(code: LinearCode, delta_b: float, delta_p: float, q11: float, formula: str) -> KeyRateReport:
    dist = syndrome_distribution(code, from_bb84(delta_b, delta_p, q11), store_tables=False)
    return compute_rate(dist, formula).with_params(q11=q11)


def minimize_over_q11(code: LinearCode, delta_b: float, delta_p: float, formula: str) -> OptimizationOutcome:
    """Worst-case BB84 rate over the free parameter q11.

    A 201-point grid over the valid interval is refined by golden-section
    search to width 1e-6. No convexity in q11 is assumed.

    Args:
        code: Code to evaluate.
        delta_b: Bit error rate.
        delta_p: Phase error rate.
        formula: One of FORMULAS.

    Returns:
        The minimizing q11 and the report evaluated there.
    """
    low, high = q11_interval(delta_b, delta_p)
    search = grid_then_refine(
        lambda q11: _rate_at(code, delta_b, delta_p, q11, formula).total_rate_raw,
        low,
        high,
        Q11_GRID_POINTS,
        Q11_TOLERANCE,
    )
    q11 = min(max(search.x, low), high)
    report = _rate_at(code, delta_b, delta_p, q11, formula)
    logger.debug("q11 minimum for %s %s at (%g, %g): q11=%.6g rate=%.6g",
                 formula, code.label, delta_b, delta_p, q11, report.total_rate_raw)
    objective = f"{formula} {code.label} {BB84}"
    return OptimizationOutcome(objective, q11, None, report.total_rate_raw, report, search.grid, search.values)


def evaluate_rate(
    code: LinearCode, protocol: str, qber: float, formula: str, q11: Optional[float] = None
) -> KeyRateReport:
    """Key-rate report for a symmetric protocol at error rate ``qber``.

    BB84 uses delta_b = delta_p = qber; without an explicit ``q11`` the rate
    is minimized over it. The six-state channel has no free parameter.
    """
    if protocol == SIX_STATE:
        return compute_rate(syndrome_distribution(code, six_state(qber), store_tables=False), formula)
    if protocol == BB84:
        if q11 is not None:
            return _rate_at(code, qber, qber, q11, formula)
        return minimize_over_q11(code, qber, qber, formula).report
    raise ParameterError(f"invalid_protocol: {protocol!r}")


def best_code(
    q: float, protocol: str, candidates: Sequence[LinearCode], formula: str
) -> Tuple[LinearCode, KeyRateReport]:
    """Picks the candidate with the highest rate at error rate ``q``.

    Ties go to the shorter code, then to the larger k.
    """
    if not candidates:
        raise ParameterError("empty_candidates: at least one code is required")
    scored = [(code, evaluate_rate(code, protocol, q, formula)) for code in candidates]
    code, report = min(scored, key=lambda item: (-item[1].total_rate, item[0].n, -item[0].k))
    return code, report


def crossover(
    code_a: LinearCode,
    code_b: LinearCode,
    protocol: str,
    formula: str,
    bracket: Tuple[float, float],
) -> Optional[float]:
    """Locates the error rate where two codes have equal rate.

    The bracket is scanned on a grid first. Points where both codes discard
    every syndrome carry no sign and are skipped, so a bracket that runs past
    both thresholds still finds the crossing below them.

    Args:
        code_a: First code.
        code_b: Second code.
        protocol: "bb84" or "six-state".
        formula: One of FORMULAS.
        bracket: (q_lo, q_hi) on which the rate difference changes sign.

    Returns:
        The first crossing in the bracket to 1e-5, or None when the
        difference keeps its sign wherever either code has a positive rate.
    """

    def rates(q: float) -> Tuple[float, float]:
        return (
            evaluate_rate(code_a, protocol, q, formula).total_rate_raw,
            evaluate_rate(code_b, protocol, q, formula).total_rate_raw,
        )

    def difference(q: float) -> float:
        rate_a, rate_b = rates(q)
        return rate_a - rate_b

    low, high = bracket
    previous: Optional[Tuple[float, float]] = None
    for q in np.linspace(low, high, CROSSOVER_GRID_POINTS):
        q = float(q)
        rate_a, rate_b = rates(q)
        if rate_a == 0.0 and rate_b == 0.0:
            continue
        value = rate_a - rate_b
        if value == 0.0:
            return q
        if previous is not None and previous[1] * value < 0.0:
            return float(brentq(difference, previous[0], q, xtol=CROSSOVER_XTOL))
        previous = (q, value)
    logger.info("no crossover between %s and %s on [%g, %g]", code_a.label, code_b.label, low, high)
    return None


def optimal_code_table(
    protocol: str, formula: str, candidates: Sequence[LinearCode], q_grid: Sequence[float]
) -> List[CodeRange]:
    """Best code per grid point, merged into runs of the same code.

    Grid points where no candidate has a positive rate are skipped and
    break runs.
    """
    if protocol not in PROTOCOLS:
        raise ParameterError(f"invalid_protocol: {protocol!r}")
    ranges: List[CodeRange] = []
    previous_positive = False
    for q in q_grid:
        code, report = best_code(float(q), protocol, candidates, formula)
        if report.total_rate <= 0.0:
            previous_positive = False
            continue
        if previous_positive and ranges[-1].code_label == code.label:
            ranges[-1] = ranges[-1]._replace(q_end=float(q))
        else:
            ranges.append(CodeRange(float(q), float(q), code.label))
        previous_positive = True
    return ranges


def minimize_noise_over_q11(code: LinearCode, delta_b: float, delta_p: float, variant: str) -> OptimizationOutcome:
    """BB84 adding-noise rate: max over p of the min over q11.

    Alice fixes p from the observed error rates; the adversary's q11 is
    taken worst case on a 41-point grid.
    """
    low, high = q11_interval(delta_b, delta_p)
    grid = np.linspace(low, high, JOINT_Q11_POINTS) if high > low else np.array([low])
    dists = [syndrome_distribution(code, from_bb84(delta_b, delta_p, float(q11))) for q11 in grid]

    def worst(p: float) -> Tuple[float, int]:
        values = [rate_adding_noise(dist, p, variant).report.total_rate_raw for dist in dists]
        index = int(np.argmin(values))
        return values[index], index

    search = grid_then_refine(lambda p: worst(p)[0], 0.0, MAX_NOISE, NOISE_GRID_POINTS, NOISE_TOLERANCE, maximize=True)
    p = min(max(search.x, 0.0), MAX_NOISE)
    value, index = worst(p)
    q11 = float(grid[index])
    report = rate_adding_noise(dists[index], p, variant).report.with_params(q11=q11)
    logger.info("joint noise optimum for %s (%s): p=%.6f q11=%.6f rate=%.6f", code.label, variant, p, q11, value)
    objective = f"noise-{variant} {code.label} {BB84}"
    return OptimizationOutcome(objective, q11, p, value, report, search.grid, search.values)


def optimize_noise_for_protocol(code: LinearCode, protocol: str, qber: float, variant: str) -> OptimizationOutcome:
    """Adding-noise optimum for a symmetric protocol run at ``qber``."""
    if protocol == BB84:
        return minimize_noise_over_q11(code, qber, qber, variant)
    if protocol != SIX_STATE:
        raise ParameterError(f"invalid_protocol: {protocol!r}")
    p, analysis = optimize_noise(syndrome_distribution(code, six_state(qber)), variant)
    report = analysis.report
    return OptimizationOutcome(
        f"noise-{variant} {code.label} {SIX_STATE}", None, p, report.total_rate_raw, report,
        np.array([p]), np.array([report.total_rate_raw]),
    )


def evaluate_noise_rate(
    code: LinearCode,
    protocol: str,
    qber: float,
    variant: str,
    noise_p: Optional[float] = None,
    q11: Optional[float] = None,
) -> KeyRateReport:
    """Adding-noise report for a symmetric protocol run at ``qber``.

    A missing ``noise_p`` is optimized; a missing BB84 ``q11`` is taken
    worst case on the joint grid.
    """
    if protocol == SIX_STATE:
        if noise_p is None:
            return optimize_noise_for_protocol(code, protocol, qber, variant).report
        return rate_adding_noise(syndrome_distribution(code, six_state(qber)), noise_p, variant).report
    if protocol != BB84:
        raise ParameterError(f"invalid_protocol: {protocol!r}")
    if q11 is not None:
        dist = syndrome_distribution(code, from_bb84(qber, qber, q11))
        if noise_p is None:
            analysis = optimize_noise(dist, variant)[1]
        else:
            analysis = rate_adding_noise(dist, noise_p, variant)
        return analysis.report.with_params(q11=q11)
    if noise_p is None:
        return minimize_noise_over_q11(code, qber, qber, variant).report
    low, high = q11_interval(qber, qber)
    grid = np.linspace(low, high, JOINT_Q11_POINTS) if high > low else np.array([low])
    reports = [
        rate_adding_noise(syndrome_distribution(code, from_bb84(qber, qber, float(value))), noise_p, variant)
        .report.with_params(q11=float(value))
        for value in grid
    ]
    return min(reports, key=lambda report: report.total_rate_raw)
