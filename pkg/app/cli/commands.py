import logging
from argparse import Namespace
from typing import Callable, Dict, List, Optional, Tuple

from app.cli.helpers import (
    build_hash_model,
    build_range_model,
    build_report_model,
    build_stat_model,
    build_sweep_row,
    build_threshold_model,
    resolve_codes,
    resolve_noise_p,
    resolve_q11,
    sweep_values,
    usage_error,
    validate_precision,
    validate_protocol,
    validate_qber,
)
from app.cli.output import Emission, format_scientific, format_value, table_lines
from app.cli.schemas import KeyRateReportModel, RunSpec, SweepRange
from app.qkd.base.channel import BB84, SIX_STATE, from_protocol
from app.qkd.base.codes import LinearCode
from app.qkd.lab.hashing import hash_identification_experiment, required_tag_length, weight_bounded_set
from app.qkd.lab.montecarlo import McConfig, empirical_syndrome_stats
from app.qkd.rates.distribution import syndrome_distribution
from app.qkd.rates.formulas import NOISE_FORMULAS, KeyRateReport
from app.qkd.rates.noise import NOISE_FORMULA_VARIANTS
from app.qkd.search.optimizer import evaluate_noise_rate, evaluate_rate, optimal_code_table
from app.qkd.search.thresholds import (
    REPETITION,
    analytic_threshold_bb84,
    analytic_threshold_six_state,
    numeric_threshold,
)

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ("qber", "code", "formula", "q11", "noise_p", "key_rate", "key_rate_raw")
SYNDROME_COLUMNS = ("syndrome", "q_j", "r_j", "kept", "I_b_j", "avg_I_p", "R_j")
RANGE_COLUMNS = ("q_start", "q_end", "code")
STAT_COLUMNS = ("syndrome", "empirical", "analytic", "z_score")
THRESHOLD_COLUMNS = ("protocol", "formula", "family", "max_n", "threshold_q", "limit_q", "witness_n", "witness_rate")
HASH_COLUMNS = (
    "n", "k", "error_set_size", "trials", "failures", "empirical_failure", "bound", "within_bound",
    "required_tag_length",
)

CLOSED_FORM_DEFAULT_MAX_N = 2000
ENUMERATION_DEFAULT_MAX_N = 8
ANALYTIC_LIMITS = {BB84: analytic_threshold_bb84, SIX_STATE: analytic_threshold_six_state}


def _common_fields(args: Namespace) -> dict:
    return {
        "format": args.format,
        "seed": args.seed,
        "precision": validate_precision(args.precision),
        "out": args.out,
    }


def compute_report(
    code: LinearCode,
    protocol: str,
    qber: float,
    formula: str,
    q11: Optional[float],
    noise_p: Optional[float],
) -> KeyRateReport:
    """Routes a formula to the plain or the adding-noise evaluator."""
    if formula in NOISE_FORMULAS:
        return evaluate_noise_rate(code, protocol, qber, NOISE_FORMULA_VARIANTS[formula], noise_p, q11)
    return evaluate_rate(code, protocol, qber, formula, q11)


def _report_lines(model: KeyRateReportModel, precision: int) -> List[str]:
    header = (
        f"code {model.code} {model.code_label}  protocol {model.protocol}  "
        f"qber {format_value(model.qber, precision)}  formula {model.formula}"
    )
    lines = [header]
    if model.params.q11 is not None or model.params.noise_p is not None:
        lines.append(
            f"q11 {format_value(model.params.q11, precision) or '-'}  "
            f"noise_p {format_value(model.params.noise_p, precision) or '-'}"
        )
    rows = [
        (
            entry.syndrome or "-",
            entry.q_j,
            entry.r_j,
            "kept" if entry.kept else "discarded",
            entry.consumption.bit,
            entry.consumption.phase,
            entry.consumption.total,
        )
        for entry in model.entries
    ]
    lines.extend(table_lines(SYNDROME_COLUMNS, rows, precision))
    lines.append(f"total {format_value(model.total_rate, precision)}")
    lines.append(f"total_raw {format_value(model.total_rate_raw, precision)}")
    return lines


def _report_emission(models: List[KeyRateReportModel], precision: int) -> Emission:
    rows = [
        (m.qber, m.code, m.formula, m.params.q11, m.params.noise_p, m.total_rate, m.total_rate_raw)
        for m in models
    ]
    lines: List[str] = []
    for index, model in enumerate(models):
        if index:
            lines.append("")
        lines.extend(_report_lines(model, precision))
    return Emission("reports", models, SWEEP_COLUMNS, rows, lines)


def run_keyrate(args: Namespace) -> Tuple[RunSpec, Emission]:
    """Key rate of each selected code and formula at one error rate.

    Args:
        args: Parsed keyrate flags.

    Returns:
        The resolved run and one report per (code, formula).
    """
    protocol = validate_protocol(args.protocol)
    qber = validate_qber(protocol, args.qber)
    q11 = resolve_q11(protocol, args.q11)
    noise_p = resolve_noise_p(args.noise_p)
    codes = resolve_codes(args.code)
    run = RunSpec(
        subcommand="keyrate", protocol=protocol, qber=qber, q11=args.q11, noise_p=args.noise_p,
        codes=args.code, formulas=args.formula, **_common_fields(args),
    )
    models = [
        build_report_model(compute_report(code, protocol, qber, formula, q11, noise_p), label, protocol, qber)
        for label, code in codes
        for formula in args.formula
    ]
    return run, _report_emission(models, run.precision)


def run_noise(args: Namespace) -> Tuple[RunSpec, Emission]:
    """Adding-noise key rate, optimizing p unless it is given."""
    protocol = validate_protocol(args.protocol)
    qber = validate_qber(protocol, args.qber)
    q11 = resolve_q11(protocol, args.q11)
    noise_p = resolve_noise_p(args.noise_p)
    codes = resolve_codes(args.code)
    formula = f"noise-{args.variant}"
    run = RunSpec(
        subcommand="noise", protocol=protocol, qber=qber, q11=args.q11, noise_p=args.noise_p,
        codes=args.code, variant=args.variant, **_common_fields(args),
    )
    models = [
        build_report_model(compute_report(code, protocol, qber, formula, q11, noise_p), label, protocol, qber)
        for label, code in codes
    ]
    return run, _report_emission(models, run.precision)


def run_scan(args: Namespace) -> Tuple[RunSpec, Emission]:
    """Sweeps the error rate for every code and formula.

    Rows are ordered by error rate, then code, then formula.
    """
    protocol = validate_protocol(args.protocol)
    grid = sweep_values(args.start, args.end, args.step)
    for qber in (grid[0], grid[-1]):
        validate_qber(protocol, qber)
    q11 = resolve_q11(protocol, args.q11)
    noise_p = resolve_noise_p(args.noise_p)
    codes = resolve_codes(args.code)
    run = RunSpec(
        subcommand="scan", protocol=protocol, q11=args.q11, noise_p=args.noise_p, codes=args.code,
        formulas=args.formula, sweep=SweepRange(start=args.start, end=args.end, step=args.step),
        **_common_fields(args),
    )
    models = []
    for qber in grid:
        logger.info("scan q=%.6f", qber)
        for label, code in codes:
            for formula in args.formula:
                report = compute_report(code, protocol, qber, formula, q11, noise_p)
                models.append(build_sweep_row(report, label, qber))
    rows = [tuple(getattr(m, column) for column in SWEEP_COLUMNS) for m in models]
    return run, Emission("rows", models, SWEEP_COLUMNS, rows, table_lines(SWEEP_COLUMNS, rows, run.precision))


def run_threshold(args: Namespace) -> Tuple[RunSpec, Emission]:
    """Largest error rate with a positive rate for some family member.

    With ``--closed-form`` the repetition family's limit threshold is
    reported next to the finite-length search result.
    """
    protocol = validate_protocol(args.protocol)
    if args.max_n is not None:
        max_n = args.max_n
    else:
        max_n = CLOSED_FORM_DEFAULT_MAX_N if args.closed_form else ENUMERATION_DEFAULT_MAX_N
    run = RunSpec(
        subcommand="threshold", protocol=protocol, formulas=[args.formula], family=args.family, max_n=max_n,
        resolution=args.resolution, closed_form=args.closed_form, **_common_fields(args),
    )
    result = numeric_threshold(protocol, args.formula, args.family, max_n, args.resolution, args.closed_form)
    limit = ANALYTIC_LIMITS[protocol]() if args.closed_form and args.family == REPETITION else None
    model = build_threshold_model(result, limit)
    witness = model.witness
    row = (
        model.protocol, model.formula, model.family, model.max_n, model.threshold_q, model.limit_q,
        witness.n if witness else None, witness.rate if witness else None,
    )
    lines = []
    if model.limit_q is not None:
        lines.append(f"limit {format_value(model.limit_q, run.precision)}")
    lines.append(f"threshold {format_value(model.threshold_q, run.precision)}")
    if witness is not None:
        lines.append(
            f"witness n={witness.n} q={format_value(witness.q, run.precision)} "
            f"rate={format_scientific(witness.rate, witness.log_rate, run.precision)}"
        )
    if model.violations:
        lines.append("non_monotone " + " ".join(format_value(q, run.precision) for q in model.violations))
    return run, Emission("thresholds", [model], THRESHOLD_COLUMNS, [row], lines)


def run_optimal_codes(args: Namespace) -> Tuple[RunSpec, Emission]:
    """Best code per error rate, merged into ranges."""
    protocol = validate_protocol(args.protocol)
    grid = sweep_values(args.start, args.end, args.step)
    for qber in (grid[0], grid[-1]):
        validate_qber(protocol, qber)
    codes = resolve_codes(args.code)
    run = RunSpec(
        subcommand="optimal-codes", protocol=protocol, codes=args.code, formulas=[args.formula],
        sweep=SweepRange(start=args.start, end=args.end, step=args.step), **_common_fields(args),
    )
    labels = {code.label: label for label, code in codes}
    ranges = optimal_code_table(protocol, args.formula, [code for _, code in codes], grid)
    models = [build_range_model(r._replace(code_label=labels.get(r.code_label, r.code_label))) for r in ranges]
    rows = [(m.q_start, m.q_end, m.code) for m in models]
    return run, Emission("ranges", models, RANGE_COLUMNS, rows, table_lines(RANGE_COLUMNS, rows, run.precision))


def run_simulate(args: Namespace) -> Tuple[RunSpec, Emission]:
    """Samples error patterns and compares syndrome frequencies with the exact values."""
    protocol = validate_protocol(args.protocol)
    qber = validate_qber(protocol, args.qber)
    q11 = resolve_q11(protocol, args.q11)
    if protocol == BB84 and q11 is None:
        raise usage_error("invalid_q11: simulate needs an explicit q11 for bb84")
    codes = resolve_codes([args.code])
    if len(codes) != 1:
        raise usage_error("invalid_code: simulate takes a single code")
    _, code = codes[0]
    run = RunSpec(
        subcommand="simulate", protocol=protocol, qber=qber, q11=args.q11, codes=[args.code],
        samples=args.samples, shards=args.shards, **_common_fields(args),
    )
    channel = from_protocol(protocol, qber, q11)
    cfg = McConfig(seed=args.seed, samples=args.samples, code=code, channel=channel, shards=args.shards)
    stats = empirical_syndrome_stats(cfg, syndrome_distribution(code, channel, store_tables=False))
    models = [build_stat_model(stat) for stat in stats]
    rows = [(m.syndrome or "-", m.empirical, m.analytic, m.z_score) for m in models]
    return run, Emission("syndromes", models, STAT_COLUMNS, rows, table_lines(STAT_COLUMNS, rows, run.precision))


def _hash_patterns(args: Namespace) -> List[int]:
    if args.patterns:
        values = []
        for text in args.patterns.split(","):
            text = text.strip()
            if len(text) != args.n or set(text) - {"0", "1"}:
                raise usage_error(f"invalid_pattern: {text!r} is not a {args.n}-bit string")
            values.append(int(text, 2))
        return values
    return [int(value) for value in weight_bounded_set(args.n, args.weight)]


def run_hash_lab(args: Namespace) -> Tuple[RunSpec, Emission]:
    """Random linear hash identification experiment."""
    patterns = _hash_patterns(args)
    run = RunSpec(
        subcommand="hash-lab", n=args.n, k=args.k, weight=None if args.patterns else args.weight,
        patterns=args.patterns.split(",") if args.patterns else None, trials=args.trials,
        failure=args.failure, **_common_fields(args),
    )
    result = hash_identification_experiment(args.n, args.k, patterns, args.trials, args.seed)
    tag_length = required_tag_length(result.error_set_size, args.failure) if args.failure is not None else None
    model = build_hash_model(result, tag_length)
    row = tuple(getattr(model, column) for column in HASH_COLUMNS)
    lines = [
        f"n {model.n}  k {model.k}  |T| {model.error_set_size}  trials {model.trials}",
        f"failures {model.failures}",
        f"empirical_failure {format_value(model.empirical_failure, run.precision)}",
        f"bound {format_value(model.bound, run.precision)}",
        f"within_bound {format_value(model.within_bound, run.precision)}",
    ]
    if tag_length is not None:
        lines.append(f"required_tag_length {tag_length}")
    return run, Emission("hash_lab", [model], HASH_COLUMNS, [row], lines)


COMMANDS: Dict[str, Callable[[Namespace], Tuple[RunSpec, Emission]]] = {
    "keyrate": run_keyrate,
    "noise": run_noise,
    "scan": run_scan,
    "threshold": run_threshold,
    "optimal-codes": run_optimal_codes,
    "simulate": run_simulate,
    "hash-lab": run_hash_lab,
}
