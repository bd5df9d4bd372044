import numpy as np
import pytest

from app.qkd.base.channel import BB84, SIX_STATE, from_bb84, q11_interval
from app.qkd.base.codes import make_full, make_repetition, make_single_parity
from app.qkd.errors import ParameterError
from app.qkd.rates.distribution import syndrome_distribution
from app.qkd.rates.formulas import compute_rate
from app.qkd.search.optimizer import (
    best_code,
    crossover,
    evaluate_noise_rate,
    evaluate_rate,
    minimize_noise_over_q11,
    minimize_over_q11,
    optimal_code_table,
    optimize_noise_for_protocol,
)


def test_q11_minimum_beats_dense_grid():
    code = make_repetition(3)
    outcome = minimize_over_q11(code, 0.12, 0.12, "no-otp")
    low, high = q11_interval(0.12, 0.12)
    dense = min(
        compute_rate(syndrome_distribution(code, from_bb84(0.12, 0.12, float(q11))), "no-otp").total_rate_raw
        for q11 in np.linspace(low, high, 1001)
    )
    assert outcome.value <= dense + 1e-9
    assert low <= outcome.q11 <= high
    assert outcome.report.q11 == outcome.q11
    assert len(outcome.grid) == 201


def test_full_code_bb84_worst_case_is_independent_errors():
    outcome = minimize_over_q11(make_full(1), 0.1, 0.1, "no-otp")
    assert outcome.q11 == pytest.approx(0.01, abs=1e-4)


def test_evaluate_rate_protocols():
    code = make_repetition(2)
    assert evaluate_rate(code, SIX_STATE, 0.1, "no-otp").total_rate == pytest.approx(0.16983, abs=1e-4)
    fixed = evaluate_rate(code, BB84, 0.1, "no-otp", q11=0.0)
    assert fixed.q11 == 0.0
    minimized = evaluate_rate(code, BB84, 0.1, "no-otp")
    assert minimized.total_rate_raw <= fixed.total_rate_raw + 1e-12
    with pytest.raises(ParameterError):
        evaluate_rate(code, "b92", 0.1, "no-otp")


def test_best_code_prefers_shorter_on_ties():
    code, report = best_code(0.0, SIX_STATE, [make_full(2), make_full(1)], "no-otp")
    assert code.n == 1
    assert report.total_rate == pytest.approx(1.0)
    code, _ = best_code(0.0, SIX_STATE, [make_repetition(3), make_repetition(2)], "no-otp")
    assert code.n == 2
    with pytest.raises(ParameterError):
        best_code(0.1, SIX_STATE, [], "no-otp")


def test_crossover_between_repetition_codes():
    q = crossover(make_repetition(2), make_repetition(3), SIX_STATE, "no-otp", (0.05, 0.2))
    assert q is not None and 0.05 < q < 0.2
    two = evaluate_rate(make_repetition(2), SIX_STATE, q, "no-otp").total_rate_raw
    three = evaluate_rate(make_repetition(3), SIX_STATE, q, "no-otp").total_rate_raw
    assert two == pytest.approx(three, abs=1e-4)


def test_crossover_skips_points_where_both_codes_discard_everything():
    five, six = make_repetition(5), make_repetition(6)
    assert evaluate_rate(five, SIX_STATE, 0.30, "no-otp").total_rate_raw == 0.0
    assert evaluate_rate(six, SIX_STATE, 0.30, "no-otp").total_rate_raw == 0.0
    q = crossover(five, six, SIX_STATE, "no-otp", (0.218, 0.30))
    assert q == pytest.approx(0.224, abs=2e-3)


def test_crossover_none_without_sign_change():
    assert crossover(make_repetition(2), make_full(1), SIX_STATE, "no-otp", (0.0, 0.01)) is None


def test_optimal_code_table_merges_runs():
    candidates = [make_full(1), make_repetition(2), make_repetition(3), make_single_parity(3)]
    ranges = optimal_code_table(SIX_STATE, "no-otp", candidates, [0.0, 0.01, 0.02, 0.15, 0.16, 0.6])
    assert ranges[0].q_start == 0.0
    assert all(r.q_start <= r.q_end for r in ranges)
    labels = [r.code_label for r in ranges]
    assert all(a != b for a, b in zip(labels, labels[1:]))
    assert ranges[-1].q_end < 0.6
    with pytest.raises(ParameterError):
        optimal_code_table("b92", "no-otp", candidates, [0.1])


def test_noise_optimum_for_protocols():
    code = make_full(1)
    six = optimize_noise_for_protocol(code, SIX_STATE, 0.13, "no-otp")
    assert six.noise_p is not None and six.q11 is None
    bb84 = minimize_noise_over_q11(code, 0.11, 0.11, "no-otp")
    assert 0.0 <= bb84.noise_p <= 0.5
    low, high = q11_interval(0.11, 0.11)
    assert low <= bb84.q11 <= high
    assert bb84.report.q11 == bb84.q11


def test_evaluate_noise_rate_with_fixed_parameters():
    code = make_repetition(2)
    plain = evaluate_rate(code, SIX_STATE, 0.1, "no-otp")
    zero = evaluate_noise_rate(code, SIX_STATE, 0.1, "no-otp", noise_p=0.0)
    assert zero.total_rate_raw == pytest.approx(plain.total_rate_raw, abs=1e-12)
    pinned = evaluate_noise_rate(code, BB84, 0.1, "otp", noise_p=0.1, q11=0.0)
    assert pinned.q11 == 0.0 and pinned.noise_p == 0.1
    worst = evaluate_noise_rate(code, BB84, 0.1, "otp", noise_p=0.1)
    assert worst.total_rate_raw <= pinned.total_rate_raw + 1e-12
