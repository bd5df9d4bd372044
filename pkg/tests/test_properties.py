import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from app.qkd.base.channel import from_bb84, from_probs, q11_interval
from app.qkd.base.codes import from_parity_matrix
from app.qkd.base.gf2 import BitMatrix, standard_form
from app.qkd.rates.distribution import syndrome_distribution
from app.qkd.rates.formulas import rate_inplace, rate_no_otp, rate_otp, rate_otp_hash, rate_parity_otp

PROPERTY_SETTINGS = settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])


@st.composite
def parity_checks(draw):
    n = draw(st.integers(min_value=2, max_value=8))
    rows = draw(st.integers(min_value=1, max_value=n - 1))
    bits = draw(st.lists(st.integers(0, 1), min_size=rows * n, max_size=rows * n))
    h = BitMatrix(rows, n, tuple(bits))
    assume(standard_form(h).rank == rows)
    return h


@st.composite
def channels(draw):
    masses = draw(st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=4, max_size=4))
    total = sum(masses)
    return from_probs(*(m / total for m in masses))


@st.composite
def bb84_channels(draw):
    q = draw(st.floats(min_value=0.0, max_value=0.3))
    low, high = q11_interval(q, q)
    fraction = draw(st.floats(min_value=0.0, max_value=1.0))
    return from_bb84(q, q, min(high, low + fraction * (high - low)))


@PROPERTY_SETTINGS
@given(parity_checks(), channels())
def test_syndrome_probabilities_marginalize(h, channel):
    dist = syndrome_distribution(from_parity_matrix(h), channel, store_tables=True)
    assert sum(record.q_j for record in dist.records) == pytest.approx(1.0, abs=1e-12)
    for record in dist.records:
        assert record.bit_pattern_probs.sum() == pytest.approx(record.q_j, abs=1e-12)
        np.testing.assert_allclose(record.phase_syndrome_probs.sum(axis=1), record.bit_pattern_probs, atol=1e-12)


@PROPERTY_SETTINGS
@given(parity_checks(), channels())
def test_entropy_chain_rule(h, channel):
    code = from_parity_matrix(h)
    dist = syndrome_distribution(code, channel)
    for record in dist.records:
        if record.q_j <= 0.0:
            continue
        w = record.pattern_weights
        chained = record.bit_entropy + float(np.dot(w, record.phase_syndrome_entropies))
        assert record.joint_entropy_phase_syndrome == pytest.approx(chained, abs=1e-9)
        assert record.joint_entropy_phase_syndrome <= record.joint_entropy_full + 1e-9
        assert record.joint_entropy_full <= 2 * code.n + 1e-9


@PROPERTY_SETTINGS
@given(parity_checks(), channels())
def test_formula_ordering(h, channel):
    dist = syndrome_distribution(from_parity_matrix(h), channel)
    otp = rate_otp(dist).total_rate_raw
    assert rate_no_otp(dist).total_rate_raw >= otp - 1e-12
    assert rate_parity_otp(dist).total_rate_raw >= rate_otp_hash(dist).total_rate_raw - 1e-12
    assert rate_otp_hash(dist).total_rate_raw >= otp - 1e-12


@PROPERTY_SETTINGS
@given(parity_checks(), bb84_channels())
def test_inplace_agrees_with_no_otp(h, channel):
    dist = syndrome_distribution(from_parity_matrix(h), channel)
    inplace = rate_inplace(dist)
    no_otp = rate_no_otp(dist)
    assert inplace.total_rate_raw == pytest.approx(no_otp.total_rate_raw, abs=1e-9)
    for left, right in zip(inplace.entries, no_otp.entries):
        assert left.r_j == pytest.approx(right.r_j, abs=1e-9)


@PROPERTY_SETTINGS
@given(parity_checks(), channels())
def test_rates_are_finite_and_bounded(h, channel):
    dist = syndrome_distribution(from_parity_matrix(h), channel)
    for report in (rate_otp(dist), rate_no_otp(dist), rate_parity_otp(dist)):
        assert np.isfinite(report.total_rate_raw)
        assert report.total_rate_raw <= 1.0 + 1e-12
        assert all(0.0 <= entry.r_j <= 1.0 for entry in report.entries)


@PROPERTY_SETTINGS
@given(parity_checks(), channels())
def test_savings_identity_per_syndrome(h, channel):
    dist = syndrome_distribution(from_parity_matrix(h), channel)
    extra = dist.code.n - dist.code.k
    for record in dist.records:
        saved = record.joint_entropy_full + extra - (record.joint_entropy_phase_syndrome + extra)
        within = float(np.dot(record.pattern_weights, record.phase_pattern_entropies - record.phase_syndrome_entropies))
        assert saved == pytest.approx(within, abs=1e-9)
        assert saved <= extra + 1e-9
