import math

import numpy as np
import pytest

from app.qkd.base.channel import from_bb84, six_state
from app.qkd.base.codes import from_parity_matrix, make_full, make_hamming743, make_repetition
from app.qkd.base.gf2 import BitMatrix
from app.qkd.rates.distribution import syndrome_distribution
from conftest import brute_force_stats, entropy_of, phase_savings, sample_channels, small_codes


def test_distribution_matches_brute_force_enumeration():
    for code in small_codes():
        for channel in sample_channels():
            dist = syndrome_distribution(code, channel)
            oracle = brute_force_stats(code, channel)
            for record in dist.records:
                expected = oracle.get(record.syndrome.to_int())
                if expected is None:
                    assert record.q_j == pytest.approx(0.0, abs=1e-15)
                    continue
                assert record.q_j == pytest.approx(expected["q_j"], abs=1e-12)
                assert record.bit_entropy == pytest.approx(expected["bit_entropy"], abs=1e-9)
                assert record.joint_entropy_full == pytest.approx(expected["joint_entropy_full"], abs=1e-9)
                assert record.joint_entropy_phase_syndrome == pytest.approx(
                    expected["joint_entropy_phase_syndrome"], abs=1e-9
                )


def test_repetition_two_on_six_state_worked_values():
    dist = syndrome_distribution(make_repetition(2), six_state(0.1))
    zero, one = dist.records
    assert zero.q_j == pytest.approx(0.82)
    assert one.q_j == pytest.approx(0.18)
    assert zero.joint_entropy_full == pytest.approx(0.7309, abs=1e-3)
    assert one.bit_entropy == pytest.approx(1.0)


def test_probabilities_marginalize():
    dist = syndrome_distribution(make_hamming743(), six_state(0.08))
    assert math.fsum(dist.syndrome_probs.tolist()) == pytest.approx(1.0, abs=1e-12)
    for record in dist.records:
        assert record.bit_pattern_probs.sum() == pytest.approx(record.q_j, abs=1e-12)
        assert record.phase_syndrome_probs.sum(axis=1) == pytest.approx(record.bit_pattern_probs, abs=1e-12)


def test_chain_rule_identities():
    dist = syndrome_distribution(make_hamming743(), six_state(0.08))
    for record in dist.records:
        w = record.pattern_weights
        assert record.joint_entropy_phase_syndrome == pytest.approx(
            record.bit_entropy + float(np.dot(w, record.phase_syndrome_entropies)), abs=1e-9
        )
        assert record.joint_entropy_full == pytest.approx(
            record.bit_entropy + float(np.dot(w, record.phase_pattern_entropies)), abs=1e-9
        )
        assert record.joint_entropy_phase_syndrome <= record.joint_entropy_full + 1e-12


def test_records_are_read_only_and_tables_optional():
    dist = syndrome_distribution(make_repetition(3), six_state(0.1), store_tables=False)
    record = dist.records[0]
    assert record.phase_syndrome_probs is None
    with pytest.raises(ValueError):
        record.bit_pattern_probs[0] = 1.0


def test_tables_do_not_change_entropies():
    code = make_repetition(4)
    with_tables = syndrome_distribution(code, six_state(0.12))
    without = syndrome_distribution(code, six_state(0.12), store_tables=False)
    for a, b in zip(with_tables.records, without.records):
        assert a.joint_entropy_phase_syndrome == b.joint_entropy_phase_syndrome


def test_noiseless_channel():
    dist = syndrome_distribution(make_repetition(3), six_state(0.0))
    assert dist.records[0].q_j == 1.0
    assert all(record.q_j == 0.0 for record in dist.records[1:])
    assert dist.syndrome_entropy() == 0.0
    assert dist.records[1].pattern_weights.tolist() == [0.0, 0.0]


def test_savings_identity_in_chain_rule_form():
    for code in small_codes() + [make_hamming743()]:
        extra = code.n - code.k
        for channel in (six_state(0.1), from_bb84(0.05, 0.15, 0.03)):
            oracle = phase_savings(code, channel)
            for record in syndrome_distribution(code, channel).records:
                if record.q_j <= 0.0:
                    continue
                saved = record.joint_entropy_full + extra - (record.joint_entropy_phase_syndrome + extra)
                assert saved == pytest.approx(oracle[record.syndrome.to_int()], abs=1e-9)
                w = record.pattern_weights
                assert saved == pytest.approx(
                    float(np.dot(w, record.phase_pattern_entropies - record.phase_syndrome_entropies)), abs=1e-9
                )


def test_full_code_entropy_factorizes():
    channel = from_bb84(0.05, 0.15, 0.03)
    for n in range(1, 5):
        (record,) = syndrome_distribution(make_full(n), channel).records
        assert record.q_j == pytest.approx(1.0, abs=1e-12)
        assert record.joint_entropy_full == pytest.approx(n * entropy_of(channel.probs), abs=1e-9)


def test_column_permutation_keeps_syndrome_probabilities():
    code = make_hamming743()
    channel = from_bb84(0.05, 0.15, 0.03)
    permutation = np.random.default_rng(3).permutation(code.n)
    permuted = from_parity_matrix(BitMatrix.from_array(code.parity_check.array[:, permutation]), label="permuted")
    original = np.sort(syndrome_distribution(code, channel).syndrome_probs)
    shuffled = np.sort(syndrome_distribution(permuted, channel).syndrome_probs)
    assert shuffled == pytest.approx(original, abs=1e-12)
