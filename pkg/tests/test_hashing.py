import math

import pytest

from app.qkd.base.gf2 import BitVector
from app.qkd.errors import ParameterError, SizeGuardError
from app.qkd.lab.hashing import hash_identification_experiment, required_tag_length, weight_bounded_set


def test_weight_bounded_set_order_and_size():
    patterns = weight_bounded_set(4, 1).tolist()
    assert patterns == [0, 1, 2, 4, 8]
    assert len(weight_bounded_set(16, 2)) == 1 + 16 + math.comb(16, 2)
    with pytest.raises(ParameterError):
        weight_bounded_set(0, 1)


def test_required_tag_length():
    assert required_tag_length(17, 0.01) == math.ceil(math.log2(17) + math.log2(100))
    assert required_tag_length(1, 0.5) == 1
    with pytest.raises(ParameterError):
        required_tag_length(0, 0.1)
    with pytest.raises(ParameterError):
        required_tag_length(4, 1.0)


def test_failure_rate_within_bound():
    result = hash_identification_experiment(16, 8, weight_bounded_set(16, 1), 20_000, seed=42)
    assert result.error_set_size == 17
    assert result.bound == pytest.approx(17 / 256)
    assert result.within_bound
    assert result.empirical_failure == result.failures / result.trials


def test_experiment_is_reproducible():
    patterns = weight_bounded_set(10, 1)
    first = hash_identification_experiment(10, 4, patterns, 2_000, seed=5)
    second = hash_identification_experiment(10, 4, patterns, 2_000, seed=5)
    assert first == second


def test_single_pattern_never_fails():
    result = hash_identification_experiment(8, 2, [BitVector.from_string("10110000")], 500, seed=1)
    assert result.failures == 0


def test_duplicates_are_removed():
    result = hash_identification_experiment(4, 3, [1, 1, 2], 100, seed=1)
    assert result.error_set_size == 2


def test_experiment_validation():
    with pytest.raises(ParameterError):
        hash_identification_experiment(4, 2, [], 10, seed=1)
    with pytest.raises(ParameterError):
        hash_identification_experiment(4, 2, [16], 10, seed=1)
    with pytest.raises(ParameterError):
        hash_identification_experiment(4, 2, [1], 0, seed=1)
    with pytest.raises(SizeGuardError):
        hash_identification_experiment(12, 1, weight_bounded_set(12, 2), 10, seed=1)
