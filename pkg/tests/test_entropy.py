import math

import numpy as np
import pytest

from app.qkd.rates.entropy import binary_entropy, entropy_bits, entropy_multiset
from app.qkd.errors import ParameterError


def test_binary_entropy_values():
    assert binary_entropy(0.5) == pytest.approx(1.0)
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.11) == pytest.approx(0.4999, abs=1e-4)


def test_binary_entropy_rejects_out_of_range():
    with pytest.raises(ParameterError):
        binary_entropy(1.5)


def test_entropy_multiset():
    assert entropy_multiset([0.25] * 4) == pytest.approx(2.0)
    assert entropy_multiset([1.0, 0.0]) == 0.0
    assert entropy_multiset([0.85, 0.05, 0.05, 0.05]) == pytest.approx(0.8476, abs=1e-4)


def test_entropy_multiset_renormalizes_rounding():
    assert entropy_multiset([0.5, 0.5 + 1e-10]) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        entropy_multiset([0.5, 0.6])
    with pytest.raises(ParameterError):
        entropy_multiset([1.2, -0.2])
    with pytest.raises(ParameterError):
        entropy_multiset([])


def test_entropy_bits_along_axis():
    rows = np.array([[0.5, 0.5], [1.0, 0.0]])
    assert entropy_bits(rows).tolist() == pytest.approx([1.0, 0.0])
    assert float(entropy_bits(np.full(8, 1 / 8))) == pytest.approx(math.log2(8))
