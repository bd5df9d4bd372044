import math
from typing import Iterable, Union

import numpy as np
from scipy.special import entr

from app.qkd.errors import ParameterError

RENORMALIZE_TOLERANCE = 1e-9
NEGATIVE_TOLERANCE = 1e-15

ArrayLike = Union[Iterable[float], np.ndarray]


def entropy_bits(weights: np.ndarray, axis: int = -1) -> np.ndarray:
    """Shannon entropy in bits along ``axis`` with 0 log 0 = 0.

    No validation; callers pass normalized, nonnegative weights.
    """
    return entr(np.asarray(weights, dtype=np.float64)).sum(axis=axis) / math.log(2.0)


def binary_entropy(x: float) -> float:
    """Computes h(x) = -x log2 x - (1-x) log2 (1-x).

    Args:
        x: Probability in [0, 1].

    Returns:
        Entropy in bits.
    """
    if not 0.0 <= x <= 1.0:
        raise ParameterError(f"invalid_probability: {x!r} outside [0, 1]")
    return float((entr(x) + entr(1.0 - x)) / math.log(2.0))


def entropy_multiset(values: ArrayLike) -> float:
    """Entropy of a probability multiset, renormalizing rounding drift.

    Args:
        values: Nonnegative weights whose sum is within 1e-9 of 1.

    Returns:
        Entropy in bits, between 0 and log2(len(values)).
    """
    weights = np.asarray(list(values), dtype=np.float64).reshape(-1)
    if weights.size == 0:
        raise ParameterError("invalid_distribution: empty multiset")
    if np.any(weights < -NEGATIVE_TOLERANCE):
        raise ParameterError("invalid_distribution: negative weight")
    weights = np.clip(weights, 0.0, None)
    total = math.fsum(weights.tolist())
    if abs(total - 1.0) > RENORMALIZE_TOLERANCE:
        raise ParameterError(f"invalid_distribution: weights sum to {total!r}")
    return float(entropy_bits(weights / total))
