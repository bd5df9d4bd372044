import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence, Union

import numpy as np

from app.qkd.base.gf2 import BitVector
from app.qkd.errors import ParameterError, SizeGuardError
from app.qkd.lab.montecarlo import make_generator

logger = logging.getLogger(__name__)

SET_SIZE_FACTOR = 16
MAX_HASH_INPUT = 62
BATCH_CELLS = 1 << 22
SLACK_SIGMAS = 4.0

ErrorSet = Union[Sequence[int], Sequence[BitVector], np.ndarray]


@dataclass(frozen=True)
class HashLabResult:
    """Outcome of the random-matrix identification experiment.

    Args:
        n: Input length.
        k: Tag length.
        error_set_size: |T|.
        trials: Number of trials.
        failures: Trials whose true pattern shared its tag with another.
        empirical_failure: failures / trials.
        bound: |T| / 2^k.
    """

    n: int
    k: int
    error_set_size: int
    trials: int
    failures: int
    empirical_failure: float
    bound: float

    @property
    def slack(self) -> float:
        return SLACK_SIGMAS * math.sqrt(self.bound / self.trials)

    @property
    def within_bound(self) -> bool:
        return self.empirical_failure <= self.bound + self.slack


def weight_bounded_set(n: int, w: int) -> np.ndarray:
    """All n-bit patterns of weight at most ``w``, by weight then value."""
    if n < 1 or n > MAX_HASH_INPUT or w < 0:
        raise ParameterError(f"invalid_set: n={n} w={w}")
    size = sum(math.comb(n, i) for i in range(min(w, n) + 1))
    if size > 1 << 24:
        raise SizeGuardError(f"size_guard: weight-bounded set has {size} patterns")
    patterns = []
    for weight in range(min(w, n) + 1):
        layer = sorted(sum(1 << (n - 1 - i) for i in ones) for ones in combinations(range(n), weight))
        patterns.extend(layer)
    return np.array(patterns, dtype=np.int64)


def required_tag_length(set_size: int, failure: float) -> int:
    """Tag bits needed so a random linear hash identifies the pattern: ceil(log2|T| + log2(1/delta))."""
    if set_size < 1:
        raise ParameterError(f"invalid_set: size {set_size}")
    if not 0.0 < failure < 1.0:
        raise ParameterError(f"invalid_failure: {failure!r} outside (0, 1)")
    return math.ceil(math.log2(set_size) + math.log2(1.0 / failure))


def _as_pattern_array(n: int, error_set: ErrorSet) -> np.ndarray:
    values = [item.to_int() if isinstance(item, BitVector) else int(item) for item in error_set]
    patterns = np.unique(np.array(values, dtype=np.int64))
    if patterns.size == 0:
        raise ParameterError("empty_set: the error set has no patterns")
    if patterns[0] < 0 or patterns[-1] >= 1 << n:
        raise ParameterError(f"invalid_set: patterns do not fit in {n} bits")
    return patterns


def hash_identification_experiment(n: int, k: int, error_set: ErrorSet, trials: int, seed: int) -> HashLabResult:
    """Measures how often a random k x n hash fails to single out the true pattern.

    Each trial draws a uniform random binary matrix f and a true pattern e
    uniformly from the set; it fails when another set member has the same
    tag f e.

    Args:
        n: Pattern length.
        k: Tag length.
        error_set: Candidate patterns (integers or BitVectors).
        trials: Number of trials.
        seed: Generator seed.

    Returns:
        The HashLabResult with the |T| / 2^k bound.
    """
    if not 1 <= n <= MAX_HASH_INPUT or k < 1 or k > MAX_HASH_INPUT:
        raise ParameterError(f"invalid_dimensions: n={n} k={k}")
    if trials < 1:
        raise ParameterError(f"invalid_trials: {trials}")
    patterns = _as_pattern_array(n, error_set)
    if patterns.size > SET_SIZE_FACTOR * 2 ** k:
        raise SizeGuardError(f"size_guard: |T|={patterns.size} exceeds {SET_SIZE_FACTOR} * 2^{k}")
    bits = ((patterns[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.int32)
    tag_weights = np.int64(1) << np.arange(k - 1, -1, -1, dtype=np.int64)

    generator = make_generator(seed)
    batch = max(1, BATCH_CELLS // (k * max(n, patterns.size)))
    failures = 0
    remaining = trials
    while remaining > 0:
        size = min(batch, remaining)
        matrices = generator.integers(0, 2, size=(size, k, n), dtype=np.int32)
        truth = generator.integers(0, patterns.size, size=size)
        tags = np.einsum("bkt,k->bt", (matrices @ bits.T) % 2, tag_weights)
        true_tags = tags[np.arange(size), truth]
        failures += int(np.count_nonzero((tags == true_tags[:, None]).sum(axis=1) > 1))
        remaining -= size
    bound = patterns.size / 2 ** k
    result = HashLabResult(n, k, int(patterns.size), trials, failures, failures / trials, bound)
    logger.info("hash lab n=%d k=%d |T|=%d: failure %.6f (bound %.6f)", n, k, patterns.size,
                result.empirical_failure, bound)
    return result
