"""Adding structured noise before reconciliation.

Alice flips her bits by a codeword ``G f`` with each bit of ``f`` set
independently with probability ``p``. The bit syndrome is unchanged, the
bit pattern distribution is mixed inside each coset, and the adversary's
knowledge of the phase syndrome degrades to a mixture of non-orthogonal
product states whose von Neumann entropy is saved in privacy
amplification.

That entropy is read off the weighted Gram matrix of the mixture: the
states for phase syndromes s and s' overlap by (1 - 2p)^d(s, s').
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from app.qkd.base.gf2 import BitVector, pack_bits, popcount
from app.qkd.base.scalar import grid_then_refine
from app.qkd.errors import DimensionError, ParameterError, SizeGuardError
from app.qkd.rates.distribution import SyndromeDistribution
from app.qkd.rates.entropy import entropy_bits
from app.qkd.rates.formulas import (
    NOISE_NO_OTP,
    NOISE_OTP,
    Consumption,
    KeyRateReport,
    SyndromeRate,
    build_report,
)

logger = logging.getLogger(__name__)

OTP_VARIANT = "otp"
NO_OTP_VARIANT = "no-otp"
VARIANT_FORMULAS = {OTP_VARIANT: NOISE_OTP, NO_OTP_VARIANT: NOISE_NO_OTP}
NOISE_FORMULA_VARIANTS = {formula: variant for variant, formula in VARIANT_FORMULAS.items()}

NOISE_N_GUARD = 12
GRAM_K_GUARD = 9
EIGEN_DIM_GUARD = 512
NOISE_GRID_POINTS = 101
NOISE_TOLERANCE = 1e-5
MAX_NOISE = 0.5
ZERO_RATE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """Real symmetric matrix held as a read-only array."""

    entries: np.ndarray

    def __post_init__(self):
        array = np.array(self.entries, dtype=np.float64)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise DimensionError(f"invalid_shape: expected a square matrix, got {array.shape}")
        if not np.array_equal(array, array.T):
            raise ParameterError("not_symmetric: matrix differs from its transpose")
        array.flags.writeable = False
        object.__setattr__(self, "entries", array)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class NoiseAnalysis:
    """Adding-noise artifacts for one noise weight.

    Args:
        p: Noise probability per bit of f.
        mixed_probs: Per syndrome, the mixed coset probabilities.
        sigma_entropies: Per syndrome, h(sigma^j_i) for each coset pattern.
        report: Resulting key-rate report (noise-otp or noise-no-otp).
    """

    p: float
    mixed_probs: Tuple[np.ndarray, ...]
    sigma_entropies: Tuple[np.ndarray, ...]
    report: KeyRateReport


def _check_noise(p: float) -> None:
    if not 0.0 <= p <= MAX_NOISE:
        raise ParameterError(f"invalid_noise: p={p!r} outside [0, 0.5]")


def symmetric_eigenvalues(m: SymmetricMatrix) -> np.ndarray:
    """Eigenvalues of a symmetric matrix in descending order."""
    if m.dim > EIGEN_DIM_GUARD:
        raise SizeGuardError(f"size_guard: dimension {m.dim} exceeds {EIGEN_DIM_GUARD}")
    return np.linalg.eigvalsh(m.entries)[::-1]


def gram_matrix(weights: np.ndarray, syndromes: np.ndarray, p: float) -> SymmetricMatrix:
    """Weighted Gram matrix sqrt(w_a w_b) (1 - 2p)^d(s_a, s_b).

    Args:
        weights: Mixture weights.
        syndromes: Phase syndromes as integers, aligned with ``weights``.
        p: Noise probability.

    Returns:
        The Gram matrix, whose spectrum is the spectrum of the mixture.
    """
    roots = np.sqrt(np.asarray(weights, dtype=np.float64))
    syndromes = np.asarray(syndromes, dtype=np.int64)
    distances = popcount(syndromes[:, None] ^ syndromes[None, :])
    return SymmetricMatrix(np.outer(roots, roots) * (1.0 - 2.0 * p) ** distances)


def _mixture_entropy(weights: np.ndarray, syndromes: np.ndarray, p: float) -> float:
    live = weights > 0.0
    if p == 0.0 or np.count_nonzero(live) <= 1:
        return 0.0
    eigenvalues = symmetric_eigenvalues(gram_matrix(weights[live], syndromes[live], p))
    return float(entropy_bits(np.clip(eigenvalues, 0.0, None)))


def sigma_entropy(weights: Sequence[float], syndromes: Sequence[BitVector], p: float) -> float:
    """Von Neumann entropy of the mixture of Z-phased product states.

    Args:
        weights: Probability of each phase syndrome, summing to 1.
        syndromes: Phase syndromes of length k.
        p: Noise probability in [0, 0.5].

    Returns:
        Entropy in bits.
    """
    _check_noise(p)
    if len(weights) != len(syndromes):
        raise DimensionError(f"dimension_mismatch: {len(weights)} weights for {len(syndromes)} syndromes")
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0.0) or abs(w.sum() - 1.0) > 1e-9:
        raise ParameterError("invalid_distribution: weights must be nonnegative and sum to 1")
    codes = np.array([s.to_int() for s in syndromes], dtype=np.int64)
    return _mixture_entropy(w / w.sum(), codes, p)


def mixed_bit_distribution(dist: SyndromeDistribution, p: float) -> Tuple[np.ndarray, ...]:
    """Mixes bit pattern probabilities inside each coset.

    q~(e) = sum_f p^|f| (1-p)^(k-|f|) q(e + G f), evaluated as one
    convolution per generator column.

    Args:
        dist: Syndrome distribution.
        p: Noise probability in [0, 0.5].

    Returns:
        Per syndrome, mixed probabilities aligned with the coset patterns.
    """
    _check_noise(p)
    code = dist.code
    full = np.zeros(1 << code.n, dtype=np.float64)
    for record in dist.records:
        full[record.patterns] = record.bit_pattern_probs
    if p > 0.0:
        index = np.arange(1 << code.n, dtype=np.int64)
        for column in pack_bits(code.generator.array.T):
            full = (1.0 - p) * full + p * full[index ^ column]
    return tuple(full[record.patterns] for record in dist.records)


def _check_guards(dist: SyndromeDistribution) -> None:
    code = dist.code
    if code.n > NOISE_N_GUARD or code.k > GRAM_K_GUARD:
        raise SizeGuardError(
            f"size_guard: adding noise needs n <= {NOISE_N_GUARD} and k <= {GRAM_K_GUARD}, got [{code.n} {code.k}]"
        )
    if any(record.phase_syndrome_probs is None for record in dist.records):
        raise SizeGuardError("size_guard: distribution was built without phase-syndrome tables")


def rate_adding_noise(dist: SyndromeDistribution, p: float, variant: str) -> NoiseAnalysis:
    """Key rate after adding coset-structured noise of weight ``p``.

    With OTP each pattern's phase cost is H(e_p | i) - h(sigma_i) and the
    (n - k)/n pad overhead is charged once after the clamped sum. Without
    OTP the cost is h(phase syndrome | i) - h(sigma_i) against a k/n budget.

    Args:
        dist: Distribution built with phase-syndrome tables.
        p: Noise probability in [0, 0.5].
        variant: "otp" or "no-otp".

    Returns:
        The NoiseAnalysis for this ``p``.
    """
    if variant not in VARIANT_FORMULAS:
        raise ParameterError(f"invalid_variant: {variant!r}")
    _check_noise(p)
    _check_guards(dist)
    code = dist.code
    n, k = code.n, code.k
    phase_syndromes = np.arange(1 << k, dtype=np.int64)
    mixed = mixed_bit_distribution(dist, p)
    entries: List[SyndromeRate] = []
    sigmas = []
    for record, mixed_probs in zip(dist.records, mixed):
        sigma = np.zeros(len(record.patterns), dtype=np.float64)
        if record.q_j <= 0.0:
            sigmas.append(sigma)
            entries.append(SyndromeRate(record.syndrome, record.q_j, 0.0, Consumption(0.0, 0.0, 0.0)))
            continue
        for i, (q_i, row) in enumerate(zip(record.bit_pattern_probs, record.phase_syndrome_probs)):
            if q_i > 0.0:
                sigma[i] = _mixture_entropy(row / q_i, phase_syndromes, p)
        w = record.pattern_weights
        bit = float(entropy_bits(mixed_probs / record.q_j))
        if variant == OTP_VARIANT:
            phase = float(np.dot(w, record.phase_pattern_entropies - sigma))
            rate = 1.0 - (bit + phase) / n
        else:
            phase = float(np.dot(w, record.phase_syndrome_entropies - sigma))
            rate = k / n - (bit + phase) / n
            phase += n - k
        # rounding near the threshold leaves ~1e-16 instead of 0
        rate = rate if rate > ZERO_RATE_TOLERANCE else 0.0
        sigmas.append(sigma)
        entries.append(SyndromeRate(record.syndrome, record.q_j, rate, Consumption(bit, phase, bit + phase)))
    overhead = (n - k) / n if variant == OTP_VARIANT else 0.0
    report = build_report(VARIANT_FORMULAS[variant], dist, entries, overhead, noise_p=p)
    return NoiseAnalysis(p, mixed, tuple(sigmas), report)


def optimize_noise(dist: SyndromeDistribution, variant: str) -> Tuple[float, NoiseAnalysis]:
    """Maximizes the adding-noise rate over p in [0, 0.5].

    A 101-point grid locates the best region, golden-section search refines
    it to 1e-5. The result is never below the p = 0 rate.
    """
    search = grid_then_refine(
        lambda p: rate_adding_noise(dist, p, variant).report.total_rate_raw,
        0.0,
        MAX_NOISE,
        NOISE_GRID_POINTS,
        NOISE_TOLERANCE,
        maximize=True,
    )
    best = min(max(search.x, 0.0), MAX_NOISE)
    logger.info("best noise for %s (%s): p=%.6f rate=%.6f", dist.code.label, variant, best, search.value)
    return best, rate_adding_noise(dist, best, variant)
