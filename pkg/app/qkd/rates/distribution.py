"""Exact syndrome statistics of a linear code on a Bell-diagonal channel.

For every bit syndrome ``j`` this module computes the probability ``q^j``,
the coset pattern probabilities ``q^j_i``, the phase-syndrome table
``q^{jj'}_i`` and the two conditional joint entropies the rate formulas
consume.

Given a bit pattern the phase errors are independent per qubit, so the
phase-pattern entropy factorizes into ``(n - w) h(delta_p0) + w h(delta_p1)``
and the 4^n joint distribution is never enumerated. The phase-syndrome
distribution of each bit pattern is built qubit by qubit over the 2^k
syndrome values.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np
from scipy.special import entr

from app.qkd.base.channel import BellDiagonal, ConditionalPhase, conditional_phase
from app.qkd.base.codes import LinearCode, coset_layout
from app.qkd.base.gf2 import BitVector, pack_bits
from app.qkd.rates.entropy import binary_entropy, entropy_bits

logger = logging.getLogger(__name__)

TABLE_GUARD = 22
CHUNK_CELLS = 1 << 20


@dataclass(frozen=True, eq=False)
class SyndromeRecord:
    """Statistics of one bit syndrome.

    Arrays are indexed by position in the coset (minimum weight first).

    Args:
        syndrome: Bit syndrome H e.
        q_j: Probability of the syndrome.
        patterns: Coset patterns as integers (bit 1 most significant).
        bit_pattern_probs: Unnormalized ``q^j_i`` per pattern.
        phase_syndrome_probs: Unnormalized ``q^{jj'}_i`` table, shape
            (2^k, 2^k), or None when tables were not stored.
        phase_pattern_entropies: H(e_p | e_b = i) in bits.
        phase_syndrome_entropies: h({q^{jj'}_i / q^j_i}_{j'}) in bits.
        bit_entropy: h({q^j_i / q^j}) in bits.
        joint_entropy_full: h_j, entropy of (bit pattern, phase pattern).
        joint_entropy_phase_syndrome: h_j_ps, entropy of (bit pattern,
            phase syndrome).
    """

    syndrome: BitVector
    q_j: float
    patterns: np.ndarray
    bit_pattern_probs: np.ndarray
    phase_syndrome_probs: Optional[np.ndarray]
    phase_pattern_entropies: np.ndarray
    phase_syndrome_entropies: np.ndarray
    bit_entropy: float
    joint_entropy_full: float
    joint_entropy_phase_syndrome: float

    @property
    def pattern_weights(self) -> np.ndarray:
        """Conditional weights ``q^j_i / q^j`` (zeros for an impossible syndrome)."""
        if self.q_j <= 0.0:
            return np.zeros_like(self.bit_pattern_probs)
        return self.bit_pattern_probs / self.q_j


@dataclass(frozen=True, eq=False)
class SyndromeDistribution:
    """All per-syndrome records of one (code, channel) pair, in syndrome order."""

    code: LinearCode
    channel: BellDiagonal
    conditional: ConditionalPhase
    records: Tuple[SyndromeRecord, ...]

    @property
    def syndrome_probs(self) -> np.ndarray:
        return np.array([record.q_j for record in self.records])

    def syndrome_entropy(self) -> float:
        """h({q^j}), the cost of announcing the bit syndrome after hashing."""
        return float(entropy_bits(self.syndrome_probs))


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def phase_syndrome_conditionals(
    code: LinearCode, conditional: ConditionalPhase, patterns: np.ndarray
) -> Iterator[Tuple[int, np.ndarray]]:
    """Yields P(phase syndrome | bit pattern) for batches of bit patterns.

    Args:
        code: The code; row m of G is the syndrome flipped by a phase error
            on qubit m.
        conditional: Per-qubit phase error rates for each bit-error branch.
        patterns: Bit patterns as integers.

    Yields:
        ``(offset, table)`` with ``table[r, s]`` the probability of phase
        syndrome ``s`` given pattern ``patterns[offset + r]``.
    """
    size = 1 << code.k
    rows = pack_bits(code.generator.array)
    index = np.arange(size, dtype=np.int64)
    batch = max(1, CHUNK_CELLS // size)
    for offset in range(0, len(patterns), batch):
        block = patterns[offset:offset + batch]
        table = np.zeros((len(block), size), dtype=np.float64)
        table[:, 0] = 1.0
        for m in range(code.n):
            bits = (block >> (code.n - 1 - m)) & 1
            delta = np.where(bits == 1, conditional.delta_p1, conditional.delta_p0)[:, None]
            table = (1.0 - delta) * table + delta * table[:, index ^ rows[m]]
        yield offset, table


def syndrome_distribution(
    code: LinearCode, channel: BellDiagonal, store_tables: Optional[bool] = None
) -> SyndromeDistribution:
    """Computes the syndrome probability hierarchy by exact enumeration.

    Args:
        code: Code with n under the enumeration guard.
        channel: Per-qubit Bell-diagonal channel.
        store_tables: Keep the (2^k x 2^k) phase-syndrome tables per
            syndrome. Defaults to True when n + k stays under TABLE_GUARD.

    Returns:
        An immutable SyndromeDistribution.
    """
    layout = coset_layout(code)
    n = code.n
    if store_tables is None:
        store_tables = n + code.k <= TABLE_GUARD
    conditional = conditional_phase(channel)
    h0 = binary_entropy(conditional.delta_p0)
    h1 = binary_entropy(conditional.delta_p1)
    delta_b = channel.delta_b
    weights = layout.weights
    pattern_probs = (1.0 - delta_b) ** (n - weights) * delta_b ** weights
    pattern_entropies = (n - weights) * h0 + weights * h1
    width = n - code.k

    records = []
    for j, coset in enumerate(layout.cosets):
        probs = pattern_probs[coset]
        q_j = math.fsum(probs.tolist())
        ps_entropies = np.empty(len(coset), dtype=np.float64)
        joint_cells = np.empty((len(coset), 1 << code.k), dtype=np.float64) if store_tables else None
        cell_entr = 0.0
        for offset, table in phase_syndrome_conditionals(code, conditional, coset):
            stop = offset + len(table)
            ps_entropies[offset:stop] = entropy_bits(table)
            cells = probs[offset:stop, None] * table
            cell_entr += float(entr(cells).sum())
            if joint_cells is not None:
                joint_cells[offset:stop] = cells
        phase_entropies = pattern_entropies[coset].astype(np.float64)
        if q_j > 0.0:
            w = probs / q_j
            bit_entropy = float(entropy_bits(w))
            h_full = bit_entropy + float(np.dot(w, phase_entropies))
            # -sum (c/q) ln(c/q) = (sum entr(c)) / q + ln q
            h_ps = max((cell_entr / q_j + math.log(q_j)) / math.log(2.0), 0.0)
        else:
            bit_entropy = h_full = h_ps = 0.0
        records.append(
            SyndromeRecord(
                syndrome=BitVector.from_int(j, width),
                q_j=q_j,
                patterns=coset,
                bit_pattern_probs=_readonly(probs),
                phase_syndrome_probs=None if joint_cells is None else _readonly(joint_cells),
                phase_pattern_entropies=_readonly(phase_entropies),
                phase_syndrome_entropies=_readonly(ps_entropies),
                bit_entropy=bit_entropy,
                joint_entropy_full=h_full,
                joint_entropy_phase_syndrome=h_ps,
            )
        )
    logger.debug("syndrome distribution for %s: %d syndromes", code.label, len(records))
    return SyndromeDistribution(code, channel, conditional, tuple(records))
