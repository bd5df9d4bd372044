"""Seeded sampling of error patterns and empirical syndrome statistics.

The pinned generator is numpy's PCG64. A configuration with ``shards > 1``
splits the samples into contiguous shares, each drawn from a child of
``SeedSequence(seed)``; ``shards == 1`` is the single-stream reference
mode. Either way the same configuration reproduces the same bytes.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, Tuple

import numpy as np

from app.qkd.base.channel import BellDiagonal
from app.qkd.base.codes import LinearCode, coset_layout
from app.qkd.base.gf2 import BitVector, pack_bits
from app.qkd.errors import ParameterError
from app.qkd.rates.distribution import SyndromeDistribution

logger = logging.getLogger(__name__)

DEFAULT_SEED = 42
CHUNK_SIZE = 1 << 16
MAX_SEED = 1 << 64


def make_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo run description.

    Args:
        seed: 64-bit seed.
        samples: Number of n-qubit groups to draw.
        code: Code whose block length sets the group size.
        channel: Per-qubit channel.
        shards: Number of independent sub-streams.
    """

    seed: int
    samples: int
    code: LinearCode
    channel: BellDiagonal
    shards: int = 1

    def __post_init__(self):
        if not 0 <= self.seed < MAX_SEED:
            raise ParameterError(f"invalid_seed: {self.seed} is not a 64-bit value")
        if self.samples < 1:
            raise ParameterError(f"invalid_samples: {self.samples}")
        if self.shards < 1:
            raise ParameterError(f"invalid_shards: {self.shards}")


@dataclass(frozen=True)
class SyndromeStat:
    syndrome: BitVector
    empirical: float
    analytic: float
    z_score: float


def _shard_plan(cfg: McConfig) -> List[Tuple[np.random.Generator, int]]:
    if cfg.shards == 1:
        return [(make_generator(cfg.seed), cfg.samples)]
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.shards)
    base, extra = divmod(cfg.samples, cfg.shards)
    return [
        (np.random.Generator(np.random.PCG64(child)), base + (1 if index < extra else 0))
        for index, child in enumerate(children)
    ]


def sample_error_patterns(cfg: McConfig) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Streams i.i.d. (bit pattern, phase pattern) pairs in batches.

    Each qubit draws its Bell-basis outcome ``ab`` with probability
    ``p_ab``; ``a`` is the bit error and ``b`` the phase error.

    Args:
        cfg: Run configuration.

    Yields:
        Arrays of bit patterns and phase patterns as integers, bit 1 most
        significant, in shard order.
    """
    n = cfg.code.n
    probs = np.array(cfg.channel.probs, dtype=np.float64)
    for generator, count in _shard_plan(cfg):
        remaining = count
        while remaining > 0:
            size = min(CHUNK_SIZE, remaining)
            outcomes = generator.choice(4, size=(size, n), p=probs)
            yield pack_bits(outcomes >> 1), pack_bits(outcomes & 1)
            remaining -= size


def empirical_syndrome_stats(cfg: McConfig, dist: SyndromeDistribution) -> List[SyndromeStat]:
    """Compares sampled bit-syndrome frequencies with the exact distribution.

    Args:
        cfg: Run configuration; its code and channel must match ``dist``.
        dist: Exact distribution.

    Returns:
        Per syndrome, empirical frequency, exact probability and z-score.
    """
    if cfg.code != dist.code or cfg.channel != dist.channel:
        raise ParameterError("mismatched_config: sampling config and distribution differ in code or channel")
    layout = coset_layout(cfg.code)
    counts = np.zeros(len(dist.records), dtype=np.int64)
    for bits, _ in sample_error_patterns(cfg):
        counts += np.bincount(layout.bit_syndrome[bits], minlength=len(counts))
    stats = []
    for record, count in zip(dist.records, counts):
        empirical = count / cfg.samples
        variance = record.q_j * (1.0 - record.q_j) / cfg.samples
        if variance > 0.0:
            z = (empirical - record.q_j) / math.sqrt(variance)
        else:
            z = 0.0 if empirical == record.q_j else math.inf
        stats.append(SyndromeStat(record.syndrome, float(empirical), record.q_j, float(z)))
    logger.info("sampled %d groups, max |z| = %.3f", cfg.samples, max(abs(s.z_score) for s in stats))
    return stats
