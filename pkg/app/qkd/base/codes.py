import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from app.qkd.base.gf2 import (
    BitMatrix,
    BitVector,
    all_patterns,
    kernel_basis,
    mat_vec_mul,
    pack_bits,
    standard_form,
)
from app.qkd.errors import KeyRateError, ParameterError, RankError, SizeGuardError

logger = logging.getLogger(__name__)

ENUMERATION_GUARD = 14
DISTANCE_GUARD = 24
BIT = "bit"
PHASE = "phase"


@dataclass(frozen=True)
class LinearCode:
    """An [n k d] binary linear code.

    Keeps both matrices so bit syndromes (H e) and phase syndromes (G^T e)
    are available without recomputation.

    Args:
        n: Block length.
        k: Message length.
        d: Minimum distance, or None when it was not computed.
        parity_check: (n-k) x n matrix H with full row rank.
        generator: n x k matrix G with H G = 0.
        label: Human-readable name such as "[7 4 3]".
    """

    n: int
    k: int
    d: Optional[int]
    parity_check: BitMatrix
    generator: BitMatrix
    label: str

    def syndrome(self, pattern: BitVector) -> BitVector:
        """Bit-error syndrome H e (empty for the full code)."""
        return mat_vec_mul(self.parity_check, pattern)

    def phase_syndrome(self, pattern: BitVector) -> BitVector:
        """Phase-error syndrome G^T e, a k-bit vector."""
        return mat_vec_mul(self.generator.transpose(), pattern)

    def encode(self, message: BitVector) -> BitVector:
        return mat_vec_mul(self.generator, message)

    def codewords(self) -> np.ndarray:
        """All 2^k codewords as rows of a bit array, in message order."""
        if self.n > DISTANCE_GUARD:
            raise SizeGuardError(f"size_guard: n={self.n} exceeds {DISTANCE_GUARD}")
        messages = all_patterns(self.k).astype(np.int64)
        return ((messages @ self.generator.array.T.astype(np.int64)) % 2).astype(np.uint8)


class SyndromeTable(NamedTuple):
    """Partition of {0,1}^n into cosets of equal syndrome.

    ``cosets[j]`` lists the patterns with syndrome ``syndromes[j]``; its
    first entry is the minimum-weight representative, ties broken by
    lexicographic order.
    """

    kind: str
    syndromes: Tuple[BitVector, ...]
    cosets: Tuple[Tuple[BitVector, ...], ...]


class CosetLayout(NamedTuple):
    """Integer view of a code's syndrome structure, shared by the rate code.

    Patterns are integers whose most significant bit is bit 1. All arrays
    are read-only.
    """

    bit_syndrome: np.ndarray
    phase_syndrome: np.ndarray
    cosets: np.ndarray
    weights: np.ndarray


def _repetition_parity(n: int) -> BitMatrix:
    rows = []
    for i in range(n - 1):
        row = [0] * n
        row[i] = row[i + 1] = 1
        rows.append(row)
    return BitMatrix.from_rows(rows)


def _label(n: int, k: int, d: Optional[int]) -> str:
    return f"[{n} {k} {'?' if d is None else d}]"


def make_repetition(n: int) -> LinearCode:
    """Builds the [n 1 n] repetition code.

    Parity checks compare adjacent bits, the generator is the all-ones
    column.

    Args:
        n: Block length, at least 2.

    Returns:
        The repetition code.
    """
    if n < 2:
        raise ParameterError(f"invalid_length: repetition code needs n >= 2, got {n}")
    generator = BitMatrix(n, 1, (1,) * n)
    return LinearCode(n, 1, n, _repetition_parity(n), generator, _label(n, 1, n))


def make_single_parity(m: int) -> LinearCode:
    """Builds the [m m-1 2] single-parity-check code."""
    if m < 2:
        raise ParameterError(f"invalid_length: single parity code needs m >= 2, got {m}")
    return from_parity_matrix(BitMatrix(1, m, (1,) * m), declared_d=2)


def make_full(n: int) -> LinearCode:
    """Builds the trivial [n n 1] code whose parity check matrix has no rows.

    Grouping n qubits under this code is plain one-way post-processing.
    """
    if n < 1:
        raise ParameterError(f"invalid_length: full code needs n >= 1, got {n}")
    return LinearCode(n, n, 1, BitMatrix(0, n, ()), BitMatrix.identity(n), _label(n, n, 1))


def make_hamming743() -> LinearCode:
    h = BitMatrix.from_rows(["1001101", "0101011", "0010111"])
    return from_parity_matrix(h, declared_d=3)


def minimum_distance(generator: BitMatrix) -> int:
    """Finds the minimum weight of a nonzero codeword by exhaustive scan.

    Args:
        generator: n x k generator matrix.

    Returns:
        The minimum distance d.
    """
    if generator.rows > DISTANCE_GUARD:
        raise SizeGuardError(
            f"size_guard: minimum distance scan needs n <= {DISTANCE_GUARD}, got {generator.rows}; declare d"
        )
    messages = all_patterns(generator.cols)[1:].astype(np.int64)
    words = (messages @ generator.array.T.astype(np.int64)) % 2
    distance = int(words.sum(axis=1).min())
    logger.debug("minimum distance %d over %d codewords", distance, len(words))
    return distance


def from_parity_matrix(
    h: BitMatrix, declared_d: Optional[int] = None, label: Optional[str] = None
) -> LinearCode:
    """Builds a code from its parity check matrix.

    Args:
        h: (n-k) x n matrix with full row rank.
        declared_d: Known minimum distance; computed when omitted.
        label: Optional display name; defaults to "[n k d]".

    Returns:
        The code with a kernel-basis generator.
    """
    form = standard_form(h)
    if form.rank < h.rows:
        raise RankError(f"rank_deficient: parity check has rank {form.rank} < {h.rows} rows")
    k = h.cols - form.rank
    if k < 1:
        raise ParameterError("empty_code: parity check matrix leaves no message bits")
    generator = BitMatrix.from_array(kernel_basis(h))
    if h.rows and np.any((h.array.astype(np.int64) @ generator.array) % 2):
        raise KeyRateError("kernel_basis: H G != 0")
    d = declared_d if declared_d is not None else minimum_distance(generator)
    return LinearCode(h.cols, k, d, h, generator, label or _label(h.cols, k, d))


def dual(code: LinearCode) -> LinearCode:
    """Swaps the roles of H and G: H' = G^T, G' = H^T."""
    if code.k == code.n:
        raise ParameterError("empty_code: the dual of a full code has no message bits")
    parity = code.generator.transpose()
    generator = code.parity_check.transpose()
    k = code.n - code.k
    d = minimum_distance(generator) if code.n <= DISTANCE_GUARD else None
    return LinearCode(code.n, k, d, parity, generator, _label(code.n, k, d))


def _check_guard(code: LinearCode) -> None:
    if code.n > ENUMERATION_GUARD:
        raise SizeGuardError(f"size_guard: n={code.n} exceeds enumeration guard {ENUMERATION_GUARD}")


@lru_cache(maxsize=64)
def coset_layout(code: LinearCode) -> CosetLayout:
    """Enumerates {0,1}^n once and groups patterns by bit syndrome.

    Args:
        code: Code with n under the enumeration guard.

    Returns:
        Per-pattern bit and phase syndromes (as integers), the coset matrix
        of shape (2^(n-k), 2^k) and per-pattern weights.
    """
    _check_guard(code)
    patterns = all_patterns(code.n).astype(np.int64)
    values = np.arange(1 << code.n, dtype=np.int64)
    weights = patterns.sum(axis=1)
    bit = pack_bits((patterns @ code.parity_check.array.T.astype(np.int64)) % 2)
    phase = pack_bits((patterns @ code.generator.array.astype(np.int64)) % 2)
    order = np.lexsort((values, weights, bit))
    cosets = values[order].reshape(1 << (code.n - code.k), 1 << code.k)
    for array in (bit, phase, cosets, weights):
        array.flags.writeable = False
    return CosetLayout(bit, phase, cosets, weights)


def syndrome_table(code: LinearCode, kind: str = BIT) -> SyndromeTable:
    """Lists every syndrome of one kind together with its coset.

    Args:
        code: Code with n under the enumeration guard.
        kind: "bit" (H e) or "phase" (G^T e).

    Returns:
        A SyndromeTable in syndrome order.
    """
    if kind not in (BIT, PHASE):
        raise ParameterError(f"invalid_kind: {kind!r}")
    layout = coset_layout(code)
    n = code.n
    if kind == BIT:
        width = n - code.k
        groups: List[np.ndarray] = list(layout.cosets)
    else:
        width = code.k
        values = np.arange(1 << n, dtype=np.int64)
        order = np.lexsort((values, layout.weights, layout.phase_syndrome))
        groups = list(values[order].reshape(1 << code.k, 1 << (n - code.k)))
    syndromes = tuple(BitVector.from_int(j, width) for j in range(1 << width))
    cosets = tuple(tuple(BitVector.from_int(int(e), n) for e in group) for group in groups)
    return SyndromeTable(kind, syndromes, cosets)
