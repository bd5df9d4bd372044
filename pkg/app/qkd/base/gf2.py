from dataclasses import dataclass
from functools import cached_property
from typing import List, NamedTuple, Sequence, Tuple, Union

import numpy as np

from app.qkd.errors import DimensionError, ParameterError

BitRow = Union[str, Sequence[int]]


def _as_bits(values) -> Tuple[int, ...]:
    """Normalizes an iterable of 0/1 values (or a "0101" string) into a tuple.

    Args:
        values: Bits as integers, booleans or characters.

    Returns:
        Tuple of ints in {0, 1}.
    """
    bits = []
    for value in values:
        bit = int(value)
        if bit not in (0, 1):
            raise ParameterError(f"invalid_bit: {value!r} is not 0 or 1")
        bits.append(bit)
    return tuple(bits)


@dataclass(frozen=True)
class BitVector:
    """Ordered bit string over GF(2).

    Index 0 is the leftmost bit as printed (the first column of a parity
    check matrix). Integer conversions treat that bit as the most
    significant one, so integer order equals lexicographic order.

    Args:
        bits: Tuple of 0/1 values.
    """

    bits: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", _as_bits(self.bits))

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        """Parses a printed bit string such as ``"0110"``."""
        return cls(_as_bits(text.strip()))

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitVector":
        """Builds a vector from an integer, leftmost bit most significant.

        Args:
            value: Non-negative integer below ``2**length``.
            length: Number of bits.

        Returns:
            The corresponding BitVector.
        """
        if not 0 <= value < (1 << length):
            raise ParameterError(f"invalid_value: {value} does not fit in {length} bits")
        return cls(tuple((value >> (length - 1 - i)) & 1 for i in range(length)))

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls((0,) * length)

    @property
    def length(self) -> int:
        return len(self.bits)

    def to_int(self) -> int:
        value = 0
        for bit in self.bits:
            value = (value << 1) | bit
        return value

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.uint8)

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, index: int) -> int:
        return self.bits[index]

    def __xor__(self, other: "BitVector") -> "BitVector":
        if other.length != self.length:
            raise DimensionError(f"dimension_mismatch: {self.length} != {other.length}")
        return BitVector(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def __str__(self) -> str:
        return "".join(str(bit) for bit in self.bits)


@dataclass(frozen=True)
class BitMatrix:
    """Dense binary matrix stored row-major.

    Equality and hashing use ``(rows, cols, entries)`` only, so two matrices
    are equal exactly when they print identically. ``rows`` may be zero for
    the empty parity check of the trivial full code.

    Args:
        rows: Number of rows.
        cols: Number of columns (at least 1).
        entries: Row-major tuple of 0/1 values.
    """

    rows: int
    cols: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_bits(self.entries))
        if self.cols < 1 or self.rows < 0:
            raise DimensionError(f"invalid_shape: {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"invalid_shape: {len(self.entries)} entries for {self.rows}x{self.cols}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[BitRow], cols: int = 0) -> "BitMatrix":
        """Builds a matrix from row sequences or printed row strings.

        Args:
            rows: Rows as ``"1011"`` strings or sequences of 0/1.
            cols: Column count, only needed when ``rows`` is empty.

        Returns:
            A BitMatrix.
        """
        parsed = [_as_bits(row) for row in rows]
        width = len(parsed[0]) if parsed else cols
        if any(len(row) != width for row in parsed):
            raise DimensionError("ragged_rows: all rows must have the same length")
        return cls(len(parsed), width, tuple(bit for row in parsed for bit in row))

    @classmethod
    def from_array(cls, array: np.ndarray) -> "BitMatrix":
        array = np.asarray(array)
        if array.ndim != 2:
            raise DimensionError(f"invalid_shape: expected 2-D array, got {array.ndim}-D")
        return cls(array.shape[0], array.shape[1], tuple(int(x) for x in array.reshape(-1)))

    @classmethod
    def identity(cls, size: int) -> "BitMatrix":
        return cls.from_array(np.eye(size, dtype=np.uint8))

    @cached_property
    def array(self) -> np.ndarray:
        """Read-only ``uint8`` view with shape ``(rows, cols)``."""
        view = np.array(self.entries, dtype=np.uint8).reshape(self.rows, self.cols)
        view.flags.writeable = False
        return view

    def row(self, index: int) -> BitVector:
        return BitVector(self.entries[index * self.cols:(index + 1) * self.cols])

    def transpose(self) -> "BitMatrix":
        if self.rows == 0:
            raise DimensionError("invalid_shape: cannot transpose a matrix without rows")
        return BitMatrix.from_array(self.array.T)

    def row_strings(self) -> List[str]:
        return [str(self.row(i)) for i in range(self.rows)]


class StandardForm(NamedTuple):
    """Result of :func:`standard_form`.

    ``canonical[:, c]`` is column ``column_permutation[c]`` of the row-reduced
    input (0-based), and ``canonical == [A | I_rank]``.
    """

    canonical: BitMatrix
    column_permutation: Tuple[int, ...]
    rank: int


def mat_vec_mul(m: BitMatrix, v: BitVector) -> BitVector:
    """Multiplies a matrix by a vector over GF(2).

    Args:
        m: Matrix with ``m.cols == v.length``.
        v: Input vector.

    Returns:
        Vector of length ``m.rows``; entry i is the parity of row i AND v.
    """
    if v.length != m.cols:
        raise DimensionError(f"dimension_mismatch: matrix has {m.cols} columns, vector has {v.length} bits")
    if m.rows == 0:
        return BitVector(())
    return BitVector(tuple(int(x) for x in (m.array.astype(np.int64) @ v.as_array()) % 2))


def mat_mul(a: BitMatrix, b: BitMatrix) -> np.ndarray:
    """Returns ``a @ b`` over GF(2) as a ``uint8`` array (may have zero rows)."""
    if a.cols != b.rows:
        raise DimensionError(f"dimension_mismatch: {a.rows}x{a.cols} times {b.rows}x{b.cols}")
    return ((a.array.astype(np.int64) @ b.array.astype(np.int64)) % 2).astype(np.uint8)


def hamming_weight(v: BitVector) -> int:
    return sum(v.bits)


def hamming_distance(x: BitVector, y: BitVector) -> int:
    return hamming_weight(x ^ y)


def row_reduce(array: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Reduces a binary array to reduced row echelon form.

    Only row swaps and row additions are used; the column order is kept.

    Args:
        array: Binary array of shape ``(rows, cols)``.

    Returns:
        The nonzero rows of the RREF and the list of pivot columns.
    """
    reduced = np.array(array, dtype=np.uint8) % 2
    rows, cols = reduced.shape
    pivots: List[int] = []
    top = 0
    for col in range(cols):
        if top == rows:
            break
        hits = np.nonzero(reduced[top:, col])[0]
        if hits.size == 0:
            continue
        pivot_row = top + int(hits[0])
        if pivot_row != top:
            reduced[[top, pivot_row]] = reduced[[pivot_row, top]]
        others = np.nonzero(reduced[:, col])[0]
        others = others[others != top]
        reduced[others] ^= reduced[top]
        pivots.append(col)
        top += 1
    return reduced[:top], pivots


def standard_form(h: BitMatrix) -> StandardForm:
    """Brings a parity check matrix into the canonical form ``[A | I]``.

    Columns are only permuted, never added, so the permuted code is
    equivalent to the input code coordinate by coordinate. Pivot columns are
    moved to the right in their original order, the remaining columns keep
    their relative order on the left.

    Args:
        h: Parity check matrix.

    Returns:
        Canonical matrix (rank rows), 0-based column permutation and GF(2)
        row rank. A rank below ``h.rows`` signals dependent rows; callers that
        need full rank must reject it.
    """
    if h.rows == 0:
        return StandardForm(h, tuple(range(h.cols)), 0)
    reduced, pivots = row_reduce(h.array)
    pivot_set = set(pivots)
    permutation = [col for col in range(h.cols) if col not in pivot_set] + pivots
    canonical = BitMatrix(len(pivots), h.cols, tuple(int(x) for x in reduced[:, permutation].reshape(-1)))
    return StandardForm(canonical, tuple(permutation), len(pivots))


def kernel_basis(h: BitMatrix) -> np.ndarray:
    """Computes a basis of ``{x : h x = 0}`` as the columns of an array.

    Args:
        h: Binary matrix with ``cols`` columns.

    Returns:
        ``uint8`` array of shape ``(cols, cols - rank)``.
    """
    form = standard_form(h)
    free = h.cols - form.rank
    permuted = np.zeros((h.cols, free), dtype=np.uint8)
    permuted[:free] = np.eye(free, dtype=np.uint8)
    if form.rank:
        permuted[free:] = form.canonical.array[:, :free]
    basis = np.zeros_like(permuted)
    basis[list(form.column_permutation)] = permuted
    return basis


def all_patterns(n: int) -> np.ndarray:
    """Enumerates ``{0,1}^n`` in integer order as a ``(2**n, n)`` bit array."""
    values = np.arange(1 << n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((values[:, None] >> shifts) & 1).astype(np.uint8)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Packs rows of a bit array into integers, first column most significant."""
    bits = np.asarray(bits, dtype=np.int64)
    width = bits.shape[-1]
    if width == 0:
        return np.zeros(bits.shape[:-1], dtype=np.int64)
    weights = np.int64(1) << np.arange(width - 1, -1, -1, dtype=np.int64)
    return bits @ weights


def popcount(values: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(values, dtype=np.int64)).astype(np.int64)
