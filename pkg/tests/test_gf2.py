import numpy as np
import pytest

from app.qkd.base.gf2 import (
    BitMatrix,
    BitVector,
    all_patterns,
    hamming_distance,
    hamming_weight,
    kernel_basis,
    mat_mul,
    mat_vec_mul,
    pack_bits,
    popcount,
    row_reduce,
    standard_form,
)
from app.qkd.errors import DimensionError, ParameterError

HAMMING_ROWS = ["1001101", "0101011", "0010111"]


def test_bit_vector_string_and_int_agree():
    v = BitVector.from_string("0110")
    assert v.to_int() == 6
    assert BitVector.from_int(6, 4) == v
    assert str(v) == "0110"
    assert len(v) == 4 and v[1] == 1


def test_bit_vector_from_int_rejects_overflow():
    with pytest.raises(ParameterError):
        BitVector.from_int(16, 4)


def test_bit_vector_rejects_non_binary():
    with pytest.raises(ParameterError):
        BitVector.from_string("0120")


def test_xor_requires_equal_length():
    with pytest.raises(DimensionError):
        BitVector.from_string("01") ^ BitVector.from_string("011")
    assert BitVector.from_string("0110") ^ BitVector.from_string("1100") == BitVector.from_string("1010")


def test_weight_and_distance():
    x = BitVector.from_string("1011")
    y = BitVector.from_string("0001")
    assert hamming_weight(x) == 3
    assert hamming_distance(x, y) == 2


def test_mat_vec_mul_parity_of_rows():
    h = BitMatrix.from_rows(HAMMING_ROWS)
    assert str(mat_vec_mul(h, BitVector.from_string("1000000"))) == "100"
    assert str(mat_vec_mul(h, BitVector.from_string("0000111"))) == "001"
    with pytest.raises(DimensionError):
        mat_vec_mul(h, BitVector.from_string("101"))


def test_empty_matrix_gives_empty_syndrome():
    empty = BitMatrix.from_rows([], cols=3)
    assert empty.rows == 0
    assert mat_vec_mul(empty, BitVector.from_string("101")).length == 0


def test_mat_mul_over_gf2():
    a = BitMatrix.from_rows(["11", "01"])
    product = mat_mul(a, a)
    assert product.tolist() == [[1, 0], [0, 1]]
    with pytest.raises(DimensionError):
        mat_mul(a, BitMatrix.from_rows(["111"]))


def test_ragged_rows_rejected():
    with pytest.raises(DimensionError):
        BitMatrix.from_rows(["101", "10"])


def test_array_view_is_read_only():
    m = BitMatrix.from_rows(["10", "01"])
    with pytest.raises(ValueError):
        m.array[0, 0] = 0


def test_row_reduce_reports_pivots():
    reduced, pivots = row_reduce(np.array([[1, 1, 0], [1, 1, 0], [0, 1, 1]]))
    assert pivots == [0, 1]
    assert reduced.tolist() == [[1, 0, 1], [0, 1, 1]]


def test_standard_form_of_hamming_code():
    form = standard_form(BitMatrix.from_rows(HAMMING_ROWS))
    assert form.rank == 3
    assert form.column_permutation == (3, 4, 5, 6, 0, 1, 2)
    assert form.canonical.row_strings() == ["1101100", "1011010", "0111001"]


def test_standard_form_detects_rank_deficiency():
    form = standard_form(BitMatrix.from_rows(["110", "011", "101"]))
    assert form.rank == 2


def test_kernel_basis_is_annihilated():
    h = BitMatrix.from_rows(HAMMING_ROWS)
    basis = kernel_basis(h)
    assert basis.shape == (7, 4)
    assert not np.any((h.array.astype(int) @ basis) % 2)
    _, pivots = row_reduce(basis.T)
    assert len(pivots) == 4


def test_patterns_pack_and_popcount():
    patterns = all_patterns(3)
    assert patterns.shape == (8, 3)
    assert pack_bits(patterns).tolist() == list(range(8))
    assert popcount(np.array([0, 1, 3, 7, 8])).tolist() == [0, 1, 2, 3, 1]
    assert pack_bits(np.zeros((4, 0))).tolist() == [0, 0, 0, 0]
