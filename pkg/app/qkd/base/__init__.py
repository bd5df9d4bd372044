from .gf2 import BitMatrix, BitVector, StandardForm, mat_vec_mul, hamming_weight, hamming_distance, standard_form
from .codes import LinearCode, SyndromeTable, make_repetition, make_single_parity, make_full, make_hamming743
from .channel import BellDiagonal, ConditionalPhase, from_bb84, six_state, from_probs, conditional_phase
from . import notation

__all__ = [
    "BitMatrix",
    "BitVector",
    "StandardForm",
    "mat_vec_mul",
    "hamming_weight",
    "hamming_distance",
    "standard_form",
    "LinearCode",
    "SyndromeTable",
    "make_repetition",
    "make_single_parity",
    "make_full",
    "make_hamming743",
    "BellDiagonal",
    "ConditionalPhase",
    "from_bb84",
    "six_state",
    "from_probs",
    "conditional_phase",
    "notation",
]
