from .entropy import binary_entropy, entropy_multiset
from .distribution import SyndromeDistribution, SyndromeRecord, syndrome_distribution
from .formulas import (
    FORMULAS,
    KeyRateReport,
    compute_rate,
    kept_syndromes,
    rate_inplace,
    rate_no_otp,
    rate_one_way,
    rate_otp,
    rate_otp_hash,
    rate_parity_otp,
)
from .noise import NoiseAnalysis, mixed_bit_distribution, optimize_noise, rate_adding_noise, sigma_entropy

__all__ = [
    "binary_entropy",
    "entropy_multiset",
    "SyndromeDistribution",
    "SyndromeRecord",
    "syndrome_distribution",
    "FORMULAS",
    "KeyRateReport",
    "compute_rate",
    "kept_syndromes",
    "rate_inplace",
    "rate_no_otp",
    "rate_one_way",
    "rate_otp",
    "rate_otp_hash",
    "rate_parity_otp",
    "NoiseAnalysis",
    "mixed_bit_distribution",
    "optimize_noise",
    "rate_adding_noise",
    "sigma_entropy",
]
