from .montecarlo import McConfig, SyndromeStat, empirical_syndrome_stats, sample_error_patterns
from .hashing import HashLabResult, hash_identification_experiment, required_tag_length, weight_bounded_set

__all__ = [
    "McConfig",
    "SyndromeStat",
    "empirical_syndrome_stats",
    "sample_error_patterns",
    "HashLabResult",
    "hash_identification_experiment",
    "required_tag_length",
    "weight_bounded_set",
]
