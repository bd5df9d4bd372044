from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from app.qkd.errors import ChannelError

BB84 = "bb84"
SIX_STATE = "six-state"
PROTOCOLS = (BB84, SIX_STATE)

SUM_TOLERANCE = 1e-12
RENORMALIZE_TOLERANCE = 1e-9
CLAMP_TOLERANCE = 1e-15


@dataclass(frozen=True)
class BellDiagonal:
    """Per-qubit Bell-diagonal error model.

    ``p_ab`` is the probability of bit error ``a`` together with phase
    error ``b``.

    Args:
        p00: No error.
        p01: Phase error only.
        p10: Bit error only.
        p11: Bit and phase error.
    """

    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self):
        probs = self.probs
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ChannelError(f"invalid_channel: probabilities {probs} outside [0, 1]")
        if abs(sum(probs) - 1.0) > SUM_TOLERANCE:
            raise ChannelError(f"invalid_channel: probabilities sum to {sum(probs)!r}")

    @property
    def probs(self) -> Tuple[float, float, float, float]:
        return (self.p00, self.p01, self.p10, self.p11)

    @property
    def delta_b(self) -> float:
        return self.p10 + self.p11

    @property
    def delta_p(self) -> float:
        return self.p01 + self.p11

    def as_array(self) -> np.ndarray:
        """Probabilities as a 2x2 array indexed ``[bit, phase]``."""
        return np.array([[self.p00, self.p01], [self.p10, self.p11]], dtype=np.float64)


@dataclass(frozen=True)
class ConditionalPhase:
    """Phase-error probabilities conditioned on the bit-error outcome.

    Args:
        delta_p0: P(phase error | no bit error).
        delta_p1: P(phase error | bit error).
    """

    delta_p0: float
    delta_p1: float


def _clamp(value: float) -> float:
    if value < -CLAMP_TOLERANCE:
        raise ChannelError(f"invalid_channel: negative probability {value!r}")
    return max(value, 0.0)


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ChannelError(f"invalid_{name}: {value!r} outside [0, 1]")


def q11_interval(delta_b: float, delta_p: float) -> Tuple[float, float]:
    """Valid range of the BB84 free parameter for given error rates."""
    _check_probability("delta_b", delta_b)
    _check_probability("delta_p", delta_p)
    return max(0.0, delta_b + delta_p - 1.0), min(delta_b, delta_p)


def from_bb84(delta_b: float, delta_p: float, q11: float) -> BellDiagonal:
    """Builds the channel seen by BB84 for one value of the free parameter.

    BB84 only pins the marginal bit and phase error rates; ``q11`` (the
    probability of both errors) is left to the adversary.

    Args:
        delta_b: Bit error rate.
        delta_p: Phase error rate.
        q11: Joint error probability inside ``q11_interval(delta_b, delta_p)``.

    Returns:
        The Bell-diagonal channel.
    """
    low, high = q11_interval(delta_b, delta_p)
    if not low - CLAMP_TOLERANCE <= q11 <= high + CLAMP_TOLERANCE:
        raise ChannelError(f"invalid_q11: {q11!r} outside [{low!r}, {high!r}]")
    return BellDiagonal(
        _clamp(1.0 - delta_b - delta_p + q11),
        _clamp(delta_p - q11),
        _clamp(delta_b - q11),
        _clamp(q11),
    )


def six_state(q: float) -> BellDiagonal:
    """Six-state channel with error rate ``q``: diag(1-3q/2, q/2, q/2, q/2)."""
    if not 0.0 <= q <= 2.0 / 3.0 + CLAMP_TOLERANCE:
        raise ChannelError(f"invalid_qber: six-state needs 0 <= q <= 2/3, got {q!r}")
    half = q / 2.0
    return BellDiagonal(_clamp(1.0 - 3.0 * half), half, half, half)


def from_probs(p00: float, p01: float, p10: float, p11: float) -> BellDiagonal:
    """Builds a channel from explicit probabilities, renormalizing tiny drift."""
    probs = (p00, p01, p10, p11)
    if any(p < 0.0 for p in probs):
        raise ChannelError(f"invalid_channel: negative probability in {probs}")
    total = sum(probs)
    if total <= 0.0:
        raise ChannelError("invalid_channel: probabilities sum to zero")
    if abs(total - 1.0) > RENORMALIZE_TOLERANCE:
        raise ChannelError(f"invalid_channel: probabilities sum to {total!r}")
    return BellDiagonal(*(p / total for p in probs))


def conditional_phase(channel: BellDiagonal) -> ConditionalPhase:
    """Splits the phase error rate by bit-error branch.

    A branch with zero probability gets conditional value 0.
    """
    no_bit = channel.p00 + channel.p01
    bit = channel.p10 + channel.p11
    delta_p0 = channel.p01 / no_bit if no_bit > 0.0 else 0.0
    delta_p1 = channel.p11 / bit if bit > 0.0 else 0.0
    return ConditionalPhase(delta_p0, delta_p1)


def from_protocol(protocol: str, qber: float, q11: Optional[float] = None) -> BellDiagonal:
    """Channel for a symmetric protocol run at error rate ``qber``.

    BB84 uses ``delta_b = delta_p = qber`` and needs an explicit ``q11``.
    """
    if protocol == SIX_STATE:
        return six_state(qber)
    if protocol == BB84:
        if q11 is None:
            raise ChannelError("invalid_q11: bb84 requires a q11 value")
        return from_bb84(qber, qber, q11)
    raise ChannelError(f"invalid_protocol: {protocol!r}")
