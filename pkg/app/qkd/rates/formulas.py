import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from app.qkd.base.channel import BB84, SIX_STATE, BellDiagonal
from app.qkd.base.gf2 import BitVector, popcount, standard_form
from app.qkd.errors import ParameterError, RankError
from app.qkd.rates.distribution import SyndromeDistribution
from app.qkd.rates.entropy import binary_entropy, entropy_multiset

logger = logging.getLogger(__name__)

OTP = "otp"
OTP_HASH = "otp-hash"
NO_OTP = "no-otp"
INPLACE = "inplace"
PARITY_OTP = "parity-otp"
NOISE_OTP = "noise-otp"
NOISE_NO_OTP = "noise-no-otp"

FORMULAS = (OTP, OTP_HASH, NO_OTP, INPLACE, PARITY_OTP)
NOISE_FORMULAS = (NOISE_OTP, NOISE_NO_OTP)


@dataclass(frozen=True)
class Consumption:
    """Key consumed by one group with a given syndrome, in bits per group.

    Args:
        bit: Bit-error reconciliation cost (I_b^j).
        phase: Averaged phase-error cost (the I_{p,i}^j average).
        total: bit + phase (R^j).
    """

    bit: float
    phase: float
    total: float


@dataclass(frozen=True)
class SyndromeRate:
    """Rate contribution of one bit syndrome.

    ``branches`` is only set by the parity-check method and holds the two
    candidate rates it maximizes over.
    """

    syndrome: BitVector
    q_j: float
    r_j: float
    consumption: Consumption
    branches: Optional[Tuple[float, float]] = None

    @property
    def kept(self) -> bool:
        return self.r_j > 0.0


@dataclass(frozen=True)
class KeyRateReport:
    """Per-syndrome rates and totals for one formula on one distribution.

    Args:
        formula: Formula tag, one of FORMULAS or NOISE_FORMULAS.
        code_label: Label of the code.
        n: Block length.
        k: Message length.
        entries: One SyndromeRate per bit syndrome, in syndrome order.
        overhead: Formula-specific global cost subtracted from the sum.
        total_rate_raw: sum_j q^j r^j - overhead, may be negative.
        q11: BB84 free parameter the report was evaluated at, if any.
        noise_p: Noise weight for the adding-noise formulas, if any.
    """

    formula: str
    code_label: str
    n: int
    k: int
    entries: Tuple[SyndromeRate, ...]
    overhead: float
    total_rate_raw: float
    q11: Optional[float] = None
    noise_p: Optional[float] = None

    @property
    def total_rate(self) -> float:
        return max(self.total_rate_raw, 0.0)

    def with_params(self, q11: Optional[float] = None, noise_p: Optional[float] = None) -> "KeyRateReport":
        return replace(
            self,
            q11=self.q11 if q11 is None else q11,
            noise_p=self.noise_p if noise_p is None else noise_p,
        )


def build_report(
    formula: str,
    dist: SyndromeDistribution,
    entries: List[SyndromeRate],
    overhead: float,
    noise_p: Optional[float] = None,
) -> KeyRateReport:
    """Sums per-syndrome rates and subtracts the global overhead."""
    code = dist.code
    raw = math.fsum(entry.q_j * entry.r_j for entry in entries) - overhead
    return KeyRateReport(formula, code.label, code.n, code.k, tuple(entries), overhead, raw, noise_p=noise_p)


def _clamped(q_j: float, value: float) -> float:
    return max(value, 0.0) if q_j > 0.0 else 0.0


def _otp_entries(dist: SyndromeDistribution) -> List[SyndromeRate]:
    n = dist.code.n
    entries = []
    for record in dist.records:
        full = record.joint_entropy_full
        consumption = Consumption(record.bit_entropy, full - record.bit_entropy, full)
        entries.append(SyndromeRate(record.syndrome, record.q_j, _clamped(record.q_j, 1.0 - full / n), consumption))
    return entries


def rate_otp(dist: SyndromeDistribution) -> KeyRateReport:
    """Two-way post-processing with one-time-pad encrypted syndromes.

    r^j = max(1 - h_j / n, 0); the n - k pad bits spent per group are
    charged once as the global overhead (n - k) / n.
    """
    code = dist.code
    return build_report(OTP, dist, _otp_entries(dist), (code.n - code.k) / code.n)


def rate_otp_hash(dist: SyndromeDistribution) -> KeyRateReport:
    """Like rate_otp, but the syndrome is hashed first so the pad costs h({q^j}) / n."""
    return build_report(OTP_HASH, dist, _otp_entries(dist), dist.syndrome_entropy() / dist.code.n)


def rate_no_otp(dist: SyndromeDistribution) -> KeyRateReport:
    """Syndromes announced in the clear.

    The announced n - k bits raise the phase cost instead of consuming pad
    key: r^j = max(k/n - h_j_ps / n, 0) with no global overhead.
    """
    code = dist.code
    extra = code.n - code.k
    entries = []
    for record in dist.records:
        ps = record.joint_entropy_phase_syndrome
        consumption = Consumption(record.bit_entropy, ps - record.bit_entropy + extra, ps + extra)
        rate = _clamped(record.q_j, code.k / code.n - ps / code.n)
        entries.append(SyndromeRate(record.syndrome, record.q_j, rate, consumption))
    return build_report(NO_OTP, dist, entries, 0.0)


def _require_canonical_form(dist: SyndromeDistribution):
    code = dist.code
    form = standard_form(code.parity_check)
    if form.rank < code.parity_check.rows:
        raise RankError(f"rank_deficient: parity check of {code.label} has rank {form.rank}")
    return form


def rate_inplace(dist: SyndromeDistribution) -> KeyRateReport:
    """In-place hashing on a code in canonical form [A | I].

    Evaluates r^j = max(k/n - (1/n) h({q^{jj'}_i / q^j}), 0) through the
    chain rule over bit patterns; the value equals rate_no_otp.

    The code is never rewritten into [A | I]. Row operations leave the code
    unchanged and the channel acts on each position alike, so the column
    permutation does not move any phase-syndrome entropy. Only the rank of
    the parity check is verified.
    """
    _require_canonical_form(dist)
    code = dist.code
    extra = code.n - code.k
    entries = []
    for record in dist.records:
        w = record.pattern_weights
        phase = float(np.dot(w, record.phase_syndrome_entropies))
        consumption = Consumption(record.bit_entropy, phase + extra, record.bit_entropy + phase + extra)
        rate = _clamped(record.q_j, code.k / code.n - (record.bit_entropy + phase) / code.n)
        entries.append(SyndromeRate(record.syndrome, record.q_j, rate, consumption))
    return build_report(INPLACE, dist, entries, 0.0)


def announced_bit_errors(dist: SyndromeDistribution) -> List[np.ndarray]:
    """Counts l^j_i, the bit errors on the identity block of [A | I], per record and pattern."""
    form = _require_canonical_form(dist)
    n = dist.code.n
    mask = 0
    for column in form.column_permutation[n - form.rank:]:
        mask |= 1 << (n - 1 - column)
    return [popcount(record.patterns & mask) for record in dist.records]


def rate_parity_otp(dist: SyndromeDistribution) -> KeyRateReport:
    """Alternative parity-check reconciliation with the one-time pad.

    Each syndrome takes the better of the hashing branch 1 - h_j / n and
    the branch that reveals the error on the k message positions, whose
    phase cost is ((n-k-l)/n) h(delta_p0) + (l/n) h(delta_p1).
    """
    code = dist.code
    n = code.n
    h0 = binary_entropy(dist.conditional.delta_p0)
    h1 = binary_entropy(dist.conditional.delta_p1)
    entries = []
    for record, announced in zip(dist.records, announced_bit_errors(dist)):
        w = record.pattern_weights
        cost = ((n - code.k - announced) / n) * h0 + (announced / n) * h1
        hashing = 1.0 - record.joint_entropy_full / n
        revealing = (n - code.k) / n - float(np.dot(w, cost))
        if hashing >= revealing:
            full = record.joint_entropy_full
            consumption = Consumption(record.bit_entropy, full - record.bit_entropy, full)
        else:
            phase = n * float(np.dot(w, cost))
            consumption = Consumption(float(code.k), phase, code.k + phase)
        rate = _clamped(record.q_j, max(hashing, revealing))
        entries.append(SyndromeRate(record.syndrome, record.q_j, rate, consumption, (hashing, revealing)))
    return build_report(PARITY_OTP, dist, entries, dist.syndrome_entropy() / n)


FORMULA_HANDLERS: Dict[str, Callable[[SyndromeDistribution], KeyRateReport]] = {
    OTP: rate_otp,
    OTP_HASH: rate_otp_hash,
    NO_OTP: rate_no_otp,
    INPLACE: rate_inplace,
    PARITY_OTP: rate_parity_otp,
}


def compute_rate(dist: SyndromeDistribution, formula: str) -> KeyRateReport:
    """Evaluates one of FORMULAS on a fixed distribution."""
    try:
        handler = FORMULA_HANDLERS[formula]
    except KeyError as exc:
        raise ParameterError(f"invalid_formula: {formula!r}") from exc
    return handler(dist)


def kept_syndromes(report: KeyRateReport) -> List[BitVector]:
    """Syndromes whose groups are kept (r^j > 0), in syndrome order."""
    return [entry.syndrome for entry in report.entries if entry.kept]


def rate_one_way(channel: BellDiagonal, protocol: str) -> float:
    """Net one-way rate without grouping, possibly negative.

    BB84 only knows the marginals: 1 - h(delta_b) - h(delta_p). The
    six-state protocol learns the whole Bell-diagonal: 1 - h(p).
    """
    if protocol == BB84:
        return 1.0 - binary_entropy(channel.delta_b) - binary_entropy(channel.delta_p)
    if protocol == SIX_STATE:
        return 1.0 - entropy_multiset(channel.probs)
    raise ParameterError(f"invalid_protocol: {protocol!r}")
