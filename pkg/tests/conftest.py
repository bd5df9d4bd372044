import math
import os
import random
from collections import defaultdict

from app.qkd.base.channel import from_bb84, six_state
from app.qkd.base.codes import make_full, make_repetition, make_single_parity
from app.qkd.base.gf2 import BitVector


def pytest_configure(config):
    # ensure markers are available in pytest UI
    config.addinivalue_line("markers", "slow: mark slow tests")
    config.addinivalue_line("markers", "cli: mark command-line tests")


def small_codes():
    """Codes small enough for the 4^n brute-force oracle."""
    return [
        make_repetition(2),
        make_repetition(3),
        make_repetition(4),
        make_single_parity(2),
        make_single_parity(3),
        make_single_parity(4),
        make_full(1),
        make_full(2),
    ]


def sample_channels():
    """A few six-state and BB84 channels, including an asymmetric one."""
    return [
        six_state(0.1),
        six_state(0.02),
        from_bb84(0.08, 0.08, 0.0),
        from_bb84(0.12, 0.12, 0.12 * 0.12),
        from_bb84(0.05, 0.15, 0.03),
    ]


def entropy_of(masses, total=1.0):
    """Shannon entropy in bits of masses / total, ignoring zeros."""
    result = 0.0
    for mass in masses:
        if mass > 0.0:
            p = mass / total
            result -= p * math.log2(p)
    return result


def brute_force_stats(code, channel):
    """Enumerates all 4^n (bit, phase) error pairs.

    Returns:
        Dict syndrome int -> dict with q_j, bit_entropy, joint_entropy_full
        and joint_entropy_phase_syndrome.
    """
    n = code.n
    probs = channel.probs
    q = defaultdict(float)
    bit_mass = defaultdict(float)
    full_mass = defaultdict(float)
    ps_mass = defaultdict(float)
    for b in range(1 << n):
        j = code.syndrome(BitVector.from_int(b, n)).to_int()
        for p in range(1 << n):
            mass = 1.0
            for m in range(n):
                shift = n - 1 - m
                mass *= probs[(((b >> shift) & 1) << 1) | ((p >> shift) & 1)]
            s = code.phase_syndrome(BitVector.from_int(p, n)).to_int()
            q[j] += mass
            bit_mass[(j, b)] += mass
            full_mass[(j, b, p)] += mass
            ps_mass[(j, b, s)] += mass
    stats = {}
    for j, q_j in q.items():
        stats[j] = {
            "q_j": q_j,
            "bit_entropy": entropy_of([v for key, v in bit_mass.items() if key[0] == j], q_j),
            "joint_entropy_full": entropy_of([v for key, v in full_mass.items() if key[0] == j], q_j),
            "joint_entropy_phase_syndrome": entropy_of([v for key, v in ps_mass.items() if key[0] == j], q_j),
        }
    return stats


def phase_savings(code, channel):
    """Per syndrome, sum over (i, j') of (q^{jj'}_i / q^j) times the phase-pattern entropy inside (i, j')."""
    n = code.n
    probs = channel.probs
    q = defaultdict(float)
    groups = defaultdict(list)
    for b in range(1 << n):
        j = code.syndrome(BitVector.from_int(b, n)).to_int()
        for p in range(1 << n):
            mass = 1.0
            for m in range(n):
                shift = n - 1 - m
                mass *= probs[(((b >> shift) & 1) << 1) | ((p >> shift) & 1)]
            s = code.phase_syndrome(BitVector.from_int(p, n)).to_int()
            q[j] += mass
            groups[(j, b, s)].append(mass)
    savings = defaultdict(float)
    for (j, _, _), masses in groups.items():
        total = math.fsum(masses)
        if total > 0.0:
            savings[j] += total / q[j] * entropy_of(masses, total)
    return dict(savings)


def seed_all(seed: int) -> None:
    random.seed(seed)
    try:
        import numpy as _np  # pylint: disable=import-error

        _np.random.seed(seed)
    except Exception:
        pass
    os.environ["PYTHONHASHSEED"] = str(seed)


def pytest_sessionstart(session):
    # deterministic seeding for any randomized tests; overridable with env var
    seed = int(os.environ.get("PYTEST_DETERMINISTIC_SEED", "0"))
    seed_all(seed)
