"""Closed-form cheating limits, the equalization solvers, and derived quantities.

With t = cos^2(alpha/2) and s = sin^2(alpha/2):

* a dishonest Alice wins the weak game with probability at most (1 + t)/2;
* a dishonest Bob wins it with probability at most (t/sqrt(2) + s)^2;
* in the strong game the limits are (1 + t)/2 for Alice and (1 + s)/2 for Bob.

The weak-game bias is minimized where the two limits cross, near alpha = 1.61
where both equal about 0.739; the strong-game limits cross at alpha = pi/2
where both equal 3/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import qmath
from .states import ProtocolParams, rho_honest


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (0.0 <= alpha <= math.pi):
        raise ValueError(f"alpha out of range [0, pi]: {alpha}")
    return alpha


def alice_weak_bound(alpha: float) -> float:
    """Largest winning probability a dishonest Alice can force, weak game."""
    alpha = _check_alpha(alpha)
    return 0.5 * (1.0 + math.cos(alpha / 2.0) ** 2)


def bob_weak_bound(alpha: float) -> float:
    """Largest winning probability a dishonest Bob can force, weak game."""
    alpha = _check_alpha(alpha)
    c2 = math.cos(alpha / 2.0) ** 2
    s2 = math.sin(alpha / 2.0) ** 2
    return (c2 / math.sqrt(2.0) + s2) ** 2


def alice_strong_bound(alpha: float) -> float:
    """Alice's limit for steering the strong-game coin to her target."""
    return alice_weak_bound(alpha)


def bob_strong_bound(alpha: float) -> float:
    """Bob's limit for steering the strong-game coin: 1/2 + |rho0 - rho1|_tr / 4."""
    alpha = _check_alpha(alpha)
    return 0.5 * (1.0 + math.sin(alpha / 2.0) ** 2)


def weak_to_strong_bias(p_w: float, p_l: float) -> float:
    """Bias of the strong coin built by letting the weak-game winner flip it.

    ``p_w`` is the cheater's probability of winning the weak game, ``p_l``
    the honest player's probability of winning against them.
    """
    if not (0.5 <= p_w <= 1.0):
        raise ValueError(f"p_w out of range [1/2, 1]: {p_w}")
    if not (0.0 <= p_l <= 1.0):
        raise ValueError(f"p_l out of range [0, 1]: {p_l}")
    return p_w + (p_l - 1.0) / 2.0


def kitaev_product(alpha: float) -> float:
    """Product of the two strong-game limits; stays >= 1/2 on all of [0, pi]."""
    alpha = _check_alpha(alpha)
    return alice_strong_bound(alpha) * bob_strong_bound(alpha)


def _bisect(f, lo: float, hi: float, tolerance: float, max_iter: int = 200) -> float:
    f_lo = f(lo)
    f_hi = f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise ValueError("bisection bracket does not change sign")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if abs(f_mid) <= tolerance:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    raise ArithmeticError("bisection did not reach the requested tolerance")


def solve_weak_equalization(tolerance: float = 1e-12) -> tuple[float, float]:
    """Angle where the two weak-game limits coincide, and their common value.

    The difference alice_weak_bound - bob_weak_bound falls monotonically from
    +1/2 at alpha=0 to -1/2 at alpha=pi, so bisection is exact business.
    """
    if tolerance <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    alpha_star = _bisect(lambda a: alice_weak_bound(a) - bob_weak_bound(a),
                         0.0, math.pi, tolerance)
    return alpha_star, alice_weak_bound(alpha_star)


def weak_equalization_quadratic() -> tuple[float, float]:
    """Closed-form cross-check for the weak equalization.

    Substituting t = cos^2(alpha/2) turns the equalization into
    (1 - k t)^2 = (1 + t)/2 with k = 1 - 1/sqrt(2), a quadratic
    k^2 t^2 - (2k + 1/2) t + 1/2 = 0 whose in-range root gives alpha*.
    """
    k = 1.0 - 1.0 / math.sqrt(2.0)
    a = k * k
    b = -(2.0 * k + 0.5)
    c = 0.5
    t = (-b - math.sqrt(b * b - 4.0 * a * c)) / (2.0 * a)
    alpha_star = 2.0 * math.acos(math.sqrt(t))
    return alpha_star, 0.5 * (1.0 + t)


def solve_strong_equalization(tolerance: float = 1e-12) -> float:
    """Angle where the two strong-game limits coincide (pi/2)."""
    if tolerance <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    return _bisect(lambda a: alice_strong_bound(a) - bob_strong_bound(a),
                   0.0, math.pi, tolerance)


@dataclass(frozen=True)
class BoundReport:
    """All four limits at one angle, with the two distance measures.

    ``fidelity_rho`` and ``trace_dist_rho`` are the fidelity and the trace
    norm of the difference of the two honest reduced qutrit states; biases
    are the larger limit minus 1/2.
    """

    alpha: float
    alice_weak: float
    bob_weak: float
    alice_strong: float
    bob_strong: float
    fidelity_rho: float
    trace_dist_rho: float
    weak_bias: float
    strong_bias: float


def bound_report(alpha: float) -> BoundReport:
    alpha = _check_alpha(alpha)
    params = ProtocolParams(alpha)
    r0 = rho_honest(0, params)
    r1 = rho_honest(1, params)
    aw = alice_weak_bound(alpha)
    bw = bob_weak_bound(alpha)
    as_ = alice_strong_bound(alpha)
    bs = bob_strong_bound(alpha)
    return BoundReport(
        alpha=alpha,
        alice_weak=aw,
        bob_weak=bw,
        alice_strong=as_,
        bob_strong=bs,
        fidelity_rho=qmath.fidelity(r0, r1),
        trace_dist_rho=qmath.trace_norm(r0 - r1),
        weak_bias=max(aw, bw) - 0.5,
        strong_bias=max(as_, bs) - 0.5,
    )
