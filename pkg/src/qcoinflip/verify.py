"""Numerical verification: exact probabilities, adversary searches, sweeps.

The searches are derivative-free (Nelder-Mead with random restarts and a
final polish), run over the unconstrained charts of
:func:`qcoinflip.strategies.decode_adversary` or over the factor
parametrization sigma = M M^dagger / Tr(M M^dagger) of density matrices.
Restart starting points come from a Philox generator keyed by the
configuration seed, so identical configurations give identical results;
restarts are independent and merged by a deterministic maximum (ties go to
the lowest restart index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import bounds
from .protocol import StrongOutcome, WeakOutcome, run_strong_exact, run_weak_exact
from .qmath import fidelity, trace_norm
from .states import ProtocolParams, rho_honest
from .strategies import (
    ALICE_COMMIT_PARAM_COUNT,
    BOB_EXTRACT_PARAM_COUNT,
    DecodeError,
    cheating_alice_optimal,
    cheating_bob_strong_helstrom,
    cheating_bob_weak_literal,
    cheating_bob_weak_optimal,
    decode_adversary,
    honest_alice,
    honest_bob,
)


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 16
    max_iterations: int = 2000
    step_tol: float = 1e-9
    objective_tol: float = 1e-11
    seed: int = 0

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.step_tol <= 0.0 or self.objective_tol <= 0.0:
            raise ValueError("search tolerances must be positive")


@dataclass
class _SearchState:
    x: np.ndarray
    value: float
    best_restart: int
    converged: bool
    max_evaluated: float
    evaluations: int


def _maximize(objective, n_params: int, config: SearchConfig) -> _SearchState:
    rng = np.random.Generator(np.random.Philox(np.uint64(config.seed)))
    starts = rng.standard_normal((config.restarts, n_params))

    state = {"max": -math.inf, "evals": 0}

    def negated(x):
        value = objective(x)
        state["evals"] += 1
        if value > state["max"]:
            state["max"] = value
        return -value

    options = {
        "maxiter": config.max_iterations,
        "maxfev": 2 * config.max_iterations,
        "xatol": config.step_tol,
        "fatol": config.objective_tol,
        "adaptive": True,
    }
    best_val = -math.inf
    best_x = starts[0]
    best_idx = 0
    success = False
    for idx in range(config.restarts):
        res = optimize.minimize(negated, starts[idx], method="Nelder-Mead", options=options)
        success = success or bool(res.success)
        val = -float(res.fun)
        if val > best_val:
            best_val, best_x, best_idx = val, np.asarray(res.x, dtype=float).copy(), idx

    # Nelder-Mead stalls near an optimum once its simplex has collapsed along
    # some directions; restarting from the incumbent with a fresh simplex of
    # shrinking scale restores terminal convergence to roundoff level.
    for scale in (1e-1, 1e-2, 1e-3, 1e-4, 1e-6):
        sim = np.tile(best_x, (n_params + 1, 1))
        for i in range(n_params):
            sim[i + 1, i] += scale * max(1.0, abs(best_x[i]))
        polish_options = dict(options)
        polish_options["xatol"] = min(config.step_tol, 1e-12)
        polish_options["fatol"] = min(config.objective_tol, 1e-14)
        polish_options["initial_simplex"] = sim
        res = optimize.minimize(negated, best_x, method="Nelder-Mead", options=polish_options)
        success = success or bool(res.success)
        val = -float(res.fun)
        if val > best_val:
            best_val, best_x = val, np.asarray(res.x, dtype=float).copy()

    return _SearchState(best_x, best_val, best_idx, success, state["max"], state["evals"])


def achieved_probability(game: str, alice, bob, params: ProtocolParams, event) -> float:
    """Exact probability of ``event`` (an outcome kind, or a predicate)."""
    if game == "weak":
        outcomes = run_weak_exact(alice, bob, params)
    elif game == "strong":
        outcomes = run_strong_exact(alice, bob, params)
    else:
        raise ValueError(f"unknown game {game!r}")
    if isinstance(event, (WeakOutcome, StrongOutcome)):
        return sum(o.probability for o in outcomes if o.kind is event)
    return sum(o.probability for o in outcomes if event(o))


@dataclass
class AvgFidelityResult:
    sigma_star: np.ndarray
    value: float
    converged: bool
    max_evaluated: float
    best_restart: int
    evaluations: int


def _sigma_from_chart(x: np.ndarray) -> np.ndarray | None:
    m = (x[0:9] + 1j * x[9:18]).reshape(3, 3)
    gram = m @ m.conj().T
    tr = float(gram.trace().real)
    if tr < 1e-12:
        return None
    return gram / tr


def max_avg_fidelity(params: ProtocolParams, config: SearchConfig) -> AvgFidelityResult:
    """Maximize the average fidelity of one qutrit state against both honest
    reduced states.

    The maximum equals Alice's weak-game limit (1 + cos^2(alpha/2))/2: her
    best commitment realizes it, and no state can do better.  The search uses
    sigma = M M^dagger / Tr(...) over unconstrained complex 3x3 M, which maps
    onto all density matrices without any projection step.
    """
    r0 = rho_honest(0, params)
    r1 = rho_honest(1, params)

    def objective(x: np.ndarray) -> float:
        sigma = _sigma_from_chart(x)
        if sigma is None:
            return 0.0
        return 0.5 * (fidelity(r0, sigma) + fidelity(r1, sigma))

    result = _maximize(objective, 18, config)
    sigma_star = _sigma_from_chart(result.x)
    return AvgFidelityResult(sigma_star, result.value, result.converged,
                             result.max_evaluated, result.best_restart, result.evaluations)


@dataclass
class BestResponseResult:
    strategy: object
    value: float
    chart_point: np.ndarray
    converged: bool
    max_evaluated: float
    best_restart: int
    evaluations: int


_ADVERSARY_KINDS = ("alice-commit", "bob-extract", "bob-extract-balanced")


def best_response_search(game: str, adversary_kind: str, params: ProtocolParams,
                         config: SearchConfig, fixed=None) -> BestResponseResult:
    """Search the adversary chart for the best response against an honest player.

    ``alice-commit`` maximizes Alice's winning probability (weak game) or the
    probability of coin 0 (strong game); the Bob charts maximize Bob's
    weak-game winning probability.  Chart points that fail to decode score 0.
    """
    if adversary_kind not in _ADVERSARY_KINDS:
        raise ValueError(f"unknown adversary kind {adversary_kind!r}")
    if adversary_kind == "alice-commit":
        n_params = ALICE_COMMIT_PARAM_COUNT
        fixed_bob = fixed if fixed is not None else honest_bob()
        event = WeakOutcome.ALICE_WINS if game == "weak" else StrongOutcome.COIN_0

        def objective(x: np.ndarray) -> float:
            try:
                adversary = decode_adversary("alice-commit", x)
            except DecodeError:
                return 0.0
            return achieved_probability(game, adversary, fixed_bob, params, event)
    else:
        if game != "weak":
            raise ValueError("extraction charts only apply to the weak game")
        n_params = BOB_EXTRACT_PARAM_COUNT
        fixed_alice = fixed if fixed is not None else honest_alice()

        def objective(x: np.ndarray) -> float:
            try:
                adversary = decode_adversary(adversary_kind, x)
            except DecodeError:
                return 0.0
            return achieved_probability("weak", fixed_alice, adversary, params,
                                        WeakOutcome.BOB_WINS)

    result = _maximize(objective, n_params, config)
    strategy = decode_adversary(adversary_kind, result.x)
    return BestResponseResult(strategy, result.value, result.x, result.converged,
                              result.max_evaluated, result.best_restart, result.evaluations)


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    alice_weak_bound: float
    bob_weak_bound: float
    alice_weak_achieved: float
    bob_weak_achieved: float
    alice_strong_bound: float
    bob_strong_bound: float
    fidelity: float
    trace_distance: float
    alice_weak_gap: float
    bob_weak_gap: float


def sweep(alphas, alice_cheat_factory=None, bob_cheat_factory=None) -> list[SweepRow]:
    """Bounds, exactly achieved cheating probabilities, and their gaps per angle."""
    alice_cheat_factory = alice_cheat_factory or cheating_alice_optimal
    bob_cheat_factory = bob_cheat_factory or cheating_bob_weak_optimal
    rows = []
    for alpha in alphas:
        params = ProtocolParams(float(alpha))
        aw = bounds.alice_weak_bound(alpha)
        bw = bounds.bob_weak_bound(alpha)
        alice_achieved = achieved_probability(
            "weak", alice_cheat_factory(params), honest_bob(), params, WeakOutcome.ALICE_WINS)
        bob_achieved = achieved_probability(
            "weak", honest_alice(), bob_cheat_factory(params), params, WeakOutcome.BOB_WINS)
        r0 = rho_honest(0, params)
        r1 = rho_honest(1, params)
        rows.append(SweepRow(
            alpha=float(alpha),
            alice_weak_bound=aw,
            bob_weak_bound=bw,
            alice_weak_achieved=alice_achieved,
            bob_weak_achieved=bob_achieved,
            alice_strong_bound=bounds.alice_strong_bound(alpha),
            bob_strong_bound=bounds.bob_strong_bound(alpha),
            fidelity=fidelity(r0, r1),
            trace_distance=trace_norm(r0 - r1),
            alice_weak_gap=aw - alice_achieved,
            bob_weak_gap=bw - bob_achieved,
        ))
    return rows


def _check(name: str, expected: float, got: float, tolerance: float) -> dict:
    return {
        "name": name,
        "expected": float(expected),
        "got": float(got),
        "tolerance": float(tolerance),
        "pass": bool(abs(got - expected) <= tolerance),
    }


def _suite_bounds() -> list[dict]:
    grid = np.linspace(0.0, math.pi, 1001)
    products = [bounds.kitaev_product(a) for a in grid]
    alice_vals = [bounds.alice_weak_bound(a) for a in grid]
    bob_vals = [bounds.bob_weak_bound(a) for a in grid]
    checks = [
        _check("kitaev_product_min_1001grid", 0.5, min(products), 1e-12),
        _check("alice_weak_bound_monotone_decreasing", 0.0,
               max(0.0, max(b - a for a, b in zip(alice_vals, alice_vals[1:]))), 1e-12),
        _check("bob_weak_bound_monotone_increasing", 0.0,
               max(0.0, max(a - b for a, b in zip(bob_vals, bob_vals[1:]))), 1e-12),
    ]
    small_grid = np.linspace(0.0, math.pi, 101)
    dev_sqrt_f = 0.0
    dev_tn = 0.0
    dev_f_cos4 = 0.0
    dev_tn_2sin2 = 0.0
    for alpha in small_grid:
        params = ProtocolParams(float(alpha))
        r0 = rho_honest(0, params)
        r1 = rho_honest(1, params)
        f = fidelity(r0, r1)
        tn = trace_norm(r0 - r1)
        dev_sqrt_f = max(dev_sqrt_f, abs(bounds.alice_weak_bound(alpha) - 0.5 * (1.0 + math.sqrt(f))))
        dev_tn = max(dev_tn, abs(bounds.bob_strong_bound(alpha) - (0.5 + tn / 4.0)))
        dev_f_cos4 = max(dev_f_cos4, abs(f - math.cos(alpha / 2.0) ** 4))
        dev_tn_2sin2 = max(dev_tn_2sin2, abs(tn - 2.0 * math.sin(alpha / 2.0) ** 2))
    checks.extend([
        _check("alice_weak_equals_half_one_plus_sqrt_fidelity", 0.0, dev_sqrt_f, 1e-12),
        _check("bob_strong_equals_half_plus_quarter_trace_norm", 0.0, dev_tn, 1e-12),
        _check("fidelity_equals_cos4_half_alpha", 0.0, dev_f_cos4, 1e-9),
        _check("trace_norm_equals_2sin2_half_alpha", 0.0, dev_tn_2sin2, 1e-9),
    ])
    return checks


def _suite_tightness() -> list[dict]:
    grid = np.linspace(0.0, math.pi, 21)
    rows = sweep(grid)
    half_pi = ProtocolParams(math.pi / 2.0)
    alice_strong = achieved_probability(
        "strong", cheating_alice_optimal(), honest_bob(), half_pi, StrongOutcome.COIN_0)
    bob_strong = achieved_probability(
        "strong", honest_alice(), cheating_bob_strong_helstrom(target=1), half_pi,
        StrongOutcome.COIN_1)
    literal = achieved_probability(
        "weak", honest_alice(), cheating_bob_weak_literal(), half_pi, WeakOutcome.BOB_WINS)
    optimal = achieved_probability(
        "weak", honest_alice(), cheating_bob_weak_optimal(), half_pi, WeakOutcome.BOB_WINS)
    return [
        _check("alice_weak_gap_max_21grid", 0.0, max(abs(r.alice_weak_gap) for r in rows), 1e-9),
        _check("bob_weak_gap_max_21grid", 0.0, max(abs(r.bob_weak_gap) for r in rows), 1e-9),
        _check("alice_strong_achieved_half_pi", 0.75, alice_strong, 1e-9),
        _check("bob_helstrom_achieved_half_pi", 0.75, bob_strong, 1e-9),
        _check("literal_reply_shortfall_half_pi",
               bounds.bob_weak_bound(math.pi / 2.0) - 0.5 * math.cos(math.pi / 4.0) ** 4,
               optimal - literal, 1e-9),
    ]


_FIDELITY_SUITE_ALPHAS = (math.pi / 6, math.pi / 3, math.pi / 2, 2 * math.pi / 3, 5 * math.pi / 6)


def _suite_fidelity(seed: int) -> list[dict]:
    checks = []
    for alpha in _FIDELITY_SUITE_ALPHAS:
        config = SearchConfig(restarts=3, max_iterations=700, seed=seed)
        result = max_avg_fidelity(ProtocolParams(alpha), config)
        limit = bounds.alice_weak_bound(alpha)
        checks.append(_check(f"avg_fidelity_max_alpha_{alpha:.4f}", limit, result.value, 1e-4))
        checks.append(_check(f"avg_fidelity_no_excess_alpha_{alpha:.4f}", 0.0,
                             max(0.0, result.max_evaluated - limit), 1e-6))
    return checks


VERIFY_SUITES = ("bounds", "tightness", "fidelity", "all")


def run_suite(suite: str, seed: int = 0) -> dict:
    """Run one verification suite; returns the machine-readable report."""
    if suite not in VERIFY_SUITES:
        raise ValueError(f"unknown suite {suite!r}, expected one of {VERIFY_SUITES}")
    checks: list[dict] = []
    if suite in ("bounds", "all"):
        checks.extend(_suite_bounds())
    if suite in ("tightness", "all"):
        checks.extend(_suite_tightness())
    if suite in ("fidelity", "all"):
        checks.extend(_suite_fidelity(seed))
    return {
        "suite": suite,
        "seed": int(seed),
        "checks": checks,
        "passed": all(c["pass"] for c in checks),
    }
