import math

import numpy as np
import pytest

from qcoinflip import bounds
from qcoinflip.protocol import StrongOutcome, WeakOutcome, as_dict, run_strong_exact, run_weak_exact
from qcoinflip.qmath import trace_norm
from qcoinflip.states import ProtocolParams, psi, rho_honest
from qcoinflip.strategies import (
    DecodeError,
    alice_commit_chart_point,
    bob_extract_chart_point,
    cheating_alice_optimal,
    cheating_bob_strong_helstrom,
    cheating_bob_weak_literal,
    cheating_bob_weak_optimal,
    decode_adversary,
    honest_alice,
    honest_bob,
)
from qcoinflip.verify import SearchConfig, best_response_search

GRID = np.linspace(0.0, math.pi, 21)


def alice_win(alice, params):
    return as_dict(run_weak_exact(alice, honest_bob(), params))[WeakOutcome.ALICE_WINS]


def bob_win(bob, params):
    return as_dict(run_weak_exact(honest_alice(), bob, params))[WeakOutcome.BOB_WINS]


class TestAchievability:
    def test_alice_hits_limit_on_grid(self):
        for alpha in GRID:
            got = alice_win(cheating_alice_optimal(), ProtocolParams(float(alpha)))
            assert abs(got - bounds.alice_weak_bound(alpha)) <= 1e-9

    def test_bob_hits_limit_on_grid(self):
        for alpha in GRID:
            got = bob_win(cheating_bob_weak_optimal(), ProtocolParams(float(alpha)))
            assert abs(got - bounds.bob_weak_bound(alpha)) <= 1e-9

    def test_alice_endpoints(self):
        assert alice_win(cheating_alice_optimal(), ProtocolParams(0.0)) == pytest.approx(1.0, abs=1e-12)
        assert alice_win(cheating_alice_optimal(), ProtocolParams(math.pi)) == pytest.approx(0.5, abs=1e-12)

    def test_bob_endpoints(self):
        assert bob_win(cheating_bob_weak_optimal(), ProtocolParams(0.0)) == pytest.approx(0.5, abs=1e-12)
        assert bob_win(cheating_bob_weak_optimal(), ProtocolParams(math.pi)) == pytest.approx(1.0, abs=1e-12)


class TestLiteralReplyVariant:
    def test_exact_value(self):
        # replying with the raw extracted bit wins only via the blank branch:
        # probability cos^2(alpha/2)/2 for the branch times cos^2(alpha/2)
        # for surviving the returned-qutrit test
        for alpha in GRID:
            got = bob_win(cheating_bob_weak_literal(), ProtocolParams(float(alpha)))
            expected = 0.5 * math.cos(alpha / 2.0) ** 4
            assert abs(got - expected) <= 1e-9

    def test_strictly_below_complemented_variant(self):
        for alpha in GRID[1:-1]:
            params = ProtocolParams(float(alpha))
            assert bob_win(cheating_bob_weak_literal(), params) < bounds.bob_weak_bound(alpha) - 1e-6


class TestHelstrom:
    def test_coin_steering_both_targets(self):
        for alpha in GRID:
            params = ProtocolParams(float(alpha))
            expected = 0.5 * (1.0 + math.sin(alpha / 2.0) ** 2)
            for target in (0, 1):
                dist = as_dict(run_strong_exact(honest_alice(), cheating_bob_strong_helstrom(target=target), params))
                kind = StrongOutcome.COIN_0 if target == 0 else StrongOutcome.COIN_1
                assert abs(dist[kind] - expected) <= 1e-9

    def test_accuracy_equals_trace_norm_formula(self):
        for alpha in GRID:
            params = ProtocolParams(float(alpha))
            tn = trace_norm(rho_honest(0, params) - rho_honest(1, params))
            dist = as_dict(run_strong_exact(honest_alice(), cheating_bob_strong_helstrom(target=1), params))
            assert abs(dist[StrongOutcome.COIN_1] - (0.5 + tn / 4.0)) <= 1e-9

    def test_degenerate_angles(self):
        d0 = as_dict(run_strong_exact(honest_alice(), cheating_bob_strong_helstrom(target=1), ProtocolParams(0.0)))
        assert d0[StrongOutcome.COIN_1] == pytest.approx(0.5, abs=1e-12)
        d1 = as_dict(run_strong_exact(honest_alice(), cheating_bob_strong_helstrom(target=1), ProtocolParams(math.pi)))
        assert d1[StrongOutcome.COIN_1] == pytest.approx(1.0, abs=1e-12)

    def test_target_validation(self):
        with pytest.raises(ValueError):
            cheating_bob_strong_helstrom(target=2)


class TestDecodeAlice:
    def test_honest_commitment_embeds(self):
        params = ProtocolParams(1.2)
        for a in (0, 1):
            state = np.zeros((2, 2, 3), dtype=complex)
            state[0] = psi(a, params).reshape(2, 3)
            alice = decode_adversary("alice-commit", alice_commit_chart_point(state))
            # round-1 reduced state on the qutrit matches the honest one
            branch = alice.prepare(params)[0]
            flat = branch.state.reshape(4, 3)
            reduced = np.einsum("xj,xk->jk", flat, flat.conj())
            assert np.abs(reduced - rho_honest(a, params)).max() < 1e-12
            # with the claim pinned to b, the win probability is the mean
            # squared overlap with both references
            got = alice_win(alice, params)
            expected = 0.5 * (1.0 + math.cos(params.alpha / 2.0) ** 4)
            assert got == pytest.approx(expected, abs=1e-9)

    def test_optimal_commitment_embeds(self):
        for alpha in (0.9, math.pi / 2, 2.4):
            params = ProtocolParams(alpha)
            v = psi(0, params) + psi(1, params)
            v /= np.linalg.norm(v)
            state = np.zeros((2, 2, 3), dtype=complex)
            state[0] = v.reshape(2, 3)
            alice = decode_adversary("alice-commit", alice_commit_chart_point(state))
            assert alice_win(alice, params) == pytest.approx(bounds.alice_weak_bound(alpha), abs=1e-9)

    def test_decode_normalizes(self):
        rng = np.random.default_rng(3)
        alice = decode_adversary("alice-commit", 10.0 * rng.standard_normal(24))
        branch = alice.prepare(ProtocolParams(1.0))[0]
        assert np.linalg.norm(branch.state) == pytest.approx(1.0, abs=1e-12)

    def test_zero_point_rejected(self):
        with pytest.raises(DecodeError):
            decode_adversary("alice-commit", np.zeros(24))

    def test_wrong_length_rejected(self):
        with pytest.raises(DecodeError):
            decode_adversary("alice-commit", np.zeros(23))


class TestDecodeBob:
    def test_concrete_optimum_embeds(self):
        # complement folded into the isometry: swap the reply components
        v_opt = cheating_bob_weak_optimal()._v
        folded = v_opt[:, :, ::-1, :]
        bob = decode_adversary("bob-extract", bob_extract_chart_point(folded))
        for alpha in (0.8, math.pi / 2, 2.6):
            params = ProtocolParams(alpha)
            assert bob_win(bob, params) == pytest.approx(bounds.bob_weak_bound(alpha), abs=1e-9)

    def test_chart_point_round_trip(self):
        v_opt = cheating_bob_weak_optimal()._v
        bob = decode_adversary("bob-extract", bob_extract_chart_point(v_opt))
        assert np.abs(bob._v - v_opt).max() < 1e-12

    def test_decoded_is_isometry(self):
        rng = np.random.default_rng(5)
        bob = decode_adversary("bob-extract", rng.standard_normal(36))
        flat = bob._v.reshape(6, 3)
        assert np.abs(flat.conj().T @ flat - np.eye(3)).max() < 1e-12

    def test_rank_deficient_rejected(self):
        p = np.zeros(36)
        p[0] = 1.0  # one nonzero column only
        with pytest.raises(DecodeError):
            decode_adversary("bob-extract", p)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            decode_adversary("bob-unknown", np.zeros(36))


class TestBalancedChart:
    def test_blank_image_norms_are_balanced(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            bob = decode_adversary("bob-extract-balanced", rng.standard_normal(36))
            flat = bob._v.reshape(3, 2, 3)  # (qutrit out, reply, qutrit in)
            col0 = flat[:, :, 0]
            for r in (0, 1):
                assert np.linalg.norm(col0[:, r]) == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-12)

    def test_balanced_search_attains_the_maximum(self):
        # forcing balanced blank-image norms still reaches the unconstrained
        # optimum, confirming that the balance is where the maximum sits
        params = ProtocolParams(math.pi / 2)
        config = SearchConfig(restarts=2, max_iterations=3000, seed=23)
        result = best_response_search("weak", "bob-extract-balanced", params, config)
        assert abs(result.value - bounds.bob_weak_bound(math.pi / 2)) <= 1e-6


def test_search_never_exceeds_limits():
    # soundness scan: whatever points the search visits, none beat the limits
    config = SearchConfig(restarts=2, max_iterations=400, seed=31)
    for alpha in np.linspace(0.2, math.pi - 0.2, 5):
        params = ProtocolParams(float(alpha))
        r_alice = best_response_search("weak", "alice-commit", params, config)
        assert r_alice.max_evaluated <= bounds.alice_weak_bound(alpha) + 1e-6
        r_bob = best_response_search("weak", "bob-extract", params, config)
        assert r_bob.max_evaluated <= bounds.bob_weak_bound(alpha) + 1e-6
