"""Message-driven runners for the weak (4-round) and strong (3-round) games.

A game run keeps one joint pure state over five registers, in this fixed
order (most significant first):

    alice_anc (d_A)  |  sign (2)  |  qutrit (3)  |  bob_anc (d_B)  |  bob_reply (d_R)

Quantum messages move register ownership, never amplitude copies: the runner
keeps a single joint tensor throughout, and a "send" only changes which axes
the recipient acts on next, so nothing is ever cloned.

Classical information (the committed bit, the reply bit, measurement
outcomes) is handled by branch enumeration: each declared measurement or
classical coin splits the run into weighted branches, and the exact runner
sums every branch.  The sampled runner draws branches with the same weights
from a counter-based generator (Philox, keyed by the caller's seed).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .states import ProtocolParams, psi

# Check probabilities that should be exactly 0 or 1 (honest runs) are snapped
# so that "honest play never aborts" holds exactly, not just to roundoff.
_PASS_SNAP = 1e-12
_WEIGHT_TOL = 1e-8
_BRANCH_FLOOR = 1e-15


class ProtocolError(Exception):
    """A strategy produced a structurally invalid move."""


class MessageKind(Enum):
    QUTRIT_REGISTER = "qutrit_register"
    CLASSICAL_BIT = "classical_bit"
    SIGN_QUBIT_REGISTER = "sign_qubit_register"
    REVEAL_BIT = "reveal_bit"
    QUTRIT_RETURN = "qutrit_return"


@dataclass(frozen=True)
class Message:
    kind: MessageKind
    value: int | None = None

    def describe(self) -> str:
        if self.kind is MessageKind.CLASSICAL_BIT:
            return f"classical bit b={self.value}"
        if self.kind is MessageKind.REVEAL_BIT:
            return f"reveal a={self.value}"
        return self.kind.value.replace("_", " ")


class WeakOutcome(Enum):
    ALICE_WINS = "alice_wins"
    BOB_WINS = "bob_wins"
    ABORT_BY_ALICE = "abort_by_alice"
    ABORT_BY_BOB = "abort_by_bob"


class StrongOutcome(Enum):
    COIN_0 = "coin_0"
    COIN_1 = "coin_1"
    ABORT_BY_BOB = "abort_by_bob"


@dataclass(frozen=True)
class ProtocolOutcome:
    """One line of an exact-mode distribution."""

    kind: WeakOutcome | StrongOutcome
    c_a: int | None
    c_b: int | None
    probability: float


def as_dict(outcomes) -> dict:
    return {o.kind: o.probability for o in outcomes}


@dataclass(frozen=True)
class CheckRecord:
    checker: str
    pass_probability: float


@dataclass(frozen=True)
class Transcript:
    """Ordered messages of one classical branch, plus its final check."""

    game: str
    weight: float
    events: tuple[tuple[int, str, Message], ...]
    check: CheckRecord
    final_state: np.ndarray

    def to_text(self) -> str:
        lines = [f"{self.game} game branch (weight {self.weight:.12g})"]
        for round_index, sender, message in self.events:
            receiver = "bob" if sender == "alice" else "alice"
            lines.append(f"  round {round_index}: {sender} -> {receiver}: {message.describe()}")
        lines.append(
            f"  check: {self.check.checker} tests the commitment,"
            f" pass probability {self.check.pass_probability:.12g}"
        )
        return "\n".join(lines)


@dataclass(frozen=True)
class AliceBranch:
    """One classical branch of Alice's opening move.

    ``a`` is the bit she has committed to, or ``None`` when she defers the
    choice to the reveal round.  ``state`` lives on alice_anc x sign x qutrit.
    """

    weight: float
    a: int | None
    state: np.ndarray


@dataclass(frozen=True)
class BobBranch:
    """One classical branch of Bob's reply; ``state`` is the full joint tensor."""

    weight: float
    b: int
    state: np.ndarray


class AliceStrategy:
    name = "alice"
    ancilla_dim = 1

    def prepare(self, params: ProtocolParams) -> list[AliceBranch]:
        raise NotImplementedError

    def reveal(self, a: int | None, b: int) -> int:
        raise NotImplementedError


class BobStrategy:
    name = "bob"
    ancilla_dim = 1
    reply_dim = 1
    # When True, Bob never aborts in rounds where he is the checker.
    accepts_any_commitment = False

    def respond(self, joint: np.ndarray, params: ProtocolParams) -> list[BobBranch]:
        raise NotImplementedError


def _require_bit_value(value, what: str) -> int:
    if value not in (0, 1):
        raise ProtocolError(f"{what} must be a bit, got {value!r}")
    return int(value)


def _validate_branch_weights(weights, who: str) -> None:
    total = float(sum(weights))
    if any(w < -1e-12 for w in weights):
        raise ProtocolError(f"{who} produced a negative branch weight")
    if abs(total - 1.0) > _WEIGHT_TOL:
        raise ProtocolError(f"{who} branch weights sum to {total:.12g}, expected 1")


def _validate_state(state: np.ndarray, shape: tuple[int, ...], who: str) -> None:
    if state.shape != shape:
        raise ProtocolError(f"{who} state has shape {state.shape}, expected {shape}")
    n2 = float((np.abs(state) ** 2).sum())
    if abs(n2 - 1.0) > _WEIGHT_TOL:
        raise ProtocolError(f"{who} state has squared norm {n2:.12g}, expected 1")


def _pass_probability(state: np.ndarray, reference: np.ndarray) -> float:
    """Probability that (sign, qutrit) pass the projective test onto |reference>."""
    amp = np.einsum("st,xstnr->xnr", reference.conj().reshape(2, 3), state)
    p = float((np.abs(amp) ** 2).sum())
    p = min(max(p, 0.0), 1.0)
    if 1.0 - p <= _PASS_SNAP:
        return 1.0
    return p


@dataclass(frozen=True)
class _Leaf:
    weight_alice: float
    weight_bob: float
    alice_index: int
    bob_index: int
    a_revealed: int
    b: int
    c: int
    checker: str
    pass_prob: float
    state: np.ndarray


def _enumerate_leaves(game: str, alice: AliceStrategy, bob: BobStrategy,
                      params: ProtocolParams) -> list[_Leaf]:
    if game not in ("weak", "strong"):
        raise ValueError(f"unknown game {game!r}")
    d_a = int(alice.ancilla_dim)
    d_b = int(bob.ancilla_dim)
    d_r = int(bob.reply_dim)

    alice_branches = alice.prepare(params)
    if not alice_branches:
        raise ProtocolError("alice produced no opening branches")
    _validate_branch_weights([br.weight for br in alice_branches], "alice")
    leaves: list[_Leaf] = []
    for ai, abr in enumerate(alice_branches):
        _validate_state(abr.state, (d_a, 2, 3), "alice")
        if abr.a is not None:
            _require_bit_value(abr.a, "alice's committed bit")
        joint = np.zeros((d_a, 2, 3, d_b, d_r), dtype=complex)
        joint[:, :, :, 0, 0] = abr.state

        bob_branches = bob.respond(joint, params)
        if not bob_branches:
            raise ProtocolError("bob produced no reply branches")
        _validate_branch_weights([br.weight for br in bob_branches], "bob")
        for bi, bbr in enumerate(bob_branches):
            if bbr.weight <= _BRANCH_FLOOR:
                continue
            _validate_state(bbr.state, (d_a, 2, 3, d_b, d_r), "bob")
            b = _require_bit_value(bbr.b, "bob's reply")
            a_rev = _require_bit_value(alice.reveal(abr.a, b), "alice's revealed bit")
            c = a_rev ^ b
            if game == "weak":
                checker = "bob" if c == 0 else "alice"
            else:
                checker = "bob"
            if checker == "bob" and bob.accepts_any_commitment:
                pass_prob = 1.0
            else:
                pass_prob = _pass_probability(bbr.state, psi(a_rev, params))
            leaves.append(_Leaf(abr.weight, bbr.weight, ai, bi, a_rev, b, c,
                                checker, pass_prob, bbr.state))
    return leaves


def _leaf_events(game: str, leaf: _Leaf) -> tuple[tuple[int, str, Message], ...]:
    events = [
        (1, "alice", Message(MessageKind.QUTRIT_REGISTER)),
        (2, "bob", Message(MessageKind.CLASSICAL_BIT, leaf.b)),
        (3, "alice", Message(MessageKind.REVEAL_BIT, leaf.a_revealed)),
    ]
    if game == "strong" or leaf.c == 0:
        events.append((3, "alice", Message(MessageKind.SIGN_QUBIT_REGISTER)))
    elif leaf.c == 1:
        events.append((4, "bob", Message(MessageKind.QUTRIT_RETURN)))
    return tuple(events)


_WEAK_OUTCOME_BITS = {
    WeakOutcome.ALICE_WINS: (0, 0),
    WeakOutcome.BOB_WINS: (1, 1),
    WeakOutcome.ABORT_BY_ALICE: (None, 1),
    WeakOutcome.ABORT_BY_BOB: (0, None),
}


def run_weak_exact(alice: AliceStrategy, bob: BobStrategy,
                   params: ProtocolParams) -> list[ProtocolOutcome]:
    """Exact outcome distribution of the weak game.

    Rounds: Alice commits and sends the qutrit; Bob replies with a bit; Alice
    reveals her bit, fixing c = a xor b.  With c=0 she forwards the sign
    qubit and Bob tests the pair; with c=1 Bob returns the qutrit and Alice
    tests.  The winner is whoever the coin favours, provided the loser's test
    passes; a failed test aborts the game instead.
    """
    acc = {kind: 0.0 for kind in WeakOutcome}
    for leaf in _enumerate_leaves("weak", alice, bob, params):
        w = leaf.weight_alice * leaf.weight_bob
        if leaf.c == 0:
            acc[WeakOutcome.ALICE_WINS] += w * leaf.pass_prob
            acc[WeakOutcome.ABORT_BY_BOB] += w * (1.0 - leaf.pass_prob)
        else:
            acc[WeakOutcome.BOB_WINS] += w * leaf.pass_prob
            acc[WeakOutcome.ABORT_BY_ALICE] += w * (1.0 - leaf.pass_prob)
    return [ProtocolOutcome(kind, *_WEAK_OUTCOME_BITS[kind], probability=acc[kind])
            for kind in WeakOutcome]


def run_strong_exact(alice: AliceStrategy, bob: BobStrategy, params: ProtocolParams,
                     target: int | None = None) -> list[ProtocolOutcome]:
    """Exact distribution of the strong game over {coin 0, coin 1, abort}.

    ``target`` is accepted for interface symmetry with adversary constructors
    but the runner itself is target-agnostic.
    """
    if target is not None:
        _require_bit_value(target, "target")
    acc = {kind: 0.0 for kind in StrongOutcome}
    for leaf in _enumerate_leaves("strong", alice, bob, params):
        w = leaf.weight_alice * leaf.weight_bob
        coin = StrongOutcome.COIN_0 if leaf.c == 0 else StrongOutcome.COIN_1
        acc[coin] += w * leaf.pass_prob
        acc[StrongOutcome.ABORT_BY_BOB] += w * (1.0 - leaf.pass_prob)
    def bits(kind):
        if kind is StrongOutcome.COIN_0:
            return 0, 0
        if kind is StrongOutcome.COIN_1:
            return 1, 1
        return None, None
    return [ProtocolOutcome(kind, *bits(kind), probability=acc[kind])
            for kind in StrongOutcome]


def trace_game(game: str, alice: AliceStrategy, bob: BobStrategy,
               params: ProtocolParams) -> list[Transcript]:
    """Per-branch transcripts (messages, final state, check record)."""
    transcripts = []
    for leaf in _enumerate_leaves(game, alice, bob, params):
        transcripts.append(Transcript(
            game=game,
            weight=leaf.weight_alice * leaf.weight_bob,
            events=_leaf_events(game, leaf),
            check=CheckRecord(leaf.checker, leaf.pass_prob),
            final_state=leaf.state,
        ))
    return transcripts


def run_sampled(game: str, alice: AliceStrategy, bob: BobStrategy, params: ProtocolParams,
                n_trials: int, seed: int) -> dict:
    """Monte Carlo counts over ``n_trials`` runs.

    Classical branches and the final check are sampled with their exact
    probabilities from a Philox counter-based generator keyed by ``seed``;
    identical seeds give identical counts.
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    leaves = _enumerate_leaves(game, alice, bob, params)

    alice_indices = sorted({leaf.alice_index for leaf in leaves})
    alice_weights = np.array([
        next(leaf.weight_alice for leaf in leaves if leaf.alice_index == ai)
        for ai in alice_indices
    ])
    per_alice = []
    for ai in alice_indices:
        group = [leaf for leaf in leaves if leaf.alice_index == ai]
        per_alice.append((
            np.cumsum([leaf.weight_bob for leaf in group]),
            np.array([leaf.pass_prob for leaf in group]),
            np.array([leaf.c for leaf in group]),
        ))

    if game == "weak":
        kinds = list(WeakOutcome)
        win_kind = {0: WeakOutcome.ALICE_WINS, 1: WeakOutcome.BOB_WINS}
        lose_kind = {0: WeakOutcome.ABORT_BY_BOB, 1: WeakOutcome.ABORT_BY_ALICE}
    else:
        kinds = list(StrongOutcome)
        win_kind = {0: StrongOutcome.COIN_0, 1: StrongOutcome.COIN_1}
        lose_kind = {0: StrongOutcome.ABORT_BY_BOB, 1: StrongOutcome.ABORT_BY_BOB}
    kind_index = {kind: i for i, kind in enumerate(kinds)}

    rng = np.random.Generator(np.random.Philox(np.uint64(seed)))
    u = rng.random((n_trials, 3))
    a_cum = np.cumsum(alice_weights)
    a_choice = np.searchsorted(a_cum, u[:, 0], side="right")
    np.clip(a_choice, 0, len(alice_indices) - 1, out=a_choice)

    outcome_codes = np.empty(n_trials, dtype=np.int64)
    for pos in range(len(alice_indices)):
        mask = a_choice == pos
        if not mask.any():
            continue
        b_cum, pass_probs, cs = per_alice[pos]
        b_choice = np.searchsorted(b_cum, u[mask, 1] * b_cum[-1], side="right")
        np.clip(b_choice, 0, len(pass_probs) - 1, out=b_choice)
        passes = u[mask, 2] < pass_probs[b_choice]
        leaf_c = cs[b_choice]
        codes = np.where(
            passes,
            np.array([kind_index[win_kind[0]], kind_index[win_kind[1]]])[leaf_c],
            np.array([kind_index[lose_kind[0]], kind_index[lose_kind[1]]])[leaf_c],
        )
        outcome_codes[mask] = codes

    totals = np.bincount(outcome_codes, minlength=len(kinds))
    return {kind: int(totals[kind_index[kind]]) for kind in kinds}
