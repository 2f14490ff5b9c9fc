"""Concrete players: honest parties, optimal cheaters, and searchable charts.

The cheating strategies here are the ones whose exact win probabilities meet
the closed-form limits in :mod:`qcoinflip.bounds`:

* ``cheating_alice_optimal`` commits to the normalized sum of the two honest
  states and claims whichever bit Bob's reply makes a winning one;
* ``cheating_bob_weak_optimal`` copies the message qutrit into an ancilla
  (the blank component going to a balanced superposition), measures the
  ancilla and replies with the complement of the outcome;
* ``cheating_bob_strong_helstrom`` measures the qutrit in the eigenbasis of
  the difference of the two honest reduced states, the optimal two-state
  discrimination, and steers the coin toward its target.

``decode_adversary`` maps unconstrained real vectors onto valid strategies so
a derivative-free search can sweep the whole adversary class.
"""

from __future__ import annotations

import math

import numpy as np

from .protocol import AliceBranch, AliceStrategy, BobBranch, BobStrategy, ProtocolError
from .qmath import ISOMETRY_TOL, PSD_TOL, herm_eig
from .states import ProtocolParams, psi, rho_honest

_BRANCH_FLOOR = 1e-15

# Chart sizes (real parameters) for decode_adversary.
ALICE_COMMIT_PARAM_COUNT = 24  # pure state on ancilla qubit x sign x qutrit
BOB_EXTRACT_PARAM_COUNT = 36   # isometry qutrit -> qutrit x reply qubit


class DecodeError(ValueError):
    """A chart point could not be decoded into a valid strategy."""


class HonestAlice(AliceStrategy):
    """Picks a fair bit, commits honestly, reveals truthfully."""

    name = "honest"
    ancilla_dim = 1

    def prepare(self, params: ProtocolParams) -> list[AliceBranch]:
        return [AliceBranch(0.5, a, psi(a, params).reshape(1, 2, 3)) for a in (0, 1)]

    def reveal(self, a: int | None, b: int) -> int:
        return a


class CommitAlice(AliceStrategy):
    """Commits to an arbitrary pure state and always claims a = b.

    Claiming Bob's own bit forces c = 0, so the game always ends with Bob
    testing her commitment; her winning probability is exactly the average
    pass probability of that test.
    """

    def __init__(self, state: np.ndarray, name: str = "alice-commit"):
        state = np.asarray(state, dtype=complex)
        if state.ndim != 3 or state.shape[1:] != (2, 3):
            raise ProtocolError(f"commit state must have shape (d, 2, 3), got {state.shape}")
        n2 = float((np.abs(state) ** 2).sum())
        if abs(n2 - 1.0) > 1e-8:
            raise ProtocolError(f"commit state has squared norm {n2:.12g}")
        self._state = state
        self.ancilla_dim = state.shape[0]
        self.name = name

    def prepare(self, params: ProtocolParams) -> list[AliceBranch]:
        return [AliceBranch(1.0, None, self._state)]

    def reveal(self, a: int | None, b: int) -> int:
        return b


class OptimalAlice(AliceStrategy):
    """Commits to the normalized sum of both honest states (no ancilla)."""

    name = "alice-opt"
    ancilla_dim = 1

    def prepare(self, params: ProtocolParams) -> list[AliceBranch]:
        v = psi(0, params) + psi(1, params)
        v = v / np.linalg.norm(v)
        return [AliceBranch(1.0, None, v.reshape(1, 2, 3))]

    def reveal(self, a: int | None, b: int) -> int:
        return b


class HonestBob(BobStrategy):
    """Replies with a fair coin and performs the prescribed test."""

    name = "honest"
    ancilla_dim = 1
    reply_dim = 1

    def respond(self, joint: np.ndarray, params: ProtocolParams) -> list[BobBranch]:
        return [BobBranch(0.5, 0, joint), BobBranch(0.5, 1, joint)]


class ExtractionBob(BobStrategy):
    """Applies an isometry qutrit -> qutrit x ancilla x reply, measures the reply.

    The isometry tensor has shape ``(3, ancilla_dim, 2, 3)``, indexed by
    (qutrit out, ancilla, reply, qutrit in).  ``complement_reply=True`` sends
    the negation of the measured reply bit; the raw variant is kept for
    comparison because it replies with the extracted bit itself and thereby
    concedes the branch it actually learned something in.
    """

    reply_dim = 2

    def __init__(self, isometry: np.ndarray, complement_reply: bool, name: str):
        v = np.asarray(isometry, dtype=complex)
        if v.ndim != 4 or v.shape[0] != 3 or v.shape[2] != 2 or v.shape[3] != 3:
            raise ProtocolError(f"isometry must have shape (3, d, 2, 3), got {v.shape}")
        flat = v.reshape(-1, 3)
        dev = float(np.abs(flat.conj().T @ flat - np.eye(3)).max())
        if dev > ISOMETRY_TOL:
            raise ProtocolError(f"isometry violates V^dagger V = I by {dev:.3e}")
        self._v = v
        self.ancilla_dim = v.shape[1]
        self.complement_reply = bool(complement_reply)
        self.name = name

    def respond(self, joint: np.ndarray, params: ProtocolParams) -> list[BobBranch]:
        d_a = joint.shape[0]
        expected = (d_a, 2, 3, self.ancilla_dim, 2)
        if joint.shape != expected:
            raise ProtocolError(f"joint state has shape {joint.shape}, expected {expected}")
        base = joint[:, :, :, 0, 0]
        out = np.einsum("qnrt,ast->asqnr", self._v, base)
        branches = []
        for m in (0, 1):
            slab = out[..., m]
            weight = float((np.abs(slab) ** 2).sum())
            if weight <= _BRANCH_FLOOR:
                continue
            post = np.zeros_like(joint)
            post[..., m] = slab / math.sqrt(weight)
            b = m ^ 1 if self.complement_reply else m
            branches.append(BobBranch(weight, b, post))
        return branches


class HelstromBob(BobStrategy):
    """Distinguishes the two honest reduced states as well as physics allows.

    Measures the received qutrit in the eigenbasis of rho_0 - rho_1: positive
    eigenvalues vote for a=0, negative for a=1, and the zero eigenspace falls
    to the fixed tie rule a=0.  The guess is then steered so the coin lands
    on ``target`` whenever the guess is right.  Having measured the qutrit
    destructively, this Bob skips his own verification step.
    """

    ancilla_dim = 1
    reply_dim = 1
    accepts_any_commitment = True

    def __init__(self, target: int):
        if target not in (0, 1):
            raise ValueError(f"target must be 0 or 1, got {target!r}")
        self.target = int(target)
        self.name = f"bob-helstrom-{target}"

    def respond(self, joint: np.ndarray, params: ProtocolParams) -> list[BobBranch]:
        delta = rho_honest(0, params) - rho_honest(1, params)
        w, v = herm_eig(delta)
        proj_guess0 = np.zeros((3, 3), dtype=complex)
        proj_guess1 = np.zeros((3, 3), dtype=complex)
        for i in range(3):
            outer = np.outer(v[:, i], v[:, i].conj())
            if w[i] < -PSD_TOL:
                proj_guess1 += outer
            else:
                proj_guess0 += outer
        branches = []
        for guess, proj in ((0, proj_guess0), (1, proj_guess1)):
            slab = np.einsum("ij,asjnr->asinr", proj, joint)
            weight = float((np.abs(slab) ** 2).sum())
            if weight <= _BRANCH_FLOOR:
                continue
            branches.append(BobBranch(weight, guess ^ self.target, slab / math.sqrt(weight)))
        return branches


def honest_alice(params: ProtocolParams | None = None) -> HonestAlice:
    return HonestAlice()


def honest_bob(params: ProtocolParams | None = None) -> HonestBob:
    return HonestBob()


def cheating_alice_optimal(params: ProtocolParams | None = None) -> OptimalAlice:
    return OptimalAlice()


def _copy_isometry() -> np.ndarray:
    """|0>|0> -> |0>(|0>+|1>)/sqrt(2) and |x+1>|0> -> |x+1>|x>."""
    v = np.zeros((3, 1, 2, 3), dtype=complex)
    v[0, 0, 0, 0] = 1.0 / math.sqrt(2.0)
    v[0, 0, 1, 0] = 1.0 / math.sqrt(2.0)
    v[1, 0, 0, 1] = 1.0
    v[2, 0, 1, 2] = 1.0
    return v


def cheating_bob_weak_optimal(params: ProtocolParams | None = None) -> ExtractionBob:
    return ExtractionBob(_copy_isometry(), complement_reply=True, name="bob-opt-weak")


def cheating_bob_weak_literal(params: ProtocolParams | None = None) -> ExtractionBob:
    """Same transformation but replying with the raw measured bit.

    Replying with the extracted bit makes c = 0 exactly on the informative
    branch, handing the win to Alice; kept so the gap to the complemented
    variant can be computed rather than assumed.
    """
    return ExtractionBob(_copy_isometry(), complement_reply=False, name="bob-opt-weak-literal")


def cheating_bob_strong_helstrom(params: ProtocolParams | None = None, target: int = 1) -> HelstromBob:
    return HelstromBob(target)


def _reals_to_complex(p: np.ndarray) -> np.ndarray:
    pairs = p.reshape(-1, 2)
    return pairs[:, 0] + 1j * pairs[:, 1]


def _complex_to_reals(z: np.ndarray) -> np.ndarray:
    out = np.empty(2 * z.size)
    out[0::2] = z.real.ravel()
    out[1::2] = z.imag.ravel()
    return out


def alice_commit_chart_point(state: np.ndarray) -> np.ndarray:
    """Chart coordinates whose decode reproduces ``state`` (shape (2, 2, 3))."""
    state = np.asarray(state, dtype=complex)
    if state.shape != (2, 2, 3):
        raise ValueError(f"expected shape (2, 2, 3), got {state.shape}")
    return _complex_to_reals(state.ravel())


def bob_extract_chart_point(isometry: np.ndarray) -> np.ndarray:
    """Chart coordinates whose decode reproduces the given (3,1,2,3) isometry.

    The QR canonicalization fixes the diagonal phases of R, and a matrix that
    already has orthonormal columns is its own Q, so exact isometries
    round-trip unchanged.
    """
    v = np.asarray(isometry, dtype=complex)
    if v.shape != (3, 1, 2, 3):
        raise ValueError(f"expected shape (3, 1, 2, 3), got {v.shape}")
    columns = v.reshape(6, 3)
    return _complex_to_reals(columns.ravel())


def _canonical_qr(m: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(m)
    diag = np.diag(r)
    if np.abs(diag).min(initial=np.inf) < 1e-8:
        raise DecodeError("degenerate chart point: rank-deficient isometry candidate")
    q = q * (diag / np.abs(diag))
    return q


def _isometry_from_columns(columns: np.ndarray) -> np.ndarray:
    """Rows of ``columns`` (6, 3) are indexed by 2*qutrit_out + reply."""
    return columns.reshape(3, 2, 3)[:, None, :, :]


def decode_adversary(kind: str, p: np.ndarray):
    """Decode an unconstrained real vector into a cheating strategy.

    Kinds:

    * ``"alice-commit"``: 24 reals, an unnormalized pure state on ancilla
      qubit x sign x qutrit; decoded by normalization.
    * ``"bob-extract"``: 36 reals, an unconstrained complex 6x3 matrix;
      decoded to an isometry qutrit -> qutrit x reply by QR.
    * ``"bob-extract-balanced"``: same size, but the image of the blank
      component is forced to put weight exactly 1/2 on each reply value;
      the two remaining columns are completed by Gram-Schmidt.

    Raises :class:`DecodeError` on zero-norm or rank-deficient candidates.
    """
    p = np.asarray(p, dtype=float).ravel()
    if kind == "alice-commit":
        if p.size != ALICE_COMMIT_PARAM_COUNT:
            raise DecodeError(f"alice-commit chart needs {ALICE_COMMIT_PARAM_COUNT} reals, got {p.size}")
        z = _reals_to_complex(p)
        norm = float(np.linalg.norm(z))
        if norm < 1e-8:
            raise DecodeError("degenerate chart point: zero-norm state candidate")
        return CommitAlice((z / norm).reshape(2, 2, 3), name="chart-alice")

    if kind == "bob-extract":
        if p.size != BOB_EXTRACT_PARAM_COUNT:
            raise DecodeError(f"bob-extract chart needs {BOB_EXTRACT_PARAM_COUNT} reals, got {p.size}")
        m = _reals_to_complex(p).reshape(6, 3)
        q = _canonical_qr(m)
        return ExtractionBob(_isometry_from_columns(q), complement_reply=False, name="chart-bob")

    if kind == "bob-extract-balanced":
        if p.size != BOB_EXTRACT_PARAM_COUNT:
            raise DecodeError(f"bob-extract-balanced chart needs {BOB_EXTRACT_PARAM_COUNT} reals, got {p.size}")
        z = _reals_to_complex(p)
        col0 = np.empty(6, dtype=complex)
        for r, piece in enumerate((z[0:3], z[3:6])):
            norm = float(np.linalg.norm(piece))
            if norm < 1e-8:
                raise DecodeError("degenerate chart point: zero-norm blank-image piece")
            col0[r::2] = piece / (norm * math.sqrt(2.0))
        columns = [col0]
        for raw in (z[6:12], z[12:18]):
            vec = raw.copy()
            for prev in columns:
                vec -= np.vdot(prev, vec) * prev
            norm = float(np.linalg.norm(vec))
            if norm < 1e-8:
                raise DecodeError("degenerate chart point: dependent isometry columns")
            columns.append(vec / norm)
        q = np.stack(columns, axis=1)
        return ExtractionBob(_isometry_from_columns(q), complement_reply=False,
                             name="chart-bob-balanced")

    raise ValueError(f"unknown adversary kind {kind!r}")
