"""Simulator and verification toolkit for qutrit-based quantum coin flipping.

Two two-party games are implemented: a weak coin-flipping game in which the
winning party is tested for cheating (best bias about 0.239), and a strong
coin-flipping game with bias 1/4.  The package computes every cheating limit
in closed form, realizes the strategies that attain them by exact
density-matrix evolution, and confirms optimality by derivative-free search
over the full adversary class.
"""

from .bounds import (
    BoundReport,
    alice_strong_bound,
    alice_weak_bound,
    bob_strong_bound,
    bob_weak_bound,
    bound_report,
    kitaev_product,
    solve_strong_equalization,
    solve_weak_equalization,
    weak_equalization_quadratic,
    weak_to_strong_bias,
)
from .protocol import (
    Message,
    MessageKind,
    ProtocolError,
    ProtocolOutcome,
    StrongOutcome,
    Transcript,
    WeakOutcome,
    as_dict,
    run_sampled,
    run_strong_exact,
    run_weak_exact,
    trace_game,
)
from .qmath import (
    RegisterLayout,
    fidelity,
    herm_eig,
    partial_trace,
    project_and_renormalize,
    psd_sqrt,
    tensor,
    trace_norm,
)
from .states import ProtocolParams, SIGN_QUTRIT, check_projector, psi, psi_trit, rho_honest
from .strategies import (
    DecodeError,
    cheating_alice_optimal,
    cheating_bob_strong_helstrom,
    cheating_bob_weak_literal,
    cheating_bob_weak_optimal,
    decode_adversary,
    honest_alice,
    honest_bob,
)
from .verify import (
    SearchConfig,
    SweepRow,
    achieved_probability,
    best_response_search,
    max_avg_fidelity,
    run_suite,
    sweep,
)

__version__ = "0.1.0"
