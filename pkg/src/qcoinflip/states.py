"""Protocol states for the coin-flipping games.

Both games are played with a qutrit message register and a sign qubit.
Basis conventions, used everywhere in the package:

* qutrit basis ``{|0>, |1>, |2>}``; the classical bit ``x`` is encoded in
  basis state ``x + 1``, keeping ``|0>`` as the shared "blank" component;
* sign qubit basis ``{|0>, |1>}`` indexes the relative sign ``s``;
* the joint sign+qutrit system uses the layout ``SIGN_QUTRIT`` below, so the
  pair ``(s, t)`` sits at composite index ``3*s + t``.

The game is parametrised by an angle ``alpha`` in ``[0, pi]`` that controls
how distinguishable the two committed states are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qmath import RegisterLayout

SIGN_QUTRIT = RegisterLayout.of(("sign", 2), ("qutrit", 3))


@dataclass(frozen=True)
class ProtocolParams:
    """Game parameter: the commitment angle alpha, in radians."""

    alpha: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha <= math.pi):
            raise ValueError(f"alpha out of range [0, pi]: {self.alpha}")


def _require_bit(value: int, name: str) -> int:
    if value not in (0, 1):
        raise ValueError(f"{name} must be 0 or 1, got {value!r}")
    return int(value)


def psi_trit(x: int, s: int, params: ProtocolParams) -> np.ndarray:
    """Qutrit state cos(alpha/2)|0> + (-1)^s sin(alpha/2)|x+1>."""
    x = _require_bit(x, "x")
    s = _require_bit(s, "s")
    half = params.alpha / 2.0
    v = np.zeros(3, dtype=complex)
    v[0] = math.cos(half)
    v[x + 1] = (-1.0) ** s * math.sin(half)
    return v


def psi(x: int, params: ProtocolParams) -> np.ndarray:
    """Sign-qubit + qutrit commitment state for bit ``x``.

    Equal superposition over the sign bit: (|0>|psi_{x,0}> + |1>|psi_{x,1}>)/sqrt(2).
    """
    x = _require_bit(x, "x")
    v = np.zeros(6, dtype=complex)
    v[0:3] = psi_trit(x, 0, params) / math.sqrt(2.0)
    v[3:6] = psi_trit(x, 1, params) / math.sqrt(2.0)
    return v


def rho_honest(a: int, params: ProtocolParams) -> np.ndarray:
    """Qutrit state an honest commitment to ``a`` leaves with the receiver.

    Tracing the sign qubit out of |psi_a> gives the diagonal mixture
    cos^2(alpha/2)|0><0| + sin^2(alpha/2)|a+1><a+1|.
    """
    a = _require_bit(a, "a")
    half = params.alpha / 2.0
    rho = np.zeros((3, 3), dtype=complex)
    rho[0, 0] = math.cos(half) ** 2
    rho[a + 1, a + 1] = math.sin(half) ** 2
    return rho


def check_projector(a: int, params: ProtocolParams) -> np.ndarray:
    """Rank-one projector |psi_a><psi_a| used for the cheating test."""
    vec = psi(a, params)
    return np.outer(vec, vec.conj())
