"""Dense complex linear algebra on small labeled quantum registers.

Everything here operates on plain numpy arrays: pure states are 1-D complex
vectors, operators and density matrices are 2-D complex arrays.  Composite
systems follow a single index convention, fixed by :class:`RegisterLayout`:
the leftmost register is the most significant digit, so a qubit-then-qutrit
system maps local indices ``(s, t)`` to the composite basis index ``3*s + t``.

The eigensolver is a cyclic complex Jacobi iteration.  All dimensions in this
package are tiny (at most a few dozen), so robustness and simplicity beat
asymptotic speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Numerical tolerances, shared by every module in the package.
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10  # eigenvalues in [-PSD_TOL, 0) count as zero
PROJECTOR_TOL = 1e-10
NORM_TOL = 1e-10
ISOMETRY_TOL = 1e-10
JACOBI_OFFDIAG_TOL = 1e-14  # off-diagonal Frobenius mass at convergence
JACOBI_MAX_SWEEPS = 100
PROB_FLOOR = 1e-12  # below this, a projected state counts as annihilated


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered, named registers of a composite system.

    The composite basis index of local indices ``(i_0, ..., i_{k-1})`` is
    ``sum_j i_j * prod(dims[j+1:])``: plain mixed-radix with the first
    register as the high digit.  This matches ``numpy.kron`` ordering.
    """

    registers: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        labels = [label for label, _ in self.registers]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate register labels in {labels}")
        for label, d in self.registers:
            if d < 1:
                raise ValueError(f"register {label!r} has non-positive dimension {d}")

    @classmethod
    def of(cls, *registers: tuple[str, int]) -> "RegisterLayout":
        return cls(tuple((str(label), int(dim)) for label, dim in registers))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.registers)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.registers)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims)) if self.registers else 1

    def axis_of(self, label: str) -> int:
        for i, (name, _) in enumerate(self.registers):
            if name == label:
                return i
        raise ValueError(f"unknown register label {label!r}")


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two states (1-D) or two operators (2-D).

    The left factor becomes the most significant register; mixing a vector
    with a matrix is rejected.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise ValueError(f"tensor expects two vectors or two matrices, got ndim {a.ndim} and {b.ndim}")
    return np.kron(a, b)


def _require_square(a: np.ndarray, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} must be a square matrix, got shape {a.shape}")
    return a


def require_hermitian(a: np.ndarray, *, tol: float = HERMITICITY_TOL, what: str = "matrix") -> np.ndarray:
    a = _require_square(a, what)
    dev = float(np.abs(a - a.conj().T).max(initial=0.0))
    if dev > tol:
        raise ValueError(f"{what} is not Hermitian (max asymmetry {dev:.3e} > {tol:.1e})")
    return a


def validate_density_matrix(rho: np.ndarray, *, what: str = "density matrix") -> np.ndarray:
    """Check Hermiticity, unit trace and positive semidefiniteness."""
    rho = require_hermitian(rho, what=what)
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"{what} has trace {tr:.12g}, expected 1")
    w, _ = herm_eig(rho)
    if w.min(initial=0.0) < -PSD_TOL:
        raise ValueError(f"{what} has negative eigenvalue {w.min():.3e}")
    return rho


def validate_unit_vector(v: np.ndarray, *, what: str = "state") -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise ValueError(f"{what} must be a vector, got shape {v.shape}")
    n2 = float(np.vdot(v, v).real)
    if abs(n2 - 1.0) > NORM_TOL:
        raise ValueError(f"{what} has squared norm {n2:.12g}, expected 1")
    return v


def partial_trace(rho: np.ndarray, layout: RegisterLayout, keep) -> np.ndarray:
    """Reduced density matrix over the registers named in ``keep``.

    Kept registers preserve their order from ``layout``.  Raises ``ValueError``
    for labels not in the layout or when ``rho`` does not match the layout's
    total dimension.
    """
    rho = _require_square(rho, "partial_trace input")
    keep = list(keep)
    for label in keep:
        layout.axis_of(label)  # raises on unknown labels
    if rho.shape[0] != layout.dim:
        raise ValueError(f"matrix dimension {rho.shape[0]} does not match layout dimension {layout.dim}")
    keep_set = set(keep)
    dims = list(layout.dims)
    work = rho.reshape(dims + dims)
    half = len(dims)
    for axis in reversed(range(len(dims))):
        if layout.labels[axis] in keep_set:
            continue
        work = np.trace(work, axis1=axis, axis2=axis + half)
        half -= 1
    d_keep = int(np.prod([d for (label, d) in layout.registers if label in keep_set])) if keep else 1
    return np.asarray(work, dtype=complex).reshape(d_keep, d_keep)


def herm_eig(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.

    Returns ``(w, v)`` with eigenvalues ``w`` sorted in descending order and
    the unitary ``v`` holding matching eigenvectors as columns, so that
    ``h == v @ diag(w) @ v.conj().T`` up to roundoff.

    Each rotation annihilates one off-diagonal pair: the pair's phase is
    absorbed into a diagonal unitary and the remaining real 2x2 block is
    rotated with the classical stable angle choice.  Sweeps stop once the
    off-diagonal Frobenius mass falls below ``JACOBI_OFFDIAG_TOL`` (relative
    to the matrix scale).
    """
    h = require_hermitian(h, what="herm_eig input")
    n = h.shape[0]
    a = (h + h.conj().T) / 2.0
    v = np.eye(n, dtype=complex)
    if n == 1:
        return np.array([a[0, 0].real]), v

    scale = float(np.linalg.norm(a))
    threshold = JACOBI_OFFDIAG_TOL * max(1.0, scale)
    skip_eps = threshold / (2.0 * n * n)

    for _ in range(JACOBI_MAX_SWEEPS):
        off = a.copy()
        np.fill_diagonal(off, 0.0)
        if float(np.linalg.norm(off)) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip_eps:
                    continue
                f = apq / mag  # phase of the pair; fbar*apq is real positive
                fbar = f.conjugate()
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # J restricted to (p, q) is [[c, s], [-fbar*s, fbar*c]].
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - (fbar * s) * col_q
                a[:, q] = s * col_p + (fbar * c) * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - (f * s) * row_q
                a[q, :] = s * row_p + (f * c) * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - (fbar * s) * vq
                v[:, q] = s * vp + (fbar * c) * vq
    else:
        raise ArithmeticError("Jacobi eigensolver did not converge within the sweep limit")

    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def _clamped_sqrt_eigs(w: np.ndarray) -> np.ndarray:
    """Square roots of eigenvalues with small negative drift clipped to zero."""
    w = np.where((w < 0.0) & (w >= -PSD_TOL), 0.0, w)
    if w.min(initial=0.0) < 0.0:
        raise ValueError(f"matrix is not positive semidefinite (eigenvalue {w.min():.3e})")
    return np.sqrt(w)


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix."""
    w, v = herm_eig(a)
    return (v * _clamped_sqrt_eigs(w)) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Fidelity F(rho, sigma) = (Tr |sqrt(rho) sqrt(sigma)|)^2.

    This is the squared convention: on pure states it reduces to the squared
    overlap |<psi|phi>|^2.  Computed as (sum_i sqrt(lambda_i))^2 over the
    eigenvalues of sqrt(rho) sigma sqrt(rho), which equals the definition
    because sqrt(rho) sigma sqrt(rho) = M M^dagger for M = sqrt(rho) sqrt(sigma).
    """
    rho = _require_square(rho, "fidelity first argument")
    sigma = _require_square(sigma, "fidelity second argument")
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    sr = psd_sqrt(rho)
    inner = sr @ sigma @ sr
    w, _ = herm_eig((inner + inner.conj().T) / 2.0)
    val = float(_clamped_sqrt_eigs(w).sum()) ** 2
    return min(max(val, 0.0), 1.0)


def trace_norm(a: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    w, _ = herm_eig(a)
    return float(np.abs(w).sum())


def project_and_renormalize(state: np.ndarray, projector: np.ndarray) -> tuple[float, np.ndarray | None]:
    """Apply a projective check to a pure state.

    Returns ``(probability, post_state)`` where ``probability = <psi|P|psi>``
    and ``post_state`` is the renormalized projection, or ``None`` when the
    probability falls below ``PROB_FLOOR``.  The projector must be Hermitian
    and idempotent within ``PROJECTOR_TOL``.
    """
    state = np.asarray(state, dtype=complex)
    projector = require_hermitian(projector, tol=PROJECTOR_TOL, what="projector")
    dev = float(np.abs(projector @ projector - projector).max(initial=0.0))
    if dev > PROJECTOR_TOL:
        raise ValueError(f"projector is not idempotent (max deviation {dev:.3e})")
    if projector.shape[0] != state.shape[0]:
        raise ValueError(f"dimension mismatch: state {state.shape[0]}, projector {projector.shape[0]}")
    projected = projector @ state
    prob = float(np.vdot(state, projected).real)
    prob = min(max(prob, 0.0), 1.0)
    if prob <= PROB_FLOOR:
        return prob, None
    return prob, projected / math.sqrt(prob)
