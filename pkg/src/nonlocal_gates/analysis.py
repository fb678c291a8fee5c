"""Swap-symmetry analysis of two-qubit gates.

A gate ``U`` on (A, B) is swap-symmetric up to local unitaries when

    SWAP U SWAP^dag == (u1 (x) u2) U (u3 (x) u4)

up to a global phase. The helpers here extract generators, build the local
unitaries for the gate families where they are known in closed form, and
provide a spectral obstruction for gates where the conjugation form
``(u1 (x) u2) H (u1 (x) u2)^dag`` cannot exist.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NonlocalGatesError, NotBellDiagonal, RankMismatch
from .qstate import (
    CNOT,
    SWAP,
    TOL_STATE,
    TOL_UNITARY,
    H,
    I2,
    PureState,
    Z,
    check_hermitian,
    check_unitary,
    schmidt_decompose,
)

TOL_RANK = 1e-9


@dataclass(frozen=True, eq=False)
class SymmetrizerQuad:
    """Local unitaries ``(u1, u2, u3, u4)`` of the symmetry condition."""

    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    u4: np.ndarray

    def __post_init__(self):
        for name in ("u1", "u2", "u3", "u4"):
            object.__setattr__(self, name, check_unitary(getattr(self, name), dim=2))

    def __iter__(self):
        return iter((self.u1, self.u2, self.u3, self.u4))

    @classmethod
    def conjugation(cls, u1, u2) -> SymmetrizerQuad:
        """Quad for the pure conjugation form ``(u1 (x) u2) . (u1 (x) u2)^dag``."""
        return cls(u1, u2, np.conj(u1).T, np.conj(u2).T)

    @classmethod
    def identity(cls) -> SymmetrizerQuad:
        return cls(I2, I2, I2, I2)


def _two_qubit(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape != (4, 4):
        raise DimensionMismatch(f"expected a 4x4 matrix, got shape {x.shape}")
    return x


def swap_conjugate(x) -> np.ndarray:
    """``SWAP x SWAP^dag``: the same operator with the two qubits exchanged."""
    x = _two_qubit(x)
    return SWAP @ x @ SWAP.conj().T


def equal_up_to_phase(a, b, tol: float = TOL_STATE) -> bool:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    overlap = np.vdot(b, a)
    if abs(overlap) > 0:
        b = b * (overlap / abs(overlap))
    return bool(np.max(np.abs(a - b)) <= tol)


def generator_of(v) -> np.ndarray:
    """Hermitian ``H`` with ``expm(1j * H) == v``, eigenphases in (-pi, pi].

    Uses the complex Schur form, which is diagonal for normal matrices and
    keeps the eigenbasis orthonormal even for degenerate eigenvalues.
    """
    v = check_unitary(v)
    t, q = scipy.linalg.schur(v, output="complex")
    phases = np.angle(np.diag(t))
    phases = np.where(phases <= -np.pi + 1e-12, phases + 2 * np.pi, phases)
    h = (q * phases) @ q.conj().T
    return (h + h.conj().T) / 2


def check_condition(uab, quad: SymmetrizerQuad, tol: float = TOL_STATE) -> bool:
    """Whether ``SWAP uab SWAP^dag == (u1 (x) u2) uab (u3 (x) u4)`` up to phase."""
    uab = check_unitary(_two_qubit(uab), dim=4)
    u1, u2, u3, u4 = quad
    lhs = swap_conjugate(uab)
    rhs = np.kron(u1, u2) @ uab @ np.kron(u3, u4)
    return equal_up_to_phase(lhs, rhs, tol)


def rank1_symmetrizers(h) -> SymmetrizerQuad:
    """Local unitaries for a generator with a single nonzero eigenvalue.

    With the Schmidt form ``phi = sum_k sqrt(p_k) |a_k>|b_k>`` of the
    eigenvector, ``W = sum_k |b_k><a_k|`` satisfies
    ``(W (x) W^dag) phi = SWAP phi``, so ``(W, W^dag)`` conjugates ``h`` into
    its swapped form.
    """
    h = check_hermitian(h, dim=4)
    evals, evecs = np.linalg.eigh(h)
    big = np.flatnonzero(np.abs(evals) > TOL_RANK)
    if big.size != 1:
        raise RankMismatch(f"expected exactly one nonzero eigenvalue, found {big.size}")
    phi = PureState(("a", "b"), evecs[:, big[0]], normalize=True)
    form = schmidt_decompose(phi, "a")
    w = sum(np.outer(b, a.conj()) for a, b in zip(form.basis_a, form.basis_b))
    quad = SymmetrizerQuad.conjugation(w, w.conj().T)
    lhs = swap_conjugate(h)
    rhs = np.kron(quad.u1, quad.u2) @ h @ np.kron(quad.u3, quad.u4)
    if np.max(np.abs(lhs - rhs)) > TOL_STATE:
        raise NonlocalGatesError("rank-1 symmetrizer failed its own check")
    return quad


def bell_states() -> dict[str, np.ndarray]:
    s = 1 / np.sqrt(2)
    return {
        "phi+": np.array([s, 0, 0, s], dtype=complex),
        "phi-": np.array([s, 0, 0, -s], dtype=complex),
        "psi+": np.array([0, s, s, 0], dtype=complex),
        "psi-": np.array([0, s, -s, 0], dtype=complex),
    }


def is_bell_diagonal(h, tol: float = TOL_STATE) -> bool:
    h = np.asarray(h, dtype=complex)
    for v in bell_states().values():
        p = np.outer(v, v.conj())
        if np.max(np.abs(h @ p - p @ h)) > tol:
            return False
    return True


def bell_diagonal_symmetrizers(h, use_sigma_z: bool = False) -> SymmetrizerQuad:
    """Local unitaries for a generator diagonal in the Bell basis.

    Every Bell projector is invariant under both SWAP and ``Z (x) Z``
    conjugation, so either the identity quad or the all-``Z`` quad works.
    """
    h = check_hermitian(h, dim=4)
    if not is_bell_diagonal(h):
        raise NotBellDiagonal("generator does not commute with every Bell projector")
    zz = np.kron(Z, Z)
    for v in bell_states().values():
        p = np.outer(v, v.conj())
        if np.max(np.abs(swap_conjugate(p) - p)) > TOL_STATE or np.max(np.abs(zz @ p @ zz - p)) > TOL_STATE:
            raise NonlocalGatesError("Bell projector invariance failed")
    if use_sigma_z:
        return SymmetrizerQuad(Z, Z, Z, Z)
    return SymmetrizerQuad.identity()


def controlled_phase_gate(l3: float, l4: float) -> np.ndarray:
    """``|0><0| (x) 1 + |1><1| (x) diag(e^{i l3}, e^{i l4})``."""
    return np.diag([1, 1, np.exp(1j * l3), np.exp(1j * l4)])


def controlled_phase_symmetrizers(l3: float, l4: float) -> SymmetrizerQuad:
    """Closed-form quad making :func:`controlled_phase_gate` swap-symmetric."""
    d = l3 - l4
    u1 = np.diag([np.exp(1j * d), np.exp(-1j * l4)])
    u2 = np.diag([np.exp(-1j * d), 1])
    u4 = np.diag([1, np.exp(1j * l4)])
    return SymmetrizerQuad(u1, u2, I2, u4)


def counterexample_gate(l3: float, l4: float, l1: float = 0.0, l2: float = 0.0) -> np.ndarray:
    """Gate diagonal in ``{|0+>, |0->, |10>, |11>}`` with the given phases."""
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    zero, one = np.array([1, 0]), np.array([0, 1])
    vecs = [np.kron(zero, plus), np.kron(zero, minus), np.kron(one, zero), np.kron(one, one)]
    return sum(
        np.exp(1j * lam) * np.outer(v, v.conj()) for lam, v in zip((l1, l2, l3, l4), vecs)
    )


def counterexample_generator(l3: float, l4: float) -> np.ndarray:
    return np.diag([0, 0, l3, l4]).astype(complex)


def partial_trace(op, keep: int = 0) -> np.ndarray:
    """Reduce a two-qubit operator onto qubit ``keep`` (0 = A, 1 = B)."""
    t = _two_qubit(op).reshape(2, 2, 2, 2)
    return np.einsum("ajbj->ab", t) if keep == 0 else np.einsum("jajb->ab", t)


def partial_trace_spectrum(op, keep: int = 0) -> np.ndarray:
    return np.linalg.eigvalsh(check_hermitian(partial_trace(op, keep)))


@dataclass(frozen=True)
class SpectrumWitness:
    """Reduced-operator spectra on qubit A before and after a transformation.

    Conjugation by ``u1 (x) u2`` maps the A-reduced operator to
    ``u1 . u1^dag`` and so cannot change its spectrum; unequal spectra
    rule out any such conjugation.
    """

    spectrum_a_before: tuple[float, float]
    spectrum_a_after: tuple[float, float]
    tol: float = TOL_STATE

    @property
    def fires(self) -> bool:
        before = np.array(self.spectrum_a_before)
        after = np.array(self.spectrum_a_after)
        return bool(np.max(np.abs(before - after)) > self.tol)

    def to_dict(self) -> dict:
        return {
            "spectrum_a_before": list(self.spectrum_a_before),
            "spectrum_a_after": list(self.spectrum_a_after),
            "obstruction": self.fires,
        }


def spectrum_witness(h_before, h_after, tol: float = TOL_STATE) -> SpectrumWitness:
    before = tuple(float(x) for x in partial_trace_spectrum(h_before, 0))
    after = tuple(float(x) for x in partial_trace_spectrum(h_after, 0))
    return SpectrumWitness(before, after, tol)


def counterexample_witness(l3: float, l4: float) -> SpectrumWitness:
    """Obstruction to writing the swapped generator as a local conjugation."""
    h1 = counterexample_generator(l3, l4)
    return spectrum_witness(h1, swap_conjugate(h1))


def cnot_hadamard_identity(tol: float = TOL_STATE) -> bool:
    """``(H (x) H) CNOT (H (x) H)`` equals the reversed CNOT, entrywise."""
    hh = np.kron(H, H)
    reversed_cnot = np.array(
        [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
    )
    via_hadamard = hh @ CNOT @ hh
    via_swap = swap_conjugate(CNOT)
    return bool(
        np.max(np.abs(via_hadamard - reversed_cnot)) <= tol
        and np.max(np.abs(via_swap - reversed_cnot)) <= tol
    )


__all__ = [
    "SymmetrizerQuad",
    "SpectrumWitness",
    "TOL_RANK",
    "TOL_UNITARY",
    "bell_diagonal_symmetrizers",
    "bell_states",
    "check_condition",
    "cnot_hadamard_identity",
    "controlled_phase_gate",
    "controlled_phase_symmetrizers",
    "counterexample_gate",
    "counterexample_generator",
    "counterexample_witness",
    "equal_up_to_phase",
    "generator_of",
    "is_bell_diagonal",
    "partial_trace",
    "partial_trace_spectrum",
    "rank1_symmetrizers",
    "spectrum_witness",
    "swap_conjugate",
]
