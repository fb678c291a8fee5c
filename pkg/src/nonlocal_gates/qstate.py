"""Dense pure-state linear algebra over labelled qubit registers.

Amplitude index convention: register position 0 is the most significant bit,
so ``PureState(("A", "B"), v)`` stores ``v[2*a + b]`` for the ket ``|a b>``.
Matrices follow the same convention over their target lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateQubit,
    NotHermitian,
    NotNormalized,
    NotUnitary,
    RegisterMismatch,
    UnknownQubit,
)

TOL_NORM = 1e-10
TOL_UNITARY = 1e-10
TOL_STATE = 1e-9
TOL_PRUNE = 1e-12


class PureState:
    """Normalized amplitude vector over an ordered register of qubit labels.

    Instances are immutable: the amplitude array is copied on construction
    and flagged read-only.
    """

    __slots__ = ("register", "amplitudes")

    def __init__(self, register: Sequence[str], amplitudes, *, normalize: bool = False):
        register = tuple(register)
        if len(set(register)) != len(register):
            raise DuplicateQubit(f"register labels must be unique: {register}")
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** len(register):
            raise DimensionMismatch(
                f"{amps.size} amplitudes for a {len(register)}-qubit register"
            )
        norm = float(np.sqrt(np.vdot(amps, amps).real))
        if not np.isfinite(norm):
            raise ValueError("amplitudes must be finite")
        if normalize:
            if norm < TOL_PRUNE:
                raise NotNormalized("cannot normalize a null vector")
            amps = amps / norm
        elif abs(norm - 1.0) > TOL_NORM:
            raise NotNormalized(f"state norm is {norm!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def _trusted(cls, register: tuple[str, ...], amplitudes: np.ndarray) -> PureState:
        # For results of norm-preserving internal operations on a valid state.
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        amps.flags.writeable = False
        out = object.__new__(cls)
        object.__setattr__(out, "register", register)
        object.__setattr__(out, "amplitudes", amps)
        return out

    def __setattr__(self, name, value):
        raise AttributeError("PureState is immutable")

    def __repr__(self) -> str:
        return f"PureState(register={self.register}, {format_ket(self, limit=8)})"

    @property
    def num_qubits(self) -> int:
        return len(self.register)

    def index(self, label: str) -> int:
        try:
            return self.register.index(label)
        except ValueError:
            raise UnknownQubit(f"{label!r} not in register {self.register}") from None

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def relabel(self, mapping: dict[str, str]) -> PureState:
        register = tuple(mapping.get(q, q) for q in self.register)
        if len(set(register)) != len(register):
            raise DuplicateQubit(f"relabelling produces repeated labels: {register}")
        return PureState._trusted(register, self.amplitudes)

    @classmethod
    def basis(cls, register: Sequence[str], bits: str | Sequence[int]) -> PureState:
        """Computational basis ket, e.g. ``PureState.basis("AB", "01")``."""
        register = tuple(register)
        bits = [int(b) for b in bits]
        if len(bits) != len(register):
            raise DimensionMismatch("one bit per register label is required")
        amps = np.zeros(2 ** len(register), dtype=complex)
        amps[int("".join(map(str, bits)) or "0", 2)] = 1.0
        return cls(register, amps)


def qubit(label: str, amplitudes) -> PureState:
    """Single-qubit state from two (possibly unnormalized) amplitudes."""
    return PureState((label,), amplitudes, normalize=True)


def bell_pair(first: str, second: str) -> PureState:
    """``(|00> + |11>)/sqrt(2)`` on ``(first, second)``."""
    return PureState((first, second), np.array([1, 0, 0, 1]) / np.sqrt(2))


def tensor(a: PureState, b: PureState) -> PureState:
    clash = set(a.register) & set(b.register)
    if clash:
        raise DuplicateQubit(f"labels present in both states: {sorted(clash)}")
    return PureState._trusted(a.register + b.register, np.outer(a.amplitudes, b.amplitudes))


def product_state(*states: PureState) -> PureState:
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def _target_axes(s: PureState, targets: Sequence[str]) -> list[int]:
    axes = [s.index(t) for t in targets]
    if len(set(axes)) != len(axes):
        raise DuplicateQubit(f"repeated target in {list(targets)}")
    return axes


def apply_unitary(
    s: PureState, u, targets: Sequence[str], *, assume_unitary: bool = False
) -> PureState:
    """Apply ``u`` to ``targets`` (in matrix order) and identity elsewhere.

    The result is norm-checked unless ``assume_unitary`` is set, which is
    meant for callers that validated ``u`` already.
    """
    targets = list(targets)
    axes = _target_axes(s, targets)
    u = np.asarray(u, dtype=complex)
    k = len(targets)
    if u.shape != (2**k, 2**k):
        raise DimensionMismatch(
            f"{u.shape} matrix cannot act on {k} qubit(s)"
        )
    perm = axes + [i for i in range(s.num_qubits) if i not in axes]
    inverse = [0] * len(perm)
    for pos, axis in enumerate(perm):
        inverse[axis] = pos
    front = s.tensor_view().transpose(perm)
    out = (u @ front.reshape(2**k, -1)).reshape(front.shape)
    out = out.transpose(inverse)
    if assume_unitary:
        return PureState._trusted(s.register, out)
    return PureState(s.register, out)


class MeasurementBranch(NamedTuple):
    outcome: int
    probability: float
    post: PureState


def measure_branches(s: PureState, q: str) -> list[MeasurementBranch]:
    """Enumerate computational-basis outcomes of ``q``.

    The measured qubit is removed from each post-measurement state. Outcomes
    with probability below ``TOL_PRUNE`` are dropped; outcome 0 comes first.
    """
    axis = s.index(q)
    psi = s.amplitudes.reshape(2**axis, 2, -1)
    rest = s.register[:axis] + s.register[axis + 1:]
    branches = []
    for bit in (0, 1):
        sub = psi[:, bit, :].reshape(-1)
        p = float(np.vdot(sub, sub).real)
        if p < TOL_PRUNE:
            continue
        branches.append(MeasurementBranch(bit, p, PureState._trusted(rest, sub / np.sqrt(p))))
    return branches


def reorder(s: PureState, register: Sequence[str]) -> PureState:
    register = tuple(register)
    if register == s.register:
        return s
    if sorted(register) != sorted(s.register):
        raise RegisterMismatch(f"cannot reorder {s.register} into {register}")
    perm = [s.register.index(q) for q in register]
    return PureState._trusted(register, np.transpose(s.tensor_view(), perm))


def fidelity_up_to_phase(a: PureState, b: PureState) -> float:
    """``|<a|b>|``, aligning b's register order to a's."""
    b = reorder(b, a.register)
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes))))


def max_deviation(a: PureState, b: PureState, *, up_to_phase: bool = False) -> float:
    """Largest entrywise amplitude difference, optionally after phase alignment."""
    b = reorder(b, a.register)
    bv = b.amplitudes
    if up_to_phase:
        overlap = np.vdot(bv, a.amplitudes)
        if abs(overlap) > TOL_PRUNE:
            bv = bv * overlap / abs(overlap)
    return float(np.max(np.abs(a.amplitudes - bv)))


@dataclass(frozen=True)
class SchmidtForm:
    """``s = sum_k coefficients[k] * basis_a[k] (x) basis_b[k]``."""

    coefficients: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray
    side_a: tuple[str, ...]
    side_b: tuple[str, ...]

    @property
    def rank(self) -> int:
        return int(np.sum(self.coefficients > np.sqrt(TOL_PRUNE)))

    def reconstruct(self) -> PureState:
        amps = sum(
            c * np.kron(a, b)
            for c, a, b in zip(self.coefficients, self.basis_a, self.basis_b)
        )
        return PureState(self.side_a + self.side_b, amps)


def _split(s: PureState, side_a: Sequence[str]) -> tuple[tuple, tuple, np.ndarray]:
    side_a = tuple(side_a)
    if len(set(side_a)) != len(side_a) or not set(side_a) <= set(s.register):
        raise RegisterMismatch(f"bad cut {side_a} for register {s.register}")
    side_b = tuple(q for q in s.register if q not in side_a)
    if not side_a or not side_b:
        raise RegisterMismatch("both sides of a cut must be non-empty")
    matrix = reorder(s, side_a + side_b).amplitudes.reshape(2 ** len(side_a), -1)
    return side_a, side_b, matrix


def schmidt_decompose(s: PureState, cut: str | Sequence[str]) -> SchmidtForm:
    """Schmidt decomposition across ``cut`` (the labels on side A).

    Bases are returned as rows: ``basis_a[k]`` and ``basis_b[k]`` pair with
    ``coefficients[k]``, which are sorted nonincreasing.
    """
    if isinstance(cut, str):
        cut = (cut,)
    side_a, side_b, matrix = _split(s, cut)
    left, sing, right = np.linalg.svd(matrix, full_matrices=False)
    return SchmidtForm(sing, left.T.copy(), right.copy(), side_a, side_b)


def factor_out(s: PureState, labels: Sequence[str]) -> tuple[PureState, PureState]:
    """Split a product state into its ``labels`` factor and the remainder.

    Raises RegisterMismatch if ``s`` is entangled across that cut.
    """
    form = schmidt_decompose(s, labels)
    if form.coefficients.size > 1 and form.coefficients[1] > np.sqrt(TOL_PRUNE):
        raise RegisterMismatch(
            f"state is entangled across {form.side_a} | {form.side_b}"
        )
    return (
        PureState(form.side_a, form.basis_a[0], normalize=True),
        PureState(form.side_b, form.basis_b[0], normalize=True),
    )


def reduced_density(s: PureState, keep: Sequence[str]) -> np.ndarray:
    keep = tuple(keep)
    if set(keep) == set(s.register):
        v = reorder(s, keep).amplitudes
        return np.outer(v, v.conj())
    _, _, matrix = _split(s, keep)
    return matrix @ matrix.conj().T


def format_ket(s: PureState, limit: int | None = None, digits: int = 4) -> str:
    """Human-readable ket expansion, largest amplitudes first."""
    n = s.num_qubits
    order = np.argsort(-np.abs(s.amplitudes), kind="stable")
    terms = []
    for idx in order[:limit]:
        a = s.amplitudes[idx]
        if abs(a) < 10 ** (-digits):
            break
        terms.append(f"({a.real:+.{digits}f}{a.imag:+.{digits}f}j)|{idx:0{n}b}>")
    shown = " ".join(terms) or "0"
    if limit is not None and np.sum(np.abs(s.amplitudes) >= 10 ** (-digits)) > limit:
        shown += " + ..."
    return shown


# --- matrices -------------------------------------------------------------

def is_unitary(u, tol: float = TOL_UNITARY) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def check_unitary(u, dim: int | None = None) -> np.ndarray:
    """Return ``u`` as a complex array, raising NotUnitary/DimensionMismatch."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {u.shape}")
    d = u.shape[0]
    if d & (d - 1) or d == 0:
        raise DimensionMismatch(f"dimension {d} is not a power of two")
    if dim is not None and d != dim:
        raise DimensionMismatch(f"expected a {dim}x{dim} matrix, got {d}x{d}")
    if not np.all(np.isfinite(u)) or not is_unitary(u):
        raise NotUnitary("matrix is not unitary within TOL_UNITARY")
    return u


def check_hermitian(h, dim: int | None = None) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {h.shape}")
    if dim is not None and h.shape[0] != dim:
        raise DimensionMismatch(f"expected a {dim}x{dim} matrix, got {h.shape}")
    if np.max(np.abs(h - h.conj().T)) > TOL_UNITARY:
        raise NotHermitian("matrix is not Hermitian within TOL_UNITARY")
    return h


I2 = np.eye(2, dtype=complex)
NOT = np.array([[0, 1], [1, 0]], dtype=complex)
X = NOT
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]


def control_u(u, controls: int = 1) -> np.ndarray:
    """``1_{2^(c+1)-2} (+) u``: apply ``u`` to the last qubit iff all controls are 1."""
    u = check_unitary(u, dim=2)
    if controls < 0:
        raise ValueError("controls must be nonnegative")
    dim = 2 ** (controls + 1)
    out = np.eye(dim, dtype=complex)
    out[dim - 2:, dim - 2:] = u
    return out


CNOT = control_u(NOT, 1)
TOFFOLI = control_u(NOT, 2)


def standard_gates() -> dict[str, object]:
    return {
        "I": I2,
        "NOT": NOT,
        "H": H,
        "Z": Z,
        "CNOT": CNOT,
        "SWAP": SWAP,
        "Toffoli": TOFFOLI,
        "controlU": control_u,
    }


# --- seeded sampling --------------------------------------------------------

def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_state(register: Sequence[str], rng: np.random.Generator) -> PureState:
    n = len(tuple(register))
    v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return PureState(register, v, normalize=True)
