"""Non-local gate protocols built on the LOCC runtime.

Each ``nonlocal_*`` function appends the steps of one protocol to an existing
:class:`~nonlocal_gates.runtime.Program` and returns the qubits that carry
the result. The ``*_protocol`` factories wrap them into a ready-to-run
:class:`Protocol` bundling the program, the ideal gate it must reproduce and
the exact resource cost it is expected to consume.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import qstate
from .errors import BadArity, NotNonlocal
from .qstate import CNOT, H, NOT, SWAP, TOL_STATE, X, Z, PureState
from .runtime import Program, QubitRef, ResourceLedger, RunResult, run_protocol


@dataclass(frozen=True)
class CostReport:
    ebits: int
    bits_by_direction: dict = field(default_factory=dict)

    @property
    def bits_total(self) -> int:
        return sum(self.bits_by_direction.values())

    @classmethod
    def from_ledger(cls, ledger: ResourceLedger) -> CostReport:
        return cls(ledger.ebits_consumed, dict(ledger.bits_sent))

    def matches(self, ledger: ResourceLedger) -> bool:
        nonzero = {k: v for k, v in ledger.bits_sent.items() if v}
        expected = {k: v for k, v in self.bits_by_direction.items() if v}
        return ledger.ebits_consumed == self.ebits and nonzero == expected

    def to_dict(self) -> dict:
        return {
            "ebits": self.ebits,
            "bits": [
                {"from": s, "to": r, "count": c}
                for (s, r), c in sorted(self.bits_by_direction.items())
            ],
            "bits_total": self.bits_total,
        }


@dataclass(frozen=True, eq=False)
class GateSpec:
    """Ideal gate and where its tensor slots live before and after the run."""

    ideal: np.ndarray
    inputs: tuple[QubitRef, ...]
    outputs: tuple[QubitRef, ...]

    def __post_init__(self):
        if self.ideal.shape != (2 ** len(self.inputs),) * 2:
            raise qstate.DimensionMismatch("ideal gate does not match slot count")


@dataclass(eq=False)
class Protocol:
    name: str
    program: Program
    gate: GateSpec
    cost: CostReport

    def run(self, inputs, **kwargs) -> RunResult:
        return run_protocol(self.program, inputs, **kwargs)


def _distinct(*refs: QubitRef) -> None:
    owners = [r.owner for r in refs]
    if len(set(owners)) != len(owners):
        raise NotNonlocal(f"operands must sit at distinct nodes, got {owners}")


# --- two-party protocols -------------------------------------------------------

def nonlocal_control_u(
    prog: Program,
    control: QubitRef,
    target: QubitRef,
    u,
    name: str = "CU",
    ancilla_labels: tuple[str, str] | None = None,
) -> tuple[QubitRef, QubitRef]:
    """One ebit plus one bit each way: the cat-entangler / disentangler circuit.

    The control's value is copied onto the target side's ebit half, the
    controlled gate is applied there, and the copy is erased by an
    X-basis measurement whose result fixes the control's phase.
    """
    _distinct(control, target)
    labels = None if ancilla_labels is None else [ancilla_labels]
    return nonlocal_multi_control_u(prog, [control], target, u, ancilla_labels=labels, name=name)


def nonlocal_cnot(
    prog: Program, control: QubitRef, target: QubitRef, ancilla_labels: tuple[str, str] | None = None
) -> tuple[QubitRef, QubitRef]:
    return nonlocal_control_u(prog, control, target, NOT, "CNOT", ancilla_labels)


def teleport(prog: Program, q: QubitRef, to: str) -> QubitRef:
    """Teleport ``q`` to node ``to``; returns the new qubit holding its state."""
    src = q.owner
    if src == to:
        raise NotNonlocal(f"cannot teleport {q.label} from {src} to itself")
    near, far = prog.alloc_bell_pair(
        src, to, (prog.fresh_label(f"{q.label}.pair"), prog.fresh_label(f"{q.label}.{to}"))
    )
    prog.local_apply(src, CNOT, [q, near], "CNOT")
    prog.local_apply(src, H, [q], "H")
    m_phase = prog.measure(src, q)
    m_flip = prog.measure(src, near)
    prog.send_bit(src, to, m_phase)
    prog.send_bit(src, to, m_flip)
    prog.conditional_apply(to, m_flip, X, [far], "X")
    prog.conditional_apply(to, m_phase, Z, [far], "Z")
    return far


def nonlocal_generic_two_qubit(
    prog: Program, a: QubitRef, b: QubitRef, u, name: str = "U"
) -> tuple[QubitRef, QubitRef]:
    """Teleport ``a`` to ``b``'s node, apply ``u`` there, teleport it back."""
    _distinct(a, b)
    u = qstate.check_unitary(u, dim=4)
    moved = teleport(prog, a, b.owner)
    prog.local_apply(b.owner, u, [moved, b], name)
    back = teleport(prog, moved, a.owner)
    return back, b


def nonlocal_swap(prog: Program, a: QubitRef, b: QubitRef) -> tuple[QubitRef, QubitRef]:
    """State swapper from two opposite teleportations.

    Returns ``(new_a, new_b)``: ``new_a`` lives at ``a``'s node and holds the
    state ``b`` had, and vice versa.
    """
    _distinct(a, b)
    a_at_b = teleport(prog, a, b.owner)
    b_at_a = teleport(prog, b, a.owner)
    return b_at_a, a_at_b


def nonlocal_swap_three_cnots(prog: Program, a: QubitRef, b: QubitRef) -> tuple[QubitRef, QubitRef]:
    """Swap as three non-local CNOTs (a controls, then b, then a again)."""
    _distinct(a, b)
    nonlocal_cnot(prog, a, b)
    nonlocal_cnot(prog, b, a)
    nonlocal_cnot(prog, a, b)
    return a, b


# --- multi-party protocols ----------------------------------------------------

def nonlocal_multi_control_u(
    prog: Program,
    controls: Sequence[QubitRef],
    target: QubitRef,
    u,
    *,
    measure_order: Sequence[int] | None = None,
    ancilla_labels: Sequence[tuple[str, str]] | None = None,
    name: str = "CU",
) -> tuple[QubitRef, ...]:
    """Control-U with each control at its own node and the target elsewhere.

    Uses one ebit per control and one bit in each direction between every
    control party and the target party. ``measure_order`` picks the order in
    which the target party measures its ancillas (default: control order).
    ``ancilla_labels`` names each ebit as (control-side, target-side).
    """
    controls = list(controls)
    if not controls:
        raise BadArity("at least one control is required")
    _distinct(*controls, target)
    u = qstate.check_unitary(u, dim=2)
    tnode = target.owner
    ancillas = []
    for k, c in enumerate(controls):
        if ancilla_labels is not None:
            labels = tuple(ancilla_labels[k])
        else:
            labels = (prog.fresh_label(f"{c.label}'"), prog.fresh_label(f"{tnode}[{c.label}]"))
        here, there = prog.alloc_bell_pair(c.owner, tnode, labels)
        prog.local_apply(c.owner, CNOT, [c, here], "CNOT")
        m = prog.measure(c.owner, here)
        prog.send_bit(c.owner, tnode, m)
        prog.conditional_apply(tnode, m, NOT, [there], "NOT")
        ancillas.append(there)
    prog.local_apply(tnode, qstate.control_u(u, len(controls)), [*ancillas, target], name)
    for anc in ancillas:
        prog.local_apply(tnode, H, [anc], "H")
    order = range(len(controls)) if measure_order is None else measure_order
    if sorted(order) != list(range(len(controls))):
        raise ValueError(f"measure_order must permute 0..{len(controls) - 1}")
    for k in order:
        m = prog.measure(tnode, ancillas[k])
        prog.send_bit(tnode, controls[k].owner, m)
        prog.conditional_apply(controls[k].owner, m, Z, [controls[k]], "Z")
    return (*controls, target)


def nonlocal_three_party_control_u(
    prog: Program,
    c1: QubitRef,
    c2: QubitRef,
    target: QubitRef,
    u,
    name: str = "CCU",
    ancilla_labels: Sequence[tuple[str, str]] | None = None,
) -> tuple[QubitRef, QubitRef, QubitRef]:
    # the target party measures the second control's ancilla first
    return nonlocal_multi_control_u(
        prog, [c1, c2], target, u, measure_order=[1, 0], ancilla_labels=ancilla_labels, name=name
    )


def nonlocal_toffoli(
    prog: Program,
    c1: QubitRef,
    c2: QubitRef,
    target: QubitRef,
    ancilla_labels: Sequence[tuple[str, str]] | None = None,
) -> tuple[QubitRef, QubitRef, QubitRef]:
    return nonlocal_three_party_control_u(prog, c1, c2, target, NOT, "Toffoli", ancilla_labels)


def nonlocal_n_party_control_u(
    prog: Program,
    controls: Sequence[QubitRef],
    target: QubitRef,
    u,
    name: str = "C^nU",
    ancilla_labels: Sequence[tuple[str, str]] | None = None,
) -> tuple[QubitRef, ...]:
    if len(controls) + 1 < 2:
        raise BadArity("an N-party gate needs N >= 2")
    return nonlocal_multi_control_u(prog, controls, target, u, ancilla_labels=ancilla_labels, name=name)


def baseline_costs(n: int) -> tuple[int, int, int]:
    """Costs of the naive alternatives to the N-party control-U protocol.

    Returns ``(gate_array_ebits, teleport_ebits, teleport_bits)``: ebits when
    every two-party gate of a standard gate-array decomposition is done
    non-locally, and ebits and bits when every control is teleported to the
    target and back.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise BadArity(f"party count must be an integer >= 2, got {n!r}")
    n = int(n)
    return 3 * 2 ** (n - 1) - 4, 2 * (n - 1), 4 * (n - 1)


# --- ready-made protocols ---------------------------------------------------------

def _two_party_cost(ebits: int, ab: int, ba: int, a: str = "Alice", b: str = "Bob") -> CostReport:
    return CostReport(ebits, {(a, b): ab, (b, a): ba})


def control_u_protocol(u, name: str = "nonlocal_control_u") -> Protocol:
    prog = Program(name, ["Alice", "Bob"])
    a, b = prog.input("Alice", "A"), prog.input("Bob", "B")
    nonlocal_control_u(prog, a, b, u, ancilla_labels=("A1", "B1"))
    gate = GateSpec(qstate.control_u(u, 1), (a, b), (a, b))
    return Protocol(name, prog, gate, _two_party_cost(1, 1, 1))


def cnot_protocol() -> Protocol:
    prog = Program("nonlocal_cnot", ["Alice", "Bob"])
    a, b = prog.input("Alice", "A"), prog.input("Bob", "B")
    nonlocal_cnot(prog, a, b, ancilla_labels=("A1", "B1"))
    return Protocol(prog.name, prog, GateSpec(CNOT, (a, b), (a, b)), _two_party_cost(1, 1, 1))


def teleport_protocol() -> Protocol:
    prog = Program("teleport", ["Alice", "Bob"])
    q = prog.input("Alice", "A")
    out = teleport(prog, q, "Bob")
    prog.set_outputs([out])
    return Protocol(prog.name, prog, GateSpec(qstate.I2, (q,), (out,)), _two_party_cost(1, 2, 0))


def generic_two_qubit_protocol(u, name: str = "nonlocal_generic_two_qubit") -> Protocol:
    u = qstate.check_unitary(u, dim=4)
    prog = Program(name, ["Alice", "Bob"])
    a, b = prog.input("Alice", "A"), prog.input("Bob", "B")
    outs = nonlocal_generic_two_qubit(prog, a, b, u)
    prog.set_outputs(outs)
    return Protocol(name, prog, GateSpec(u, (a, b), outs), _two_party_cost(2, 2, 2))


def swap_protocol() -> Protocol:
    prog = Program("nonlocal_swap", ["Alice", "Bob"])
    a, b = prog.input("Alice", "A"), prog.input("Bob", "B")
    outs = nonlocal_swap(prog, a, b)
    prog.set_outputs(outs)
    return Protocol(prog.name, prog, GateSpec(SWAP, (a, b), outs), _two_party_cost(2, 2, 2))


def swap_three_cnots_protocol() -> Protocol:
    prog = Program("nonlocal_swap_three_cnots", ["Alice", "Bob"])
    a, b = prog.input("Alice", "A"), prog.input("Bob", "B")
    nonlocal_swap_three_cnots(prog, a, b)
    return Protocol(prog.name, prog, GateSpec(SWAP, (a, b), (a, b)), _two_party_cost(3, 3, 3))


def three_party_control_u_protocol(u, name: str = "nonlocal_three_party_control_u") -> Protocol:
    prog = Program(name, ["Alice", "Bob", "Clare"])
    a, b, c = prog.input("Alice", "A"), prog.input("Bob", "B"), prog.input("Clare", "C")
    nonlocal_three_party_control_u(prog, a, b, c, u, ancilla_labels=[("A1", "C1"), ("B1", "C2")])
    cost = CostReport(
        2, {("Alice", "Clare"): 1, ("Bob", "Clare"): 1, ("Clare", "Alice"): 1, ("Clare", "Bob"): 1}
    )
    return Protocol(name, prog, GateSpec(qstate.control_u(u, 2), (a, b, c), (a, b, c)), cost)


def toffoli_protocol() -> Protocol:
    return three_party_control_u_protocol(NOT, name="nonlocal_toffoli")


def n_party_nodes(n: int) -> list[str]:
    return [f"P{k}" for k in range(1, n)] + ["T"]


def n_party_control_u_protocol(
    n: int, u, nodes: Sequence[str] | None = None, name: str = "nonlocal_n_party_control_u"
) -> Protocol:
    """N-party control-U with default parties ``P1..P{n-1}`` and target ``T``."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise BadArity(f"party count must be an integer >= 2, got {n!r}")
    nodes = list(nodes) if nodes is not None else n_party_nodes(n)
    if len(nodes) != n:
        raise BadArity(f"{n} parties need {n} node names, got {len(nodes)}")
    prog = Program(name, nodes)
    controls = [prog.input(node, f"{node}.q") for node in nodes[:-1]]
    target = prog.input(nodes[-1], f"{nodes[-1]}.q")
    labels = [(f"P'{k}", f"T{k}") for k in range(1, n)]
    nonlocal_n_party_control_u(prog, controls, target, u, ancilla_labels=labels)
    cost = {}
    for node in nodes[:-1]:
        cost[(node, nodes[-1])] = 1
        cost[(nodes[-1], node)] = 1
    slots = (*controls, target)
    return Protocol(name, prog, GateSpec(qstate.control_u(u, n - 1), slots, slots), CostReport(n - 1, cost))


# --- verification ------------------------------------------------------------------

def expected_output(protocol: Protocol, inputs: PureState) -> PureState:
    """Ideal gate applied to the inputs, relabelled onto the output qubits."""
    gate = protocol.gate
    out = qstate.apply_unitary(inputs, gate.ideal, [q.label for q in gate.inputs])
    return out.relabel({i.label: o.label for i, o in zip(gate.inputs, gate.outputs)})


@dataclass
class Verification:
    protocol: str
    inputs_checked: int
    branches: int
    worst_fidelity: float
    worst_deviation: float
    ledger: ResourceLedger
    cost_ok: bool
    total_probability_error: float

    def verified(self, tol: float = TOL_STATE, exact: bool = False) -> bool:
        ok = self.worst_fidelity >= 1 - tol and self.cost_ok
        ok = ok and self.total_probability_error <= qstate.TOL_NORM
        if exact:
            ok = ok and self.worst_deviation <= tol
        return ok


def basis_inputs(protocol: Protocol) -> list[PureState]:
    labels = [q.label for q in protocol.program.inputs]
    return [
        PureState.basis(labels, bits)
        for bits in itertools.product((0, 1), repeat=len(labels))
    ]


def random_product_inputs(protocol: Protocol, count: int, rng: np.random.Generator) -> list[PureState]:
    labels = [q.label for q in protocol.program.inputs]
    return [
        qstate.product_state(*(qstate.random_state((q,), rng) for q in labels))
        for _ in range(count)
    ]


def verify_protocol(
    protocol: Protocol, inputs: Iterable[PureState], *, mode: str = "branch", seed=None
) -> Verification:
    """Run ``protocol`` on every input and compare each branch with the oracle.

    ``worst_fidelity`` is the minimum phase-insensitive overlap over all
    branches and inputs; ``worst_deviation`` the largest entrywise amplitude
    error with no phase freedom.
    """
    rng = np.random.default_rng(seed)
    worst_f, worst_d, n_inputs, n_branches, prob_err = 1.0, 0.0, 0, 0, 0.0
    cost_ok = True
    ledger = None
    for state in inputs:
        run = run_protocol(protocol.program, state, mode=mode, seed=rng)
        want = expected_output(protocol, state)
        for br in run.branches:
            got = qstate.reorder(br.state, want.register).amplitudes
            worst_f = min(worst_f, abs(np.vdot(want.amplitudes, got)))
            worst_d = max(worst_d, float(np.max(np.abs(want.amplitudes - got))))
        if mode == "branch":
            prob_err = max(prob_err, abs(run.total_probability - 1.0))
        cost_ok = cost_ok and protocol.cost.matches(run.ledger)
        ledger = run.ledger
        n_inputs += 1
        n_branches += len(run.branches)
    return Verification(
        protocol.name, n_inputs, n_branches, float(min(worst_f, 1.0)), worst_d, ledger, cost_ok, prob_err
    )


# --- demonstrations -------------------------------------------------------------------

DENSE_CODING_ENCODINGS = {
    (0, 0): ("I", qstate.I2),
    (0, 1): ("X", X),
    (1, 0): ("Z", Z),
    (1, 1): ("XZ", X @ Z),
}


@dataclass
class DenseCodingResult:
    message: tuple[int, int]
    encoding: str
    decoded: set
    worst_success_probability: float
    ledger: ResourceLedger

    @property
    def ok(self) -> bool:
        return self.decoded == {self.message} and self.worst_success_probability >= 1 - TOL_STATE


def dense_coding_demo() -> list[DenseCodingResult]:
    """Send two classical bits through the non-local swap gate.

    Alice shares ``|phi+>`` with Bob, encodes a 2-bit message on her half,
    and the swap gate moves that half into Bob's lab, where a Bell
    measurement reads the message. For every branch of the swap the decoded
    message must occur with conditional probability 1.
    """
    results = []
    for message, (label, enc) in DENSE_CODING_ENCODINGS.items():
        prog = Program(f"dense_coding_{label}", ["Alice", "Bob"])
        half, kept = prog.alloc_bell_pair("Alice", "Bob", ("A", "B'"))
        prog.local_apply("Alice", enc, [half], label)
        blank = prog.alloc_qubit("Bob", (1, 0), "B")
        _, delivered = nonlocal_swap(prog, half, blank)
        prog.local_apply("Bob", CNOT, [delivered, kept], "CNOT")
        prog.local_apply("Bob", H, [delivered], "H")
        prog.measure("Bob", delivered, "d0")
        prog.measure("Bob", kept, "d1")
        run = run_protocol(prog)

        by_prefix: dict[tuple, dict] = {}
        decoded = set()
        n_swap_outcomes = len(run.branches[0].outcomes) - 2
        for br in run.branches:
            bits = {q.label: b for q, b in br.outcomes}
            msg = (bits[delivered.label], bits[kept.label])
            decoded.add(msg)
            prefix = tuple(b for _, b in br.outcomes[:n_swap_outcomes])
            slot = by_prefix.setdefault(prefix, {"total": 0.0, "hit": 0.0})
            slot["total"] += br.probability
            if msg == message:
                slot["hit"] += br.probability
        worst = min(v["hit"] / v["total"] for v in by_prefix.values())
        results.append(DenseCodingResult(message, label, decoded, worst, run.ledger))
    return results


@dataclass
class SwapEntanglingResult:
    pair_coefficients: dict
    cut_coefficients: np.ndarray
    ledger: ResourceLedger
    branches: int


def swap_entangling_demo() -> SwapEntanglingResult:
    """Two local Bell pairs become two cross-node ebits after one swap.

    Alice holds ``|phi+>`` on (A1, A2) and Bob on (B1, B2); swapping A2 with
    B2 leaves A1 entangled with a qubit at Bob and B1 with one at Alice.
    Coefficients are the worst (largest deviation) over all branches.
    """
    prog = Program("swap_entangling", ["Alice", "Bob"])
    a1, a2 = prog.input("Alice", "A1"), prog.input("Alice", "A2")
    b1, b2 = prog.input("Bob", "B1"), prog.input("Bob", "B2")
    new_a2, new_b2 = nonlocal_swap(prog, a2, b2)
    initial = qstate.tensor(qstate.bell_pair("A1", "A2"), qstate.bell_pair("B1", "B2"))
    run = run_protocol(prog, initial)
    target = np.full(2, 1 / np.sqrt(2))
    pairs = {(a1.label, new_b2.label): None, (b1.label, new_a2.label): None}
    cut = None
    for br in run.branches:
        for pair in pairs:
            factor, _ = qstate.factor_out(br.state, pair)
            coeffs = qstate.schmidt_decompose(factor, pair[0]).coefficients
            prev = pairs[pair]
            if prev is None or np.max(np.abs(coeffs - target)) > np.max(np.abs(prev - target)):
                pairs[pair] = coeffs
        alice_side = [q for q, owner in br.owners.items() if owner == "Alice"]
        c = qstate.schmidt_decompose(br.state, alice_side).coefficients
        if cut is None or np.max(np.abs(c - 0.5)) > np.max(np.abs(cut - 0.5)):
            cut = c
    return SwapEntanglingResult(pairs, cut, run.ledger, len(run.branches))
