"""Distributed-computer runtime: node-owned qubits, ebits and classical bits.

A :class:`Program` is a recorded list of steps built through its methods.
:func:`run_protocol` interprets it depth-first, forking at every measurement,
and enforces the LOCC rules as it goes:

* multi-qubit operations only touch qubits owned by the acting node,
* a classical bit can only be used (sent or conditioned on) by a node that
  measured it or received it,
* Bell pairs always straddle two distinct nodes and each one costs one ebit.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

from . import qstate
from .errors import (
    DuplicateQubit,
    KnowledgeViolation,
    NonUniformCommunication,
    SameNode,
    UnknownNode,
    UnknownQubit,
    LocalityViolation,
)
from .qstate import PureState

NodeId = str


@dataclass(frozen=True)
class QubitRef:
    owner: NodeId
    label: str

    def __str__(self) -> str:
        return f"{self.label}@{self.owner}"


@dataclass(frozen=True)
class Bit:
    """Handle to a measurement result; its value differs per branch."""

    name: str
    origin: NodeId


@dataclass(frozen=True)
class ClassicalRecord:
    sender: NodeId
    receiver: NodeId
    bit: int
    step: int
    name: str = ""

    def to_dict(self) -> dict:
        return {"from": self.sender, "to": self.receiver, "bit": self.bit, "step": self.step}


# --- program steps -----------------------------------------------------------

@dataclass(frozen=True)
class AllocQubit:
    qubit: QubitRef
    init: PureState

    def describe(self) -> str:
        return f"{self.qubit.owner}: prepare {self.qubit.label}"


@dataclass(frozen=True)
class AllocBellPair:
    first: QubitRef
    second: QubitRef

    def describe(self) -> str:
        return f"share ebit {self.first} ~ {self.second}"


@dataclass(frozen=True, eq=False)
class LocalApply:
    node: NodeId
    matrix: np.ndarray
    qubits: tuple[QubitRef, ...]
    name: str = "U"

    def describe(self) -> str:
        return f"{self.node}: {self.name} on {', '.join(q.label for q in self.qubits)}"


@dataclass(frozen=True)
class Measure:
    node: NodeId
    qubit: QubitRef
    bit: Bit

    def describe(self) -> str:
        return f"{self.node}: measure {self.qubit.label} -> {self.bit.name}"


@dataclass(frozen=True)
class SendBit:
    sender: NodeId
    receiver: NodeId
    bit: Bit
    when: Bit | None = None

    def describe(self) -> str:
        cond = f" if {self.when.name}=1" if self.when else ""
        return f"{self.sender} -> {self.receiver}: {self.bit.name}{cond}"


@dataclass(frozen=True, eq=False)
class ConditionalApply:
    node: NodeId
    bit: Bit
    matrix: np.ndarray
    qubits: tuple[QubitRef, ...]
    name: str = "U"

    def describe(self) -> str:
        targets = ", ".join(q.label for q in self.qubits)
        return f"{self.node}: {self.name} on {targets} if {self.bit.name}=1"


Step = Union[AllocQubit, AllocBellPair, LocalApply, Measure, SendBit, ConditionalApply]


class Program:
    """Builder for an LOCC protocol.

    Inputs are declared with :meth:`input`; their joint initial state is
    supplied at run time. ``outputs`` lists the qubits carrying the gate's
    result (defaults to the inputs; teleportation replaces them).
    """

    def __init__(self, name: str, nodes: Iterable[NodeId] = ()):
        self.name = name
        self.nodes: list[NodeId] = []
        self.inputs: list[QubitRef] = []
        self.outputs: list[QubitRef] | None = None
        self.steps: list[Step] = []
        self._labels: set[str] = set()
        self._bits: set[str] = set()
        for node in nodes:
            self.add_node(node)

    def __repr__(self) -> str:
        return f"Program({self.name!r}, nodes={self.nodes}, steps={len(self.steps)})"

    def add_node(self, node: NodeId) -> NodeId:
        if node in self.nodes:
            raise ValueError(f"node {node!r} declared twice")
        self.nodes.append(node)
        return node

    def fresh_label(self, base: str) -> str:
        label, k = base, 2
        while label in self._labels:
            label = f"{base}#{k}"
            k += 1
        return label

    def _claim(self, label: str) -> str:
        if label in self._labels:
            raise DuplicateQubit(f"qubit label {label!r} already used in {self.name}")
        self._labels.add(label)
        return label

    def _fresh_bit(self, base: str) -> str:
        name, k = base, 2
        while name in self._bits:
            name = f"{base}#{k}"
            k += 1
        self._bits.add(name)
        return name

    def input(self, node: NodeId, label: str) -> QubitRef:
        ref = QubitRef(node, self._claim(label))
        self.inputs.append(ref)
        return ref

    def alloc_qubit(self, node: NodeId, init=(1, 0), label: str | None = None) -> QubitRef:
        label = self._claim(label or self.fresh_label(f"{node}.q"))
        if not isinstance(init, PureState):
            init = qstate.qubit(label, init)
        ref = QubitRef(node, label)
        self.steps.append(AllocQubit(ref, PureState((label,), init.amplitudes)))
        return ref

    def alloc_bell_pair(
        self, a: NodeId, b: NodeId, labels: tuple[str, str] | None = None
    ) -> tuple[QubitRef, QubitRef]:
        if labels is None:
            first = QubitRef(a, self._claim(self.fresh_label(f"{a}.e")))
            second = QubitRef(b, self._claim(self.fresh_label(f"{b}.e")))
        else:
            first, second = QubitRef(a, self._claim(labels[0])), QubitRef(b, self._claim(labels[1]))
        self.steps.append(AllocBellPair(first, second))
        return first, second

    def local_apply(self, node: NodeId, u, qubits: Sequence[QubitRef], name: str = "U") -> None:
        u = qstate.check_unitary(u, dim=2 ** len(qubits))
        self.steps.append(LocalApply(node, u, tuple(qubits), name))

    def measure(self, node: NodeId, q: QubitRef, name: str | None = None) -> Bit:
        bit = Bit(self._fresh_bit(name or f"m[{q.label}]"), node)
        self.steps.append(Measure(node, q, bit))
        return bit

    def send_bit(self, sender: NodeId, receiver: NodeId, bit: Bit, when: Bit | None = None) -> None:
        self.steps.append(SendBit(sender, receiver, bit, when))

    def conditional_apply(
        self, node: NodeId, bit: Bit, u, qubits: Sequence[QubitRef], name: str = "U"
    ) -> None:
        u = qstate.check_unitary(u, dim=2 ** len(qubits))
        self.steps.append(ConditionalApply(node, bit, u, tuple(qubits), name))

    def set_outputs(self, refs: Sequence[QubitRef]) -> None:
        self.outputs = list(refs)

    @property
    def output_refs(self) -> list[QubitRef]:
        return list(self.inputs if self.outputs is None else self.outputs)


# --- execution ----------------------------------------------------------------

@dataclass
class ResourceLedger:
    ebits_consumed: int = 0
    bits_sent: dict[tuple[NodeId, NodeId], int] = field(default_factory=dict)

    @property
    def bits_total(self) -> int:
        return sum(self.bits_sent.values())

    def bits(self, sender: NodeId, receiver: NodeId) -> int:
        return self.bits_sent.get((sender, receiver), 0)

    def to_dict(self) -> dict:
        return {
            "ebits": self.ebits_consumed,
            "bits": [
                {"from": s, "to": r, "count": c}
                for (s, r), c in sorted(self.bits_sent.items())
            ],
        }


@dataclass
class Branch:
    probability: float
    state: PureState
    transcript: tuple[ClassicalRecord, ...]
    outcomes: tuple[tuple[QubitRef, int], ...]
    owners: dict[str, NodeId] = field(repr=False, default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "probability": self.probability,
            "outcomes": [
                {"qubit": q.label, "node": q.owner, "bit": b} for q, b in self.outcomes
            ],
            "transcript": [r.to_dict() for r in self.transcript],
        }


@dataclass
class RunResult:
    protocol: str
    inputs: PureState
    branches: list[Branch]
    ledger: ResourceLedger

    @property
    def total_probability(self) -> float:
        return sum(b.probability for b in self.branches)

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "inputs": {
                "register": list(self.inputs.register),
                "amplitudes": [[a.real, a.imag] for a in self.inputs.amplitudes],
            },
            "branches": [b.to_dict() for b in self.branches],
            "ledger": self.ledger.to_dict(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


@dataclass
class _Context:
    state: PureState
    owners: dict[str, NodeId]
    known: dict[str, frozenset]
    values: dict[str, int]
    probability: float = 1.0
    transcript: list = field(default_factory=list)
    outcomes: list = field(default_factory=list)
    ebits: int = 0
    sent: Counter = field(default_factory=Counter)

    def fork(self) -> _Context:
        return _Context(
            self.state,
            dict(self.owners),
            dict(self.known),
            dict(self.values),
            self.probability,
            list(self.transcript),
            list(self.outcomes),
            self.ebits,
            Counter(self.sent),
        )


StepHook = Callable[[int, Step, "_Context"], None]


def _initial_state(program: Program, inputs) -> PureState:
    labels = [q.label for q in program.inputs]
    if inputs is None:
        inputs = {}
    if isinstance(inputs, PureState):
        return qstate.reorder(inputs, labels)
    missing = set(labels) - set(inputs)
    extra = set(inputs) - set(labels)
    if missing or extra:
        raise UnknownQubit(f"inputs mismatch: missing {sorted(missing)}, unexpected {sorted(extra)}")
    state = PureState((), [1.0])
    for label in labels:
        init = inputs[label]
        amps = init.amplitudes if isinstance(init, PureState) else init
        state = qstate.tensor(state, qstate.qubit(label, amps))
    return state


class _Executor:
    def __init__(self, program: Program, mode: str, rng, on_step: StepHook | None):
        self.program = program
        self.nodes = set(program.nodes)
        self.mode = mode
        self.rng = rng
        self.on_step = on_step
        self.finished: list[_Context] = []

    def _node(self, node: NodeId) -> None:
        if node not in self.nodes:
            raise UnknownNode(f"node {node!r} is not part of {self.program.name}")

    def _owned(self, ctx: _Context, node: NodeId, qubits: Sequence[QubitRef]) -> list[str]:
        labels = []
        for q in qubits:
            owner = ctx.owners.get(q.label)
            if owner is None:
                raise UnknownQubit(f"qubit {q.label!r} is not live")
            if owner != node:
                raise LocalityViolation(
                    f"{node} cannot act on {q.label!r}, which is owned by {owner}"
                )
            labels.append(q.label)
        return labels

    @staticmethod
    def _knows(ctx: _Context, node: NodeId, bit: Bit) -> None:
        if node not in ctx.known.get(bit.name, ()):
            raise KnowledgeViolation(f"{node} does not know bit {bit.name!r}")

    def _new_label(self, ctx: _Context, q: QubitRef) -> None:
        self._node(q.owner)
        if q.label in ctx.owners or q.label in ctx.state.register:
            raise DuplicateQubit(f"qubit {q.label!r} already exists")

    def run(self, ctx: _Context, pc: int = 0) -> None:
        steps = self.program.steps
        while pc < len(steps):
            step = steps[pc]
            if isinstance(step, Measure):
                self._node(step.node)
                (label,) = self._owned(ctx, step.node, [step.qubit])
                if step.bit.name in ctx.values:
                    raise ValueError(f"bit {step.bit.name!r} measured twice")
                branches = qstate.measure_branches(ctx.state, label)
                if self.mode == "sample":
                    probs = np.array([b.probability for b in branches])
                    pick = self.rng.choice(len(branches), p=probs / probs.sum())
                    branches = [branches[pick]]
                forks = [ctx] if len(branches) == 1 else [ctx.fork() for _ in branches]
                for child, (outcome, p, post) in zip(forks, branches):
                    child.state = post
                    del child.owners[label]
                    child.values[step.bit.name] = outcome
                    child.known[step.bit.name] = frozenset({step.node})
                    child.probability *= p
                    child.outcomes.append((step.qubit, outcome))
                    if self.on_step:
                        self.on_step(pc, step, child)
                    self.run(child, pc + 1)
                return
            self._execute(ctx, step)
            if self.on_step:
                self.on_step(pc, step, ctx)
            pc += 1
        self.finished.append(ctx)

    def _execute(self, ctx: _Context, step: Step) -> None:
        if isinstance(step, AllocQubit):
            self._new_label(ctx, step.qubit)
            ctx.state = qstate.tensor(ctx.state, step.init)
            ctx.owners[step.qubit.label] = step.qubit.owner
        elif isinstance(step, AllocBellPair):
            a, b = step.first, step.second
            if a.owner == b.owner:
                raise SameNode(f"Bell pair with both halves at {a.owner} is not an ebit")
            self._new_label(ctx, a)
            self._new_label(ctx, b)
            ctx.state = qstate.tensor(ctx.state, qstate.bell_pair(a.label, b.label))
            ctx.owners[a.label] = a.owner
            ctx.owners[b.label] = b.owner
            ctx.ebits += 1
        elif isinstance(step, LocalApply):
            self._node(step.node)
            labels = self._owned(ctx, step.node, step.qubits)
            ctx.state = qstate.apply_unitary(ctx.state, step.matrix, labels, assume_unitary=True)
        elif isinstance(step, ConditionalApply):
            self._node(step.node)
            self._knows(ctx, step.node, step.bit)
            labels = self._owned(ctx, step.node, step.qubits)
            if ctx.values[step.bit.name]:
                ctx.state = qstate.apply_unitary(ctx.state, step.matrix, labels, assume_unitary=True)
        elif isinstance(step, SendBit):
            self._node(step.sender)
            self._node(step.receiver)
            if step.sender == step.receiver:
                raise ValueError(f"{step.sender} cannot send a bit to itself")
            self._knows(ctx, step.sender, step.bit)
            if step.when is not None:
                self._knows(ctx, step.sender, step.when)
                if not ctx.values[step.when.name]:
                    return
            ctx.known[step.bit.name] = ctx.known[step.bit.name] | {step.receiver}
            ctx.sent[(step.sender, step.receiver)] += 1
            ctx.transcript.append(
                ClassicalRecord(
                    step.sender,
                    step.receiver,
                    ctx.values[step.bit.name],
                    len(ctx.transcript),
                    step.bit.name,
                )
            )
        else:
            raise TypeError(f"unknown program step {step!r}")


def run_protocol(
    program: Program,
    inputs: Mapping[str, object] | PureState | None = None,
    *,
    mode: str = "branch",
    seed: int | np.random.Generator | None = None,
    on_step: StepHook | None = None,
) -> RunResult:
    """Execute ``program`` on ``inputs`` and collect every measurement branch.

    Args:
        program: The protocol to run.
        inputs: Either a mapping from input label to single-qubit amplitudes
            (or single-qubit PureState), or one joint PureState over all input
            labels, which may be entangled.
        mode: ``"branch"`` enumerates all outcomes depth-first, 0 before 1.
            ``"sample"`` follows a single outcome path drawn with ``seed``.
        seed: Seed or generator for ``"sample"`` mode.
        on_step: Optional callback ``(index, step, context)`` invoked after
            every executed step, used for walkthrough printing.

    Raises:
        NonUniformCommunication: branches disagree on resource usage.
    """
    if mode not in ("branch", "sample"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    state = _initial_state(program, inputs)
    for q in program.inputs:
        if q.owner not in program.nodes:
            raise UnknownNode(f"input {q.label!r} owned by undeclared node {q.owner!r}")
    owners = {q.label: q.owner for q in program.inputs}
    executor = _Executor(program, mode, rng, on_step)
    executor.run(_Context(state, owners, {}, {}))

    usage = {(c.ebits, frozenset(c.sent.items())) for c in executor.finished}
    if len(usage) != 1:
        raise NonUniformCommunication(
            f"{program.name}: branches use different resources: {sorted(map(str, usage))}"
        )
    first = executor.finished[0]
    ledger = ResourceLedger(first.ebits, dict(first.sent))
    branches = [
        Branch(c.probability, c.state, tuple(c.transcript), tuple(c.outcomes), c.owners)
        for c in executor.finished
    ]
    return RunResult(program.name, state, branches, ledger)
