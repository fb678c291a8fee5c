import json

import numpy as np
import pytest

from nonlocal_gates import qstate
from nonlocal_gates.errors import (
    DuplicateQubit,
    KnowledgeViolation,
    LocalityViolation,
    NonUniformCommunication,
    SameNode,
    UnknownNode,
    UnknownQubit,
)
from nonlocal_gates.qstate import CNOT, NOT, TOL_NORM, TOL_STATE, PureState
from nonlocal_gates.runtime import Program, QubitRef, run_protocol


def fig1_program():
    prog = Program("fig1", ["Alice", "Bob"])
    a, b = prog.input("Alice", "A"), prog.input("Bob", "B")
    a1, b1 = prog.alloc_bell_pair("Alice", "Bob", ("A1", "B1"))
    prog.local_apply("Alice", CNOT, [a, a1])
    m1 = prog.measure("Alice", a1)
    prog.send_bit("Alice", "Bob", m1)
    prog.conditional_apply("Bob", m1, NOT, [b1])
    return prog, (a, b, a1, b1, m1)


def test_alloc_qubit_extends_register():
    prog = Program("p", ["Alice"])
    prog.alloc_qubit("Alice", (0.6, 0.8), "q")
    run = run_protocol(prog)
    (br,) = run.branches
    assert br.state.register == ("q",)
    assert np.allclose(br.state.amplitudes, [0.6, 0.8])


def test_alloc_zero_then_measure_is_deterministic():
    prog = Program("p", ["Alice"])
    q = prog.alloc_qubit("Alice", (1, 0), "q")
    prog.measure("Alice", q)
    run = run_protocol(prog)
    assert len(run.branches) == 1
    assert run.branches[0].outcomes[0][1] == 0
    assert run.branches[0].probability == pytest.approx(1)


def test_allocs_at_different_nodes_commute(rng):
    u, v = qstate.random_state(("x",), rng), qstate.random_state(("y",), rng)
    states = []
    for order in (("x", "y"), ("y", "x")):
        prog = Program("p", ["Alice", "Bob"])
        for label in order:
            node = "Alice" if label == "x" else "Bob"
            init = u if label == "x" else v
            prog.alloc_qubit(node, init.amplitudes, label)
        states.append(run_protocol(prog).branches[0].state)
    assert states[0].register != states[1].register
    assert qstate.max_deviation(states[0], states[1]) < TOL_STATE


def test_bell_pair_allocation():
    prog = Program("p", ["Alice", "Bob"])
    a, b = prog.alloc_bell_pair("Alice", "Bob", ("a", "b"))
    run = run_protocol(prog)
    assert run.ledger.ebits_consumed == 1
    coeffs = qstate.schmidt_decompose(run.branches[0].state, "a").coefficients
    assert np.allclose(coeffs, [2**-0.5] * 2, atol=TOL_STATE)
    prog.measure("Alice", a)
    run = run_protocol(prog)
    assert [br.probability for br in run.branches] == pytest.approx([0.5, 0.5])


def test_same_node_bell_pair_rejected():
    prog = Program("p", ["Alice"])
    prog.alloc_bell_pair("Alice", "Alice")
    with pytest.raises(SameNode):
        run_protocol(prog)


def test_local_apply_fig1_first_step():
    prog = Program("p", ["Alice", "Bob"])
    a = prog.input("Alice", "A")
    a1, b1 = prog.alloc_bell_pair("Alice", "Bob", ("A1", "B1"))
    prog.local_apply("Alice", CNOT, [a, a1])
    state = run_protocol(prog, {"A": (0.6, 0.8)}).branches[0].state
    r = 0.6 / np.sqrt(2), 0.8 / np.sqrt(2)
    want = np.zeros(8)
    want[0b000] = want[0b011] = r[0]
    want[0b110] = want[0b101] = r[1]
    assert np.max(np.abs(state.amplitudes - want)) < 1e-10


def test_cross_node_gate_raises():
    prog = Program("p", ["Alice", "Bob"])
    a = prog.input("Alice", "A")
    _, b1 = prog.alloc_bell_pair("Alice", "Bob", ("A1", "B1"))
    prog.local_apply("Alice", CNOT, [a, b1])
    with pytest.raises(LocalityViolation):
        run_protocol(prog, {"A": (1, 0)})


def test_identity_leaves_state_unchanged(rng):
    prog = Program("p", ["Alice"])
    a, b = prog.input("Alice", "a"), prog.input("Alice", "b")
    prog.local_apply("Alice", np.eye(4), [a, b], "I")
    s = qstate.random_state(("a", "b"), rng)
    out = run_protocol(prog, s).branches[0].state
    assert np.array_equal(out.amplitudes, s.amplitudes)


def test_measure_forks_fig1():
    prog, _ = fig1_program()
    run = run_protocol(prog, {"A": (0.6, 0.8), "B": (1, 0)})
    assert len(run.branches) == 2
    assert [b.probability for b in run.branches] == pytest.approx([0.5, 0.5])


def test_measure_foreign_qubit():
    prog = Program("p", ["Alice", "Bob"])
    b = prog.input("Bob", "B")
    prog.measure("Alice", b)
    with pytest.raises(LocalityViolation):
        run_protocol(prog, {"B": (1, 0)})


def test_two_sequential_measurements_total_probability(rng):
    prog = Program("p", ["Alice"])
    a, b = prog.input("Alice", "a"), prog.input("Alice", "b")
    prog.measure("Alice", a)
    prog.measure("Alice", b)
    run = run_protocol(prog, qstate.random_state(("a", "b"), rng))
    assert len(run.branches) == 4
    assert abs(run.total_probability - 1) < TOL_NORM


def test_send_and_conditional_fig1_state_in_both_branches():
    prog, (a, b, a1, b1, m1) = fig1_program()
    run = run_protocol(prog, {"A": (0.6, 0.8), "B": (1, 0)})
    assert run.ledger.bits("Alice", "Bob") == 1
    for br in run.branches:
        part, _ = qstate.factor_out(br.state, ("A", "B1"))
        got = qstate.reorder(br.state, ("A", "B1", "B")).amplitudes.reshape(4, 2)[:, 0]
        assert np.max(np.abs(got - [0.6, 0, 0, 0.8])) < 1e-12
        assert br.transcript[0].sender == "Alice" and br.transcript[0].receiver == "Bob"
        assert br.transcript[0].bit == br.outcomes[0][1]


def test_forwarding_counts_again():
    prog = Program("p", ["Alice", "Bob", "Clare"])
    q = prog.alloc_qubit("Alice", (1, 1), "q")
    m = prog.measure("Alice", q)
    prog.send_bit("Alice", "Bob", m)
    prog.send_bit("Bob", "Clare", m)
    run = run_protocol(prog)
    assert run.ledger.bits("Alice", "Bob") == 1
    assert run.ledger.bits("Bob", "Clare") == 1
    assert run.ledger.bits_total == 2
    for br in run.branches:
        assert [r.step for r in br.transcript] == [0, 1]


def test_send_unknown_bit():
    prog = Program("p", ["Alice", "Bob", "Clare"])
    q = prog.alloc_qubit("Alice", (1, 1), "q")
    m = prog.measure("Alice", q)
    prog.send_bit("Bob", "Clare", m)
    with pytest.raises(KnowledgeViolation):
        run_protocol(prog)


def test_conditional_on_zero_bit_is_identity(rng):
    prog = Program("p", ["Alice"])
    a = prog.input("Alice", "a")
    z = prog.alloc_qubit("Alice", (1, 0), "z")
    m = prog.measure("Alice", z)
    prog.conditional_apply("Alice", m, qstate.random_unitary(2, rng), [a])
    s = qstate.random_state(("a",), rng)
    (br,) = run_protocol(prog, s).branches
    assert np.array_equal(br.state.amplitudes, s.amplitudes)


def test_conditional_on_unsent_foreign_bit():
    prog = Program("p", ["Alice", "Bob"])
    q = prog.alloc_qubit("Alice", (1, 1), "q")
    t = prog.alloc_qubit("Bob", (1, 0), "t")
    m = prog.measure("Alice", q)
    prog.conditional_apply("Bob", m, NOT, [t])
    with pytest.raises(KnowledgeViolation):
        run_protocol(prog)


def test_no_measurement_single_branch(rng):
    prog = Program("p", ["Alice"])
    a = prog.input("Alice", "a")
    prog.local_apply("Alice", qstate.H, [a])
    run = run_protocol(prog, {"a": (1, 0)})
    assert len(run.branches) == 1 and run.branches[0].probability == 1


def test_nonuniform_communication_rejected():
    prog = Program("p", ["Alice", "Bob"])
    q = prog.alloc_qubit("Alice", (1, 1), "q")
    m = prog.measure("Alice", q)
    prog.send_bit("Alice", "Bob", m, when=m)
    with pytest.raises(NonUniformCommunication):
        run_protocol(prog)


def test_conditional_send_uniform_when_deterministic():
    prog = Program("p", ["Alice", "Bob"])
    q = prog.alloc_qubit("Alice", (0, 1), "q")
    m = prog.measure("Alice", q)
    prog.send_bit("Alice", "Bob", m, when=m)
    assert run_protocol(prog).ledger.bits("Alice", "Bob") == 1


def test_unknown_node_and_qubit():
    prog = Program("p", ["Alice"])
    prog.alloc_qubit("Mallory", (1, 0))
    with pytest.raises(UnknownNode):
        run_protocol(prog)
    prog = Program("p", ["Alice"])
    prog.local_apply("Alice", qstate.H, [QubitRef("Alice", "ghost")])
    with pytest.raises(UnknownQubit):
        run_protocol(prog)


def test_duplicate_labels():
    prog = Program("p", ["Alice"])
    prog.input("Alice", "a")
    with pytest.raises(DuplicateQubit):
        prog.alloc_qubit("Alice", (1, 0), "a")


def test_forged_ref_cannot_change_ownership():
    prog = Program("p", ["Alice", "Bob"])
    prog.input("Bob", "B")
    prog.local_apply("Alice", NOT, [QubitRef("Alice", "B")])
    with pytest.raises(LocalityViolation):
        run_protocol(prog, {"B": (1, 0)})


def test_measured_qubit_is_gone():
    prog = Program("p", ["Alice"])
    a = prog.input("Alice", "a")
    prog.measure("Alice", a)
    prog.local_apply("Alice", NOT, [a])
    with pytest.raises(UnknownQubit):
        run_protocol(prog, {"a": (1, 0)})


def test_locality_fuzz(rng):
    """Random programs with one foreign operand always raise LocalityViolation."""
    nodes = ["Alice", "Bob", "Clare"]
    for trial in range(200):
        prog = Program(f"fuzz{trial}", nodes)
        refs = [prog.input(nodes[k % 3], f"q{k}") for k in range(5)]
        for _ in range(rng.integers(0, 4)):
            node = nodes[rng.integers(3)]
            mine = [r for r in refs if r.owner == node]
            prog.local_apply(node, qstate.random_unitary(2, rng), [mine[rng.integers(len(mine))]])
        node = nodes[rng.integers(3)]
        mine = [r for r in refs if r.owner == node]
        foreign = [r for r in refs if r.owner != node]
        k = rng.integers(len(foreign))
        if rng.integers(2):
            prog.local_apply(node, CNOT, [mine[0], foreign[k]])
        else:
            prog.local_apply(node, CNOT, [foreign[k], mine[-1]])
        with pytest.raises(LocalityViolation):
            run_protocol(prog, {r.label: (1, 1) for r in refs})


def test_ownership_permanence():
    prog, (a, b, a1, b1, m1) = fig1_program()
    run = run_protocol(prog, {"A": (1, 1), "B": (1, 0)})
    for br in run.branches:
        assert br.owners == {"A": "Alice", "B": "Bob", "B1": "Bob"}


def test_sample_mode_is_seeded():
    prog, _ = fig1_program()
    one = run_protocol(prog, {"A": (1, 1), "B": (1, 0)}, mode="sample", seed=5)
    two = run_protocol(prog, {"A": (1, 1), "B": (1, 0)}, mode="sample", seed=5)
    assert len(one.branches) == 1
    assert one.to_json() == two.to_json()
    with pytest.raises(ValueError):
        run_protocol(prog, {"A": (1, 1), "B": (1, 0)}, mode="bogus")


def test_branch_order_zero_first():
    prog, _ = fig1_program()
    run = run_protocol(prog, {"A": (1, 1), "B": (1, 0)})
    assert [br.outcomes[0][1] for br in run.branches] == [0, 1]


def test_json_schema():
    prog, _ = fig1_program()
    doc = json.loads(run_protocol(prog, {"A": (0.6, 0.8), "B": (1, 0)}).to_json())
    assert list(doc) == ["protocol", "inputs", "branches", "ledger"]
    assert list(doc["ledger"]) == ["ebits", "bits"]
    assert doc["ledger"]["bits"] == [{"from": "Alice", "to": "Bob", "count": 1}]
    br = doc["branches"][0]
    assert set(br) == {"probability", "outcomes", "transcript"}
    assert br["transcript"][0] == {"from": "Alice", "to": "Bob", "bit": 0, "step": 0}
    assert doc["inputs"]["register"] == ["A", "B"]


def test_entangled_input_accepted(rng):
    prog = Program("p", ["Alice", "Bob"])
    prog.input("Alice", "a")
    prog.input("Bob", "b")
    s = qstate.random_state(("b", "a"), rng)
    out = run_protocol(prog, s).branches[0].state
    assert out.register == ("a", "b")
    assert qstate.fidelity_up_to_phase(s, out) == pytest.approx(1)
    with pytest.raises(UnknownQubit):
        run_protocol(prog, {"a": (1, 0)})
