"""Walk through the one-ebit non-local CNOT step by step.

Alice holds the control, Bob the target. They share one Bell pair and
exchange one classical bit in each direction.
"""

import numpy as np

from nonlocal_gates import protocols, qstate
from nonlocal_gates.runtime import run_protocol

proto = protocols.cnot_protocol()
print(f"Protocol {proto.name!r} on nodes {proto.program.nodes}")
for i, step in enumerate(proto.program.steps):
    print(f"  {i:2d}. {step.describe()}")

alpha, beta = 0.6, 0.8
gamma, delta = 1 / np.sqrt(2), 1j / np.sqrt(2)
inputs = {"A": (alpha, beta), "B": (gamma, delta)}
print(f"\nInputs: A = {alpha}|0> + {beta}|1>,  B = (|0> + i|1>)/sqrt(2)")


def show(i, step, ctx):
    if i == 1:
        print("\nAfter Alice's local CNOT onto her half of the pair:")
        print("  ", qstate.format_ket(qstate.reorder(ctx.state, ("A", "A1", "B1", "B"))))


run = run_protocol(proto.program, inputs, on_step=show)
want = protocols.expected_output(proto, qstate.product_state(qstate.qubit("A", (alpha, beta)), qstate.qubit("B", (gamma, delta))))

print(f"\n{len(run.branches)} measurement branches:")
for br in run.branches:
    outcomes = ", ".join(f"{q.label}={b}" for q, b in br.outcomes)
    fid = qstate.fidelity_up_to_phase(want, br.state)
    print(f"  p={br.probability:.3f}  [{outcomes}]  fidelity with CNOT|A,B> = {fid:.12f}")

ledger = run.ledger
print(f"\nResources: {ledger.ebits_consumed} ebit, bits Alice->Bob {ledger.bits('Alice', 'Bob')}, "
      f"Bob->Alice {ledger.bits('Bob', 'Alice')}")

# Any single-qubit U works the same way.
u = qstate.random_unitary(2, np.random.default_rng(3))
check = protocols.verify_protocol(protocols.control_u_protocol(u), protocols.basis_inputs(proto))
print(f"Control-U with a random U: worst fidelity {check.worst_fidelity:.12f}, same ledger: {check.cost_ok}")
