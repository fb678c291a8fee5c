"""Toffoli across three nodes and the N-party control-U, against naive costs."""

import numpy as np

from nonlocal_gates import protocols, qstate

rng = np.random.default_rng(5)

toff = protocols.toffoli_protocol()
check = protocols.verify_protocol(
    toff, protocols.basis_inputs(toff) + protocols.random_product_inputs(toff, 20, rng)
)
print(f"Toffoli over Alice, Bob, Clare: {check.inputs_checked} inputs, {check.branches} branches, "
      f"worst fidelity {check.worst_fidelity:.12f}")
for (s, r), c in sorted(check.ledger.bits_sent.items()):
    print(f"  {s} -> {r}: {c} bit")
print(f"  {check.ledger.ebits_consumed} ebits\n")

print(" n | ebits | bits | gate-by-gate ebits | teleport ebits | teleport bits")
for n in range(2, 7):
    proto = protocols.n_party_control_u_protocol(n, qstate.random_unitary(2, rng))
    gates, tele, tele_bits = protocols.baseline_costs(n)
    print(f"{n:2d} | {proto.cost.ebits:5d} | {proto.cost.bits_total:4d} | {gates:18d} | {tele:14d} | {tele_bits:13d}")

proto = protocols.n_party_control_u_protocol(5, qstate.random_unitary(2, rng))
check = protocols.verify_protocol(proto, protocols.basis_inputs(proto))
print(f"\nn=5 on all 32 basis inputs: worst fidelity {check.worst_fidelity:.12f}, ledger ok {check.cost_ok}")
