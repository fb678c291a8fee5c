"""Teleportation, the two-ebit swap, and a generic two-qubit gate."""

import numpy as np

from nonlocal_gates import protocols, qstate

rng = np.random.default_rng(11)

tele = protocols.teleport_protocol()
psi = qstate.random_state(("A",), rng)
run = tele.run(psi)
print("Teleporting", qstate.format_ket(psi))
for br in run.branches:
    outcomes = "".join(str(b) for _, b in br.outcomes)
    print(f"  outcomes {outcomes}: Bob holds {qstate.format_ket(br.state)}")
print(f"  cost: {run.ledger.ebits_consumed} ebit, {run.ledger.bits_total} bits\n")

swap = protocols.swap_protocol()
check = protocols.verify_protocol(swap, protocols.random_product_inputs(swap, 50, rng))
print(f"Swap by two teleports: worst fidelity {check.worst_fidelity:.12f}")
print(f"  ledger {protocols.CostReport.from_ledger(check.ledger).to_dict()}")

three = protocols.swap_three_cnots_protocol()
check3 = protocols.verify_protocol(three, protocols.random_product_inputs(three, 10, rng))
print(f"Swap as three non-local CNOTs also works ({check3.worst_fidelity:.12f}) "
      f"but costs {check3.ledger.ebits_consumed} ebits and {check3.ledger.bits_total} bits\n")

demo = protocols.swap_entangling_demo()
print("Swapping one half of each of two local Bell pairs:")
for pair, coeffs in demo.pair_coefficients.items():
    print(f"  {pair[0]} | {pair[1]}: Schmidt coefficients {np.round(coeffs, 6)}")
print(f"  Alice|Bob cut: {np.round(demo.cut_coefficients, 6)} -> two ebits from two consumed\n")

u = qstate.random_unitary(4, rng)
gen = protocols.generic_two_qubit_protocol(u)
check = protocols.verify_protocol(gen, protocols.random_product_inputs(gen, 20, rng))
print(f"Arbitrary two-qubit U via teleport-there-and-back: worst fidelity {check.worst_fidelity:.12f}, "
      f"{check.ledger.ebits_consumed} ebits")
