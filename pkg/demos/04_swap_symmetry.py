"""When does exchanging the qubits of a gate amount to local unitaries?

For the gate families below the local unitaries are built explicitly and
checked; for the counterexample a spectral argument shows none exist.
"""

import numpy as np
import scipy.linalg

from nonlocal_gates import analysis, qstate

rng = np.random.default_rng(8)

print("CNOT with Hadamards on both sides is the reversed CNOT:", analysis.cnot_hadamard_identity())
quad = analysis.SymmetrizerQuad(qstate.H, qstate.H, qstate.H, qstate.H)
print("  so the symmetry condition holds with four Hadamards:", analysis.check_condition(qstate.CNOT, quad))

vec = qstate.random_state(("a", "b"), rng).amplitudes
h = 1.2 * np.outer(vec, vec.conj())
quad = analysis.rank1_symmetrizers(h)
print("\nRank-one generator with a random eigenvector:")
print("  condition holds:", analysis.check_condition(scipy.linalg.expm(1j * h), quad))

bell = np.column_stack(list(analysis.bell_states().values()))
h = bell @ np.diag(rng.uniform(-np.pi, np.pi, 4)) @ bell.conj().T
print("Bell-diagonal generator, identity quad:",
      analysis.check_condition(scipy.linalg.expm(1j * h), analysis.bell_diagonal_symmetrizers(h)))

l3, l4 = 0.7, 2.1
print(f"Controlled phase diag(1, 1, e^i{l3}, e^i{l4}) with its closed-form quad:",
      analysis.check_condition(analysis.controlled_phase_gate(l3, l4), analysis.controlled_phase_symmetrizers(l3, l4)))

w = analysis.counterexample_witness(1.0, 2.0)
print("\nGenerator diag(0, 0, 1, 2):")
print(f"  qubit-A reduced spectrum before swap {np.round(w.spectrum_a_before, 9)}, after {np.round(w.spectrum_a_after, 9)}")
print("  local conjugation preserves that spectrum, so no conjugating U1 (x) U2 exists:", w.fires)
h1 = analysis.counterexample_generator(1.0, 2.0)
local = np.kron(qstate.random_unitary(2, rng), qstate.random_unitary(2, rng))
print("  sanity check, a genuine local conjugation leaves it unchanged:",
      not analysis.spectrum_witness(h1, local @ h1 @ local.conj().T).fires)
