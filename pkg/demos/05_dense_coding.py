"""Two classical bits per qubit, using the non-local swap as the channel.

Alice encodes a message on her half of a Bell pair; the swap moves that
qubit to Bob, who decodes with a CNOT and a Hadamard. Since the swap can
carry two bits each way, it cannot be done with fewer than two ebits.
"""

from nonlocal_gates import protocols

results = protocols.dense_coding_demo()
for r in results:
    print(f"message {r.message}: Alice applies {r.encoding:>2}, Bob decodes {sorted(r.decoded)} "
          f"with probability {r.worst_success_probability:.12f}")
print(f"{sum(r.ok for r in results)}/4 messages decoded")
print(f"ledger: {results[0].ledger.to_dict()}")
