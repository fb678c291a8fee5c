"""Command-line front end.

    nonlocal-gates verify cnot --seed 7 --samples 100
    nonlocal-gates verify ncu --n 5 --samples 10
    nonlocal-gates analyze counterexample --l3 1 --l4 2
    nonlocal-gates demo densecoding

Exit codes: 0 verified/passed, 1 verification failure, 2 invalid arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np
import scipy.linalg

from . import analysis, protocols, qstate
from .errors import NonlocalGatesError
from .qstate import TOL_STATE
from .runtime import run_protocol

GATES = ("cnot", "cu", "swap", "toffoli", "tcu", "ncu")
CHECKS = ("condition", "rank1", "bell", "lemma5", "counterexample", "hadamard")
DEMOS = ("densecoding", "swap-entangle", "trace")


class UsageError(Exception):
    pass


def _dump(obj, out: str | None = None) -> None:
    text = json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_protocol(gate: str, n: int | None, rng: np.random.Generator) -> tuple[protocols.Protocol, int | None]:
    """Protocol for a CLI gate name, plus the party count used for baselines."""
    if (gate == "ncu") != (n is not None):
        raise UsageError("--n is required for ncu and only valid for ncu")
    if gate == "cnot":
        return protocols.cnot_protocol(), 2
    if gate == "cu":
        return protocols.control_u_protocol(qstate.random_unitary(2, rng)), 2
    if gate == "swap":
        return protocols.swap_protocol(), None
    if gate == "toffoli":
        return protocols.toffoli_protocol(), 3
    if gate == "tcu":
        return protocols.three_party_control_u_protocol(qstate.random_unitary(2, rng)), 3
    if n < 2:
        raise UsageError("--n must be at least 2")
    return protocols.n_party_control_u_protocol(n, qstate.random_unitary(2, rng)), n


def cmd_verify(args) -> int:
    if args.samples < 0:
        raise UsageError("--samples must be nonnegative")
    rng = np.random.default_rng(args.seed)
    proto, parties = build_protocol(args.gate, args.n, rng)
    inputs = protocols.basis_inputs(proto) + protocols.random_product_inputs(proto, args.samples, rng)
    check = protocols.verify_protocol(proto, inputs, mode=args.mode, seed=rng)
    verified = check.verified(args.tol)
    report = {
        "protocol": proto.name,
        "verified": verified,
        "worst_fidelity": check.worst_fidelity,
        "branches": check.branches,
        "ledger": protocols.CostReport.from_ledger(check.ledger).to_dict(),
        "baselines": list(protocols.baseline_costs(parties)) if parties else None,
        "seed": args.seed,
    }
    _dump(report, args.out)
    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8") as fh:
            json.dump(run_protocol(proto.program, inputs[0]).to_dict(), fh, indent=2)
    return 0 if verified else 1


def _lambdas(args, rng) -> tuple[float, float]:
    l3 = args.l3 if args.l3 is not None else float(rng.uniform(-np.pi, np.pi))
    l4 = args.l4 if args.l4 is not None else float(rng.uniform(-np.pi, np.pi))
    return l3, l4


def cmd_analyze(args) -> int:
    rng = np.random.default_rng(args.seed)
    result: dict = {"check": args.check}
    if args.check == "condition":
        quad = analysis.SymmetrizerQuad(qstate.H, qstate.H, qstate.H, qstate.H)
        passed = analysis.check_condition(qstate.CNOT, quad)
        result["gate"] = "CNOT"
        result["bare_swap_symmetric"] = analysis.check_condition(
            qstate.CNOT, analysis.SymmetrizerQuad.identity()
        )
    elif args.check == "rank1":
        vec = qstate.random_state(("a", "b"), rng).amplitudes
        lam = args.l3 if args.l3 is not None else float(rng.uniform(-np.pi, np.pi))
        h = lam * np.outer(vec, vec.conj())
        quad = analysis.rank1_symmetrizers(h)
        passed = analysis.check_condition(scipy.linalg.expm(1j * h), quad)
        result["eigenvalue"] = lam
    elif args.check == "bell":
        basis = np.column_stack(list(analysis.bell_states().values()))
        evals = rng.uniform(-np.pi, np.pi, 4)
        h = basis @ np.diag(evals) @ basis.conj().T
        quad = analysis.bell_diagonal_symmetrizers(h)
        passed = analysis.check_condition(scipy.linalg.expm(1j * h), quad)
        result["eigenvalues"] = evals.tolist()
    elif args.check == "lemma5":
        l3, l4 = _lambdas(args, rng)
        quad = analysis.controlled_phase_symmetrizers(l3, l4)
        passed = analysis.check_condition(analysis.controlled_phase_gate(l3, l4), quad)
        result.update(l3=l3, l4=l4)
    elif args.check == "counterexample":
        l3, l4 = _lambdas(args, rng)
        witness = analysis.counterexample_witness(l3, l4)
        passed = witness.fires
        result.update(l3=l3, l4=l4, **witness.to_dict())
    else:
        passed = analysis.cnot_hadamard_identity()
    result["pass"] = bool(passed)
    _dump(result)
    return 0 if passed else 1


def _print_ledger(ledger) -> None:
    print(f"ledger: ebits={ledger.ebits_consumed}")
    for (s, r), c in sorted(ledger.bits_sent.items()):
        print(f"  bits {s} -> {r}: {c}")


def cmd_demo(args) -> int:
    if args.demo == "densecoding":
        results = protocols.dense_coding_demo()
        for r in results:
            status = "ok" if r.ok else "FAIL"
            print(
                f"message {r.message[0]}{r.message[1]} encoded with {r.encoding:>2}: "
                f"decoded {sorted(r.decoded)} p={r.worst_success_probability:.12f} [{status}]"
            )
        ok = sum(r.ok for r in results)
        print(f"{ok}/{len(results)} messages decoded")
        _print_ledger(results[0].ledger)
        return 0 if ok == len(results) else 1
    if args.demo == "swap-entangle":
        r = protocols.swap_entangling_demo()
        ok = True
        for pair, coeffs in r.pair_coefficients.items():
            good = np.allclose(coeffs, 1 / np.sqrt(2), atol=TOL_STATE)
            ok &= good
            print(f"pair {pair[0]}|{pair[1]}: schmidt {np.round(coeffs, 12).tolist()} {'ebit' if good else 'NOT maximal'}")
        print(f"Alice|Bob cut schmidt: {np.round(r.cut_coefficients, 12).tolist()}")
        print(f"{2 if ok else 0} ebits established across the cut over {r.branches} branches")
        _print_ledger(r.ledger)
        return 0 if ok else 1

    rng = np.random.default_rng(args.seed)
    proto = protocols.cnot_protocol()
    inputs = protocols.random_product_inputs(proto, 1, rng)[0]
    print(f"protocol {proto.name}, seed {args.seed}")
    print(f"input: {qstate.format_ket(inputs, limit=8)}  register={list(inputs.register)}")

    def show(i, step, ctx):
        print(f"[{i:02d}] {step.describe()}")
        print(f"     state {list(ctx.state.register)}: {qstate.format_ket(ctx.state, limit=8)}")

    run = run_protocol(proto.program, inputs, mode="sample", seed=rng, on_step=show)
    branch = run.branches[0]
    print("outcomes: " + ", ".join(f"{q.label}={b}" for q, b in branch.outcomes))
    for rec in branch.transcript:
        print(f"  sent {rec.sender} -> {rec.receiver}: {rec.bit} (step {rec.step})")
    fid = qstate.fidelity_up_to_phase(protocols.expected_output(proto, inputs), branch.state)
    print(f"fidelity with ideal CNOT: {fid:.12f}")
    _print_ledger(run.ledger)
    return 0 if fid >= 1 - TOL_STATE else 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nonlocal-gates", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify a non-local gate protocol against its oracle")
    v.add_argument("gate", choices=GATES)
    v.add_argument("--n", type=int, default=None, help="party count (ncu only)")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--tol", type=float, default=TOL_STATE)
    v.add_argument("--mode", choices=("branch", "sample"), default="branch")
    v.add_argument("--out", default=None, help="write the report here instead of stdout")
    v.add_argument("--transcript", default=None, help="also write one run's transcript JSON")
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("analyze", help="run a gate-symmetry check")
    a.add_argument("check", choices=CHECKS)
    a.add_argument("--l3", type=float, default=None)
    a.add_argument("--l4", type=float, default=None)
    a.add_argument("--seed", type=int, default=42)
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("demo", help="print a protocol walkthrough")
    d.add_argument("demo", choices=DEMOS)
    d.add_argument("--seed", type=int, default=42)
    d.set_defaults(func=cmd_demo)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonlocalGatesError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
