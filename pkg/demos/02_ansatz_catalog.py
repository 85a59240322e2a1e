#!/usr/bin/env python3
"""Generator and parameter counts of the coupled-cluster circuit families.

The k-layer pair ansatz holds 3 M (M-1) generators per layer: spin-resolved
generalized singles over every ordered orbital pair in both spin channels
plus a pair double per ordered pair.  The 'paper-count' tying scheme shares
the first layer's singles across spin channels, trimming M (M-1) parameters.
"""

from spinvqe import AnsatzSpec, build_reference_T0, compile_ansatz

print("k-UpCCGSD scaling with active-space size (k = 4):")
print(f"  {'M':>3} {'generators':>11} {'independent':>12} {'paper-count':>12}")
for m in range(5, 11):
    free = compile_ansatz(AnsatzSpec(flavor="kupccgsd", k=4), m, 1, 1)
    tied = compile_ansatz(
        AnsatzSpec(flavor="kupccgsd", k=4, tying="paper-count"), m, 1, 1
    )
    print(f"  {m:>3} {len(free):>11} {free.n_parameters:>12} {tied.n_parameters:>12}")

print("\nsame ansatz at k = 3, M = 10:")
program = compile_ansatz(
    AnsatzSpec(flavor="kupccgsd", k=3, tying="paper-count"), 10, 4, 4
)
print(f"  {len(program)} generators, {program.n_parameters} parameters")

print("\nfixed-reference families on (4e, 4o):")
for flavor in ("uccsd", "uccgsd"):
    program = compile_ansatz(AnsatzSpec(flavor=flavor), 4, 2, 2)
    kinds = [g.kind for g in program.generators]
    print(
        f"  {flavor:8s}: {kinds.count('single'):>3} singles, "
        f"{kinds.count('double'):>3} doubles, {program.n_parameters:>4} parameters"
    )

print("\nreference determinants for (6e, 5o), qubit 0 leftmost:")
for spin in (0, 1, 2):
    ref = build_reference_T0(5, 6, spin)
    print(f"  S={spin}: |{ref.kets[0][0]}>")
