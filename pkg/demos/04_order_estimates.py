"""Order expressions, their hypotheses and the parity split at p = 1.

Run:  python3 demos/04_order_estimates.py
"""

from zygmund.bounds import (conditions_report, mc_simplified_bound, ratio_relations, theorem3_bound,
                            theory_bound)
from zygmund.class_error import ClassSpec, upper_bound
from zygmund.psi import Power, PowerLog

# %% hypotheses, with the numbers that decide them
print(conditions_report(ClassSpec(Power(0.9), 0, 2, 1)).text())
print(conditions_report(ClassSpec(Power(1.5), 0, 1, 0.25)).text())

# %% computed error against the general and the simplified order
spec = ClassSpec(Power(0.9), 0, 2, 1)
print("\n   n        U      theory    U/theory   simplified")
for n in (8, 64, 512, 4096):
    U = upper_bound(spec, n, 1e-4)
    B = theory_bound(spec, n).value
    print(f"{n:>5} {U:9.5f} {B:9.5f} {U / B:9.4f} {mc_simplified_bound(spec, n).value:11.5f}")

# %% p = 1: cosine phase uses the full tail sum, sine phase uses psi(n) n
fam = PowerLog(1, 2, 8)
for n in (2 ** 8, 2 ** 12, 2 ** 16):
    c = theory_bound(ClassSpec(fam, 0, 1), n).value
    s = theory_bound(ClassSpec(fam, 1, 1), n).value
    print(f"n=2^{n.bit_length() - 1:<2} cos-phase {c:.5e}  sin-phase {s:.5e}  ratio {c / s:.3f}")

# %% logarithmic weights: the closed form order, and why the simplified one fails
fam = PowerLog(2, 1.2, 4)
print("\ntheorem-3 order at n=100:", round(theorem3_bound(fam, 100).value, 6))
print("simplified order applicable:", mc_simplified_bound(ClassSpec(fam, 0, 2), 100).applicable)
for rs in ratio_relations(ClassSpec(fam, 0, 2), [2 ** j for j in range(4, 15, 2)]):
    print(f"{rs.name}: expected {rs.expected}, ratios {[round(x, 4) for x in rs.ratios]}")
