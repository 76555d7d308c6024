"""Two-sided class error of Zygmund means.

U is the Hoelder value ||Lambda_n||_{p'} / pi of the residual profile; L is the
value reached by a concrete admissible phi (mean zero, ||phi||_p <= 1).  At
p = 2 the two agree.  At p = 1 the class error is half the oscillation of the
profile, so L can sit well below U.

Run:  python3 demos/03_error_bracket.py
"""

import math

from zygmund.class_error import ClassSpec, error_bracket, parseval_upper
from zygmund.psi import Power

# %% p = 2 against the coefficient-only Parseval value
spec = ClassSpec(Power(1.0), beta=0, p=2, s=1)
for n in (2, 4, 8, 16):
    br = error_bracket(spec, n, tol=1e-7)
    print(f"p=2 n={n:<3} U={br.upper:.12f} parseval={parseval_upper(spec, n):.12f} L/U={br.lower / br.upper:.6f}")

# %% p = 1, psi = k^-2, n = 1: profile is pi^2/6 - pi t/2 + t^2/4 on [0, 2 pi]
br = error_bracket(ClassSpec(Power(2.0), 0, 1, 1), 1, tol=1e-6)
print(f"\np=1 n=1: U = {br.upper:.6f} (pi/6 = {math.pi / 6:.6f}), L = {br.lower:.6f} (pi/8 = {math.pi / 8:.6f})")
w = br.witness
print(f"  witness: ||phi||_1 = {w.norm:.12f}, mean = {w.mean:.1e}, nodes near t = "
      f"{w.t[:8].mean():.4f} and {w.t[8:].mean():.4f}")

# %% sine phase: the profile is odd, so the Hoelder value is attained
br = error_bracket(ClassSpec(Power(1.5), 1, 1, 1), 16, tol=1e-6)
print(f"\np=1 beta=1 n=16: U = {br.upper:.8f}, L = {br.lower:.8f}")

# %% a p between 1 and 2
br = error_bracket(ClassSpec(Power(1.2), 0.5, 1.5, 1), 8, tol=1e-5)
print(f"p=1.5 n=8: U = {br.upper:.6f}, L = {br.lower:.6f}, cutoff K = {br.cutoff}")
