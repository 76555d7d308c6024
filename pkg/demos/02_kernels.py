"""Kernel tails and their sup-norm bounds.

The residual kernel sum_{k>=n} psi(k) cos(kt + beta pi/2) may converge only
conditionally.  Values come from an exact head plus a summation-by-parts
remainder with a certified bound, so even psi = k^-1/2 is safe away from t = 0.

Run:  python3 demos/02_kernels.py
"""

import math

import numpy as np

from zygmund import filters
from zygmund.errors import SlowConvergence
from zygmund.kernels import KernelSpec, eval_kernel_with_error, sample_tail, sup_tail_inequalities
from zygmund.psi import Power

# %% classical values
v, err = eval_kernel_with_error(KernelSpec(Power(2.0), 0, 1), 0.0)
print(f"sum k^-2 at t=0: {v:.15f} (pi^2/6 = {math.pi ** 2 / 6:.15f}), bound {err:.1e}")

# %% a divergent-sum kernel, evaluated where it converges
for t in (1.0, 0.1, 0.01):
    v, err = eval_kernel_with_error(KernelSpec(Power(0.5), 0, 1), t, tol=1e-6)
    print(f"sum k^-1/2 cos(kt) at t={t:<5}: {v:+.10f}  (bound {err:.1e})")

# %% near t = 0 a tight tolerance is refused rather than silently missed
try:
    eval_kernel_with_error(KernelSpec(Power(0.5), 0, 1), 0.01, tol=1e-10)
except SlowConvergence as exc:
    print("refused:", exc)

# %% a whole grid at once: FFT for the head, summation by parts for the rest
spec = KernelSpec(Power(1.5), 1, 16)
vals, err = sample_tail(spec, 1024, 4096)
t = filters.grid(1024)
i = int(np.argmax(np.abs(vals)))
print(f"\nsine tail from n=16: grid max |value| {abs(vals[i]):.6f} at t={t[i]:.4f}, "
      f"worst remainder bound {err.max():.1e}")

# %% the two tail inequalities: cosine tail <= sum psi, sine tail <= (pi+2) psi(n) n
for n in (4, 16, 64):
    for c in sup_tail_inequalities(Power(1.5), n):
        print(f"n={n:<3} beta={c.beta:g}: sup {c.sup:.6f} <= bound {c.bound:.6f}  {'ok' if c.passed else 'VIOLATED'}")
