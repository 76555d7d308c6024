"""Weight families and their classifiers.

Walks through the three questions the order estimates ask of a weight psi:
how fast it decays (the alpha-characteristic of g_delta = psi t^delta), whether
alpha stays bounded or grows, and whether the weighted sequence g_{s+1/p}(k)
is generally monotone (GM+) and almost increasing after an eps-deflation (GA+).

Run:  python3 demos/01_weight_families.py
"""

import numpy as np

from zygmund.psi import (Power, PowerLog, WeightedProduct, alpha_characteristic,
                         classify_membership, gm_plus_constant, gm_plus_constant_bruteforce,
                         sequence_report)

# %% alpha for power weights is constant: 1 / (r - delta)
for r, delta in [(2.0, 0.0), (1.5, 1.0), (0.9, 0.5)]:
    a = alpha_characteristic(WeightedProduct(Power(r), delta), 37.0)
    print(f"power r={r:<4} delta={delta:<4} alpha = {a:.6f}   (1/(r-delta) = {1 / (r - delta):.6f})")

# %% with a logarithmic factor alpha grows like ln t
w = WeightedProduct(PowerLog(2, 1, 3), 0.5)
for t in (10.0, 1e3, 1e6):
    print(f"powerlog p=2 gamma=1 K=3, delta=1/2, t={t:>9g}: alpha = {alpha_characteristic(w, t):8.4f}")
print("trend over [1, 1e6]:", classify_membership(w).alpha_trend)

# %% GM+: increasing sequences have constant exactly 1, decreasing ones blow up
k = np.arange(1, 101, dtype=float)
print("GM+ of sqrt(k):", gm_plus_constant(np.sqrt(k)))
print("GM+ of 1/k (fast, brute force):", gm_plus_constant(1 / k), gm_plus_constant_bruteforce(1 / k))

# %% the full report used by the hypothesis checks
for fam, delta in [(Power(1.5), 2.0), (Power(1.5), 1.25)]:
    rep = sequence_report(WeightedProduct(fam, delta), N=4096)
    print(f"\n{fam.descriptor}, delta={delta}")
    print(f"  alpha in [{rep.alpha_inf:.4g}, {rep.alpha_sup:.4g}], trend {rep.alpha_trend}")
    print(f"  GM+ A = {rep.gm_plus_A:.4g}, stable under doubling: {rep.gm_plus_stable}")
    print(f"  GA+ (eps, K): {[(e, round(K, 3)) for e, K in rep.ga_plus]}")
