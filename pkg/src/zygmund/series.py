"""Certified tail sums ``sum_{k>=n} psi(k)**q * k**m``.

The sum is taken directly up to a cutoff ``K`` and completed by the
integral bracket for a decreasing summand::

    int_{K+1}^inf f  <=  sum_{k>K} f(k)  <=  int_K^inf f

The midpoint is returned together with the bracket, so every value carries
a certified error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DivergentTail, SlowConvergence
from .psi import Power, PowerLog, PsiFamily, Tabulated

#: Chunk length for direct summation (bounds memory use).
CHUNK = 1 << 20
#: Largest direct-summation cutoff tried before giving up.
MAX_CUTOFF = 1 << 27


@dataclass(frozen=True)
class TailSum:
    value: float
    lower: float
    upper: float
    cutoff: int

    @property
    def err(self) -> float:
        return 0.5 * (self.upper - self.lower)


def summand_decay(family: PsiFamily, q: float, m: float) -> tuple[float, float]:
    """Exponents ``(a, b)`` with ``psi(t)**q t**m ~ t**-a log(t)**-b``."""
    a, b = family.decay
    return a * q - m, b * q


def converges(family: PsiFamily, q: float = 1.0, m: float = 0.0) -> bool:
    a, b = summand_decay(family, q, m)
    if abs(a - 1.0) < 1e-9:
        return b > 1.0
    return a > 1.0


def summand(family: PsiFamily, k: np.ndarray, q: float, m: float) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    out = np.asarray(family.eval(k), dtype=float) ** q
    return out * k ** m if m else out


def direct_sum(family: PsiFamily, start: int, stop: int, q: float = 1.0, m: float = 0.0) -> float:
    """``sum_{start <= k <= stop}``, summed chunk by chunk in index order."""
    total = 0.0
    for lo in range(start, stop + 1, CHUNK):
        hi = min(lo + CHUNK, stop + 1)
        total += float(np.sum(summand(family, np.arange(lo, hi), q, m)))
    return total


def tail_integral(family: PsiFamily, x: float, q: float = 1.0, m: float = 0.0) -> tuple[float, float]:
    """``int_x^inf psi(t)**q t**m dt`` and an absolute error estimate."""
    a, _ = summand_decay(family, q, m)
    if isinstance(family, Power) or (isinstance(family, Tabulated) and x >= family.n_table):
        if a <= 1:
            raise DivergentTail(f"integral of t**-{a} diverges")
        scale = 1.0
        if isinstance(family, Tabulated):
            scale = family.table[-1] ** q * family.n_table ** (family.tail_exponent * q)
        return scale * x ** (1 - a) / (a - 1), 0.0

    if isinstance(family, Tabulated):
        n = family.n_table
        head, herr = integrate.quad(
            lambda t: float(summand(family, np.array([t]), q, m)[0]),
            x, n, limit=400, epsabs=0, epsrel=1e-12)
        rest, rerr = tail_integral(family, n, q, m)
        return head + rest, herr + rerr
    if isinstance(family, PowerLog):
        return _powerlog_integral(family, x, q, m)
    raise NotImplementedError(f"no tail integral for {type(family).__name__}")


def _powerlog_integral(family: PowerLog, x: float, q: float, m: float):
    # t = exp(u): integrand exp(u (1 - a)) * log(t + K)**-b, evaluated in log space
    a, b = summand_decay(family, q, m)
    if a < 1 - 1e-9:
        raise DivergentTail(f"integral of t**-{a} log(t)**-{b} diverges")

    def g(u):
        log_shift = u + math.log1p(family.K * math.exp(-u))
        return math.exp(u * (1 - a)) * log_shift ** -b if a != 1 else log_shift ** -b

    U = math.log(x)
    if abs(a - 1) < 1e-9:
        # only algebraic decay in u: map [U, inf) onto (0, 1] with u = U / w
        val, err = integrate.quad(lambda w: g(U / w) * U / (w * w), 0.0, 1.0,
                                  limit=400, epsabs=0, epsrel=1e-12)
        return val, err
    return integrate.quad(g, U, np.inf, limit=400, epsabs=0, epsrel=1e-12)


def default_cutoff(n: int) -> int:
    return max(10 ** 6, n * 2 ** 10)


def tail_sum(family: PsiFamily, n: int, q: float = 1.0, m: float = 0.0,
             tol: float = 1e-8, cutoff: int | None = None) -> TailSum:
    """Certified ``sum_{k>=n} psi(k)**q k**m`` to relative bracket half-width ``tol``.

    Raises :class:`DivergentTail` when the series diverges and
    :class:`SlowConvergence` when the cutoff would exceed ``MAX_CUTOFF``.
    """
    if n < 1:
        raise ValueError("tail index must be >= 1")
    if not converges(family, q, m):
        raise DivergentTail(
            f"sum psi(k)^{q} k^{m} diverges for {family.descriptor}")
    K = max(cutoff if cutoff is not None else default_cutoff(n), n)
    if isinstance(family, Tabulated):
        K = max(K, family.n_table)
    head = direct_sum(family, n, K, q, m)
    while True:
        upper, e1 = tail_integral(family, K, q, m)
        lower, e2 = tail_integral(family, K + 1, q, m)
        res = TailSum(head + 0.5 * (lower + upper), head + lower - e2, head + upper + e1, K)
        if res.err <= tol * res.value:
            return res
        if 2 * K > MAX_CUTOFF:
            raise SlowConvergence(
                f"tail sum for {family.descriptor} not within rel-tol {tol} at cutoff {K}")
        head += direct_sum(family, K + 1, 2 * K, q, m)
        K *= 2


__all__ = ["TailSum", "tail_sum", "tail_integral", "converges", "direct_sum",
           "summand_decay", "default_cutoff"]
