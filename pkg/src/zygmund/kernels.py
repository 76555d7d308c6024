"""Generating kernels ``sum_{k>=n} psi(k) cos(kt + beta pi/2)`` and Dirichlet-type sums.

The kernel series is only conditionally convergent when ``sum psi(k)``
diverges, so values are never formed from naive partial sums.  Instead the
terms up to a cutoff ``K`` are summed exactly and the remainder is expanded
by repeated summation by parts::

    sum_{k>=N} a_k z^k = sum_{j<m} (nabla^j a)_{N+j} z^{N+j} / (1-z)^{j+1} + R_m

with ``|R_m| <= |(nabla^{m-1} a)_{N+m-1}| / |1-z|^m`` whenever the
``m``-th backward differences keep one sign, which holds for the
completely monotone families provided here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import filters
from .errors import DivergentTail, SlowConvergence
from .psi import PsiFamily, Tabulated
from .series import converges, tail_sum

#: Default hard cap on the number of directly summed terms.
TERM_CAP = 10 ** 7
#: Highest order of summation by parts used for remainders.
MAX_ABEL_ORDER = 8
#: Closed forms of Dirichlet sums are used when ``|sin(t/2)|`` exceeds this.
SIN_FLOOR = 1e-8

_EPS = np.finfo(float).eps


def phase(beta: float) -> tuple[float, float]:
    """``(cos, sin)`` of ``beta pi/2``, exact for integer ``beta``."""
    if float(beta).is_integer():
        return ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))[int(beta) % 4]
    theta = 0.5 * math.pi * beta
    return math.cos(theta), math.sin(theta)


@dataclass(frozen=True)
class KernelSpec:
    """``sum_{k >= start} psi(k) cos(kt + beta pi/2)``; ``start = 1`` is the full kernel."""

    family: PsiFamily
    beta: float
    start: int = 1

    def __post_init__(self):
        if self.start < 1:
            raise ValueError("start index must be >= 1")

    @property
    def phase(self) -> tuple[float, float]:
        return phase(self.beta)

    def polynomial(self, K: int) -> filters.TrigPolynomial:
        """The kernel truncated after harmonic ``K``."""
        amp = self.family.values(self.start, K + 1)
        return filters.TrigPolynomial.from_phase(amp, self.phase, start=self.start)


@dataclass(frozen=True)
class TruncationPlan:
    cutoff: int
    tail_control: float
    norm: float
    norm_doubled: float


# -- Dirichlet-type sums ----------------------------------------------------


def dirichlet_like(k: int, beta: float, t: float) -> float:
    """``cos(beta pi/2)/2 + sum_{v=1}^{k} cos(v t - beta pi/2)``."""
    c, s = phase(beta)
    half = 0.5 * t
    sh = math.sin(half)
    if abs(sh) > SIN_FLOOR:
        # sum cos(v t + th), v=1..k  =  [sin((k+1/2)t + th) - sin(t/2 + th)] / (2 sin(t/2))
        th = -0.5 * math.pi * beta
        body = (math.sin((k + 0.5) * t + th) - math.sin(half + th)) / (2.0 * sh)
    else:
        v = np.arange(1, k + 1, dtype=float)
        body = float(np.sum(np.cos(v * t) * c + np.sin(v * t) * s))
    return 0.5 * c + body


def dirichlet_poly(k: int, beta: float) -> filters.TrigPolynomial:
    c, s = phase(beta)
    return filters.TrigPolynomial(c, np.full(k, c), np.full(k, s))


# -- remainders -------------------------------------------------------------


def abel_remainder(family: PsiFamily, N: int, t, ph: tuple[float, float]):
    """``sum_{k>=N} psi(k) cos(kt + theta)`` by summation by parts.

    Returns ``(values, bounds)``; the bound is infinite where ``t = 0 mod 2pi``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    a = np.asarray(family.eval(np.arange(N, N + MAX_ABEL_ORDER + 1, dtype=float)), dtype=float)
    diffs = [a[0]]
    for j in range(1, MAX_ABEL_ORDER):
        d = float(np.diff(a, j)[0])
        # stop once the difference is swamped by cancellation error
        if abs(d) <= 1e3 * (2 ** j) * _EPS * a[0]:
            break
        diffs.append(d)
    w = 1.0 - np.exp(1j * t)
    aw = np.abs(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        mags = np.array([abs(d) / aw ** (j + 1) for j, d in enumerate(diffs)])
        best = np.argmin(mags, axis=0)
        total = np.zeros(t.shape, dtype=complex)
        for j, d in enumerate(diffs):
            term = d * np.exp(1j * (N + j) * t) / w ** (j + 1)
            total += np.where(j <= best, term, 0.0)
        err = mags[best, np.arange(t.size)]
        c, s = ph
        vals = c * total.real - s * total.imag
    zero = aw == 0
    vals[zero] = 0.0
    err[zero] = np.inf
    return vals, err


def _direct(family: PsiFamily, start: int, stop: int, t: float, ph) -> float:
    c, s = ph
    total = 0.0
    for lo in range(start, stop + 1, 1 << 20):
        k = np.arange(lo, min(lo + (1 << 20), stop + 1), dtype=float)
        kt = k * t
        total += float(np.dot(family.eval(k), c * np.cos(kt) - s * np.sin(kt)))
    return total


#: Relative accuracy floor for tail sums at ``t = 0`` (tighter brackets need 10^8+ terms).
ZERO_REL_FLOOR = 1e-10


@lru_cache(maxsize=256)
def _at_zero(spec: KernelSpec, tol: float) -> tuple[float, float]:
    c, _ = spec.phase
    if c == 0.0:
        return 0.0, 0.0
    if not converges(spec.family):
        raise DivergentTail(f"kernel of {spec.family.descriptor} is unbounded at t = 0")
    ts = tail_sum(spec.family, spec.start, tol=max(min(tol, 1e-8), ZERO_REL_FLOOR))
    return c * ts.value, abs(c) * ts.err


def _reduce(t: float) -> float:
    r = math.remainder(t, 2 * math.pi)
    return 0.0 if r == 0 else r


def kernel_value(spec: KernelSpec, t: float, K: int, tol: float = 1e-12) -> tuple[float, float]:
    """Value at ``t`` from terms ``start..K`` plus the summation-by-parts remainder.

    Returns ``(value, error_bound)``.  At ``t = 0 mod 2pi`` the value is the
    certified tail sum (times ``cos(beta pi/2)``).
    """
    t = _reduce(t)
    if t == 0.0:
        return _at_zero(spec, tol)
    K = _min_cutoff(spec, K)
    head = _direct(spec.family, spec.start, K, t, spec.phase)
    rem, err = abel_remainder(spec.family, K + 1, t, spec.phase)
    return head + float(rem[0]), float(err[0])


def _min_cutoff(spec: KernelSpec, K: int) -> int:
    K = max(K, spec.start - 1)
    if isinstance(spec.family, Tabulated):
        K = max(K, spec.family.n_table)
    return K


def eval_kernel(spec: KernelSpec, t: float, tol: float = 1e-10, cap: int = TERM_CAP) -> float:
    """Kernel value at ``t`` with error below ``tol``.

    The cutoff grows geometrically until the remainder bound meets ``tol``;
    :class:`SlowConvergence` is raised once it would exceed ``cap`` terms.
    """
    return eval_kernel_with_error(spec, t, tol, cap)[0]


def eval_kernel_with_error(spec: KernelSpec, t: float, tol: float = 1e-10,
                           cap: int = TERM_CAP) -> tuple[float, float]:
    if _reduce(t) == 0.0:
        return _at_zero(spec, tol)
    K = max(2 * spec.start, 1024)
    while True:
        val, err = kernel_value(spec, t, K, tol)
        if err <= tol:
            return val, err
        if 4 * K > cap:
            raise SlowConvergence(
                f"kernel at t={t} needs more than {cap} terms for tol {tol} (bound {err:.3g})")
        K *= 4


def sample_tail(spec: KernelSpec, M: int, K: int, offset: float = 0.0,
                tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Kernel values and error bounds on the ``M``-point grid.

    Terms ``start..K`` are folded onto the grid and summed by one FFT, the
    rest is added by summation by parts.  Grid points at ``t = 0`` get the
    certified tail sum (or ``inf`` when it diverges).
    """
    K = _min_cutoff(spec, K)
    c, s = spec.phase
    amp = spec.family.values(spec.start, K + 1) * (c + 1j * s)
    F = filters.fold_spectrum(amp, spec.start, M, offset)
    vals = M * np.fft.ifft(F).real
    t = filters.grid(M, offset)
    rem, err = abel_remainder(spec.family, K + 1, t, spec.phase)
    vals = vals + rem
    zero = np.flatnonzero(np.abs(np.sin(0.5 * t)) == 0)
    for j in zero:
        try:
            vals[j], err[j] = _at_zero(spec, tol)
        except DivergentTail:
            vals[j], err[j] = np.inf, np.inf
    return vals, err


# -- truncation -------------------------------------------------------------


def tail_control(family: PsiFamily, K: int, p_prime: float) -> float:
    """Size of the tail beyond ``K`` in the ``L_{p'}`` sense.

    ``(sum_{k>K} psi^{p'} k^{p'-2} + psi(K)^{p'} K^{p'-1})^{1/p'}`` for finite
    ``p'`` and ``sum_{k>K} psi(k)`` for ``p' = inf``.
    """
    if math.isinf(p_prime):
        return tail_sum(family, K + 1, tol=1e-3, cutoff=K + 1).upper
    q = p_prime
    ts = tail_sum(family, K + 1, q=q, m=q - 2, tol=1e-3, cutoff=K + 1).upper
    return (ts + float(family.eval(float(K))) ** q * K ** (q - 1)) ** (1.0 / q)


def plan_truncation(spec: KernelSpec, p_prime: float, tol: float,
                    cap: int = TERM_CAP) -> TruncationPlan:
    """Smallest power-of-two cutoff whose tail control is below ``tol``.

    The implied constant of the control is unknown, so the plan further
    doubles the cutoff until the ``L_{p'}`` norm of the truncated kernel
    changes by less than ``tol``.
    """
    fam = spec.family
    if math.isinf(p_prime):
        ok = converges(fam)
    else:
        ok = converges(fam, p_prime, p_prime - 2)
    if not ok:
        raise DivergentTail(f"{fam.descriptor}: tail series diverges for p' = {p_prime}")
    K = 1 << max(4, math.ceil(math.log2(spec.start + 1)))
    while tail_control(fam, K, p_prime) > tol:
        K *= 2
        if K > cap:
            raise SlowConvergence(f"tail control above {tol} at the {cap}-term cap")
    norm_K = filters.norm_q(spec.polynomial(K), p_prime, tol=tol / 4).value
    while True:
        norm_2K = filters.norm_q(spec.polynomial(2 * K), p_prime, tol=tol / 4).value
        if abs(norm_2K - norm_K) < tol:
            return TruncationPlan(K, tail_control(fam, K, p_prime), norm_K, norm_2K)
        K *= 2
        if 2 * K > cap:
            raise SlowConvergence(f"truncated norms not stable to {tol} within {cap} terms")
        norm_K = norm_2K


# -- sup-norm tail inequalities ---------------------------------------------


@dataclass(frozen=True)
class SupCheck:
    beta: float
    sup: float
    argsup: float
    bound: float
    passed: bool


def grid_sup(spec: KernelSpec, M: int, K: int | None = None) -> tuple[float, float, float]:
    """Refined ``sup |kernel|``: grid maximum polished around the top peaks.

    Returns ``(sup, argsup, error_bound)``.
    """
    K = K or 4 * M
    vals, err = sample_tail(spec, M, K)
    t = filters.grid(M)
    budget = 1e-9 * max(1.0, float(np.max(np.abs(vals[np.isfinite(vals)]))))

    def fn(x):
        v, e = kernel_value(spec, x, K)
        return abs(v) if e <= budget else 0.0

    sup, arg, _ = filters.refine_sup(np.abs(vals), t, fn)
    return sup, arg, float(np.max(err))


def sup_tail_inequalities(family: PsiFamily, n: int, grid_density: int = 64) -> list[SupCheck]:
    """Check ``sup|tail| <= sum_{k>=n} psi(k)`` (beta=0) and ``<= (pi+2) psi(n) n`` (beta=1).

    The cosine check is skipped when ``sum psi(k)`` diverges.
    """
    M = filters.grid_size(n, factor=grid_density)
    out = []
    if converges(family):
        spec = KernelSpec(family, 0, n)
        sup, arg, err = grid_sup(spec, M)
        bound = tail_sum(family, n).upper
        out.append(SupCheck(0.0, sup, arg, bound, sup - err <= bound))
    spec = KernelSpec(family, 1, n)
    sup, arg, err = grid_sup(spec, M)
    bound = (math.pi + 2) * float(family.eval(float(n))) * n
    out.append(SupCheck(1.0, sup, arg, bound, sup - err <= bound))
    return out


def write_samples(path, spec: KernelSpec, t, values, tail_control_value: float) -> None:
    """Two-column ``t value`` dump with a descriptor header."""
    lines = [f"# {spec.family.descriptor} beta={spec.beta!r} n={spec.start} "
             f"tail_control={tail_control_value!r}"]
    lines += [f"{ti!r} {vi!r}" for ti, vi in zip(np.asarray(t).tolist(), np.asarray(values).tolist())]
    Path(path).write_text("\n".join(lines) + "\n")


def read_samples(path) -> tuple[str, np.ndarray, np.ndarray]:
    text = Path(path).read_text().splitlines()
    header = text[0].lstrip("# ").strip()
    data = np.loadtxt(text[1:], ndmin=2) if len(text) > 1 else np.empty((0, 2))
    return header, data[:, 0], data[:, 1]
