"""Trigonometric polynomials, linear summation filters and L_q norms.

Polynomials use the ``a0/2`` convention::

    p(t) = a0/2 + sum_k (a_k cos kt + b_k sin kt)

Norms are integrals over ``[0, 2pi]`` (not normalised by the length).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConfigError, QuadratureNotConverged

TWO_PI = 2.0 * math.pi
#: Oversampling factor of the quadrature grid relative to the degree.
OVERSAMPLE = 16
#: Largest quadrature grid tried by :func:`norm_q`.
MAX_GRID = 1 << 24


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    a0: float
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("cosine and sine coefficient arrays must match")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a0", float(self.a0))

    @property
    def degree(self) -> int:
        return len(self.a)

    @classmethod
    def from_phase(cls, amplitudes, phase: tuple[float, float], a0: float = 0.0, start: int = 1):
        """``sum_{k>=start} c_k cos(kt + theta)`` given ``phase = (cos theta, sin theta)``."""
        c, s = phase
        amp = np.concatenate([np.zeros(start - 1), np.asarray(amplitudes, dtype=float)])
        return cls(a0, amp * c, -amp * s)

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        m = max(self.degree, other.degree)
        pad = lambda x: np.pad(x, (0, m - len(x)))  # noqa: E731
        return TrigPolynomial(self.a0 + other.a0, pad(self.a) + pad(other.a),
                              pad(self.b) + pad(other.b))

    def scale(self, c: float) -> "TrigPolynomial":
        return TrigPolynomial(c * self.a0, c * self.a, c * self.b)

    def coefficients_equal(self, other: "TrigPolynomial") -> bool:
        return (self.a0 == other.a0 and np.array_equal(self.a, other.a)
                and np.array_equal(self.b, other.b))


@dataclass(frozen=True)
class SummationFilter:
    """Linear mean of order ``n``: ``kind`` is ``fourier``, ``fejer`` or ``zygmund``."""

    kind: str
    n: int
    s: float = 1.0

    def __post_init__(self):
        if self.kind not in ("fourier", "fejer", "zygmund"):
            raise ConfigError(f"unknown filter kind {self.kind!r}")
        if self.n < 1:
            raise ConfigError("filter order n must be >= 1")
        if self.kind == "zygmund" and not self.s > 0:
            raise ConfigError("Zygmund exponent s must be positive")

    @classmethod
    def zygmund(cls, n: int, s: float) -> "SummationFilter":
        return cls("zygmund", n, s)

    @classmethod
    def fejer(cls, n: int) -> "SummationFilter":
        return cls("fejer", n)

    @classmethod
    def fourier(cls, n: int) -> "SummationFilter":
        return cls("fourier", n)

    def complement(self, k):
        """``1 - multiplier`` computed without cancellation: ``(k/n)**s`` etc."""
        k = np.asarray(k, dtype=float)
        x = k / self.n
        if self.kind == "zygmund":
            inner = np.power(x, self.s)
        elif self.kind == "fejer":
            inner = x
        else:
            inner = np.zeros_like(x)
        out = np.where(k >= self.n, 1.0, np.where(k == 0, 0.0, inner))
        return out if out.ndim else float(out)

    def multiplier(self, k):
        k = np.asarray(k, dtype=float)
        x = k / self.n
        if self.kind == "zygmund":
            inner = 1.0 - np.power(x, self.s)
        elif self.kind == "fejer":
            inner = 1.0 - x
        else:
            inner = np.ones_like(x)
        out = np.where(k >= self.n, 0.0, np.where(k == 0, 1.0, inner))
        return out if out.ndim else float(out)


def filter_multiplier(f: SummationFilter, k: int) -> float:
    if k < 0:
        raise ValueError("k must be non-negative")
    return float(f.multiplier(k))


def apply_filter(p: TrigPolynomial, f: SummationFilter) -> TrigPolynomial:
    """Scale each harmonic by its multiplier; harmonics ``k >= n`` are dropped."""
    m = min(p.degree, f.n - 1)
    lam = f.multiplier(np.arange(1, m + 1))
    return TrigPolynomial(p.a0, p.a[:m] * lam, p.b[:m] * lam)


def eval_poly(p: TrigPolynomial, t):
    t = np.asarray(t, dtype=float)
    k = np.arange(1, p.degree + 1, dtype=float)
    kt = np.multiply.outer(t, k)
    out = 0.5 * p.a0 + np.cos(kt) @ p.a + np.sin(kt) @ p.b
    return out if out.ndim else float(out)


def fold_spectrum(coef: np.ndarray, start: int, M: int, offset: float = 0.0) -> np.ndarray:
    """Fold complex amplitudes of ``e^{ikt}``, ``k = start, start+1, ...``, onto ``M`` bins.

    With ``F`` the result, ``Re(M * ifft(F))[j]`` is the exact value of the
    series at ``t_j = offset + 2 pi j / M``.
    """
    k = np.arange(start, start + len(coef))
    if offset:
        coef = coef * np.exp(1j * k * offset)
    idx = k % M
    if start >= 0 and start + len(coef) <= M:
        out = np.zeros(M, dtype=complex)
        out[idx] = coef
        return out
    re = np.bincount(idx, weights=coef.real, minlength=M)
    im = np.bincount(idx, weights=coef.imag, minlength=M)
    return re + 1j * im


def grid(M: int, offset: float = 0.0) -> np.ndarray:
    return offset + TWO_PI * np.arange(M) / M


def sample(p: TrigPolynomial, M: int, offset: float = 0.0) -> np.ndarray:
    """Exact values of ``p`` on the uniform ``M``-point grid (aliasing folded in)."""
    F = fold_spectrum(p.a - 1j * p.b, 1, M, offset)
    return 0.5 * p.a0 + M * np.fft.ifft(F).real


def grid_size(degree: int, factor: int = OVERSAMPLE, minimum: int = 64) -> int:
    return max(minimum, 1 << math.ceil(math.log2(max(factor * (degree + 1), 2))))


class Norm(NamedTuple):
    value: float
    err: float


def lq_on_grid(values: np.ndarray, q: float) -> float:
    """Trapezoid ``(int_0^{2pi} |f|^q)^{1/q}`` from uniform periodic samples."""
    h = TWO_PI / len(values)
    if q == 2:
        return math.sqrt(h * float(np.dot(values, values)))
    return (h * float(np.sum(np.abs(values) ** q))) ** (1.0 / q)


def refine_sup(values: np.ndarray, t: np.ndarray, fn: Callable[[float], float],
               top: int = 3, xatol: float | None = None) -> tuple[float, float, float]:
    """Refine the largest grid values of ``fn`` (sampled as ``values`` on ``t``).

    Each of the ``top`` largest local maxima is polished by bounded Brent
    search over its two neighbouring cells.  Returns ``(sup, argsup, gain)``
    where ``gain`` is how much refinement improved on the grid maximum.
    """
    h = t[1] - t[0]
    left, right = np.roll(values, 1), np.roll(values, -1)
    peaks = np.flatnonzero((values >= left) & (values >= right))
    if peaks.size == 0:
        peaks = np.array([int(np.argmax(values))])
    peaks = peaks[np.argsort(-values[peaks], kind="stable")][:top]
    best_val, best_t = float(values[peaks[0]]), float(t[peaks[0]])
    grid_max = best_val
    for i in peaks:
        c = float(t[i])
        res = minimize_scalar(lambda x: -fn(x), bounds=(c - h, c + h), method="bounded",
                              options={"xatol": xatol or h * 1e-6})
        if -res.fun > best_val:
            best_val, best_t = float(-res.fun), float(res.x)
    return best_val, best_t, best_val - grid_max


def norm_q(p: TrigPolynomial, q: float, tol: float = 1e-10, offset: float = 0.0,
           M: int | None = None) -> Norm:
    """``||p||_q`` over ``[0, 2pi]`` with an error estimate.

    For finite ``q`` the trapezoid rule on a grid of at least 16x the degree is
    compared with the doubled grid; :class:`QuadratureNotConverged` is raised
    if the two differ by more than ``tol`` even at ``MAX_GRID``.  For
    ``q = inf`` the grid maximum is refined around the three highest peaks.
    """
    if not q >= 1:
        raise ValueError("q must be >= 1")
    M = M or grid_size(p.degree)
    if math.isinf(q):
        vals = np.abs(sample(p, M, offset))
        sup, _, gain = refine_sup(vals, grid(M, offset), lambda x: abs(eval_poly(p, x)))
        return Norm(sup, gain)
    current = lq_on_grid(sample(p, M, offset), q)
    while True:
        finer = lq_on_grid(sample(p, 2 * M, offset), q)
        err = abs(finer - current)
        if err <= tol:
            return Norm(finer, err)
        if 2 * M >= MAX_GRID:
            raise QuadratureNotConverged(
                f"L_{q} norm changed by {err:.3g} > {tol:.3g} at grid {2 * M}")
        M, current = 2 * M, finer


def parseval_norm(p: TrigPolynomial) -> float:
    """``||p||_2`` from the coefficients."""
    return math.sqrt(math.pi * (0.5 * p.a0 ** 2 + float(np.dot(p.a, p.a) + np.dot(p.b, p.b))))


def write_coefficients(path, p: TrigPolynomial) -> None:
    """Write ``a0=<value>`` then one ``k a_k b_k`` row per harmonic."""
    lines = [f"a0={p.a0!r}"]
    lines += [f"{k} {a!r} {b!r}" for k, (a, b) in enumerate(zip(p.a.tolist(), p.b.tolist()), 1)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_coefficients(path) -> TrigPolynomial:
    text = Path(path).read_text().splitlines()
    rows = [ln.strip() for ln in text if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or not rows[0].startswith("a0="):
        raise ConfigError(f"{path}: first line must be a0=<value>")
    a0 = float(rows[0][3:])
    entries = {}
    for ln in rows[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise ConfigError(f"{path}: bad row {ln!r}")
        k = int(parts[0])
        if k < 1:
            raise ConfigError(f"{path}: harmonic index must be >= 1")
        entries[k] = (float(parts[1]), float(parts[2]))
    m = max(entries, default=0)
    a, b = np.zeros(m), np.zeros(m)
    for k, (ak, bk) in entries.items():
        a[k - 1], b[k - 1] = ak, bk
    return TrigPolynomial(a0, a, b)
