"""Weight families psi(t), weighted products and sequence classifiers.

A family is a positive, convex, decreasing function on ``[1, inf)`` whose
values at the integers generate the class.  Three kinds are provided:

* :class:`Power` -- ``t**-r``;
* :class:`PowerLog` -- ``t**(-1/p) * log(t + K)**-gamma``;
* :class:`Tabulated` -- finitely many values continued by a power tail.

Families are built from text descriptors with :func:`parse_family`, e.g.
``"power:r=1.5"``, ``"powerlog:p=2,gamma=1,K=3"`` or ``"table:@psi.txt"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DerivativeZero, EmptySequence

#: Default epsilon grid for the GA+ diagnostic: 2**-6, ..., 2**-1.
DEFAULT_EPS_GRID = tuple(2.0 ** -j for j in range(6, 0, -1))

#: Relative slack for the discrete convexity check.
CONVEXITY_TOL = 1e-10


def _fmt(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


class PsiFamily:
    """Common interface of the weight families.

    Subclasses implement :meth:`eval`, :meth:`deriv` (the right derivative)
    and :attr:`decay`, the pair ``(a, b)`` with ``psi(t) ~ t**-a log(t)**-b``
    as ``t -> inf`` (used to decide convergence of tail series exactly).
    """

    descriptor: str

    def eval(self, t):
        raise NotImplementedError

    def deriv(self, t):
        raise NotImplementedError

    @property
    def decay(self) -> tuple[float, float]:
        raise NotImplementedError

    def __call__(self, t):
        return self.eval(t)

    def values(self, start: int, stop: int) -> np.ndarray:
        """``psi(k)`` for integer ``start <= k < stop``."""
        return self.eval(np.arange(start, stop, dtype=float))


@dataclass(frozen=True)
class Power(PsiFamily):
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ConfigError(f"power family needs r > 0, got {self.r}")

    @property
    def descriptor(self) -> str:
        return f"power:r={_fmt(self.r)}"

    def eval(self, t):
        return np.power(t, -self.r) if np.ndim(t) else float(t) ** -self.r

    def deriv(self, t):
        return -self.r * self.eval(t) / t

    @property
    def decay(self):
        return (float(self.r), 0.0)


@dataclass(frozen=True)
class PowerLog(PsiFamily):
    """``psi(t) = t**(-1/p) * log(t + K)**(-gamma)``."""

    p: float
    gamma: float
    K: float

    def __post_init__(self):
        if not self.p >= 1:
            raise ConfigError(f"powerlog family needs p >= 1, got {self.p}")
        if not self.gamma > 0 or not self.K > 0:
            raise ConfigError("powerlog family needs gamma > 0 and K > 0")
        if math.log(1 + self.K) <= 0:
            raise ConfigError("powerlog family needs log(1 + K) > 0")

    @property
    def descriptor(self) -> str:
        return f"powerlog:p={_fmt(self.p)},gamma={_fmt(self.gamma)},K={_fmt(self.K)}"

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        out = t ** (-1.0 / self.p) * np.log(t + self.K) ** (-self.gamma)
        return out if out.ndim else float(out)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        rate = 1.0 / (self.p * t) + self.gamma / ((t + self.K) * np.log(t + self.K))
        out = -self.eval(t) * rate
        return out if out.ndim else float(out)

    @property
    def decay(self):
        return (1.0 / self.p, float(self.gamma))


@dataclass(frozen=True)
class Tabulated(PsiFamily):
    """Values ``psi(1), ..., psi(N)`` continued by ``psi(N) (t/N)**-tail_exponent``.

    Between integers the values are joined linearly; the right derivative
    inside the table is the forward difference.
    """

    table: tuple[float, ...]
    tail_exponent: float
    source: str = field(default="", compare=False)

    def __post_init__(self):
        v = np.asarray(self.table, dtype=float)
        if v.size == 0:
            raise EmptySequence("tabulated family needs at least one value")
        if not self.tail_exponent > 0:
            raise ConfigError("tail_exponent must be positive")
        if np.any(v <= 0):
            raise ConfigError("tabulated values must be positive")
        grid = self.eval(np.arange(1, 2 * v.size + 3, dtype=float))
        if np.any(np.diff(grid) > 0):
            raise ConfigError("tabulated family is not non-increasing")
        if np.any(np.diff(grid, 2) < -CONVEXITY_TOL * grid[0]):
            raise ConfigError("tabulated family is not convex")

    @property
    def descriptor(self) -> str:
        return f"table:@{self.source}" if self.source else "table:<inline>"

    @property
    def n_table(self) -> int:
        return len(self.table)

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        v = np.asarray(self.table, dtype=float)
        n = v.size
        tail = v[-1] * (np.maximum(t, n) / n) ** -self.tail_exponent
        inner = np.interp(t, np.arange(1, n + 1), v)
        out = np.where(t >= n, tail, inner)
        return out if out.ndim else float(out)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        v = np.asarray(self.table, dtype=float)
        n = v.size
        idx = np.clip(np.floor(t).astype(int), 1, max(n - 1, 1))
        if n > 1:
            forward = v[idx] - v[idx - 1]
        else:
            forward = np.zeros_like(t)
        analytic = -self.tail_exponent * self.eval(t) / t
        out = np.where(t >= n, analytic, forward)
        return out if out.ndim else float(out)

    @property
    def decay(self):
        return (float(self.tail_exponent), 0.0)


def read_table(path) -> Tabulated:
    """Read a ``table:`` file: one positive decimal per line, then ``tail_exponent=<r>``."""
    path = Path(path)
    values, tail = [], None
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("tail_exponent"):
            try:
                tail = float(line.split("=", 1)[1])
            except (IndexError, ValueError):
                raise ConfigError(f"{path}: bad footer {line!r}") from None
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ConfigError(f"{path}: not a number: {line!r}") from None
    if tail is None:
        raise ConfigError(f"{path}: missing tail_exponent= footer")
    return Tabulated(tuple(values), tail, source=str(path))


def _params(body: str) -> dict[str, float]:
    out = {}
    for item in filter(None, (s.strip() for s in body.split(","))):
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"expected key=value, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise ConfigError(f"not a number: {val!r}") from None
    return out


def parse_family(text: str) -> PsiFamily:
    """Build a family from its descriptor string."""
    kind, sep, body = text.strip().partition(":")
    if not sep:
        raise ConfigError(f"family descriptor needs 'kind:params', got {text!r}")
    kind = kind.lower()
    if kind == "table":
        if not body.startswith("@"):
            raise ConfigError("table descriptor must be 'table:@path'")
        return read_table(body[1:])
    params = _params(body)
    try:
        if kind == "power":
            return Power(params["r"])
        if kind == "powerlog":
            return PowerLog(params["p"], params["gamma"], params["K"])
    except KeyError as exc:
        raise ConfigError(f"{kind} descriptor missing parameter {exc}") from None
    raise ConfigError(f"unknown family kind {kind!r}")


@dataclass(frozen=True)
class WeightedProduct:
    """``g_delta(t) = psi(t) * t**delta``."""

    base: PsiFamily
    delta: float = 0.0

    def eval(self, t):
        return self.base.eval(t) * np.power(t, self.delta)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        out = (self.base.deriv(t) * t ** self.delta
               + self.delta * self.base.eval(t) * t ** (self.delta - 1))
        return out if out.ndim else float(out)

    def sequence(self, N: int) -> np.ndarray:
        """``g_delta(k)`` for ``k = 1..N``."""
        return self.eval(np.arange(1, N + 1, dtype=float))


def alpha_characteristic(w: WeightedProduct, t: float) -> float:
    """``g(t) / (t |g'(t+0)|)``; raises :class:`DerivativeZero` where ``g' = 0``."""
    if isinstance(w, PsiFamily):
        w = WeightedProduct(w)
    d = float(w.deriv(t))
    if d == 0.0:
        raise DerivativeZero(f"g'({t}) = 0 for {w}")
    return float(w.eval(t)) / (t * abs(d))


def alpha_values(w: WeightedProduct, grid) -> np.ndarray:
    """Vectorised alpha over a grid, ``inf`` where the derivative vanishes."""
    grid = np.asarray(grid, dtype=float)
    d = np.abs(np.asarray(w.deriv(grid), dtype=float))
    g = np.asarray(w.eval(grid), dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(d == 0, np.inf, g / (grid * d))


@dataclass(frozen=True)
class ClassifierReport:
    alpha_inf: float
    alpha_sup: float
    alpha_trend: str
    grid: tuple[float, float, int]
    convex_ok: bool
    gm_plus_A: float | None = None
    gm_plus_stable: bool | None = None
    ga_plus: tuple[tuple[float, float], ...] = ()
    ga_plus_stable: bool | None = None


def default_grid(t_max: float = 1e6, points: int = 241) -> np.ndarray:
    return np.geomspace(1.0, t_max, points)


def _convex_ok(family: PsiFamily, t_max: float) -> bool:
    k = np.unique(np.round(np.geomspace(1, max(t_max, 3.0), 400)))
    a, b, c = (np.asarray(family.eval(k + j), dtype=float) for j in range(3))
    tol = CONVEXITY_TOL * abs(float(family.eval(1.0)))
    return bool(np.all(a > 0) and np.all(a >= b) and np.all(a - 2 * b + c >= -tol))


def classify_membership(w: WeightedProduct, grid=None) -> ClassifierReport:
    """Range of alpha over ``grid`` and its trend between the first and last decade.

    The trend is ``growing`` when the mean alpha over the last decade of the
    grid is at least twice the smaller of the first-decade mean and the grid
    minimum, ``decreasing`` when the first-decade mean is at least twice the
    last-decade mean, and ``bounded`` otherwise.  Comparing with the minimum
    catches families such as ``ln(t + K)`` weights whose alpha dips before
    it grows.
    """
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise EmptySequence("empty grid")
    if grid[0] != 1.0:
        raise ConfigError("classification grid must start at t = 1")
    alpha = alpha_values(w, grid)
    first = alpha[grid <= 10 * grid[0]]
    last = alpha[grid >= grid[-1] / 10]
    lo, hi = np.mean(first), np.mean(last)
    if hi >= 2 * min(lo, float(alpha.min())):
        trend = "growing"
    elif lo >= 2 * hi:
        trend = "decreasing"
    else:
        trend = "bounded"
    return ClassifierReport(
        alpha_inf=float(alpha.min()),
        alpha_sup=float(alpha.max()),
        alpha_trend=trend,
        grid=(float(grid[0]), float(grid[-1]), int(grid.size)),
        convex_ok=_convex_ok(w.base, grid[-1]),
    )


def gm_plus_constant(a) -> float:
    """Smallest ``A`` with ``a[n1] + sum_{n1<=k<m} |a[k]-a[k+1]| <= A a[m]`` for all ``n1 <= m``.

    Computed in O(N) using a running maximum of ``a[n1] - V[n1]``, where
    ``V`` is the cumulative variation.
    """
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        raise EmptySequence("gm_plus_constant of an empty sequence")
    if np.any(a <= 0):
        raise ConfigError("GM+ constant needs a positive sequence")
    var = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(a)))])
    best_start = np.maximum.accumulate(a - var)
    return float(np.max((best_start + var) / a))


def gm_plus_constant_bruteforce(a) -> float:
    """O(N^2) reference for :func:`gm_plus_constant`."""
    a = [float(x) for x in a]
    if not a:
        raise EmptySequence("gm_plus_constant of an empty sequence")
    best = 0.0
    for n1 in range(len(a)):
        acc = a[n1]
        for m in range(n1, len(a)):
            if m > n1:
                acc += abs(a[m - 1] - a[m])
            best = max(best, acc / a[m])
    return best


def almost_increasing_constant(b) -> float:
    """``max_{n1 <= n2} b[n1] / b[n2]``."""
    b = np.asarray(b, dtype=float)
    if b.size == 0:
        raise EmptySequence("empty sequence")
    return float(np.max(np.maximum.accumulate(b) / b))


def ga_plus_report(a, eps_grid=DEFAULT_EPS_GRID) -> list[tuple[float, float]]:
    """For each eps, the almost-increasing constant of ``a_k * k**-eps``."""
    a = np.asarray(a, dtype=float)
    if a.size == 0 or len(eps_grid) == 0:
        raise EmptySequence("ga_plus_report needs a sequence and an eps grid")
    k = np.arange(1, a.size + 1, dtype=float)
    return [(float(eps), almost_increasing_constant(a * k ** -eps)) for eps in eps_grid]


def _stable(small: float, large: float, rtol: float = 0.01) -> bool:
    return large <= small * (1 + rtol)


def sequence_report(w: WeightedProduct, N: int = 4096, grid=None,
                    eps_grid=DEFAULT_EPS_GRID) -> ClassifierReport:
    """Alpha classification plus GM+/GA+ constants of ``g(k)``, ``k <= N``.

    The GM+ and GA+ constants are also computed on ``k <= N/2``; a constant
    is reported *stable* when doubling the range grows it by under 1%.
    """
    base = classify_membership(w, grid)
    seq = w.sequence(N)
    half = seq[: N // 2]
    A_full, A_half = gm_plus_constant(seq), gm_plus_constant(half)
    ga_full = ga_plus_report(seq, eps_grid)
    ga_half = ga_plus_report(half, eps_grid)
    ga_stable = any(_stable(h, f) for (_, h), (_, f) in zip(ga_half, ga_full))
    return ClassifierReport(
        **{**base.__dict__,
           "gm_plus_A": A_full,
           "gm_plus_stable": _stable(A_half, A_full),
           "ga_plus": tuple(ga_full),
           "ga_plus_stable": ga_stable},
    )
