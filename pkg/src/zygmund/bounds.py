"""Order expressions for the class error and checks of their hypotheses.

The expressions carry unknown constants, so they are compared with computed
errors only through ratios (kept inside a band) and log-log slopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .class_error import ClassSpec
from .errors import ConfigError, ConstraintViolated, DivergentTail
from .psi import (ClassifierReport, PowerLog, PsiFamily, WeightedProduct,
                  classify_membership, sequence_report)
from .series import converges, tail_sum

VARIANTS = ("T1_tail_pprime", "T1_p1_cos", "T1_p1_sin", "T2_simplified", "T3_log")


@dataclass(frozen=True)
class BoundValue:
    n: int
    variant: str
    value: float
    method: str
    applicable: bool = True
    note: str = ""


def tail_sum_pprime(spec: ClassSpec, n: int, tol: float = 1e-8) -> float:
    """``sum_{k>=n} psi(k)^{p'} k^{p'-2}`` (``1 < p < inf``)."""
    if spec.p == 1:
        raise ConfigError("tail_sum_pprime needs p > 1")
    q = spec.p_prime
    return tail_sum(spec.family, n, q=q, m=q - 2, tol=tol).value


def tail_sum_l1(family: PsiFamily, n: int, tol: float = 1e-8) -> float:
    """``sum_{k>=n} psi(k)``."""
    return tail_sum(family, n, tol=tol).value


def _psi(family: PsiFamily, n: int) -> float:
    return float(family.eval(float(n)))


def theory_bound(spec: ClassSpec, n: int, tol: float = 1e-8) -> BoundValue:
    """The general order expression, chosen by ``p`` and the parity of ``beta``."""
    if spec.p > 1:
        q = spec.p_prime
        return BoundValue(n, "T1_tail_pprime", tail_sum_pprime(spec, n, tol) ** (1 / q),
                          "direct_sum+integral_tail")
    if spec.cos_zero:
        return BoundValue(n, "T1_p1_sin", _psi(spec.family, n) * n, "closed_form")
    return BoundValue(n, "T1_p1_cos", tail_sum_l1(spec.family, n, tol), "direct_sum+integral_tail")


@lru_cache(maxsize=64)
def _membership(family: PsiFamily, delta: float) -> ClassifierReport:
    return classify_membership(WeightedProduct(family, delta))


def mc_simplified_bound(spec: ClassSpec, n: int) -> BoundValue:
    """``psi(n) n^{1/p}``; flagged not applicable when alpha of ``g_{1/p}`` grows."""
    trend = _membership(spec.family, 1 / spec.p).alpha_trend
    ok = trend != "growing"
    note = "" if ok else "alpha(g_1/p) grows: the simplified order does not hold"
    return BoundValue(n, "T2_simplified", _psi(spec.family, n) * n ** (1 / spec.p),
                      "closed_form", ok, note)


def theorem3_constraints(family: PowerLog, p: float | None = None) -> None:
    """Raise :class:`ConstraintViolated` unless ``gamma`` and ``K`` are admissible."""
    p = family.p if p is None else p
    g, K = family.gamma, family.K
    if p == 1:
        if not g > 1:
            raise ConstraintViolated(f"gamma > 1 fails (gamma = {g})")
        if not K > math.exp(g):
            raise ConstraintViolated(f"K > e^gamma fails (K = {K}, e^gamma = {math.exp(g):.6g})")
        return
    q = p / (p - 1)
    if not g > 1 / q:
        raise ConstraintViolated(f"gamma > 1/p' fails (gamma = {g}, 1/p' = {1 / q:.6g})")
    if not K > math.exp(g * q / 2):
        raise ConstraintViolated(
            f"K > e^(gamma p'/2) fails (K = {K}, bound = {math.exp(g * q / 2):.6g})")


def theorem3_bound(family: PowerLog, n: int, beta: float = 0.0) -> BoundValue:
    """``psi(n) n^{1/p} ln^{1/p'} n`` for ``p > 1``; ``psi(n) n ln n`` or ``psi(n) n`` for ``p = 1``."""
    if not isinstance(family, PowerLog):
        raise ConfigError("theorem3_bound needs a powerlog family")
    if n < 2:
        raise ValueError("theorem3_bound needs n >= 2")
    theorem3_constraints(family)
    p = family.p
    base = _psi(family, n) * n ** (1 / p)
    if p > 1:
        q = p / (p - 1)
        return BoundValue(n, "T3_log", base * math.log(n) ** (1 / q), "closed_form")
    spec = ClassSpec(family, beta, 1.0)
    value = base if spec.cos_zero else base * math.log(n)
    return BoundValue(n, "T3_log", value, "closed_form")


# -- ratio relations --------------------------------------------------------


@dataclass(frozen=True)
class RatioSeries:
    name: str
    n: tuple[int, ...]
    ratios: tuple[float, ...]
    expected: str
    ok: bool

    @property
    def max(self) -> float:
        return max(self.ratios)

    @property
    def min(self) -> float:
        return min(self.ratios)

    @property
    def trend(self) -> float:
        """Last ratio over first ratio."""
        return self.ratios[-1] / self.ratios[0]


def _judge(ratios: list[float], expected: str, band: tuple[float, float]) -> bool:
    r = np.asarray(ratios)
    if expected == "bounded":
        return bool(np.all((r >= band[0]) & (r <= band[1])))
    # vanishing: a non-increasing tail ending clearly below the start
    return bool(np.all(np.diff(r) <= 1e-12 * r[:-1]) and r[-1] < r[0])


def ratio_relations(spec: ClassSpec, n_grid, band: tuple[float, float] = (1 / 20, 20)) -> list[RatioSeries]:
    """``psi^{p'}(n) n^{p'-1} / sum_{k>=n} psi^{p'} k^{p'-2}`` and ``psi(n) n / sum_{k>=n} psi``.

    For families with bounded alpha both ratios stay inside ``band``; where
    alpha grows they must decrease towards zero.
    """
    n_grid = [int(n) for n in n_grid]
    fam = spec.family
    out = []
    if spec.p > 1 and converges(fam, spec.p_prime, spec.p_prime - 2):
        q = spec.p_prime
        expected = "vanishing" if _membership(fam, 1 / spec.p).alpha_trend == "growing" else "bounded"
        r = [_psi(fam, n) ** q * n ** (q - 1) / tail_sum_pprime(spec, n) for n in n_grid]
        out.append(RatioSeries("pprime", tuple(n_grid), tuple(r), expected, _judge(r, expected, band)))
    if converges(fam):
        expected = "vanishing" if _membership(fam, 1.0).alpha_trend == "growing" else "bounded"
        r = [_psi(fam, n) * n / tail_sum_l1(fam, n) for n in n_grid]
        out.append(RatioSeries("l1", tuple(n_grid), tuple(r), expected, _judge(r, expected, band)))
    return out


# -- hypotheses -------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    ok: bool
    evidence: str


@dataclass(frozen=True)
class ConditionsReport:
    spec: ClassSpec
    convergence: Check
    alpha_threshold: Check
    gm_ga: Check
    membership: Check
    reports: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def all_ok(self) -> bool:
        return all(c.ok for c in (self.convergence, self.alpha_threshold, self.gm_ga, self.membership))

    @property
    def failed(self) -> list[str]:
        names = ("convergence", "alpha_threshold", "gm_ga", "membership")
        return [nm for nm in names if not getattr(self, nm).ok]

    def text(self) -> str:
        lines = [f"hypotheses for {self.spec.label}:"]
        for nm in ("convergence", "alpha_threshold", "gm_ga", "membership"):
            c = getattr(self, nm)
            lines.append(f"  {nm:<16} {'ok  ' if c.ok else 'FAIL'}  {c.evidence}")
        return "\n".join(lines)


def _convergence_check(spec: ClassSpec) -> Check:
    fam = spec.family
    if spec.p == 1:
        label, args = "sum psi(k)", (1.0, 0.0)
    else:
        q = spec.p_prime
        label, args = f"sum psi(k)^{q:g} k^{q - 2:g}", (q, q - 2)
    if not converges(fam, *args):
        a, b = fam.decay
        return Check(False, f"{label} diverges (decay exponents {a:g}, {b:g})")
    try:
        ts = tail_sum(fam, 1, *args, tol=1e-6)
        return Check(True, f"{label} = {ts.value:.6g} (+/- {ts.err:.2g})")
    except DivergentTail as exc:
        return Check(False, str(exc))


def conditions_report(spec: ClassSpec, N: int = 4096) -> ConditionsReport:
    """Every hypothesis of the general order estimate with its numeric evidence."""
    fam, p, s = spec.family, spec.p, spec.s
    conv = _convergence_check(spec)

    g = WeightedProduct(fam, 1 / p)
    member = _membership(fam, 1 / p)
    threshold = 1.0 if p == 1 else spec.p_prime / 2
    grid = np.geomspace(1.0, member.grid[1], member.grid[2])
    decreasing = bool(np.all(np.asarray(g.deriv(grid)) < 0))
    alpha_ok = decreasing and member.alpha_inf > threshold
    alpha = Check(alpha_ok, f"inf alpha(g_{1 / p:g}) = {member.alpha_inf:.6g} vs {threshold:g}"
                  + ("" if decreasing else "; g is not decreasing"))

    seq = sequence_report(WeightedProduct(fam, s + 1 / p), N=N)
    gm_ok = bool(seq.gm_plus_stable and seq.ga_plus_stable)
    eps, ga = min(seq.ga_plus, key=lambda e: e[1])
    gm = Check(gm_ok, f"GM+ A = {seq.gm_plus_A:.4g} ({'stable' if seq.gm_plus_stable else 'growing'}), "
                      f"GA+ K = {ga:.4g} at eps = {eps:g} ({'stable' if seq.ga_plus_stable else 'growing'})")

    cls = {"bounded": "M_C", "growing": "M_0", "decreasing": "neither"}[member.alpha_trend]
    mem = Check(cls != "neither" and member.alpha_inf > 0,
                f"alpha(g_{1 / p:g}) in [{member.alpha_inf:.4g}, {member.alpha_sup:.4g}], trend "
                f"{member.alpha_trend} -> {cls}")
    return ConditionsReport(spec, conv, alpha, gm, mem, {"g_1/p": member, "g_s+1/p": seq})


# -- order checks -----------------------------------------------------------


def fit_slope(n, values, top_half: bool = True) -> float:
    """Least-squares slope of ``log values`` against ``log n`` (top half of the grid by default)."""
    x = np.log(np.asarray(n, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    if top_half:
        x, y = x[len(x) // 2:], y[len(y) // 2:]
    if x.size < 2:
        raise ValueError("slope fit needs at least two points")
    return float(np.polyfit(x, y, 1)[0])


def order_holds(n, values, bounds, band: tuple[float, float] = (1 / 20, 20),
                slope_tol: float = 0.15) -> tuple[bool, float, float]:
    """Band and slope test of ``values`` against ``bounds``.

    Returns ``(holds, slope_values, slope_bounds)``.
    """
    r = np.asarray(values, dtype=float) / np.asarray(bounds, dtype=float)
    sv, sb = fit_slope(n, values), fit_slope(n, bounds)
    in_band = bool(np.all(np.isfinite(r)) and np.all((r >= band[0]) & (r <= band[1])))
    return in_band and abs(sv - sb) <= slope_tol, sv, sb


__all__ = ["BoundValue", "VARIANTS", "tail_sum_pprime", "tail_sum_l1", "theory_bound",
           "mc_simplified_bound", "theorem3_bound", "theorem3_constraints", "RatioSeries",
           "ratio_relations", "Check", "ConditionsReport", "conditions_report", "fit_slope",
           "order_holds"]
