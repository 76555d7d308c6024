"""Class-level approximation error of linear means as a certified bracket.

For ``f`` in the class the deviation at the origin is

    f(0) - Z(f; 0) = (1/pi) int_0^{2pi} Lambda_n(t) phi(t) dt

with the residual profile

    Lambda_n(t) = sum_{k<n} psi(k) (k/n)^s cos(kt + beta pi/2)
                + sum_{k>=n} psi(k) cos(kt + beta pi/2)

and ``phi`` ranging over mean-zero functions in the unit ball of ``L_p``.
Hoelder gives the upper value ``U = ||Lambda_n||_{p'} / pi``.  A concrete
admissible ``phi`` gives a lower value ``L``; both are returned together.

Three numerical paths are used, by the dual exponent ``q = p'``:

* ``q = 2``: trapezoid norm of the profile truncated at ``K`` plus the exact
  orthogonal energy ``pi sum_{k>K} psi(k)^2`` of the rest.
* ``q = inf``: pointwise values of the full series (FFT for the first terms,
  summation by parts for the remainder) and a refined maximum and minimum.
* otherwise: the truncated profile with ``K`` doubled until the norm settles.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import filters
from .errors import ConfigError, DivergentTail, SlowConvergence
from .kernels import KernelSpec, eval_kernel_with_error, kernel_value, phase, sample_tail
from .psi import PsiFamily
from .series import converges, tail_sum

#: Smallest truncation cutoff for the grid-based paths.
MIN_CUTOFF = 1 << 12
#: Largest truncation cutoff for the grid-based paths (grid is 16x this).
MAX_CUTOFF = 1 << 18
#: Grid oversampling for the q = 2 path (exact for any factor above 2).
L2_OVERSAMPLE = 4
#: Cosines below this (for non-integer beta) are reported as near-vanishing.
PARITY_TOL = 1e-12
#: Gauss-Legendre nodes used to average the profile over a witness bump.
BUMP_NODES = 8
#: How many times a witness bump may be doubled in width.
MAX_BUMP_WIDENING = 12


@dataclass(frozen=True)
class ClassSpec:
    family: PsiFamily
    beta: float
    p: float
    s: float = 1.0
    filter_kind: str = "zygmund"

    def __post_init__(self):
        if not self.p >= 1 or math.isinf(self.p):
            raise ConfigError(f"p must lie in [1, inf), got {self.p}")
        if not self.s > 0:
            raise ConfigError("Zygmund exponent s must be positive")
        filters.SummationFilter(self.filter_kind, 1, self.s)  # validates the kind

    @property
    def p_prime(self) -> float:
        return math.inf if self.p == 1 else self.p / (self.p - 1)

    @property
    def cos_zero(self) -> bool:
        """Exact parity: true only for odd integer ``beta``."""
        return phase(self.beta)[0] == 0.0

    @property
    def near_odd(self) -> bool:
        """Non-integer ``beta`` whose cosine is numerically zero (warned, never switched)."""
        return not float(self.beta).is_integer() and abs(math.cos(0.5 * math.pi * self.beta)) < PARITY_TOL

    def summation_filter(self, n: int) -> filters.SummationFilter:
        return filters.SummationFilter(self.filter_kind, n, self.s)

    @property
    def label(self) -> str:
        tag = "" if self.filter_kind == "zygmund" else f" filter={self.filter_kind}"
        return f"{self.family.descriptor} p={self.p:g} beta={self.beta:g} s={self.s:g}{tag}"


@dataclass(frozen=True, eq=False)
class ResidualProfile:
    """Damped head ``c_k``, ``k < n``, followed by the kernel tail from ``n``."""

    spec: ClassSpec
    n: int
    head: np.ndarray
    cutoff: int
    tail_control: float = math.nan

    @property
    def tail(self) -> KernelSpec:
        return KernelSpec(self.spec.family, self.spec.beta, self.n)

    def head_polynomial(self) -> filters.TrigPolynomial:
        return filters.TrigPolynomial.from_phase(self.head, phase(self.spec.beta))

    def polynomial(self, K: int | None = None) -> filters.TrigPolynomial:
        """The profile truncated after harmonic ``K`` (default: the planned cutoff)."""
        K = self.cutoff if K is None else K
        amp = np.concatenate([self.head, self.spec.family.values(self.n, K + 1)])
        return filters.TrigPolynomial.from_phase(amp, phase(self.spec.beta))

    def value(self, t: float, tol: float = 1e-12) -> tuple[float, float]:
        """Pointwise value of the untruncated profile and its error bound."""
        h = float(filters.eval_poly(self.head_polynomial(), t)) if self.n > 1 else 0.0
        v, e = eval_kernel_with_error(self.tail, t, tol)
        return h + v, e


@dataclass(frozen=True, eq=False)
class ExtremalWitness:
    """Admissible ``phi`` in quadrature form: nodes ``t``, weights and values."""

    t: np.ndarray
    weights: np.ndarray
    phi: np.ndarray
    norm: float
    mean: float
    achieved: float


@dataclass(frozen=True, eq=False)
class ErrorBracket:
    spec: ClassSpec
    n: int
    upper: float
    lower: float
    quad_err: float
    trunc_err: float
    cutoff: int
    witness: ExtremalWitness | None = field(default=None, repr=False)

    @property
    def consistent(self) -> bool:
        return self.lower <= self.upper + self.quad_err + self.trunc_err

    def csv_row(self) -> str:
        s = self.spec
        return ",".join([s.family.descriptor, repr(float(s.p)), repr(float(s.beta)), repr(float(s.s)),
                         str(self.n), repr(self.upper), repr(self.lower),
                         repr(self.quad_err), repr(self.trunc_err)])


CSV_HEADER = "family,p,beta,s,n,U,L,quad_err,trunc_err"


def _check_convergence(spec: ClassSpec) -> None:
    q = spec.p_prime
    ok = converges(spec.family) if math.isinf(q) else converges(spec.family, q, q - 2)
    if not ok:
        cond = "sum psi(k)" if math.isinf(q) else f"sum psi(k)^{q:g} k^{q - 2:g}"
        raise DivergentTail(f"{cond} diverges for {spec.family.descriptor}")


def _pow2_at_least(x: int) -> int:
    return 1 << max(0, math.ceil(math.log2(max(x, 1))))


def residual_profile(spec: ClassSpec, n: int, tol: float = 1e-6) -> ResidualProfile:
    """Head coefficients ``psi(k) (1 - lambda_k)`` and a starting cutoff.

    The cutoff is refined by the error paths; ``tail_control`` records the
    ``L_{p'}`` size of what lies beyond it.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_convergence(spec)
    k = np.arange(1, n, dtype=float)
    head = spec.family.eval(k) * spec.summation_filter(n).complement(k) if n > 1 else np.zeros(0)
    K = _pow2_at_least(max(16 * n, MIN_CUTOFF))
    return ResidualProfile(spec, n, np.asarray(head, dtype=float), K)


# -- q = 2 ------------------------------------------------------------------


def _energy_tail(family: PsiFamily, K: int):
    return tail_sum(family, K + 1, q=2, tol=1e-6, cutoff=max(K + 1, 1 << 20))


def _bracket_l2(prof: ResidualProfile, tol: float, offset: float, keep_witness: bool) -> ErrorBracket:
    fam = prof.spec.family
    K = prof.cutoff
    # lower bound on ||Lambda||_2 used only to size the witness
    probe = fam.values(prof.n, 2 * prof.n + 1)
    a_lo = math.sqrt(math.pi * (float(np.dot(prof.head, prof.head)) + float(np.dot(probe, probe))))
    T = _energy_tail(fam, K)
    # grow K while the energy left out of the witness costs more than a
    # relative tol of the lower value: 1 - L/U <= pi T / (2 A^2)
    while math.pi * T.value / (2 * a_lo * a_lo) > tol and K < MAX_CUTOFF:
        K *= 2
        T = _energy_tail(fam, K)
    poly = prof.polynomial(K)
    # squares of a degree-K polynomial are integrated exactly once M > 2K
    M = filters.grid_size(K, factor=L2_OVERSAMPLE)
    norm = filters.norm_q(poly, 2, tol=0.5 * tol * math.pi, offset=offset, M=M)
    vals = filters.sample(poly, M, offset)
    h = filters.TWO_PI / M
    A = math.sqrt(h * float(np.dot(vals, vals)))
    U = math.sqrt(A * A + math.pi * T.value) / math.pi
    hi = math.sqrt(A * A + math.pi * T.upper)
    lo = math.sqrt(A * A + math.pi * T.lower)
    trunc_err = 0.5 * (hi - lo) / math.pi
    phi = vals / A
    mean = h * float(np.sum(phi)) / filters.TWO_PI
    achieved = h * float(np.dot(vals, phi)) / math.pi
    witness = None
    if keep_witness:
        witness = ExtremalWitness(filters.grid(M, offset), np.full(M, h), phi,
                                  filters.lq_on_grid(phi, 2), mean, achieved)
    return ErrorBracket(prof.spec, prof.n, U, achieved, norm.err / math.pi, trunc_err, K, witness)


# -- 1 < q < inf, q != 2 -----------------------------------------------------


def _best_constant(vals: np.ndarray, q: float) -> float:
    """``argmin_c sum |vals - c|^q`` by ternary search (convex in ``c``)."""
    lo, hi = float(vals.min()), float(vals.max())
    scale = max(hi - lo, 1e-300)
    f = lambda c: float(np.sum(np.abs(vals - c) ** q))  # noqa: E731
    while hi - lo > 1e-10 * scale:
        m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
        if f(m1) < f(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


def _bracket_lq(prof: ResidualProfile, tol: float, offset: float, keep_witness: bool) -> ErrorBracket:
    spec = prof.spec
    q, p = spec.p_prime, spec.p
    K = prof.cutoff
    cur = filters.norm_q(prof.polynomial(K), q, tol=0.5 * tol * math.pi, offset=offset)
    while True:
        nxt = filters.norm_q(prof.polynomial(2 * K), q, tol=0.5 * tol * math.pi, offset=offset)
        change = abs(nxt.value - cur.value) / math.pi
        K *= 2
        if change <= 0.5 * tol:
            break
        if 2 * K > MAX_CUTOFF:
            raise SlowConvergence(
                f"L_{q:g} norm of the truncated profile still moves by {change:.3g} at K = {K}")
        cur = nxt
    M = filters.grid_size(K)
    vals = filters.sample(prof.polynomial(K), M, offset)
    h = filters.TWO_PI / M
    c = _best_constant(vals, q)
    d = vals - c
    phi = np.abs(d) ** (q - 1) * np.sign(d)
    phi -= np.mean(phi)
    phi /= filters.lq_on_grid(phi, p)
    achieved = h * float(np.dot(vals, phi)) / math.pi
    witness = None
    if keep_witness:
        witness = ExtremalWitness(filters.grid(M, offset), np.full(M, h), phi,
                                  filters.lq_on_grid(phi, p), float(np.mean(phi)), achieved)
    return ErrorBracket(spec, prof.n, nxt.value / math.pi, achieved, nxt.err / math.pi, change, K, witness)


# -- q = inf ----------------------------------------------------------------


def _bracket_sup(prof: ResidualProfile, tol: float, offset: float, keep_witness: bool) -> ErrorBracket:
    spec = prof.spec
    M = filters.grid_size(prof.n, minimum=MIN_CUTOFF)
    K = 4 * M
    head = prof.head_polynomial()
    head_vals = filters.sample(head, M, offset) if prof.n > 1 else np.zeros(M)
    while True:
        tail_vals, err = sample_tail(prof.tail, M, K, offset, tol=min(1e-8, 0.25 * tol))
        worst = float(np.max(err))
        if worst <= 0.5 * tol:
            break
        if 4 * K > 10 ** 7:
            raise SlowConvergence(f"profile remainder bound {worst:.3g} above {0.5 * tol:.3g}")
        K *= 4
    vals = head_vals + tail_vals
    t = filters.grid(M, offset)
    budget = 0.5 * tol

    def pointwise(x: float) -> float | None:
        v, e = kernel_value(prof.tail, x, K, tol=min(1e-8, 0.25 * tol))
        if e > budget:
            # close to t = 0 the remainder needs more terms than the grid cutoff
            try:
                v, e = eval_kernel_with_error(prof.tail, x, budget)
            except SlowConvergence:
                return None
        return v + (float(filters.eval_poly(head, x)) if prof.n > 1 else 0.0)

    def signed(sign):
        floor = float(np.min(sign * vals))

        def fn(x):
            # points whose remainder bound is too loose never win
            v = pointwise(x)
            return floor if v is None else sign * v
        return filters.refine_sup(sign * vals, t, fn)

    hi, t_hi, gain_hi = signed(1.0)
    lo_neg, t_lo, gain_lo = signed(-1.0)
    lo = -lo_neg
    U = max(hi, -lo) / math.pi
    quad_err = max(gain_hi, gain_lo) / math.pi
    # a quarter grid step, widened when nodes crowd t = 0 too closely for the
    # remainder bound to be certified within the term cap
    width = 0.25 * (t[1] - t[0])
    for _ in range(MAX_BUMP_WIDENING):
        try:
            witness = _two_bumps(prof, t_hi, t_lo, width, tol)
            break
        except SlowConvergence:
            width *= 2
    else:
        raise SlowConvergence(f"profile values near t = {t_hi:.3g} cannot be certified to {tol:.3g}")
    return ErrorBracket(spec, prof.n, U, witness.achieved, quad_err, worst / math.pi, K,
                        witness if keep_witness else None)


def _two_bumps(prof: ResidualProfile, t_hi: float, t_lo: float, width: float,
               tol: float) -> ExtremalWitness:
    """Mass ``+1/2`` near the maximum of the profile and ``-1/2`` near its minimum.

    The result has mean zero and unit ``L_1`` norm, and pairs with the
    profile to half the oscillation ``max - min`` as the width shrinks.
    """
    x, w = np.polynomial.legendre.leggauss(BUMP_NODES)
    nodes, weights, phi = [], [], []
    for centre, sign in ((t_hi, 1.0), (t_lo, -1.0)):
        nodes.append(centre + 0.5 * width * x)
        weights.append(0.5 * width * w)
        phi.append(np.full(BUMP_NODES, sign * 0.5 / width))
    nodes, weights, phi = map(np.concatenate, (nodes, weights, phi))
    lam = np.array([prof.value(float(tn), tol=0.25 * tol)[0] for tn in nodes])
    achieved = float(np.sum(weights * phi * lam)) / math.pi
    return ExtremalWitness(nodes, weights, phi, float(np.sum(weights * np.abs(phi))),
                           float(np.sum(weights * phi)) / filters.TWO_PI, achieved)


# -- public operations ------------------------------------------------------


def error_bracket(spec: ClassSpec, n: int, tol: float = 1e-6, offset: float = 0.0,
                  keep_witness: bool = True) -> ErrorBracket:
    """Upper and lower values of the class error of the order-``n`` mean.

    ``tol`` is split evenly between truncation and quadrature.  ``offset``
    shifts the quadrature grid (the result must not depend on it).
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if spec.near_odd:
        warnings.warn(f"beta={spec.beta!r} is not an integer but cos(beta pi/2) is ~0; "
                      "treated as cos != 0", RuntimeWarning, stacklevel=2)
    prof = residual_profile(spec, n, tol)
    q = spec.p_prime
    if q == 2:
        return _bracket_l2(prof, tol, offset, keep_witness)
    if math.isinf(q):
        return _bracket_sup(prof, tol, offset, keep_witness)
    return _bracket_lq(prof, tol, offset, keep_witness)


def upper_bound(spec: ClassSpec, n: int, tol: float = 1e-6) -> float:
    return error_bracket(spec, n, tol, keep_witness=False).upper


def lower_bound(spec: ClassSpec, n: int, tol: float = 1e-6) -> tuple[float, ExtremalWitness]:
    b = error_bracket(spec, n, tol)
    return b.lower, b.witness


def parseval_upper(spec: ClassSpec, n: int) -> float:
    """``||Lambda_n||_2 / pi`` from coefficient sums alone (``p = 2`` only)."""
    if spec.p != 2:
        raise ConfigError("parseval_upper needs p = 2")
    prof = residual_profile(spec, n)
    tail = tail_sum(spec.family, n, q=2, tol=1e-8)
    return math.sqrt(math.pi * (float(np.dot(prof.head, prof.head)) + tail.value)) / math.pi


__all__ = ["ClassSpec", "ResidualProfile", "ExtremalWitness", "ErrorBracket", "CSV_HEADER",
           "residual_profile", "error_bracket", "upper_bound", "lower_bound", "parseval_upper"]
