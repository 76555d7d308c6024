"""Configuration-driven n-sweeps of the class error against order expressions.

A config file is flat ``key = value`` text.  Keys before the first
``[spec]`` header are global; each ``[spec]`` block describes one case::

    tol = 1e-4
    n_start = 8
    n_factor = 2
    n_count = 10

    [spec]
    name = power09
    family = power:r=0.9
    p = 2
    beta = 0
    s = 1
    bound = theory

Per-spec blocks may override ``tol``, the grid keys, ``ratio_low``,
``ratio_high`` and ``slope_tol``.
"""

from __future__ import annotations

import math
import os
import re
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import bounds
from .class_error import ClassSpec, error_bracket
from .errors import ConfigError, NumericalFailure
from .psi import PowerLog, parse_family

#: Environment variable holding the default number of worker processes.
WORKERS_ENV = "ZYGMUND_WORKERS"
CSV_COLUMNS = ("n", "U", "L", "B", "U_over_B", "L_over_B", "quad_err", "trunc_err")
BOUND_KINDS = ("theory", "mc", "theorem3")
VERDICTS = ("pass", "fail", "hypotheses-violated", "not-applicable")

_GRID_KEYS = ("n_start", "n_factor", "n_count")
_SHARED_KEYS = ("tol", "ratio_low", "ratio_high", "slope_tol") + _GRID_KEYS
_GLOBAL_KEYS = _SHARED_KEYS + ("csv_dir", "plot_dir", "workers")
_SPEC_KEYS = _SHARED_KEYS + ("name", "family", "p", "beta", "s", "filter", "bound")


@dataclass(frozen=True)
class Settings:
    tol: float = 1e-4
    n_start: int = 8
    n_factor: float = 2.0
    n_count: int = 10
    ratio_low: float = 0.05
    ratio_high: float = 20.0
    slope_tol: float = 0.15

    @property
    def n_grid(self) -> tuple[int, ...]:
        return geometric_grid(self.n_start, self.n_factor, self.n_count)

    @property
    def band(self) -> tuple[float, float]:
        return self.ratio_low, self.ratio_high


@dataclass(frozen=True)
class SweepSpec:
    name: str
    spec: ClassSpec
    bound: str
    settings: Settings


@dataclass(frozen=True)
class ExperimentConfig:
    specs: tuple[SweepSpec, ...] = ()
    csv_dir: Path | None = None
    plot_dir: Path | None = None
    workers: int = 1


def geometric_grid(start: int, factor: float, count: int) -> tuple[int, ...]:
    if start < 1 or count < 1 or not factor > 1:
        raise ConfigError("n grid needs start >= 1, count >= 1 and factor > 1")
    grid = tuple(int(round(start * factor ** j)) for j in range(count))
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(f"n grid {grid} is not strictly increasing")
    return grid


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        w = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV}={raw!r} is not an integer") from None
    if w < 1:
        raise ConfigError(f"{WORKERS_ENV} must be >= 1")
    return w


# -- parsing ----------------------------------------------------------------


_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _number(key: str, raw: str, where: str) -> float:
    if not _NUMBER.match(raw):
        raise ConfigError(f"{where}: {key} must be a decimal number, got {raw!r}")
    return float(raw)


def _settings(base: Settings, items: dict[str, str], where: str) -> Settings:
    upd = {}
    for key in _SHARED_KEYS:
        if key in items:
            v = _number(key, items[key], where)
            upd[key] = int(v) if key in ("n_start", "n_count") else v
            if key in ("n_start", "n_count") and v != int(v):
                raise ConfigError(f"{where}: {key} must be an integer")
    st = replace(base, **upd)
    if not st.tol > 0:
        raise ConfigError(f"{where}: tol must be positive")
    if not 0 < st.ratio_low < st.ratio_high:
        raise ConfigError(f"{where}: need 0 < ratio_low < ratio_high")
    if not st.slope_tol >= 0:
        raise ConfigError(f"{where}: slope_tol must be non-negative")
    st.n_grid  # validates the grid
    return st


def _build_spec(items: dict[str, str], base: Settings, index: int, where: str) -> SweepSpec:
    for req in ("family", "p", "beta"):
        if req not in items:
            raise ConfigError(f"{where}: missing key {req!r}")
    family = parse_family(items["family"])
    p = _number("p", items["p"], where)
    beta = _number("beta", items["beta"], where)
    s = _number("s", items.get("s", "1"), where)
    bound = items.get("bound", "theory")
    if bound not in BOUND_KINDS:
        raise ConfigError(f"{where}: bound must be one of {', '.join(BOUND_KINDS)}")
    if bound == "theorem3":
        if not isinstance(family, PowerLog):
            raise ConfigError(f"{where}: bound = theorem3 needs a powerlog family")
        if family.p != p:
            raise ConfigError(f"{where}: powerlog parameter p={family.p:g} differs from p={p:g}")
    spec = ClassSpec(family, beta, p, s, items.get("filter", "zygmund"))
    name = items.get("name", f"spec{index}")
    if not re.match(r"^[A-Za-z0-9_.-]+$", name):
        raise ConfigError(f"{where}: name {name!r} may only use letters, digits, '_', '.', '-'")
    return SweepSpec(name, spec, bound, _settings(base, items, where))


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    """Parse config text; raises :class:`ConfigError` with a line reference."""
    globals_: dict[str, str] = {}
    blocks: list[tuple[int, dict[str, str]]] = []
    current = globals_
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower() == "[spec]":
            blocks.append((lineno, {}))
            current = blocks[-1][1]
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        allowed = _SPEC_KEYS if current is not globals_ else _GLOBAL_KEYS
        if key not in allowed:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in current:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        current[key] = value

    base = _settings(Settings(), globals_, source)
    specs = tuple(_build_spec(items, base, i, f"{source}:{ln}")
                  for i, (ln, items) in enumerate(blocks, 1))
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise ConfigError(f"{source}: spec names must be unique")
    workers = default_workers()
    if "workers" in globals_:
        workers = int(_number("workers", globals_["workers"], source))
        if workers < 1:
            raise ConfigError(f"{source}: workers must be >= 1")
    path = lambda key: Path(globals_[key]) if key in globals_ else None  # noqa: E731
    return ExperimentConfig(specs, path("csv_dir"), path("plot_dir"), workers)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path))


# -- sweep ------------------------------------------------------------------


@dataclass(frozen=True)
class Row:
    n: int
    U: float
    L: float
    B: float
    quad_err: float
    trunc_err: float
    error: str = ""

    @property
    def U_over_B(self) -> float:
        return self.U / self.B

    @property
    def L_over_B(self) -> float:
        return self.L / self.B

    def csv(self) -> str:
        vals = (self.U, self.L, self.B, self.U_over_B, self.L_over_B, self.quad_err, self.trunc_err)
        return ",".join([str(self.n)] + [repr(float(v)) for v in vals])


@dataclass(frozen=True)
class RatioReport:
    name: str
    spec: ClassSpec
    bound: str
    rows: tuple[Row, ...]
    verdict: str
    max_ratio: float
    min_ratio: float
    slope_U: float
    slope_B: float
    conditions: str = ""
    messages: tuple[str, ...] = field(default=())

    def summary_line(self) -> str:
        return (f"{self.name:<16} {self.verdict:<20} ratio [{self.min_ratio:.4g}, {self.max_ratio:.4g}]  "
                f"slope U {self.slope_U:+.4f}  slope B {self.slope_B:+.4f}")


def bound_value(spec: ClassSpec, n: int, kind: str) -> bounds.BoundValue:
    if kind == "theory":
        return bounds.theory_bound(spec, n)
    if kind == "mc":
        return bounds.mc_simplified_bound(spec, n)
    return bounds.theorem3_bound(spec.family, n, spec.beta)


def compute_row(spec: ClassSpec, n: int, tol: float, kind: str) -> Row:
    """One sweep row; numerical failures are recorded instead of raised."""
    nan = math.nan
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            br = error_bracket(spec, n, tol, keep_witness=False)
        B = bound_value(spec, n, kind).value
    except (NumericalFailure, ValueError) as exc:
        return Row(n, nan, nan, nan, nan, nan, f"{type(exc).__name__}: {exc}")
    return Row(n, br.upper, br.lower, B, br.quad_err, br.trunc_err)


def _compute(args):
    return compute_row(*args)


def _verdict(item: SweepSpec, rows: list[Row], cond: bounds.ConditionsReport | None,
             applicable: bool) -> tuple[str, float, float, float, float, list[str]]:
    st = item.settings
    msgs = [f"n={r.n}: {r.error}" for r in rows if r.error]
    good = [r for r in rows if not r.error]
    nan = math.nan
    if not good:
        return "not-applicable", nan, nan, nan, nan, msgs
    n = [r.n for r in good]
    ratios = [r.U_over_B for r in good] + [r.L_over_B for r in good]
    hi, lo = max(ratios), min(ratios)
    try:
        sU = bounds.fit_slope(n, [r.U for r in good])
        sB = bounds.fit_slope(n, [r.B for r in good])
    except ValueError:
        sU = sB = nan
    if cond is not None and not cond.all_ok:
        msgs.append("hypotheses failed: " + ", ".join(cond.failed))
        return "hypotheses-violated", hi, lo, sU, sB, msgs
    if not applicable:
        msgs.append("bound flagged not applicable")
        return "not-applicable", hi, lo, sU, sB, msgs
    in_band = all(st.ratio_low <= r <= st.ratio_high for r in ratios)
    slope_ok = abs(sU - sB) <= st.slope_tol
    ok = in_band and slope_ok and len(good) == len(rows)
    if not in_band:
        msgs.append(f"ratio outside [{st.ratio_low:g}, {st.ratio_high:g}]")
    if not slope_ok:
        msgs.append(f"|slope U - slope B| = {abs(sU - sB):.4f} > {st.slope_tol:g}")
    return ("pass" if ok else "fail"), hi, lo, sU, sB, msgs


def run_sweep(cfg: ExperimentConfig, workers: int | None = None) -> list[RatioReport]:
    """One :class:`RatioReport` per spec, in config order.

    Rows are computed independently (in ``workers`` processes when above one)
    and gathered in grid order, so the output does not depend on ``workers``.
    """
    workers = cfg.workers if workers is None else workers
    jobs = [(it.spec, n, it.settings.tol, it.bound) for it in cfg.specs for n in it.settings.n_grid]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_compute, jobs))
    else:
        rows = [_compute(j) for j in jobs]

    reports, pos = [], 0
    for it in cfg.specs:
        k = len(it.settings.n_grid)
        chunk, pos = rows[pos:pos + k], pos + k
        try:
            cond = bounds.conditions_report(it.spec)
        except (NumericalFailure, ValueError) as exc:
            cond = None
            chunk_msg = f"conditions report failed: {exc}"
        else:
            chunk_msg = ""
        applicable = True
        if it.bound == "mc":
            applicable = bounds.mc_simplified_bound(it.spec, it.settings.n_grid[0]).applicable
        verdict, hi, lo, sU, sB, msgs = _verdict(it, chunk, cond, applicable)
        if chunk_msg:
            msgs.insert(0, chunk_msg)
        reports.append(RatioReport(it.name, it.spec, it.bound, tuple(chunk), verdict, hi, lo, sU, sB,
                                   cond.text() if cond else "", tuple(msgs)))
    return reports


# -- output -----------------------------------------------------------------


def report_csv(report: RatioReport) -> str:
    return "\n".join([",".join(CSV_COLUMNS)] + [r.csv() for r in report.rows]) + "\n"


def emit_outputs(reports, csv_dir=None, plot_dir=None) -> list[Path]:
    """Write ``<name>.csv`` and ``<name>_{U,L,B}.dat`` (``log n log value``) files."""
    written = []
    if csv_dir is not None:
        csv_dir = Path(csv_dir)
        csv_dir.mkdir(parents=True, exist_ok=True)
        for rep in reports:
            path = csv_dir / f"{rep.name}.csv"
            path.write_text(report_csv(rep))
            written.append(path)
    if plot_dir is not None:
        plot_dir = Path(plot_dir)
        plot_dir.mkdir(parents=True, exist_ok=True)
        for rep in reports:
            for curve in ("U", "L", "B"):
                lines = [f"# {rep.name} {curve}: log n, log value"]
                for r in rep.rows:
                    v = getattr(r, curve)
                    if np.isfinite(v) and v > 0:
                        lines.append(f"{math.log(r.n)!r} {math.log(v)!r}")
                path = plot_dir / f"{rep.name}_{curve}.dat"
                path.write_text("\n".join(lines) + "\n")
                written.append(path)
    return written


def summary_table(reports) -> str:
    lines = [f"{'spec':<16} {'verdict':<20} details"]
    for rep in reports:
        lines.append(rep.summary_line())
        lines += [f"    {m}" for m in rep.messages]
    return "\n".join(lines)


def verify(cfg: ExperimentConfig, workers: int | None = None) -> tuple[bool, list[RatioReport]]:
    """``True`` iff every spec whose hypotheses hold passes band and slope checks."""
    if not cfg.specs:
        warnings.warn("config has no [spec] blocks; nothing to verify", UserWarning, stacklevel=2)
        return True, []
    reports = run_sweep(cfg, workers)
    ok = all(r.verdict == "pass" for r in reports if r.verdict in ("pass", "fail"))
    return ok, reports


__all__ = ["Settings", "SweepSpec", "ExperimentConfig", "Row", "RatioReport", "CSV_COLUMNS",
           "WORKERS_ENV", "geometric_grid", "parse_config", "load_config", "compute_row",
           "run_sweep", "emit_outputs", "report_csv", "summary_table", "verify", "default_workers"]
