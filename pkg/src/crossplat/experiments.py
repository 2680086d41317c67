"""Batch studies: platform comparison, temporal monitoring, scaling and tomography runs."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import channels, qcore
from .config import ExperimentConfig
from .errors import UsageError
from .platform.coordinator import collect_cross_platform, parse_platform
from .platform.sessions import (
    PerformanceMatrix,
    compare_sessions,
    load_session,
    performance_matrix,
)
from .protocol.dataset import DRAW_STREAM, collect_dataset
from .protocol.designs import enumerate_draws, get_design, sample_draws
from .protocol.estimators import estimate_max_fidelity
from .protocol.tomography import randomized_qpt

log = logging.getLogger(__name__)


def descriptors_from_config(config: ExperimentConfig):
    if not config.platforms:
        raise UsageError("no platforms configured")
    return [parse_platform(label, target, config.n, config.design) for label, target in config.platforms.items()]


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


@dataclass
class CompareResult:
    matrix: PerformanceMatrix | None
    complete: bool
    errors: dict
    paths: dict = field(default_factory=dict)


def compare_platforms(config: ExperimentConfig, out_dir=None, bias_correction=True) -> CompareResult:
    """Run the protocol on every configured platform and build the performance matrix.

    Sessions are written to ``<out>/sessions/<label>``; the matrix goes to
    ``<out>/matrix.{csv,json}``. A failed platform leaves truncated sessions
    and, if any common prefix survives, a matrix flagged as partial.
    """
    descriptors = descriptors_from_config(config)
    if len(descriptors) < 2:
        raise UsageError("compare needs at least two platforms")
    out = Path(out_dir or config.out_dir)
    result = collect_cross_platform(descriptors, config, session_root=out / "sessions")
    datasets = result.datasets
    if not result.complete:
        from .protocol.dataset import trim_to_common_prefix

        datasets = trim_to_common_prefix(*datasets)
        if datasets[0].n_draws < 2:
            return CompareResult(None, False, result.errors)
    matrix = performance_matrix(datasets, bias_correction=bias_correction)
    paths = matrix.write(out, "matrix" if result.complete else "matrix_partial")
    return CompareResult(matrix, result.complete, result.errors, paths)


# ---------------------------------------------------------------------------
# monitor
# ---------------------------------------------------------------------------


def monitor(config: ExperimentConfig, session_dir, days: int = 7, channel: str | None = None,
            overrides: dict | None = None, load_only: bool = False, bias_correction=True):
    """One session per day (``DAY_1`` ... ``DAY_<days>``), then the day-by-day matrix.

    Existing session directories are loaded, never re-run. Missing days are
    run against ``channel`` (or ``overrides[day]``) with the shared draw list
    and an independent per-day shot stream.
    """
    session_dir = Path(session_dir)
    overrides = overrides or {}
    records = []
    for day in range(1, days + 1):
        sid = f"DAY_{day}"
        path = session_dir / sid
        if path.exists() or load_only:
            records.append(load_session(path))
            continue
        target = overrides.get(day, channel)
        if not target:
            raise UsageError(f"no channel for {sid} and no session at {path}")
        desc = parse_platform(sid, target, config.n, config.design)
        result = collect_cross_platform([desc], config, session_root=session_dir, platform_indices=[day])
        if not result.complete:
            raise UsageError(f"{sid} failed: {result.errors}")
        records.extend(result.records)
    return compare_sessions(records, bias_correction)


# ---------------------------------------------------------------------------
# scaling studies
# ---------------------------------------------------------------------------


def self_comparison_error(ch: channels.KrausChannel, n_draws: int, shots: int, seed: int, rep: int,
                          design: str = "clifford24", bias_correction: bool = True) -> float:
    """|F_max - 1| between two independent finite-shot runs of ``ch`` on shared draws."""
    draws = sample_draws(get_design(design), ch.n, n_draws, qcore.substream(seed, DRAW_STREAM, rep))
    a = collect_dataset(ch, design, n_draws, shots, qcore.derive_seed(seed, rep, 1), draws=draws, timestamp="")
    b = collect_dataset(ch, design, n_draws, shots, qcore.derive_seed(seed, rep, 2), draws=draws, timestamp="")
    return abs(estimate_max_fidelity(a, b, bias_correction).f_max - 1.0)


def mean_error(ch, n_draws, shots, seed, reps, design="clifford24", bias_correction=True) -> float:
    return float(np.mean([
        self_comparison_error(ch, n_draws, shots, seed, r, design, bias_correction) for r in range(reps)
    ]))


def loglog_slope(x, y) -> tuple[float, float]:
    """Least-squares slope of log y against log x and its standard error."""
    coef, cov = np.polyfit(np.log(x), np.log(y), 1, cov=len(x) > 2)
    return float(coef[0]), float(np.sqrt(cov[0, 0])) if len(x) > 2 else float("nan")


@dataclass
class BudgetScaling:
    n: int
    rows: list  # (budget, n_draws, shots, mean_error)
    slope: float
    slope_stderr: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "budget", "n_draws", "shots", "mean_abs_error"])
        for row in self.rows:
            w.writerow([self.n, *row])
        w.writerow([])
        w.writerow(["loglog_slope", self.slope, "stderr", self.slope_stderr])
        return buf.getvalue()


def scaling_budget(ch: channels.KrausChannel, shots_list, n_draws: int = 100, reps: int = 5,
                   seed: int = 0, design: str = "clifford24", bias_correction: bool = True) -> BudgetScaling:
    """Mean self-comparison error against the budget 2^n N_U M, sweeping M at fixed N_U."""
    if reps < 1 or len(shots_list) < 2:
        raise UsageError("need >= 1 repetition and >= 2 budget points")
    rows = []
    for m in shots_list:
        err = mean_error(ch, n_draws, int(m), seed, reps, design, bias_correction)
        rows.append(((1 << ch.n) * n_draws * int(m), n_draws, int(m), err))
    budgets = [r[0] for r in rows]
    errs = [max(r[3], 1e-300) for r in rows]
    slope, se = loglog_slope(budgets, errs)
    return BudgetScaling(ch.n, rows, slope, se)


@dataclass
class QubitScaling:
    process: str
    rows: list  # (n, minimal shots, 2^n * shots, censored)
    exponent: float
    exponent_stderr: float
    epsilon: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["process", "n", "min_shots", "runs_per_unitary", "censored"])
        for row in self.rows:
            w.writerow([self.process, *row])
        w.writerow([])
        w.writerow(["exponent_b", self.exponent, "stderr", self.exponent_stderr])
        return buf.getvalue()


def minimal_shots(ch, epsilon: float, n_draws: int = 100, reps: int = 5, seed: int = 0,
                  max_shots: int = 1 << 16, design: str = "clifford24", bias_correction: bool = True,
                  rel_tol: float = 0.05):
    """Smallest M whose mean self-comparison error is <= epsilon.

    Doubling bracket then bisection to ``rel_tol`` relative width; the same
    seeds are reused for every M. Returns ``(M, censored)`` where censored
    means the target was not met at ``max_shots``.
    """
    def ok(m):
        return mean_error(ch, n_draws, m, seed, reps, design, bias_correction) <= epsilon

    lo, hi = 1, 2
    while not ok(hi):
        lo, hi = hi, hi * 2
        if hi > max_shots:
            return max_shots, True
    while hi - lo > max(1, int(rel_tol * lo)):
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi, False


def scaling_qubits(process: str, qubit_range, epsilon: float = 0.05, n_draws: int = 100, reps: int = 5,
                   seed: int = 0, max_shots: int = 1 << 16, design: str = "clifford24",
                   bias_correction: bool = True) -> QubitScaling:
    """Fit b in 2^n M_min ~ 2^(b n) for the GHZ or local-rotation process."""
    factories = {
        "ghz": channels.ghz_process,
        "rotation": lambda n: channels.local_rotation_process(n, seed),
    }
    if process not in factories:
        raise UsageError(f"unknown scaling process {process!r}; use ghz or rotation")
    rows = []
    for n in qubit_range:
        m, censored = minimal_shots(factories[process](n), epsilon, n_draws, reps, seed, max_shots,
                                    design, bias_correction)
        rows.append((n, m, (1 << n) * m, censored))
        log.info("%s n=%d: M_min=%d%s", process, n, m, " (censored)" if censored else "")
    usable = [r for r in rows if not r[3]]
    if len(usable) < 2:
        raise UsageError("fewer than two uncensored points; raise max_shots")
    ns = np.array([r[0] for r in usable], dtype=float)
    y = np.log2([r[2] for r in usable])
    coef, cov = np.polyfit(ns, y, 1, cov=len(ns) > 2)
    se = float(np.sqrt(cov[0, 0])) if len(ns) > 2 else float("nan")
    return QubitScaling(process, rows, float(coef[0]), se, epsilon)


# ---------------------------------------------------------------------------
# tomography
# ---------------------------------------------------------------------------


def run_qpt(config: ExperimentConfig, channel_spec: str, out_dir=None, exact: bool = False,
            project: bool = False) -> dict:
    """Reconstruct the Choi matrix of a simulated platform and write it with diagnostics.

    ``exact`` uses exact probabilities and (for finite designs at n = 1) the
    full draw enumeration.
    """
    ch = channels.parse_channel_spec(channel_spec, config.n)
    if exact:
        draws = enumerate_draws(config.design, config.n) if config.n == 1 and config.design != "haar" else None
        ds = collect_dataset(ch, config.design, config.n_draws, None, config.seed, draws=draws)
    else:
        ds = collect_dataset(ch, config.design, config.n_draws, config.shots, config.seed,
                             input_mode=config.input_mode)
    result = randomized_qpt(ds, project=project)
    diag = result.diagnostics()
    oracle = ch.choi()
    diag["trace_distance_to_oracle"] = channels.trace_distance(result.matrix, oracle)
    diag["max_entry_error"] = float(np.max(np.abs(result.matrix - oracle)))
    diag["n_draws"] = ds.n_draws
    diag["shots"] = ds.shots
    out = Path(out_dir or config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "choi.csv").write_text(choi_to_csv(result.matrix), encoding="utf-8")
    (out / "diagnostics.json").write_text(json.dumps(diag, indent=1) + "\n", encoding="utf-8")
    return diag


def choi_to_csv(m: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "real", "imag"])
    for (i, j), z in np.ndenumerate(m):
        w.writerow([i, j, repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def choi_from_csv(text: str) -> np.ndarray:
    rows = list(csv.DictReader(io.StringIO(text)))
    dim = int(np.sqrt(len(rows)))
    m = np.zeros((dim, dim), dtype=complex)
    for r in rows:
        m[int(r["row"]), int(r["col"])] = float(r["real"]) + 1j * float(r["imag"])
    return m
