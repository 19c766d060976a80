"""Maximization of P(A2<B2) over triangular states, and the approximate-family scan."""

from __future__ import annotations

import csv
import logging
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .catalog import approx_state, optimal_state
from .core import CoefficientMatrix, QuditError, concurrence
from .engine import HardyReport, hardy_score, score_only

log = logging.getLogger(__name__)

SCAN_CAP = 2000
CSV_HEADER = ("d", "p_app", "concurrence", "wall_time_s")


@dataclass(frozen=True)
class OptimizerConfig:
    d: int
    symmetric: bool = False
    restarts: int = 1
    max_iterations: int = 5000
    step_tolerance: float = 1e-10
    score_tolerance: float = 1e-13
    seed: int = 0
    perturbation: float = 0.1
    workers: int = 1

    def __post_init__(self) -> None:
        if self.d < 2:
            raise QuditError(f"optimizer needs d >= 2, got {self.d}")
        if self.restarts < 1:
            raise QuditError("restarts must be >= 1")
        if self.step_tolerance <= 0 or self.score_tolerance <= 0:
            raise QuditError("tolerances must be positive")


class TriangularParametrization:
    """Maps a real parameter vector to a normalized nonnegative upper-triangular state.

    Entries are ``|x|`` placed on the upper triangle (or on one representative
    per anti-diagonal reflection orbit) and then projected to the unit sphere.
    """

    def __init__(self, d: int, symmetric: bool = False):
        self.d = d
        self.symmetric = symmetric
        rows, cols = np.triu_indices(d)
        if symmetric:
            # orbit of (i, j) is {(i, j), (d-1-j, d-1-i)}; keep the lexicographically smaller
            mirror_rows, mirror_cols = d - 1 - cols, d - 1 - rows
            keep = (rows < mirror_rows) | ((rows == mirror_rows) & (cols <= mirror_cols))
            reps = list(zip(rows[keep], cols[keep]))
            index = {rc: k for k, rc in enumerate(reps)}
            self.slot = np.array(
                [index.get((r, c), index.get((d - 1 - c, d - 1 - r))) for r, c in zip(rows, cols)]
            )
            self.size = len(reps)
        else:
            self.slot = np.arange(rows.size)
            self.size = rows.size
        self.rows, self.cols = rows, cols

    def matrix(self, x: np.ndarray) -> np.ndarray:
        H = np.zeros((self.d, self.d))
        H[self.rows, self.cols] = np.abs(x)[self.slot]
        nrm = np.linalg.norm(H)
        if nrm == 0:
            raise QuditError("parameter vector maps to the zero state")
        return H / nrm

    def params(self, H: np.ndarray) -> np.ndarray:
        x = np.zeros(self.size)
        vals = np.abs(np.asarray(H)[self.rows, self.cols])
        np.add.at(x, self.slot, vals)
        counts = np.bincount(self.slot, minlength=self.size)
        return x / counts


@dataclass
class _Attempt:
    index: int
    score: float
    x: np.ndarray
    converged: bool
    evaluations: int = 0


def _objective(param: TriangularParametrization):
    def f(x: np.ndarray) -> float:
        try:
            return -score_only(param.matrix(x))
        except QuditError:
            return 1.0
    return f


def _local_search(index: int, x0: np.ndarray, param: TriangularParametrization, cfg: OptimizerConfig) -> _Attempt:
    f = _objective(param)
    simplex = minimize(
        f,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": cfg.max_iterations,
            "maxfev": 40 * cfg.max_iterations,
            "xatol": cfg.step_tolerance,
            "fatol": cfg.score_tolerance,
            "adaptive": True,
        },
    )
    # finite-difference ascent from the simplex optimum
    refine = minimize(f, simplex.x, method="BFGS", options={"maxiter": cfg.max_iterations, "gtol": 1e-9})
    best = refine if refine.fun <= simplex.fun else simplex
    converged = bool(refine.success or abs(refine.fun - simplex.fun) <= cfg.score_tolerance or refine.status == 2)
    x = best.x / np.linalg.norm(best.x)
    log.debug("restart %d: score %.9f (simplex %.9f)", index, -best.fun, -simplex.fun)
    return _Attempt(index, float(-best.fun), x, converged, int(simplex.nfev + refine.nfev))


def starting_points(param: TriangularParametrization, cfg: OptimizerConfig) -> list[np.ndarray]:
    """Restart 0 is the approximate-family state; the rest are seeded perturbations of it."""
    base = param.params(approx_state(cfg.d).entries.real)
    rng = np.random.default_rng(cfg.seed)
    points = [base]
    for _ in range(cfg.restarts - 1):
        noise = rng.normal(scale=cfg.perturbation * base.mean(), size=base.size)
        points.append(np.abs(base + noise))
    return points


def maximize_hardy(config: OptimizerConfig) -> HardyReport:
    param = TriangularParametrization(config.d, config.symmetric)
    points = starting_points(param, config)
    # BFGS line-search stalls at the optimum are expected; filter once here since
    # catch_warnings is not thread-safe inside the workers
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="The line search algorithm")
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                attempts = list(pool.map(lambda ix: _local_search(ix[0], ix[1], param, config), enumerate(points)))
        else:
            attempts = [_local_search(i, x0, param, config) for i, x0 in enumerate(points)]
    # highest score wins; ties go to the lowest restart index
    best = max(attempts, key=lambda a: (a.score, -a.index))
    state = CoefficientMatrix(param.matrix(best.x))
    report = hardy_score(state)
    worst = max(report.residuals)
    if worst > 1e-8:
        raise QuditError(f"optimized state violates the zero constraints by {worst:.3e}")
    return HardyReport(
        d=report.d,
        score=report.score,
        residuals=report.residuals,
        concurrence=report.concurrence,
        state=state,
        measurement_mode="constructed",
        scenario=report.scenario,
        converged=best.converged,
    )


@dataclass(frozen=True)
class ScanRow:
    d: int
    p_app: float
    concurrence_app: float
    wall_time: float
    error: str | None = None

    def csv_fields(self) -> list[str]:
        return [str(self.d), f"{self.p_app:.9g}", f"{self.concurrence_app:.9g}", f"{self.wall_time:.9g}"]


def _scan_point(d: int, cap: int) -> ScanRow:
    start = time.perf_counter()
    try:
        if d < 2:
            raise QuditError(f"scan needs d >= 2, got {d}")
        if d > cap:
            raise QuditError(f"d = {d} exceeds the scan cap {cap}")
        state = approx_state(d)
        score = hardy_score(state).score
        conc = concurrence(state)
    except (QuditError, np.linalg.LinAlgError, MemoryError) as exc:
        return ScanRow(d, math.nan, math.nan, time.perf_counter() - start, str(exc))
    return ScanRow(d, score, conc, time.perf_counter() - start)


class ScanError(QuditError):
    pass


def write_scan_csv(rows: Iterable[ScanRow], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_fields())


def read_scan_csv(fh: IO[str]) -> list[ScanRow]:
    reader = csv.reader(fh)
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise QuditError(f"unexpected scan header {header}")
    return [ScanRow(int(d), float(p), float(c), float(t)) for d, p, c, t in reader]


def scan_approx(
    d_values: Sequence[int],
    output: IO[str] | None = None,
    cap: int = SCAN_CAP,
    workers: int = 1,
) -> list[ScanRow]:
    """Score the approximate family at each d (no optimization), rows in input order."""
    d_values = [int(d) for d in d_values]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda d: _scan_point(d, cap), d_values))
    else:
        rows = [_scan_point(d, cap) for d in d_values]
    if output is not None:
        write_scan_csv(rows, output)
    ok = [r for r in rows if r.error is None]
    if all(a < b for a, b in zip(d_values, d_values[1:])):
        for prev, cur in zip(ok, ok[1:]):
            if not cur.p_app > prev.p_app:
                raise ScanError(f"scan is not increasing between d = {prev.d} and d = {cur.d}")
    return rows


@dataclass
class ConsistencyReport:
    d: int
    optimizer_score: float
    catalog_score: float
    max_entry_gap: float
    consistent: bool
    optimizer_state: np.ndarray = field(repr=False)
    catalog_state: np.ndarray = field(repr=False)

    @property
    def score_gap(self) -> float:
        return abs(self.optimizer_score - self.catalog_score)


def verify_optimum_consistency(
    d: int,
    config: OptimizerConfig | None = None,
    score_tol: float = 1e-3,
    entry_tol: float = 1e-2,
) -> ConsistencyReport:
    """Compare an optimizer run with the tabulated optimum at the same d."""
    catalog = optimal_state(d)
    config = config or OptimizerConfig(d=d)
    found = maximize_hardy(config)
    # both states are real nonnegative, so the only residual gauge is a global phase
    opt_abs = np.abs(found.state.entries)
    cat_abs = np.abs(catalog.entries)
    gap = float(np.max(np.abs(opt_abs - cat_abs)))
    cat_score = hardy_score(catalog).score
    consistent = abs(found.score - cat_score) <= score_tol and gap <= entry_tol
    return ConsistencyReport(d, found.score, cat_score, gap, consistent, opt_abs, cat_abs)
