"""Hardy probabilities, the zero-constraint system and the Bell functional.

Probabilities are evaluated as bilinear forms on the coefficient matrix: the
amplitude of outcome pair (m, n) is ``u_m^dag H conj(v_n)``, so the d^2 x d^2
density matrix is never formed.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import unitary_group

from .core import (
    PROB_TOL,
    CoefficientMatrix,
    MeasurementBasis,
    QuditError,
    Side,
    concurrence,
    constraint_measurements,
    mes,
)

LHV_CAP = 12
SETTING_PAIRS = ("11", "12", "21", "22")


@dataclass(frozen=True)
class MeasurementScenario:
    a1: MeasurementBasis
    a2: MeasurementBasis
    b1: MeasurementBasis
    b2: MeasurementBasis

    def __post_init__(self) -> None:
        dims = {self.a1.d, self.a2.d, self.b1.d, self.b2.d}
        if len(dims) != 1:
            raise QuditError(f"scenario bases have mismatched dimensions {sorted(dims)}")

    @property
    def d(self) -> int:
        return self.a1.d

    def setting(self, party: Side | str, index: int) -> MeasurementBasis:
        party = Side(party)
        if index not in (1, 2):
            raise QuditError(f"setting index must be 1 or 2, got {index}")
        if party is Side.ALICE:
            return self.a1 if index == 1 else self.a2
        return self.b1 if index == 1 else self.b2


@dataclass(frozen=True)
class DeterministicStrategy:
    a1: int
    a2: int
    b1: int
    b2: int

    def check(self, d: int) -> None:
        if not all(0 <= x < d for x in (self.a1, self.a2, self.b1, self.b2)):
            raise QuditError(f"strategy {self} has labels outside 0..{d - 1}")

    def ordered_indicators(self) -> tuple[int, int, int, int]:
        """Indicators of A2<B1, B1<A1, A1<B2, A2<B2 for this assignment."""
        return (
            int(self.a2 < self.b1),
            int(self.b1 < self.a1),
            int(self.a1 < self.b2),
            int(self.a2 < self.b2),
        )


@dataclass(frozen=True, eq=False)
class HardyReport:
    d: int
    score: float
    residuals: tuple[float, float, float]
    concurrence: float | None
    state: CoefficientMatrix
    measurement_mode: str = "constructed"
    scenario: MeasurementScenario | None = field(default=None, repr=False)
    converged: bool = True

    def ordered_probabilities(self) -> tuple[float, float, float, float]:
        return (*self.residuals, self.score)

    def to_dict(self, include_state: bool = True) -> dict:
        payload = {
            "d": self.d,
            "score": self.score,
            "residuals": list(self.residuals),
            "concurrence": self.concurrence,
            "measurement_mode": self.measurement_mode,
            "converged": self.converged,
        }
        if include_state:
            payload["state"] = self.state.to_dict()
        return payload

    def to_json(self, include_state: bool = True) -> str:
        return json.dumps(self.to_dict(include_state))

    @classmethod
    def from_dict(cls, payload: dict) -> "HardyReport":
        if "state" not in payload:
            raise QuditError("report payload has no embedded state")
        return cls(
            d=int(payload["d"]),
            score=float(payload["score"]),
            residuals=tuple(float(r) for r in payload["residuals"]),
            concurrence=None if payload.get("concurrence") is None else float(payload["concurrence"]),
            state=CoefficientMatrix.from_dict(payload["state"]),
            measurement_mode=payload.get("measurement_mode", "constructed"),
            converged=bool(payload.get("converged", True)),
        )


def _check_dims(H: CoefficientMatrix, *bases: MeasurementBasis) -> None:
    for b in bases:
        if b.d != H.d:
            raise QuditError(f"basis dimension {b.d} does not match state dimension {H.d}")


def joint_table(H: CoefficientMatrix, basis_a: MeasurementBasis, basis_b: MeasurementBasis) -> np.ndarray:
    """All d x d joint probabilities; rows are Alice outcomes."""
    _check_dims(H, basis_a, basis_b)
    amp = basis_a.vectors.conj().T @ H.entries @ basis_b.vectors.conj()
    return np.abs(amp) ** 2


def joint_probability(
    H: CoefficientMatrix, basis_a: MeasurementBasis, m: int, basis_b: MeasurementBasis, n: int
) -> float:
    _check_dims(H, basis_a, basis_b)
    d = H.d
    if not (0 <= m < d and 0 <= n < d):
        raise QuditError(f"outcome pair ({m}, {n}) out of range for d = {d}")
    amp = basis_a.vector(m).conj() @ H.entries @ basis_b.vector(n).conj()
    return float(abs(amp) ** 2)


def ordered_from_table(table: np.ndarray, alice_first: bool) -> float:
    if alice_first:
        return float(np.triu(table, 1).sum())
    return float(np.tril(table, -1).sum())


def ordered_probability(
    H: CoefficientMatrix,
    first: tuple[MeasurementBasis, Side | str],
    second: tuple[MeasurementBasis, Side | str],
) -> float:
    """P(first < second): first party's outcome strictly below the second's."""
    (basis_x, party_x), (basis_y, party_y) = first, second
    party_x, party_y = Side(party_x), Side(party_y)
    if party_x is party_y:
        raise QuditError("ordered probability needs one Alice and one Bob setting")
    if party_x is Side.ALICE:
        return ordered_from_table(joint_table(H, basis_x, basis_y), alice_first=True)
    return ordered_from_table(joint_table(H, basis_y, basis_x), alice_first=False)


def hardy_residuals(H: CoefficientMatrix, scenario: MeasurementScenario) -> tuple[float, float, float]:
    """P(A2<B1), P(B1<A1), P(A1<B2)."""
    A, B = Side.ALICE, Side.BOB
    return (
        ordered_probability(H, (scenario.a2, A), (scenario.b1, B)),
        ordered_probability(H, (scenario.b1, B), (scenario.a1, A)),
        ordered_probability(H, (scenario.a1, A), (scenario.b2, B)),
    )


def constructed_scenario(H: CoefficientMatrix) -> MeasurementScenario:
    a2, b2 = constraint_measurements(H)
    std = MeasurementBasis.standard(H.d)
    return MeasurementScenario(a1=std, a2=a2, b1=std, b2=b2)


def evaluate(H: CoefficientMatrix, scenario: MeasurementScenario, mode: str = "explicit") -> HardyReport:
    """Score an explicit scenario without optimizing anything."""
    _check_dims(H, scenario.a1)
    score = ordered_probability(H, (scenario.a2, Side.ALICE), (scenario.b2, Side.BOB))
    return HardyReport(
        d=H.d,
        score=score,
        residuals=hardy_residuals(H, scenario),
        concurrence=concurrence(H) if H.d >= 2 else None,
        state=H,
        measurement_mode=mode,
        scenario=scenario,
    )


def hardy_score(H: CoefficientMatrix) -> HardyReport:
    """P(A2<B2) with A1 = B1 standard and A2, B2 forced by the zero constraints."""
    report = evaluate(H, constructed_scenario(H), mode="constructed")
    worst = max(report.residuals)
    if worst > PROB_TOL:
        raise QuditError(f"constructed measurements leave a residual of {worst:.3e}")
    return report


def score_only(H: np.ndarray) -> float:
    """Fast path for optimizers: score of a raw normalized upper-triangular array."""
    state = CoefficientMatrix(H)
    a2, b2 = constraint_measurements(state)
    return ordered_from_table(joint_table(state, a2, b2), alice_first=True)


def zg_functional(p: Sequence[float]) -> float:
    """P(A2<B1) + P(B1<A1) + P(A1<B2) - P(A2<B2); non-negative for local models."""
    if len(p) != 4:
        raise QuditError(f"expected four ordered probabilities, got {len(p)}")
    return float(p[0] + p[1] + p[2] - p[3])


@dataclass(frozen=True)
class LhvResult:
    d: int
    minimum: float
    minimizers: tuple[DeterministicStrategy, ...]
    n_strategies: int

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "minimum": self.minimum,
            "n_strategies": self.n_strategies,
            "n_minimizers": len(self.minimizers),
            "all_equal_is_minimizer": DeterministicStrategy(0, 0, 0, 0) in self.minimizers,
            "minimizers": [[s.a1, s.a2, s.b1, s.b2] for s in self.minimizers],
        }


def lhv_minimum(d: int, cap: int = LHV_CAP) -> LhvResult:
    """Minimum of the Bell functional over all d^4 deterministic strategies."""
    if d < 1:
        raise QuditError(f"d must be >= 1, got {d}")
    if d > cap:
        raise QuditError(f"d = {d} exceeds the enumeration cap of {cap} ({d ** 4} strategies); raise the cap explicitly")
    a1, a2, b1, b2 = np.indices((d, d, d, d)).reshape(4, -1)
    values = (a2 < b1).astype(int) + (b1 < a1) + (a1 < b2) - (a2 < b2)
    low = int(values.min())
    hits = np.flatnonzero(values == low)
    minimizers = tuple(DeterministicStrategy(int(a1[k]), int(a2[k]), int(b1[k]), int(b2[k])) for k in hits)
    return LhvResult(d=d, minimum=float(low), minimizers=minimizers, n_strategies=d**4)


@dataclass(frozen=True)
class NogoReport:
    d: int
    trials: int
    max_score: float
    max_residual: float
    constructed_score: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "trials": self.trials,
            "max_score": self.max_score,
            "max_residual": self.max_residual,
            "constructed_score": self.constructed_score,
            "passed": self.passed,
        }


def random_phase_diagonal(d: int, rng: np.random.Generator) -> np.ndarray:
    return np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, size=d)))


def nogo_scenario(d1: np.ndarray, d2: np.ndarray, d3: np.ndarray, u1: np.ndarray) -> MeasurementScenario:
    """Rotations solving U1 V1^T = D1, U1 V2^T = D2, U2 V1^T = D3 for a given U1."""
    v1 = (u1.conj().T @ d1).T
    v2 = (u1.conj().T @ d2).T
    u2 = d3 @ d1.conj().T @ u1
    return MeasurementScenario(
        a1=MeasurementBasis.from_rotation(u1),
        a2=MeasurementBasis.from_rotation(u2),
        b1=MeasurementBasis.from_rotation(v1),
        b2=MeasurementBasis.from_rotation(v2),
    )


def mes_nogo_check(d: int, trials: int = 100, seed: int = 0, tol: float = 1e-12) -> NogoReport:
    """Maximally entangled states satisfying the three zero constraints give P(A2<B2) = 0."""
    if d < 2:
        raise QuditError("no-go check needs d >= 2")
    rng = np.random.default_rng(seed)
    state = mes(d)
    max_score = 0.0
    max_res = 0.0
    for _ in range(trials):
        d1, d2, d3 = (random_phase_diagonal(d, rng) for _ in range(3))
        u1 = unitary_group.rvs(d, random_state=rng)
        report = evaluate(state, nogo_scenario(d1, d2, d3, u1))
        max_score = max(max_score, report.score)
        max_res = max(max_res, *report.residuals)
    constructed = hardy_score(state).score
    return NogoReport(
        d=d,
        trials=trials,
        max_score=max_score,
        max_residual=max_res,
        constructed_score=constructed,
        passed=max_score <= tol and max_res <= tol and constructed <= PROB_TOL,
    )


def _parse_pair(pair: str | int) -> tuple[int, int]:
    label = str(pair)
    if label not in SETTING_PAIRS:
        raise QuditError(f"setting pair must be one of {', '.join(SETTING_PAIRS)}, got {pair!r}")
    return int(label[0]), int(label[1])


def sample_outcomes(
    H: CoefficientMatrix,
    scenario: MeasurementScenario,
    setting_pair: str | int,
    n_samples: int,
    seed: int,
) -> np.ndarray:
    """Counts of i.i.d. outcome pairs (rows: Alice) drawn with numpy's PCG64.

    Sampling is inverse-CDF over the flattened table, so zero-probability
    cells can never be drawn.
    """
    i, j = _parse_pair(setting_pair)
    if n_samples < 1:
        raise QuditError("n_samples must be >= 1")
    table = joint_table(H, scenario.setting(Side.ALICE, i), scenario.setting(Side.BOB, j))
    flat = table.ravel()
    cdf = np.cumsum(flat)
    cdf /= cdf[-1]
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.random(n_samples)
    cells = np.searchsorted(cdf, draws, side="right")
    cells = np.minimum(cells, flat.size - 1)
    return np.bincount(cells, minlength=flat.size).reshape(table.shape)


def strategies(d: int) -> Iterable[DeterministicStrategy]:
    for a1, a2, b1, b2 in itertools.product(range(d), repeat=4):
        yield DeterministicStrategy(a1, a2, b1, b2)
