"""Named states: tabulated optima (d = 2..7), the approximate family, and the MES."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CoefficientMatrix, QuditError, lower_defect, mes

# Printed to six decimals; rows are Alice labels.
_OPTIMAL_PRINTED: dict[int, list[list[float]]] = {
    2: [
        [0.618034, 0.485868],
        [0, 0.618034],
    ],
    3: [
        [0.498328, 0.316483, 0.329301],
        [0, 0.441108, 0.316483],
        [0, 0, 0.498328],
    ],
    4: [
        [0.429796, 0.262169, 0.224332, 0.249934],
        [0, 0.376021, 0.217224, 0.224332],
        [0, 0, 0.376021, 0.262169],
        [0, 0, 0, 0.429796],
    ],
    5: [
        [0.383613, 0.230044, 0.189636, 0.175427, 0.201533],
        [0, 0.334102, 0.185035, 0.157012, 0.175427],
        [0, 0, 0.33072, 0.185035, 0.189636],
        [0, 0, 0, 0.334102, 0.230044],
        [0, 0, 0, 0, 0.383613],
    ],
    6: [
        [0.349686, 0.207877, 0.16845, 0.150559, 0.144455, 0.16883],
        [0, 0.303795, 0.165105, 0.134967, 0.125208, 0.144455],
        [0, 0, 0.29972, 0.160666, 0.134967, 0.150559],
        [0, 0, 0, 0.29972, 0.165105, 0.16845],
        [0, 0, 0, 0, 0.303795, 0.207877],
        [0, 0, 0, 0, 0, 0.349686],
    ],
    7: [
        [0.323377, 0.191279, 0.153539, 0.135037, 0.12545, 0.122887, 0.145233],
        [0, 0.280442, 0.150851, 0.121193, 0.108665, 0.104707, 0.122887],
        [0, 0, 0.276282, 0.145271, 0.117498, 0.108665, 0.12545],
        [0, 0, 0, 0.275414, 0.145271, 0.121193, 0.135037],
        [0, 0, 0, 0, 0.276282, 0.150851, 0.153539],
        [0, 0, 0, 0, 0, 0.280442, 0.191279],
        [0, 0, 0, 0, 0, 0, 0.323377],
    ],
}

HARDY_LIMIT_QUBIT = (5 * np.sqrt(5) - 11) / 2

PUBLISHED_OPTIMAL_SCORE = {2: 0.090170, 3: 0.141327, 4: 0.176512, 5: 0.203057, 6: 0.224221, 7: 0.241728}
PUBLISHED_APPROX_SCORE = {
    2: 0.088889, 3: 0.138426, 4: 0.171533, 5: 0.195869, 6: 0.214825, 7: 0.230172,
    10: 0.263168, 20: 0.316491, 30: 0.340836, 40: 0.355158, 50: 0.364700,
    60: 0.371554, 70: 0.376736, 80: 0.380803, 90: 0.384085, 100: 0.386793,
    200: 0.400116, 300: 0.405106, 400: 0.407749, 500: 0.409394, 600: 0.410520,
    700: 0.411341, 800: 0.411966, 900: 0.412459, 1000: 0.412857, 1200: 0.413464,
    1400: 0.413903, 1600: 0.414230, 1800: 0.414499, 2000: 0.414711,
}
# beyond the default scan cap; listed for reference, not reproduced here
PUBLISHED_APPROX_SCORE_LARGE_D = {
    2200: 0.414885, 2400: 0.415031, 2600: 0.415156, 2800: 0.415263, 3000: 0.415357,
    4000: 0.415687, 5000: 0.415889, 6000: 0.416024, 8000: 0.416196, 9000: 0.416254,
    10000: 0.416300, 11000: 0.416339, 12000: 0.416371, 13000: 0.416398, 14000: 0.416421,
    16000: 0.416459, 18000: 0.416489, 20000: 0.416513, 22000: 0.416533, 24000: 0.416549,
    26000: 0.416563, 28000: 0.416575,
}
PUBLISHED_ERROR_RATE = {2: 0.014207, 3: 0.020527, 4: 0.020288, 5: 0.035399, 6: 0.0419051, 7: 0.047807}
PUBLISHED_OPTIMAL_CONCURRENCE = {2: 0.763932, 3: 0.793888, 4: 0.813483, 5: 0.827702, 6: 0.838679, 7: 0.847510}
PUBLISHED_APPROX_CONCURRENCE = {2: 0.825885, 3: 0.845942, 4: 0.861735, 5: 0.874459, 6: 0.884926, 7: 0.893695, 800: 0.998062}

KINDS = ("optimal", "approx", "mes")


def optimal_state(d: int) -> CoefficientMatrix:
    """Tabulated optimal state for 2 <= d <= 7, renormalized against print rounding."""
    if d not in _OPTIMAL_PRINTED:
        raise QuditError(f"no tabulated optimal state for d = {d} (available: 2..7); use maximize_hardy instead")
    arr = np.array(_OPTIMAL_PRINTED[d], dtype=float)
    drift = abs(np.linalg.norm(arr) - 1.0)
    if drift >= 1e-4:
        raise QuditError(f"tabulated state for d = {d} drifts {drift:.2e} from unit norm; constants mistyped?")
    return CoefficientMatrix.normalized(arr)


def approx_coefficients(d: int) -> np.ndarray:
    """alpha_r = beta_r / sqrt(d + 1 - r) with beta_r proportional to 1/r and unit 2-norm."""
    if d < 1:
        raise QuditError(f"d must be >= 1, got {d}")
    r = np.arange(1, d + 1, dtype=float)
    beta = 1.0 / r
    beta /= np.linalg.norm(beta)
    return beta / np.sqrt(d + 1 - r)


def approx_state(d: int) -> CoefficientMatrix:
    """Upper-triangular Toeplitz state with alpha_{j-i+1} on superdiagonal j - i."""
    alpha = approx_coefficients(d)
    offset = np.subtract.outer(np.arange(d), np.arange(d)).T  # offset[i, j] = j - i
    arr = np.where(offset >= 0, alpha[np.clip(offset, 0, d - 1)], 0.0)
    # alpha_r appears d + 1 - r times, so the norm is sum(beta^2) = 1 up to rounding
    return CoefficientMatrix.normalized(arr)


def state_by_kind(kind: str, d: int) -> CoefficientMatrix:
    if kind == "optimal":
        return optimal_state(d)
    if kind == "approx":
        return approx_state(d)
    if kind == "mes":
        return mes(d)
    raise QuditError(f"unknown state kind {kind!r}; expected one of {', '.join(KINDS)}")


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    d: int
    kind: str
    state: CoefficientMatrix
    expected_score: float | None = None
    expected_concurrence: float | None = None


def catalog_entry(kind: str, d: int) -> CatalogEntry:
    state = state_by_kind(kind, d)
    if kind == "optimal":
        return CatalogEntry(d, kind, state, PUBLISHED_OPTIMAL_SCORE[d], PUBLISHED_OPTIMAL_CONCURRENCE[d])
    if kind == "approx":
        return CatalogEntry(d, kind, state, PUBLISHED_APPROX_SCORE.get(d))
    return CatalogEntry(d, kind, state, 0.0, 1.0 if d >= 2 else None)


@dataclass(frozen=True)
class StructureReport:
    d: int
    lower_defect: float
    antidiagonal_defect: float
    norm_defect: float

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "lower_defect": self.lower_defect,
            "antidiagonal_defect": self.antidiagonal_defect,
            "norm_defect": self.norm_defect,
        }


def validate_structure(H: CoefficientMatrix) -> StructureReport:
    h = H.entries
    # reflection across the anti-diagonal: h[i, j] <-> h[d-1-j, d-1-i]
    reflected = h[::-1, ::-1].T
    return StructureReport(
        d=H.d,
        lower_defect=lower_defect(h),
        antidiagonal_defect=float(np.max(np.abs(h - reflected))),
        norm_defect=float(abs(np.linalg.norm(h) - 1.0)),
    )
