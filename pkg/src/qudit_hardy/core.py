"""Linear-algebra substrate for pure two-qudit states.

A pure state ``sum_ij h_ij |i>_A |j>_B`` is stored as its d x d coefficient
matrix ``H`` (row = Alice label, column = Bob label).  Local unitaries act as
``H -> U H V^T`` and the reduced densities are ``H H^dag`` and ``H^T conj(H)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any, Sequence

import numpy as np

NORM_TOL = 1e-12
ZERO_TOL = 1e-12
PROB_TOL = 1e-10
DESERIALIZE_TOL = 1e-9


class QuditError(ValueError):
    """Raised when an input violates a domain invariant."""


class ConstructionError(QuditError):
    """A nested-complement level has no admissible vector."""

    def __init__(self, level: int, message: str):
        super().__init__(f"level {level}: {message}")
        self.level = level


class Side(str, Enum):
    ALICE = "A"
    BOB = "B"


def _as_complex_array(data: Any, name: str) -> np.ndarray:
    arr = np.array(data, dtype=np.complex128)
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise QuditError(f"{name} contains non-finite entries")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    """Normalized d x d amplitude matrix of a pure two-qudit state."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_complex_array(self.entries, "coefficient matrix")
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise QuditError(f"coefficient matrix must be square d x d with d >= 1, got shape {arr.shape}")
        defect = abs(np.linalg.norm(arr) - 1.0)
        if defect > NORM_TOL:
            raise QuditError(f"coefficient matrix is not normalized (|norm - 1| = {defect:.3e})")
        object.__setattr__(self, "entries", _frozen(arr))

    @classmethod
    def normalized(cls, data: Any) -> "CoefficientMatrix":
        """Build a state from unnormalized amplitudes."""
        arr = _as_complex_array(data, "coefficient matrix")
        norm = np.linalg.norm(arr)
        if norm == 0:
            raise QuditError("cannot normalize the zero matrix")
        return cls(arr / norm)

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    def is_upper_triangular(self, tol: float = ZERO_TOL) -> bool:
        return lower_defect(self.entries) <= tol

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in self.entries],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "CoefficientMatrix":
        try:
            d = int(payload["d"])
            arr = np.array(
                [[complex(re, im) for re, im in row] for row in payload["entries"]],
                dtype=np.complex128,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise QuditError(f"malformed state payload: {exc}") from exc
        if arr.shape != (d, d):
            raise QuditError(f"entries shape {arr.shape} does not match d = {d}")
        arr = _as_complex_array(arr, "coefficient matrix")
        defect = abs(np.linalg.norm(arr) - 1.0)
        if defect > DESERIALIZE_TOL:
            raise QuditError(f"serialized state is not normalized (|norm - 1| = {defect:.3e})")
        if defect > NORM_TOL:
            arr = arr / np.linalg.norm(arr)
        return cls(arr)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "CoefficientMatrix":
        return cls.from_dict(json.loads(text))


def lower_defect(arr: np.ndarray) -> float:
    """Largest modulus strictly below the diagonal."""
    low = np.tril(np.abs(arr), -1)
    return float(low.max()) if low.size else 0.0


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_complex_array(self.entries, "density matrix")
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise QuditError("density matrix must be square")
        if np.max(np.abs(arr - arr.conj().T)) > NORM_TOL:
            raise QuditError("density matrix is not Hermitian")
        if abs(np.trace(arr) - 1.0) > NORM_TOL:
            raise QuditError("density matrix does not have unit trace")
        if np.linalg.eigvalsh(arr).min() < -PROB_TOL:
            raise QuditError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", _frozen(arr))

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    def purity(self) -> float:
        # tr(rho^2) for Hermitian rho is the squared Frobenius norm
        return float(np.sum(np.abs(self.entries) ** 2))


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Orthonormal measurement basis; column m of ``vectors`` is outcome m."""

    vectors: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_complex_array(self.vectors, "basis")
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise QuditError(f"basis must hold d vectors of length d, got shape {arr.shape}")
        gram = arr.conj().T @ arr
        err = np.max(np.abs(gram - np.eye(arr.shape[0])))
        if err > PROB_TOL:
            raise QuditError(f"basis vectors are not orthonormal (max defect {err:.3e})")
        object.__setattr__(self, "vectors", _frozen(arr))

    @property
    def d(self) -> int:
        return self.vectors.shape[0]

    def vector(self, m: int) -> np.ndarray:
        return self.vectors[:, m]

    @classmethod
    def standard(cls, d: int) -> "MeasurementBasis":
        return cls(np.eye(d, dtype=np.complex128))

    @classmethod
    def from_rotation(cls, rotation: np.ndarray) -> "MeasurementBasis":
        """Basis with projectors ``R^dag |m><m| R``, i.e. the columns of ``R^dag``.

        With this convention the amplitude table of a state ``H`` measured with
        rotations ``R_A`` and ``R_B`` is ``R_A H R_B^T``.
        """
        rotation = np.asarray(rotation, dtype=np.complex128)
        return cls(rotation.conj().T)

    def with_phases(self, phases: Sequence[float]) -> "MeasurementBasis":
        """Multiply vector m by ``exp(i * phases[m])``."""
        return MeasurementBasis(self.vectors * np.exp(1j * np.asarray(phases, dtype=float))[None, :])


def mes(d: int) -> CoefficientMatrix:
    """Maximally entangled state, ``H = I / sqrt(d)``."""
    if d < 1:
        raise QuditError(f"d must be >= 1, got {d}")
    return CoefficientMatrix(np.eye(d, dtype=np.complex128) / np.sqrt(d))


def reduced_density(H: CoefficientMatrix, side: Side | str) -> DensityMatrix:
    side = Side(side)
    h = H.entries
    if side is Side.ALICE:
        rho = h @ h.conj().T
    else:
        rho = h.T @ h.conj()
    # exact Hermitian part; removes rounding asymmetry from the product
    return DensityMatrix((rho + rho.conj().T) / 2)


def concurrence(H: CoefficientMatrix) -> float:
    """Generalized concurrence ``sqrt(d/(d-1) * (1 - tr rho_A^2))``."""
    d = H.d
    if d < 2:
        raise QuditError("concurrence is undefined for d = 1")
    purity_a = reduced_density(H, Side.ALICE).purity()
    purity_b = reduced_density(H, Side.BOB).purity()
    if abs(purity_a - purity_b) > PROB_TOL:
        raise QuditError(f"marginal purities disagree: {purity_a!r} vs {purity_b!r}")
    return float(np.sqrt(max(0.0, d / (d - 1) * (1.0 - purity_a))))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    idx = np.flatnonzero(np.abs(v) > ZERO_TOL)
    if idx.size == 0:
        return v
    lead = v[idx[0]]
    return v * (abs(lead) / lead)


def _project_out(v: np.ndarray, Q: np.ndarray) -> np.ndarray:
    if Q.shape[1] == 0:
        return v
    # conj(v^T Q^*) == Q^dag v without copying Q
    return v - Q @ (v.conj() @ Q).conj()


def nested_complement_chain(generators: np.ndarray, counts: Sequence[int]) -> MeasurementBasis:
    """Nested-complement construction on a prefix-ordered generator matrix.

    Level m must be orthogonal to ``generators[:, :counts[m]]`` and to every
    earlier output vector; ``counts`` must be non-increasing.  Generators are
    orthonormalized once (Gram-Schmidt with one re-orthogonalization pass), so
    the whole chain costs O(d^3).
    """
    G = np.asarray(generators)
    # real generators keep the whole chain real (standard seeds are real too)
    dtype = np.float64 if not np.iscomplexobj(G) or not np.any(G.imag) else np.complex128
    G = np.ascontiguousarray(G.real if dtype is np.float64 else G, dtype=dtype)
    d = G.shape[0]
    counts = [int(c) for c in counts]
    if len(counts) != d:
        raise QuditError(f"need {d} levels, got {len(counts)}")
    if any(b > a for a, b in zip(counts, counts[1:])):
        raise QuditError("generator counts must be non-increasing (nested sets)")
    if counts and max(counts) > G.shape[1]:
        raise QuditError("level count exceeds number of generators")

    # rank_after[k]: dimension spanned by the first k generators
    Q = np.zeros((d, d), dtype=dtype, order="F")
    rank_after = [0]
    r = 0
    for k in range(G.shape[1]):
        g = G[:, k]
        w = _project_out(_project_out(g, Q[:, :r]), Q[:, :r])
        nrm = np.linalg.norm(w)
        if r < d and nrm > NORM_TOL * max(1.0, np.linalg.norm(g)):
            Q[:, r] = w / nrm
            r += 1
        rank_after.append(r)

    out = np.zeros((d, d), dtype=dtype, order="F")
    q_rows = np.zeros(d)  # squared row norms of the active Q block
    active = 0
    v_rows = np.zeros(d)
    threshold = 1.0 / (2 * d)
    for m in range(d):
        k = rank_after[counts[m]]
        if k < active:
            q_rows = q_rows - np.sum(np.abs(Q[:, k:active]) ** 2, axis=1)
        elif k > active:
            q_rows = np.sum(np.abs(Q[:, :k]) ** 2, axis=1)
        active = k
        if k + m >= d:
            raise ConstructionError(m, f"complement exhausted ({k} generator dims + {m} earlier vectors in d = {d})")
        Qk = Q[:, :k]
        Vm = out[:, :m]
        # squared norm of each standard vector's projection onto the complement
        residual = 1.0 - q_rows - v_rows
        candidates = np.flatnonzero(residual >= threshold)
        if candidates.size == 0:
            raise ConstructionError(m, "no standard vector has a usable complement component")
        i = int(candidates[0])
        v = np.zeros(d, dtype=dtype)
        v[i] = 1.0
        for _ in range(2):
            v = _project_out(_project_out(v, Qk), Vm)
        nrm = np.linalg.norm(v)
        if nrm < NORM_TOL:
            raise ConstructionError(m, "complement vector vanished after projection")
        v = _fix_phase(v / nrm)
        out[:, m] = v
        v_rows = v_rows + np.abs(v) ** 2
    return MeasurementBasis(out)


def orthonormal_complement_chain(levels: Sequence[Sequence[Any]], d: int | None = None) -> MeasurementBasis:
    """Build v_0..v_{d-1} with v_m orthogonal to span(levels[m]) and to v_0..v_{m-1}.

    ``levels`` must be nested, levels[0] ⊇ levels[1] ⊇ ...  Vectors are
    matched by exact value.
    """
    d = len(levels) if d is None else d
    if len(levels) != d:
        raise QuditError(f"need one generator set per level ({d}), got {len(levels)}")
    order: list[np.ndarray] = []
    position: dict[bytes, int] = {}
    for m in range(d - 1, -1, -1):
        for vec in levels[m]:
            arr = _as_complex_array(vec, "generator")
            if arr.shape != (d,):
                raise QuditError(f"generator at level {m} has shape {arr.shape}, expected ({d},)")
            key = arr.tobytes()
            if key not in position:
                position[key] = len(order)
                order.append(arr)
    counts = []
    for m in range(d):
        idx = {position[_as_complex_array(v, "generator").tobytes()] for v in levels[m]}
        count = len(idx)
        if idx and max(idx) >= count:
            raise QuditError(f"generator sets are not nested at level {m}")
        if m > 0 and count > counts[-1]:
            raise QuditError(f"generator sets are not nested at level {m}")
        counts.append(count)
    G = np.column_stack(order) if order else np.zeros((d, 0), dtype=np.complex128)
    return nested_complement_chain(G, counts)


def constraint_measurements(H: CoefficientMatrix) -> tuple[MeasurementBasis, MeasurementBasis]:
    """Second-setting bases forced by the zero constraints.

    With both first settings standard, ``P(A2 < B1) = 0`` requires Alice's
    vector u_m to be orthogonal to every column c_n with n > m, and
    ``P(A1 < B2) = 0`` requires Bob's v_n to be orthogonal to every row r_m
    with m < n.
    """
    if not H.is_upper_triangular():
        raise QuditError(
            f"state must be upper-triangular (max sub-diagonal modulus {lower_defect(H.entries):.3e})"
        )
    h = H.entries
    d = H.d
    # columns c_{d-1}, ..., c_1: level m keeps the first d-1-m of them
    alice = nested_complement_chain(h[:, :0:-1], [d - 1 - m for m in range(d)])
    # rows r_0, ..., r_{d-2}; built from v_{d-1} downwards, then reversed
    bob_rev = nested_complement_chain(h[: d - 1, :].T, [d - 1 - level for level in range(d)])
    bob = MeasurementBasis(bob_rev.vectors[:, ::-1])
    return alice, bob
