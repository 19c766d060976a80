import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_state, random_unitary, random_upper
from oracles import density_table
from qudit_hardy import (
    CoefficientMatrix,
    ConstructionError,
    MeasurementBasis,
    QuditError,
    approx_state,
    concurrence,
    constraint_measurements,
    mes,
    optimal_state,
    orthonormal_complement_chain,
    reduced_density,
)
from qudit_hardy.core import DensityMatrix, nested_complement_chain
from qudit_hardy.engine import joint_table

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestCoefficientMatrix:
    def test_rejects_unnormalized(self):
        with pytest.raises(QuditError, match="not normalized"):
            CoefficientMatrix(np.eye(2))

    def test_rejects_non_finite(self):
        with pytest.raises(QuditError, match="non-finite"):
            CoefficientMatrix([[np.nan, 0], [0, 1]])

    def test_rejects_non_square(self):
        with pytest.raises(QuditError):
            CoefficientMatrix.normalized(np.ones((2, 3)))

    def test_entries_are_read_only(self):
        H = mes(2)
        with pytest.raises(ValueError):
            H.entries[0, 0] = 1

    def test_json_round_trip_is_exact(self, rng):
        H = CoefficientMatrix(random_state(4, rng))
        back = CoefficientMatrix.from_json(H.to_json())
        assert np.array_equal(back.entries, H.entries)

    def test_json_layout(self):
        payload = json.loads(mes(2).to_json())
        assert payload["d"] == 2
        assert payload["entries"][0][0] == [pytest.approx(1 / np.sqrt(2)), 0.0]
        assert payload["entries"][0][1] == [0.0, 0.0]

    def test_deserialize_renormalizes_small_drift(self):
        payload = mes(2).to_dict()
        payload["entries"][0][0][0] *= 1 + 1e-10
        H = CoefficientMatrix.from_dict(payload)
        assert abs(np.linalg.norm(H.entries) - 1) < 1e-15

    def test_deserialize_rejects_large_drift(self):
        payload = mes(2).to_dict()
        payload["entries"][0][0][0] *= 1 + 1e-6
        with pytest.raises(QuditError, match="not normalized"):
            CoefficientMatrix.from_dict(payload)

    def test_deserialize_rejects_shape_mismatch(self):
        payload = mes(2).to_dict()
        payload["d"] = 3
        with pytest.raises(QuditError):
            CoefficientMatrix.from_dict(payload)


class TestMes:
    def test_qubit(self):
        np.testing.assert_allclose(mes(2).entries, np.diag([1, 1]) / np.sqrt(2))

    def test_trivial_dimension(self):
        assert mes(1).entries.tolist() == [[1]]

    def test_qutrit_pattern(self):
        np.testing.assert_allclose(mes(3).entries, np.eye(3) / np.sqrt(3))

    def test_rejects_zero(self):
        with pytest.raises(QuditError):
            mes(0)


class TestReducedDensity:
    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_mes_marginal_is_maximally_mixed(self, d):
        np.testing.assert_allclose(reduced_density(mes(d), "A").entries, np.eye(d) / d, atol=1e-15)

    def test_product_state(self):
        rho = reduced_density(CoefficientMatrix(np.diag([1.0, 0.0])), "A")
        np.testing.assert_array_equal(rho.entries, np.diag([1, 0]))

    def test_qubit_optimum_purity(self):
        # purity = 1 - C^2 (d-1)/d with the tabulated concurrence
        purity = reduced_density(optimal_state(2), "A").purity()
        assert purity == pytest.approx(1 - 0.5 * 0.763932**2, abs=1e-5)

    def test_bob_side_is_transpose_form(self, rng):
        H = CoefficientMatrix(random_state(3, rng))
        h = H.entries
        np.testing.assert_allclose(reduced_density(H, "B").entries, h.T @ h.T.conj().T, atol=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, d=st.integers(2, 6))
    def test_marginal_spectra_agree(self, seed, d):
        H = CoefficientMatrix(random_state(d, np.random.default_rng(seed)))
        ea = np.linalg.eigvalsh(reduced_density(H, "A").entries)
        eb = np.linalg.eigvalsh(reduced_density(H, "B").entries)
        np.testing.assert_allclose(ea, eb, atol=1e-9)

    def test_density_invariants_enforced(self):
        with pytest.raises(QuditError, match="Hermitian"):
            DensityMatrix(np.array([[0.5, 1], [0, 0.5]]))
        with pytest.raises(QuditError, match="trace"):
            DensityMatrix(np.eye(2))
        with pytest.raises(QuditError, match="negative"):
            DensityMatrix(np.diag([1.5, -0.5]))


class TestConcurrence:
    @pytest.mark.parametrize("d", [2, 3, 4, 7])
    def test_mes_is_maximal(self, d):
        assert concurrence(mes(d)) == pytest.approx(1.0, abs=1e-12)

    def test_qubit_optimum(self):
        assert concurrence(optimal_state(2)) == pytest.approx(0.763932, abs=1e-5)

    def test_qubit_approximate_state(self):
        # alpha = (2, 1) / sqrt(10) after normalization: tr rho^2 = 0.68, C = sqrt(2 * 0.32)
        assert concurrence(approx_state(2)) == pytest.approx(0.8, abs=1e-12)

    def test_undefined_for_d1(self):
        with pytest.raises(QuditError, match="d = 1"):
            concurrence(mes(1))

    def test_product_state_is_zero(self):
        assert concurrence(CoefficientMatrix(np.diag([1.0, 0, 0]))) == 0.0

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, d=st.integers(2, 6))
    def test_local_unitary_invariance(self, seed, d):
        rng = np.random.default_rng(seed)
        h = random_state(d, rng)
        U, V = random_unitary(d, rng), random_unitary(d, rng)
        moved = CoefficientMatrix.normalized(U @ h @ V.T)
        assert concurrence(moved) == pytest.approx(concurrence(CoefficientMatrix(h)), abs=1e-9)


class TestMeasurementBasis:
    def test_rejects_non_orthonormal(self):
        with pytest.raises(QuditError, match="orthonormal"):
            MeasurementBasis(np.array([[1, 1], [0, 1]]))

    def test_from_rotation_uses_adjoint_columns(self, rng):
        R = random_unitary(3, rng)
        np.testing.assert_allclose(MeasurementBasis.from_rotation(R).vectors, R.conj().T)

    def test_with_phases(self):
        b = MeasurementBasis.standard(2).with_phases([0, np.pi / 2])
        np.testing.assert_allclose(b.vectors, np.diag([1, 1j]), atol=1e-15)


class TestComplementChain:
    @pytest.mark.parametrize("d", [1, 2, 4])
    def test_forced_standard_vectors(self, d):
        e = np.eye(d)
        levels = [[e[n] for n in range(m + 1, d)] for m in range(d)]
        np.testing.assert_allclose(orthonormal_complement_chain(levels).vectors, np.eye(d), atol=1e-15)

    @pytest.mark.parametrize("d", [1, 3, 5])
    def test_empty_sets_give_standard_basis(self, d):
        np.testing.assert_array_equal(orthonormal_complement_chain([[] for _ in range(d)]).vectors, np.eye(d))

    def test_qubit_optimum_columns_reproduce_hardy_limit(self):
        h = optimal_state(2).entries
        A = orthonormal_complement_chain([[h[:, 1]], []])
        B_rev = orthonormal_complement_chain([[h[0]], []])
        B = MeasurementBasis(B_rev.vectors[:, ::-1])
        table = joint_table(optimal_state(2), A, B)
        assert np.triu(table, 1).sum() == pytest.approx(0.090170, abs=1e-6)

    def test_phase_convention(self, rng):
        d = 4
        pool = list(rng.normal(size=(d - 1, d)) + 1j * rng.normal(size=(d - 1, d)))
        levels = [pool[: d - 1 - m] for m in range(d)]
        basis = orthonormal_complement_chain(levels)
        for m in range(d):
            v = basis.vector(m)
            lead = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
            assert lead.imag == pytest.approx(0, abs=1e-15) and lead.real > 0

    @settings(max_examples=60, deadline=None)
    @given(seed=seeds, d=st.integers(1, 7))
    def test_random_nested_sets_are_orthonormal_and_orthogonal(self, seed, d):
        rng = np.random.default_rng(seed)
        counts = sorted(rng.integers(0, d - np.arange(d)), reverse=True)
        counts = [min(c, d - 1 - m) for m, c in enumerate(counts)]
        for m in range(1, d):
            counts[m] = min(counts[m], counts[m - 1])
        pool = list(rng.normal(size=(max(counts, default=0), d)) + 1j * rng.normal(size=(max(counts, default=0), d)))
        levels = [pool[: counts[m]] for m in range(d)]
        basis = orthonormal_complement_chain(levels)
        V = basis.vectors
        np.testing.assert_allclose(V.conj().T @ V, np.eye(d), atol=1e-10)
        for m in range(d):
            for g in levels[m]:
                assert abs(np.vdot(V[:, m], g)) < 1e-10

    def test_exhausted_level_names_level(self):
        e = np.eye(2)
        with pytest.raises(ConstructionError) as err:
            orthonormal_complement_chain([[e[0], e[1]], [e[0], e[1]]])
        assert err.value.level == 0

    def test_exhaustion_later_level(self):
        e = np.eye(3)
        # level 1 wants a vector orthogonal to e0, e1 and to v0 (= e2)
        with pytest.raises(ConstructionError) as err:
            orthonormal_complement_chain([[e[0], e[1]], [e[0], e[1]], []])
        assert err.value.level == 1

    def test_rejects_non_nested(self):
        e = np.eye(3)
        with pytest.raises(QuditError, match="nested"):
            orthonormal_complement_chain([[e[0]], [e[1]], []])

    def test_rank_deficient_generators_use_tie_break(self):
        # zero generators span nothing, so every level falls back to standard seeds
        z = np.zeros(3)
        basis = nested_complement_chain(np.column_stack([z, z]), [2, 1, 0])
        np.testing.assert_array_equal(basis.vectors, np.eye(3))


class TestConstraintMeasurements:
    @pytest.mark.parametrize("d", [2, 3, 6])
    def test_mes_gives_standard_bases_up_to_phase(self, d):
        a2, b2 = constraint_measurements(mes(d))
        np.testing.assert_allclose(np.abs(a2.vectors), np.eye(d), atol=1e-12)
        np.testing.assert_allclose(np.abs(b2.vectors), np.eye(d), atol=1e-12)

    def test_rejects_lower_entries(self, rng):
        with pytest.raises(QuditError, match="upper-triangular"):
            constraint_measurements(CoefficientMatrix(random_state(3, rng)))

    def test_optimal_qutrit_residuals(self):
        H = optimal_state(3)
        a2, b2 = constraint_measurements(H)
        std = np.eye(3)
        t_a2b1 = density_table(H.entries, a2.vectors, std)
        t_a1b1 = density_table(H.entries, std, std)
        t_a1b2 = density_table(H.entries, std, b2.vectors)
        assert np.triu(t_a2b1, 1).sum() <= 1e-10
        assert np.tril(t_a1b1, -1).sum() <= 1e-10
        assert np.triu(t_a1b2, 1).sum() <= 1e-10

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    def test_random_triangular_residuals(self, d, rng):
        std = MeasurementBasis.standard(d)
        for _ in range(100):
            H = CoefficientMatrix(random_upper(d, rng))
            a2, b2 = constraint_measurements(H)
            assert np.triu(joint_table(H, a2, std), 1).sum() <= 1e-10
            assert np.tril(joint_table(H, std, std), -1).sum() <= 1e-10
            assert np.triu(joint_table(H, std, b2), 1).sum() <= 1e-10
