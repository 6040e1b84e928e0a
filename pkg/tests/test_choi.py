import logging

import numpy as np
import pytest

from main import choi, tensor_core
from main.errors import DimensionError, NotHermitianError, ValidationError
from main.models.operators import BipartiteOperator
from main.models.superoperator import SuperOperator


def random_map(dim_in, dim_out, rng):
    size = dim_in * dim_out
    matrix = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return SuperOperator.from_choi(matrix, dim_in, dim_out, 'random')


class TestApplyAndAdjoint:
    """Test map application through the Choi matrix."""

    def setup_method(self):
        self.rng = np.random.default_rng(11)
        self.X = self.rng.standard_normal((3, 3)) + 1j * self.rng.standard_normal((3, 3))

    def test_transpose_map(self):
        """Test that the transpose map transposes."""
        assert np.allclose(choi.apply_map(choi.transpose_map(3), self.X), self.X.T)

    def test_reduction_map(self):
        """Test R(X) = tr(X)1 - X."""
        expected = np.trace(self.X) * np.eye(3) - self.X
        assert np.allclose(choi.apply_map(choi.reduction_map(3), self.X), expected)

    def test_from_function_matches_apply(self):
        """Test that a Choi matrix built from a function reproduces the function."""
        K = self.rng.standard_normal((2, 3))
        S = SuperOperator.from_function(lambda X: K @ X @ K.conj().T, 3, 2)
        assert np.allclose(choi.apply_map(S, self.X), K @ self.X @ K.conj().T)

    def test_adjoint_hilbert_schmidt(self):
        """Test tr(Y†Φ(X)) = tr(Φ†(Y)†X) for a random rectangular map."""
        S = random_map(3, 2, self.rng)
        Y = self.rng.standard_normal((2, 2)) + 1j * self.rng.standard_normal((2, 2))
        lhs = np.vdot(Y, choi.apply_map(S, self.X))
        rhs = np.vdot(choi.apply_map(choi.adjoint(S), Y), self.X)
        assert lhs == pytest.approx(rhs)
        assert choi.adjoint(S).name == 'random^dagger'

    def test_adjoint_of_non_hermitian_map(self):
        """Test the adjoint identity on a 3 -> 2 map whose Choi matrix is not Hermitian."""
        S = random_map(3, 2, self.rng)
        assert not tensor_core.is_hermitian(S.choi)
        for _ in range(5):
            X = self.rng.standard_normal((3, 3)) + 1j * self.rng.standard_normal((3, 3))
            Y = self.rng.standard_normal((2, 2)) + 1j * self.rng.standard_normal((2, 2))
            lhs = np.trace(Y.conj().T @ choi.apply_map(S, X))
            rhs = np.trace(choi.apply_map(choi.adjoint(S), Y).conj().T @ X)
            assert lhs == pytest.approx(rhs)
        assert np.allclose(choi.adjoint(choi.adjoint(S)).choi.matrix, S.choi.matrix)

    def test_adjoint_of_hermitian_preserving_map(self):
        """Test C(Φ†) = F·C(Φ)ᵀ·F when C(Φ) is Hermitian."""
        H = tensor_core.random_psd(4, self.rng) - 2 * np.eye(4)
        S = SuperOperator.from_choi(H, 2, 2)
        F = tensor_core.flip_operator(2).matrix
        assert np.allclose(choi.adjoint(S).choi.matrix, F @ H.T @ F)

    def test_apply_wrong_shape(self):
        """Test that an input of the wrong size raises DimensionError."""
        with pytest.raises(DimensionError):
            choi.apply_map(choi.transpose_map(2), self.X)

    def test_extend_apply_transpose_is_partial_transpose(self):
        """Test (id⊗T)(W) and (T⊗id)(W) against the partial transposes."""
        W = tensor_core.random_state(2, 3, self.rng)
        second = choi.extend_apply(choi.transpose_map(3), W, 'second')
        first = choi.extend_apply(choi.transpose_map(2), W, 'first')
        assert np.allclose(second.matrix, tensor_core.partial_transpose(W, 'second').matrix)
        assert np.allclose(first.matrix, tensor_core.partial_transpose(W, 'first').matrix)

    def test_compose(self):
        """Test that composing two maps applies them in order."""
        outer = choi.reduction_map(3)
        inner = choi.transpose_map(3)
        composed = choi.compose(outer, inner)
        assert np.allclose(choi.apply_map(composed, self.X), np.trace(self.X) * np.eye(3) - self.X.T)


class TestTraceAndProperties:
    """Test superoperator trace, channel properties and Kraus operators."""

    @pytest.mark.parametrize('n', [2, 3, 4, 5])
    def test_reduction_trace(self, n):
        """Test tr(R) = n - n² for the reduction map."""
        assert choi.superoperator_trace(choi.reduction_map(n)) == pytest.approx(n - n * n, abs=1e-12)

    def test_transpose_trace(self):
        """Test that the transpose map has trace n."""
        assert choi.superoperator_trace(choi.transpose_map(4)) == pytest.approx(4)

    def test_trace_requires_square_map(self, rng):
        """Test that a rectangular map has no superoperator trace."""
        with pytest.raises(DimensionError):
            choi.superoperator_trace(random_map(2, 3, rng))

    def test_channel_fidelity_of_identity(self):
        """Test that the identity channel has fidelity one."""
        assert choi.channel_fidelity(choi.identity_map(3)) == pytest.approx(1)

    def test_depolarizing_properties(self):
        """Test that the entanglement-breaking depolarizing channel is a full-rank unital channel."""
        properties = choi.channel_properties(choi.depolarizing_eb(3))
        assert properties.completely_positive
        assert properties.trace_preserving
        assert properties.unital
        assert properties.full_choi_rank

    def test_depolarizing_rejects_parameter(self):
        """Test that p outside [0, 1] raises ValidationError."""
        with pytest.raises(ValidationError):
            choi.depolarizing_eb(2, p=1.5)

    def test_reduction_is_not_cp(self):
        """Test that the reduction map is not completely positive."""
        properties = choi.channel_properties(choi.reduction_map(3))
        assert not properties.completely_positive
        assert properties.min_choi_eigenvalue == pytest.approx(-2)

    def test_kraus_reconstruction(self, rng):
        """Test Φ(X) = Σ α_i K_i X K_i† for the depolarizing channel."""
        S = choi.depolarizing_eb(3, p=0.4)
        X = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        kraus = choi.kraus_decompose(S)
        assert len(kraus) == 9
        assert np.allclose(kraus.apply(X), choi.apply_map(S, X))

    def test_kraus_of_transpose_has_negative_weight(self, rng):
        """Test the generalized Kraus form of the transpose map."""
        kraus = choi.kraus_decompose(choi.transpose_map(2))
        assert min(kraus.weights) == pytest.approx(-1)
        X = rng.standard_normal((2, 2))
        assert np.allclose(kraus.apply(X), X.T)

    def test_kraus_of_zero_map(self):
        """Test that the zero map has an empty Kraus decomposition."""
        kraus = choi.kraus_decompose(SuperOperator.from_choi(np.zeros((4, 4)), 2, 2))
        assert len(kraus) == 0

    def test_kraus_rejects_non_hermitian(self, rng):
        """Test that a non-Hermitian Choi matrix raises NotHermitianError."""
        with pytest.raises(NotHermitianError):
            choi.kraus_decompose(random_map(2, 2, rng))

    def test_trace_map(self):
        """Test X -> tr(X)ω."""
        omega = np.diag([1, 0])
        S = choi.trace_map_to(omega, 3)
        assert np.allclose(choi.apply_map(S, np.eye(3)), 3 * omega)
        assert choi.channel_properties(S).choi_rank == 3


class TestCompressionAndPPT:
    """Test channel compression, the PPT check and positive-map inequalities."""

    def test_compression_warns_when_rank_deficient(self, caplog):
        """Test that a rank-deficient compression matrix logs a warning."""
        X = np.array([[1, 0], [0, 0]])
        with caplog.at_level(logging.WARNING, logger='main.choi'):
            compressed = choi.compress_channel(choi.depolarizing_eb(2), X)
        assert 'rank deficient' in caplog.text
        assert not choi.channel_properties(compressed).full_choi_rank

    def test_compression_with_identity(self):
        """Test that compressing by the identity keeps the channel."""
        S = choi.depolarizing_eb(2)
        assert np.allclose(choi.compress_channel(S, np.eye(2)).choi.matrix, S.choi.matrix)

    def test_ppt_singlet(self):
        """Test that the singlet is NPT and decided entangled."""
        singlet = tensor_core.tilde_gamma(2).normalized().projector()
        verdict = choi.ppt_necessary_check(singlet)
        assert verdict.status == 'NPT'
        assert verdict.separability_decided
        assert verdict.separable is False

    def test_ppt_decides_on_qubit_qutrit(self):
        """Test that PPT decides separability on 2⊗3 but not on 3⊗3."""
        small = choi.ppt_necessary_check(BipartiteOperator(2, 3, np.eye(6) / 6))
        assert small.separable is True
        large = choi.ppt_necessary_check(BipartiteOperator(3, 3, np.eye(9) / 9))
        assert large.status == 'PPT'
        assert not large.separability_decided
        assert large.separable is None

    def test_flip_detection_implies_npt(self):
        """Test that tr(Fρ) < 0 forces a negative partial transpose on 100 random 2⊗2 states."""
        rng = np.random.default_rng(2024)
        F = tensor_core.flip_operator(2).matrix
        detected = 0
        while detected < 100:
            rho = tensor_core.random_state(2, 2, rng, rank=1)
            if np.trace(F @ rho.matrix).real < 0:
                detected += 1
                assert choi.ppt_necessary_check(rho).status == 'NPT'

    @pytest.mark.parametrize('positive_map', [choi.transpose_map(3), choi.reduction_map(3), choi.depolarizing_eb(2)])
    def test_local_choi_inequalities(self, positive_map):
        """Test the Choi inequalities for positive maps."""
        first, second = choi.local_choi_inequalities(positive_map)
        assert first >= -1e-9
        assert second >= -1e-9


if __name__ == '__main__':
    pytest.main([__file__])
