import numpy as np
import pytest

from main import tensor_core
from main.errors import DimensionError, NotHermitianError, ValidationError
from main.models.operators import BipartiteOperator, BipartiteVector


class TestPartialOperations:
    """Test partial traces, partial transposes and the factor swap."""

    def setup_method(self):
        rng = np.random.default_rng(7)
        self.A = tensor_core.random_psd(2, rng)
        self.B = tensor_core.random_psd(3, rng)
        self.W = BipartiteOperator(2, 3, np.kron(self.A, self.B))

    def test_partial_trace_of_product(self):
        """Test tr₁(A⊗B) = tr(A)B and tr₂(A⊗B) = tr(B)A."""
        assert np.allclose(tensor_core.partial_trace(self.W, 'first'), np.trace(self.A) * self.B)
        assert np.allclose(tensor_core.partial_trace(self.W, 'second'), np.trace(self.B) * self.A)

    def test_partial_trace_rejects_unknown_side(self):
        """Test that only 'first' and 'second' are accepted."""
        with pytest.raises(ValidationError):
            tensor_core.partial_trace(self.W, 'third')

    def test_partial_transpose_of_gamma_is_flip(self):
        """Test that the partial transpose of |Γ⟩⟨Γ| is the flip operator."""
        projector = tensor_core.gamma(3).projector()
        flipped = tensor_core.partial_transpose(projector, 'second')
        assert np.allclose(flipped.matrix, tensor_core.flip_operator(3).matrix)
        assert np.allclose(tensor_core.partial_transpose(projector, 'first').matrix, flipped.matrix)

    def test_swap_factors(self):
        """Test F(A⊗B)F = B⊗A with the dims exchanged."""
        swapped = tensor_core.swap_factors(self.W)
        assert swapped.dims == (3, 2)
        assert np.allclose(swapped.matrix, np.kron(self.B, self.A))


class TestVectorization:
    """Test column-stacking vectorization."""

    def test_vec_of_identity_is_gamma(self):
        """Test vec(1) = |Γ⟩."""
        assert np.allclose(tensor_core.vec(np.eye(3)).coords, tensor_core.gamma(3).coords)

    def test_vec_product_rule(self, rng):
        """Test vec(ABC) = (Cᵀ⊗A)vec(B) for rectangular factors."""
        A = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
        B = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
        C = rng.standard_normal((4, 5)) + 1j * rng.standard_normal((4, 5))
        lhs = tensor_core.vec(A @ B @ C).coords
        rhs = np.kron(C.T, A) @ tensor_core.vec(B).coords
        assert np.allclose(lhs, rhs)

    def test_unvec_inverts_vec(self, rng):
        """Test unvec(vec(X)) = X for a 2x3 matrix."""
        X = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
        v = tensor_core.vec(X)
        assert v.dims == (3, 2)
        assert np.allclose(tensor_core.unvec(v), X)
        assert np.allclose(tensor_core.unvec(v.coords, 2, 3), X)

    def test_unvec_shape_mismatch(self):
        """Test that a length that does not factor raises DimensionError."""
        with pytest.raises(DimensionError):
            tensor_core.unvec(np.ones(6), 4, 2)
        with pytest.raises(DimensionError):
            tensor_core.unvec(np.ones(6))


class TestSpectralHelpers:
    """Test Hermitian checks, kernels, ranks and Schmidt decompositions."""

    def test_require_hermitian_rejects(self):
        """Test that a non-Hermitian matrix raises NotHermitianError."""
        with pytest.raises(NotHermitianError):
            tensor_core.require_hermitian(np.array([[0, 1], [0, 0]]))

    def test_kernel_of_flip_plus_identity(self):
        """Test that ker(F + 1) on 3⊗3 is the three-dimensional antisymmetric subspace."""
        H = tensor_core.flip_operator(3).matrix + np.eye(9)
        kernel = tensor_core.kernel_basis(H)
        assert len(kernel) == 3
        for v in kernel:
            coefficients = v.reshape(3, 3)
            assert np.allclose(coefficients, -coefficients.T)

    def test_kernel_of_rank_deficient_matrix(self, rng):
        """Test that kernel vectors of a rank-3 PSD matrix on 6 dimensions satisfy ‖Hv‖ <= tol·max|λ|."""
        H = tensor_core.random_psd(6, rng, rank=3)
        tol = tensor_core.KERNEL_TOL
        scale = np.max(np.abs(np.linalg.eigvalsh(H)))
        kernel = tensor_core.kernel_basis(H, tol)
        assert len(kernel) == 3
        for v in kernel:
            assert np.linalg.norm(H @ v) <= tol * scale
            assert np.linalg.norm(v) == pytest.approx(1)

    def test_is_psd(self, rng):
        """Test the PSD check on a random PSD matrix and on the flip."""
        assert tensor_core.is_psd(tensor_core.random_psd(4, rng))[0]
        positive, lam_min = tensor_core.is_psd(tensor_core.flip_operator(2))
        assert not positive
        assert lam_min == pytest.approx(-1)

    def test_tilde_gamma_is_maximally_entangled(self):
        """Test that |Γ̃⟩ on 4⊗4 has Schmidt rank 4, equal coefficients and F|Γ̃⟩ = -|Γ̃⟩."""
        v = tensor_core.tilde_gamma(4)
        decomposition = tensor_core.schmidt_decompose(v)
        assert decomposition.numerical_rank == 4
        assert decomposition.is_maximally_entangled()
        assert np.allclose(decomposition.reassemble(), v.coords)
        assert np.allclose(tensor_core.flip_operator(4).matrix @ v.coords, -v.coords)

    def test_schmidt_rank_of_product(self, rng):
        """Test that a random product vector has Schmidt rank one."""
        v = tensor_core.random_product_vector(3, 2, rng)
        assert tensor_core.schmidt_decompose(v).numerical_rank == 1

    def test_schmidt_of_zero_vector(self):
        """Test that the zero vector cannot be decomposed."""
        with pytest.raises(ValidationError):
            tensor_core.schmidt_decompose(BipartiteVector(2, 2, np.zeros(4)))

    def test_span_dimension(self):
        """Test the span dimension of dependent vectors."""
        e = np.eye(3)
        assert tensor_core.span_dimension([e[0], e[1], e[0] + e[1]]) == 2
        assert tensor_core.span_dimension([]) == 0

    def test_random_unitary(self, rng):
        """Test that random_unitary returns a unitary matrix."""
        U = tensor_core.random_unitary(5, rng)
        assert np.allclose(U.conj().T @ U, np.eye(5))

    def test_random_maximally_entangled(self, rng):
        """Test that vec(U)/√n is a unit maximally entangled vector."""
        v = tensor_core.random_maximally_entangled(3, rng)
        assert v.norm() == pytest.approx(1)
        assert tensor_core.schmidt_decompose(v).is_maximally_entangled()


if __name__ == '__main__':
    pytest.main([__file__])
