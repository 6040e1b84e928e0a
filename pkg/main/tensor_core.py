"""
Dense linear algebra on bipartite spaces C^m ⊗ C^n.

Conventions used everywhere in the package:

* basis vectors of C^m ⊗ C^n are ordered |i⟩⊗|j⟩ -> index i*n + j,
* vec(X) = Σ_j |j⟩⊗(X|j⟩) (column stacking), so vec(ABC) = (Cᵀ⊗A) vec(B)
  and vec(1) = |Γ⟩ = Σ_j |jj⟩,
* "first"/"second" name the tensor factor an operation acts on.
"""
import logging

import numpy as np
from scipy import linalg
from scipy.stats import unitary_group

from main.errors import DimensionError, NotHermitianError, ValidationError
from main.models.operators import (
    BipartiteOperator, BipartiteVector, EigenDecomposition, SchmidtDecomposition)

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
KERNEL_TOL = 1e-9
RANK_TOL = 1e-9
SIDES = ('first', 'second')


def as_matrix(X):
    if isinstance(X, BipartiteOperator):
        return X.matrix
    matrix = np.asarray(X, dtype=complex)
    if matrix.ndim != 2:
        raise DimensionError(f"expected a matrix, got an array of shape {matrix.shape}")
    return matrix


def _check_side(side):
    if side not in SIDES:
        raise ValidationError(f"side must be one of {SIDES}, got {side!r}")


def kron(A, B):
    return np.kron(as_matrix(A), as_matrix(B))


def identity(n):
    return np.eye(n, dtype=complex)


def basis_vector(index, dim):
    e = np.zeros(dim, dtype=complex)
    e[index] = 1
    return e


def gamma(n):
    """
    Unnormalized maximally entangled vector |Γ⟩ = Σ_j |jj⟩ on n⊗n.
    """
    return BipartiteVector(n, n, identity(n).reshape(-1))


def tilde_gamma(n):
    """
    |Γ̃⟩ = Σ_ℓ (-1)^ℓ |ℓ⟩⊗|n-1-ℓ⟩, a -1 eigenvector of the flip for even n.
    """
    coords = np.zeros((n, n), dtype=complex)
    for ell in range(n):
        coords[ell, n - 1 - ell] = (-1) ** ell
    return BipartiteVector(n, n, coords.reshape(-1))


def partial_trace(W, side):
    """
    tr_1 (side='first') returns the n×n operator on the second factor,
    tr_2 (side='second') the m×m operator on the first.
    """
    _check_side(side)
    T = W.tensor()
    if side == 'first':
        return np.einsum('ijil->jl', T)
    return np.einsum('ijkj->ik', T)


def partial_transpose(W, side):
    _check_side(side)
    T = W.tensor()
    if side == 'first':
        T = T.transpose(2, 1, 0, 3)
    else:
        T = T.transpose(0, 3, 2, 1)
    return W.with_matrix(T.reshape(W.size, W.size))


def swap_factors(W):
    T = W.tensor().transpose(1, 0, 3, 2)
    return BipartiteOperator(W.dim_b, W.dim_a, T.reshape(W.size, W.size))


def vec(X):
    """
    Column-stacking vectorization; an r×c matrix becomes a vector in c⊗r.
    """
    X = as_matrix(X)
    rows, cols = X.shape
    return BipartiteVector(cols, rows, X.T.reshape(-1))


def unvec(v, rows=None, cols=None):
    """
    Inverse of vec. A vector in a⊗b unvectorizes to a b×a matrix; raw arrays
    need the target shape.
    """
    if isinstance(v, BipartiteVector):
        if rows is not None and (rows, cols) != (v.dim_b, v.dim_a):
            raise DimensionError(
                f"vector in {v.dim_a}x{v.dim_b} cannot be unvectorized to {rows}x{cols}")
        rows, cols, coords = v.dim_b, v.dim_a, v.coords
    else:
        coords = np.asarray(v, dtype=complex).ravel()
        if rows is None or cols is None:
            side = int(round(np.sqrt(coords.size)))
            if side * side != coords.size:
                raise DimensionError(f"cannot infer a square shape for length {coords.size}")
            rows = cols = side
        if rows * cols != coords.size:
            raise DimensionError(f"length {coords.size} does not factor as {rows}x{cols}")
    return coords.reshape(cols, rows).T.copy()


def flip_operator(n):
    """
    F = Σ_ij |i⟩⟨j| ⊗ |j⟩⟨i| on n⊗n.
    """
    if n < 1:
        raise ValidationError(f"flip needs n >= 1, got {n}")
    F = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            F[j * n + i, i * n + j] = 1
    return BipartiteOperator(n, n, F)


def is_hermitian(H, tol=HERMITIAN_TOL):
    H = as_matrix(H)
    if H.shape[0] != H.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(H))) if H.size else 0.0)
    return bool(np.max(np.abs(H - H.conj().T), initial=0.0) <= tol * scale)


def require_hermitian(H, tol=HERMITIAN_TOL, name='operator'):
    if not is_hermitian(H, tol):
        raise NotHermitianError(f"{name} is not Hermitian within relative tolerance {tol:g}")
    H = as_matrix(H)
    return (H + H.conj().T) / 2


def _fix_phases(vectors):
    fixed = vectors.copy()
    for k in range(fixed.shape[1]):
        column = fixed[:, k]
        pivot = column[np.argmax(np.abs(column))]
        if pivot != 0:
            fixed[:, k] = column * (abs(pivot) / pivot)
    return fixed


def hermitian_eig(H, tol=HERMITIAN_TOL):
    H = require_hermitian(H, tol)
    eigenvalues, eigenvectors = linalg.eigh(H)
    return EigenDecomposition(eigenvalues, _fix_phases(eigenvectors))


def kernel_basis(H, tol=KERNEL_TOL):
    """
    Orthonormal eigenvectors with |λ| <= tol·max|λ| (empty list if none).
    """
    decomposition = hermitian_eig(H)
    scale = np.max(np.abs(decomposition.eigenvalues), initial=0.0)
    mask = np.abs(decomposition.eigenvalues) <= tol * scale
    return [decomposition.eigenvectors[:, k] for k in np.flatnonzero(mask)]


def is_psd(H, tol=KERNEL_TOL):
    """
    Returns (λ_min >= -tol·max(1, |λ_max|), λ_min).
    """
    eigenvalues = hermitian_eig(H).eigenvalues
    lam_min, lam_max = float(eigenvalues[0]), float(eigenvalues[-1])
    return lam_min >= -tol * max(1.0, abs(lam_max)), lam_min


def schmidt_decompose(v, tol=RANK_TOL):
    """
    SVD of the coefficient matrix. `tolerance_used` is the absolute cut-off,
    tol times the largest coefficient.
    """
    norm = v.norm()
    if norm == 0:
        raise ValidationError("cannot Schmidt-decompose the zero vector")
    left, coefficients, right = linalg.svd(v.coefficient_matrix())
    cutoff = tol * coefficients[0]
    count = len(coefficients)
    return SchmidtDecomposition(
        coefficients=coefficients,
        left_vectors=[left[:, k] for k in range(count)],
        right_vectors=[right[k, :] for k in range(count)],
        numerical_rank=int(np.sum(coefficients > cutoff)),
        tolerance_used=float(cutoff),
    )


def numerical_rank(M, tol=RANK_TOL):
    singular_values = linalg.svdvals(as_matrix(M))
    if singular_values.size == 0 or singular_values[0] == 0:
        return 0
    return int(np.sum(singular_values > tol * singular_values[0]))


def span_dimension(vectors, tol=1e-8):
    if not vectors:
        return 0
    stacked = np.array([np.asarray(v, dtype=complex).ravel() / np.linalg.norm(v) for v in vectors])
    return numerical_rank(stacked, tol)


def operator_norm(M):
    return float(linalg.norm(as_matrix(M), 2))


def random_unitary(n, rng):
    if n == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(n, random_state=rng)


def random_complex_vector(dim, rng):
    return rng.standard_normal(dim) + 1j * rng.standard_normal(dim)


def random_psd(n, rng, rank=None):
    G = rng.standard_normal((n, rank or n)) + 1j * rng.standard_normal((n, rank or n))
    return G @ G.conj().T


def random_state(dim_a, dim_b, rng, rank=None):
    rho = random_psd(dim_a * dim_b, rng, rank)
    return BipartiteOperator(dim_a, dim_b, rho / np.trace(rho).real)


def random_product_vector(dim_a, dim_b, rng):
    x = random_complex_vector(dim_a, rng)
    y = random_complex_vector(dim_b, rng)
    return BipartiteVector(dim_a, dim_b, np.kron(x / np.linalg.norm(x), y / np.linalg.norm(y)))


def random_maximally_entangled(n, rng):
    """
    vec(U)/√n for a Haar-random unitary U.
    """
    return BipartiteVector(n, n, vec(random_unitary(n, rng)).coords / np.sqrt(n))
