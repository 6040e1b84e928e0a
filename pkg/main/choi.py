"""
Superoperators through the Choi-Jamiołkowski isomorphism.

A map Φ: C^{n×n} -> C^{m×m} is stored as C(Φ) = (id⊗Φ)(|Γ⟩⟨Γ|) on n⊗m, so the
input index is always the first tensor factor. Everything here works on the
Choi matrix directly; Kraus operators are only produced on demand.
"""
import logging

import numpy as np

from main import tensor_core
from main.errors import DimensionError, NotHermitianError, ValidationError
from main.models.operators import BipartiteOperator
from main.models.superoperator import (
    ChannelProperties, KrausDecomposition, PPTVerdict, SuperOperator)

logger = logging.getLogger(__name__)

PPT_DECIDES_SEPARABILITY = {(2, 2), (2, 3), (3, 2)}


def _choi_tensor(S):
    return S.choi.tensor()


def apply_map(S, X):
    """
    Φ(X) = tr_1((Xᵀ⊗1)·C(Φ)).
    """
    X = tensor_core.as_matrix(X)
    if X.shape != (S.dim_in, S.dim_in):
        raise DimensionError(f"input of shape {X.shape} for a map on {S.dim_in}x{S.dim_in} matrices")
    return np.einsum('ki,kaib->ab', X, _choi_tensor(S))


def adjoint(S):
    """
    Hilbert-Schmidt adjoint, C(Φ†) = F·conj(C(Φ))·F. For Hermitian-preserving
    maps this is F·C(Φ)ᵀ·F.
    """
    swapped = np.conj(_choi_tensor(S).transpose(1, 0, 3, 2))
    size = S.dim_in * S.dim_out
    name = f"{S.name}^dagger" if S.name else None
    return SuperOperator.from_choi(swapped.reshape(size, size), S.dim_out, S.dim_in, name)


def extend_apply(S, W, side='second'):
    """
    side='second': (id⊗Φ)(W) for W on k⊗dim_in.
    side='first':  (Φ†⊗id)(W) for W on dim_out⊗k.
    """
    if side == 'second':
        if W.dim_b != S.dim_in:
            raise DimensionError(f"second factor has dimension {W.dim_b}, map expects {S.dim_in}")
        result = np.einsum('ijkl,jalb->iakb', W.tensor(), _choi_tensor(S))
        dims = (W.dim_a, S.dim_out)
    elif side == 'first':
        if W.dim_a != S.dim_out:
            raise DimensionError(f"first factor has dimension {W.dim_a}, adjoint map expects {S.dim_out}")
        result = np.einsum('iakb,ijkl->ajbl', _choi_tensor(adjoint(S)), W.tensor())
        dims = (S.dim_in, W.dim_b)
    else:
        raise ValidationError(f"side must be 'first' or 'second', got {side!r}")
    size = dims[0] * dims[1]
    return BipartiteOperator(dims[0], dims[1], result.reshape(size, size))


def superoperator_trace(S):
    """
    tr(Φ) = Σ_jk ⟨j|Φ(|j⟩⟨k|)|k⟩ = ⟨Γ|C(Φ)|Γ⟩.
    """
    if not S.is_square:
        raise DimensionError(f"superoperator trace needs a square map, got {S.dim_in}->{S.dim_out}")
    value = np.einsum('jjkk->', _choi_tensor(S))
    if abs(value.imag) > 1e-9 * max(1.0, abs(value)):
        logger.warning(f"superoperator trace {value} has an imaginary part; map is not Hermitian-preserving")
    return float(value.real)


def channel_fidelity(S):
    return superoperator_trace(S) / S.dim_in ** 2


def kraus_decompose(S, tol=tensor_core.KERNEL_TOL):
    if not tensor_core.is_hermitian(S.choi):
        raise NotHermitianError("generalized Kraus decomposition needs a Hermitian Choi matrix")
    decomposition = tensor_core.hermitian_eig(S.choi)
    scale = np.max(np.abs(decomposition.eigenvalues), initial=0.0)
    weights, operators = [], []
    for k, weight in enumerate(decomposition.eigenvalues):
        if scale == 0 or abs(weight) <= tol * scale:
            continue
        weights.append(float(weight))
        operators.append(tensor_core.unvec(decomposition.eigenvectors[:, k], S.dim_out, S.dim_in))
    return KrausDecomposition(np.array(weights), operators)


def channel_properties(S, tol=tensor_core.KERNEL_TOL):
    hermitian = tensor_core.is_hermitian(S.choi)
    if hermitian:
        eigenvalues = tensor_core.hermitian_eig(S.choi).eigenvalues
        lam_min, lam_max = float(eigenvalues[0]), float(eigenvalues[-1])
        completely_positive = lam_min >= -tol * max(1.0, abs(lam_max))
    else:
        lam_min, completely_positive = float('nan'), False
    rank = tensor_core.numerical_rank(S.choi.matrix, tol)
    trace_preserving = np.allclose(
        tensor_core.partial_trace(S.choi, 'second'), np.eye(S.dim_in), atol=tol * 10)
    unital = np.allclose(
        tensor_core.partial_trace(S.choi, 'first'), np.eye(S.dim_out), atol=tol * 10)
    return ChannelProperties(
        hermitian_preserving=hermitian,
        completely_positive=bool(completely_positive),
        trace_preserving=bool(trace_preserving),
        unital=bool(unital),
        choi_rank=rank,
        full_choi_rank=rank == S.dim_in * S.dim_out,
        min_choi_eigenvalue=lam_min,
    )


def identity_map(n):
    return SuperOperator(n, n, tensor_core.gamma(n).projector(), 'identity')


def transpose_map(n):
    return SuperOperator(n, n, tensor_core.flip_operator(n), 'transpose')


def reduction_map(n):
    """
    X -> tr(X)1 - X. Self-adjoint; positive but not completely positive.
    """
    choi = np.eye(n * n) - tensor_core.gamma(n).projector().matrix
    return SuperOperator.from_choi(choi, n, n, 'reduction')


def trace_map_to(omega, dim_in):
    """
    X -> tr(X)·ω; entanglement-breaking whenever ω >= 0.
    """
    omega = tensor_core.as_matrix(omega)
    return SuperOperator.from_choi(np.kron(np.eye(dim_in), omega), dim_in, omega.shape[0], 'trace-prepare')


def compose(outer, inner):
    if inner.dim_out != outer.dim_in:
        raise DimensionError(f"cannot compose {inner.dim_in}->{inner.dim_out} with {outer.dim_in}->{outer.dim_out}")
    return SuperOperator.from_function(
        lambda X: apply_map(outer, apply_map(inner, X)), inner.dim_in, outer.dim_out)


def map_from_state(rho):
    """
    C⁻¹(ρ): the map whose Choi matrix is ρ (input = first factor of ρ).
    """
    return SuperOperator(rho.dim_a, rho.dim_b, rho, 'choi-inverse')


def depolarizing_eb(n, p=None):
    """
    X -> (1-p)X + p·tr(X)·1/n. Entanglement-breaking for p in [n/(n+1), 1];
    the default p = n/(n+1) gives X -> (X + tr(X)1)/(n+1).
    """
    if p is None:
        p = n / (n + 1)
    if not 0 <= p <= 1:
        raise ValidationError(f"depolarizing parameter must lie in [0, 1], got {p}")
    choi = (1 - p) * tensor_core.gamma(n).projector().matrix + p * np.eye(n * n) / n
    return SuperOperator.from_choi(choi, n, n, f'depolarizing(p={p:.6g})')


def compress_channel(S, X, tol=tensor_core.RANK_TOL):
    """
    X†Ψ(·)X for X of shape dim_out × m'. Its Choi matrix is (1⊗X)†C(Ψ)(1⊗X);
    complete positivity is kept, full Choi rank only when X has full column rank.
    """
    X = tensor_core.as_matrix(X)
    if X.shape[0] != S.dim_out:
        raise DimensionError(f"compression matrix has {X.shape[0]} rows, map outputs {S.dim_out}")
    if tensor_core.numerical_rank(X, tol) < X.shape[1]:
        logger.warning("compression matrix is rank deficient; full Choi rank is not guaranteed")
    lift = np.kron(np.eye(S.dim_in), X)
    choi = lift.conj().T @ S.choi.matrix @ lift
    return SuperOperator.from_choi(choi, S.dim_in, X.shape[1], 'compressed')


def ppt_necessary_check(rho, tol=tensor_core.KERNEL_TOL):
    positive, _ = tensor_core.is_psd(rho, tol)
    if not positive:
        raise ValidationError("PPT check needs a positive semi-definite operator")
    is_ppt, lam_min = tensor_core.is_psd(tensor_core.partial_transpose(rho, 'second'), tol)
    decided = not is_ppt or rho.dims in PPT_DECIDES_SEPARABILITY
    if is_ppt:
        separable = True if decided else None
    else:
        separable = False
    return PPTVerdict('PPT' if is_ppt else 'NPT', lam_min, decided, separable)


def local_choi_inequalities(S, tol=tensor_core.KERNEL_TOL):
    """
    Spectral constraints every positive map obeys:
    C(Φ†) + 1⊗Φ†(1) >= 0 and C(Φ†) + Φ(1)ᵀ⊗1 >= 0.
    Returns the two minimum eigenvalues.
    """
    W = adjoint(S).choi
    first = W + np.kron(np.eye(W.dim_a), apply_map(adjoint(S), np.eye(S.dim_out)))
    second = W + np.kron(apply_map(S, np.eye(S.dim_in)).T, np.eye(W.dim_b))
    _, first_min = tensor_core.is_psd(first, tol)
    _, second_min = tensor_core.is_psd(second, tol)
    return first_min, second_min
