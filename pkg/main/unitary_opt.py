"""
Descent on the unitary group and searches inside subspaces.

Iterates move by right multiplication with exp(-tΞ), Ξ anti-Hermitian, so
every point stays unitary to machine precision. Gradients are either central
finite differences along an orthonormal basis of the Lie algebra u(n) or, in
`analytic` mode, built from the Euclidean gradient G = 2∂f/∂Ū of the
objective.
"""
import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import linalg, optimize

from main import tensor_core
from main.errors import DimensionError, ValidationError
from main.models.operators import BipartiteVector, complex_to_json

logger = logging.getLogger(__name__)

GRADIENT_MODES = ('analytic', 'finite-difference')
ARMIJO_FACTOR = 1e-4
MIN_STEP = 1e-14
STALL_GRADIENT_TOL = 1e-6
LOGDET_EPSILON = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iterations: int = 2000
    step_size: float = 0.1
    gradient_mode: str = 'finite-difference'
    fd_epsilon: float = 1e-6
    convergence_tol: float = 1e-9
    seed: int = 20240101

    def __post_init__(self):
        for name in ('restarts', 'max_iterations'):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ('step_size', 'convergence_tol'):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0 < self.fd_epsilon <= 1e-3:
            raise ValidationError(f"fd_epsilon must lie in (0, 1e-3], got {self.fd_epsilon}")
        if self.gradient_mode not in GRADIENT_MODES:
            raise ValidationError(f"gradient_mode must be one of {GRADIENT_MODES}, got {self.gradient_mode!r}")
        if self.seed < 0:
            raise ValidationError(f"seed must be non-negative, got {self.seed}")

    @classmethod
    def from_mapping(cls, mapping, prefix='OPTIMIZER_', **overrides):
        """
        Read OPTIMIZER_* keys (and DEFAULT_SEED) from a Flask-style config mapping.
        """
        values = {}
        for name in ('restarts', 'max_iterations', 'step_size', 'gradient_mode', 'fd_epsilon', 'convergence_tol'):
            key = f'{prefix}{name.upper()}'
            if key in mapping:
                values[name] = mapping[key]
        if 'DEFAULT_SEED' in mapping:
            values['seed'] = mapping['DEFAULT_SEED']
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def with_overrides(self, **overrides):
        return replace(self, **{key: value for key, value in overrides.items() if value is not None})

    def restart_rngs(self, count=None):
        children = np.random.SeedSequence(self.seed).spawn(count or self.restarts)
        return [np.random.default_rng(child) for child in children]

    def json(self):
        return {
            'restarts': self.restarts,
            'max_iterations': self.max_iterations,
            'step_size': self.step_size,
            'gradient_mode': self.gradient_mode,
            'fd_epsilon': self.fd_epsilon,
            'convergence_tol': self.convergence_tol,
            'seed': self.seed,
        }


@dataclass(frozen=True)
class OptimizationResult:
    best_value: float
    best_point: np.ndarray
    iterations_used: int
    converged: bool
    restart_values: Tuple[float, ...] = field(default_factory=tuple)
    best_restart: int = 0

    def json(self):
        return {
            'best_value': self.best_value,
            'best_point': complex_to_json(self.best_point),
            'iterations_used': self.iterations_used,
            'converged': self.converged,
            'restart_values': list(self.restart_values),
            'best_restart': self.best_restart,
        }


def skew(M):
    return (M - M.conj().T) / 2


@lru_cache(maxsize=None)
def lie_algebra_basis(n):
    """
    Orthonormal basis of u(n) for the inner product Re tr(A†B); n² elements.
    """
    basis = []
    for j in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[j, j] = 1j
        basis.append(E)
    for j in range(n):
        for k in range(j + 1, n):
            real_part = np.zeros((n, n), dtype=complex)
            real_part[j, k], real_part[k, j] = 1, -1
            imag_part = np.zeros((n, n), dtype=complex)
            imag_part[j, k] = imag_part[k, j] = 1j
            basis.extend([real_part / np.sqrt(2), imag_part / np.sqrt(2)])
    return tuple(basis)


@lru_cache(maxsize=None)
def _finite_difference_steps(n, epsilon):
    basis = lie_algebra_basis(n)
    return tuple((B, linalg.expm(epsilon * B), linalg.expm(-epsilon * B)) for B in basis)


def finite_difference_gradient(objective, U, epsilon):
    """
    Riemannian gradient Ξ ∈ u(n) from central differences f(U e^{±εB}).
    """
    Xi = np.zeros_like(U)
    for B, forward, backward in _finite_difference_steps(U.shape[0], epsilon):
        slope = (objective(U @ forward) - objective(U @ backward)) / (2 * epsilon)
        Xi += slope * B
    return Xi


def riemannian_gradient(U, euclidean_gradient):
    """
    Ξ = skew(U†G): the direction A ∈ u(n) with d/dt f(U e^{tA}) = Re tr(Ξ†A).
    """
    return skew(U.conj().T @ euclidean_gradient)


def unitary_descent(objective, U0, config, gradient=None):
    """
    Armijo descent U <- U·exp(-tΞ) from U0, t halved from `config.step_size`.

    `gradient(U)` returns the Euclidean gradient G = 2∂f/∂Ū and is only used
    in analytic mode. Returns (U, value, iterations, converged).
    """
    use_analytic = config.gradient_mode == 'analytic' and gradient is not None
    U = np.array(U0, dtype=complex)
    value = objective(U)
    for iteration in range(1, config.max_iterations + 1):
        if use_analytic:
            Xi = riemannian_gradient(U, gradient(U))
        else:
            Xi = finite_difference_gradient(objective, U, config.fd_epsilon)
        norm_sq = float(np.real(np.vdot(Xi, Xi)))
        if np.sqrt(norm_sq) < config.convergence_tol:
            return U, value, iteration, True
        step = config.step_size
        while step >= MIN_STEP:
            candidate = U @ linalg.expm(-step * Xi)
            candidate_value = objective(candidate)
            if candidate_value <= value - ARMIJO_FACTOR * step * norm_sq:
                break
            step /= 2
        else:
            # no admissible step: numerically stationary
            return U, value, iteration, bool(np.sqrt(norm_sq) <= STALL_GRADIENT_TOL)
        U, value = candidate, candidate_value
    logger.debug(f"unitary descent stopped after {config.max_iterations} iterations at {value:.12g}")
    return U, value, config.max_iterations, False


def _multistart(objective, n, config, gradient=None, starts=None):
    if starts is None:
        starts = [tensor_core.random_unitary(n, rng) for rng in config.restart_rngs()]
    outcomes = []
    for index, U0 in enumerate(starts):
        U, value, iterations, converged = unitary_descent(objective, U0, config, gradient)
        logger.debug(f"restart {index}: value {value:.12g} after {iterations} iterations")
        outcomes.append((U, value, iterations, converged))
    values = [outcome[1] for outcome in outcomes]
    best = int(np.argmin(values))
    U, _, iterations, converged = outcomes[best]
    if not converged:
        logger.warning(f"best restart {best} did not converge within {config.max_iterations} iterations")
    return OptimizationResult(
        best_value=float(objective(U)),
        best_point=U,
        iterations_used=iterations,
        converged=converged,
        restart_values=tuple(float(v) for v in values),
        best_restart=best,
    )


def witness_functional(W):
    """
    f(U) = ⟨Ω_U|W|Ω_U⟩ with Ω_U = (1⊗U)|Γ⟩/√n = vec(U)/√n.
    """
    n = W.dim_a
    matrix = W.matrix

    def value(U):
        v = U.T.reshape(-1)
        return float(np.real(np.vdot(v, matrix @ v))) / n

    def gradient(U):
        v = U.T.reshape(-1)
        return 2 * tensor_core.unvec(matrix @ v, n, n) / n

    return value, gradient


def minimize_witness_functional(W, config):
    if W.dim_a != W.dim_b:
        raise DimensionError(f"witness functional needs a square bipartition, got {W.dim_a}x{W.dim_b}")
    value, gradient = witness_functional(W)
    result = _multistart(value, W.dim_a, config, gradient)
    logger.info(f"witness functional minimum {result.best_value:.12g} (restart {result.best_restart})")
    return result


def conj_trace(U):
    return float(np.real(np.trace(U.conj() @ U)))


def minimize_conj_trace(n, config):
    """
    min over U(n) of tr(ŪU); the closed form is -n for even n and -(n-2) for odd n.
    """
    if n < 1:
        raise ValidationError(f"dimension must be positive, got {n}")
    return _multistart(conj_trace, n, config, lambda U: 2 * U.T)


def conj_trace_minimum(n):
    return -n if n % 2 == 0 else -(n - 2)


def analytic_minimizer(n):
    """
    1_{n/2}⊗σ_y for even n; odd n gets a trailing 1 on the diagonal.
    """
    if n < 1:
        raise ValidationError(f"dimension must be positive, got {n}")
    sigma_y = np.array([[0, -1j], [1j, 0]])
    U = np.zeros((n, n), dtype=complex)
    pairs = n // 2
    if pairs:
        U[:2 * pairs, :2 * pairs] = np.kron(np.eye(pairs), sigma_y)
    if n % 2:
        U[-1, -1] = 1
    return U


# Subspace searches. A point of the span is v = Bc with B the orthonormal basis
# (columns) and c a unit coefficient vector.

def _stack_basis(basis, dims=None):
    if not basis:
        raise ValidationError("subspace search needs a non-empty basis")
    if isinstance(basis[0], BipartiteVector):
        dims = basis[0].dims
        columns = [vector.coords for vector in basis]
    else:
        if dims is None:
            raise DimensionError("raw basis vectors need explicit dims")
        columns = [np.asarray(vector, dtype=complex).ravel() for vector in basis]
    B = np.column_stack(columns)
    if B.shape[0] != dims[0] * dims[1]:
        raise DimensionError(f"basis vectors of length {B.shape[0]} do not live in {dims[0]}x{dims[1]}")
    if not np.allclose(B.conj().T @ B, np.eye(B.shape[1]), atol=1e-8):
        raise ValidationError("subspace basis is not orthonormal")
    return B, tuple(dims)


class _CoefficientObjective:
    """
    Wraps a function of the (wide) coefficient matrix M of v = Bc and exposes
    value/gradient in c, in V ∈ U(k) via c = V e₀, and in real coordinates.
    """

    def __init__(self, B, dims, matrix_objective):
        self.B = B
        self.dims = dims
        self.matrix_objective = matrix_objective
        self.transposed = dims[0] > dims[1]

    def coefficient_matrix(self, c):
        M = (self.B @ c).reshape(self.dims)
        return M.T if self.transposed else M

    def value_and_gradient(self, c):
        value, G_M = self.matrix_objective(self.coefficient_matrix(c))
        if self.transposed:
            G_M = G_M.T
        return value, self.B.conj().T @ G_M.reshape(-1)

    def on_unitary(self):
        def value(V):
            return self.value_and_gradient(V[:, 0])[0]

        def gradient(V):
            G = np.zeros_like(V)
            G[:, 0] = self.value_and_gradient(V[:, 0])[1]
            return G

        return value, gradient

    def on_real_coordinates(self):
        k = self.B.shape[1]

        def fun(x):
            z = x[:k] + 1j * x[k:]
            radius = np.linalg.norm(z)
            c = z / radius
            value, G_c = self.value_and_gradient(c)
            G_z = (G_c - c * np.real(np.vdot(c, G_c))) / radius
            return value, np.concatenate([G_z.real, G_z.imag])

        return fun

    def vector(self, c):
        return BipartiteVector(self.dims[0], self.dims[1], self.B @ (c / np.linalg.norm(c)))


def _logdet_objective(M):
    """
    -log det(MM† + ε1): finite everywhere, decreasing as Schmidt rank fills up.
    """
    A = M @ M.conj().T + LOGDET_EPSILON * np.eye(M.shape[0])
    _, logdet = np.linalg.slogdet(A)
    return -float(logdet), -2 * np.linalg.solve(A, M)


def _max_entangled_objective(M):
    """
    ‖MM† - 1/r‖²_F, zero exactly on maximally entangled unit vectors.
    """
    r = M.shape[0]
    D = M @ M.conj().T - np.eye(r) / r
    return float(np.real(np.vdot(D, D))), 4 * D @ M


def _optimize_coefficients(objective, k, config):
    """
    Unitary descent on c = V e₀ from several starts, then a BFGS polish of the best c.
    """
    value, gradient = objective.on_unitary()
    result = _multistart(value, k, config, gradient)
    c0 = result.best_point[:, 0]
    polished = optimize.minimize(
        objective.on_real_coordinates(), np.concatenate([c0.real, c0.imag]),
        jac=True, method='BFGS', options={'gtol': 1e-14, 'maxiter': 500})
    z = polished.x[:k] + 1j * polished.x[k:]
    c = z / np.linalg.norm(z)
    if objective.value_and_gradient(c)[0] <= result.best_value:
        return c
    return c0


def max_schmidt_rank_in_subspace(basis, config, dims=None, samples=200, tol=tensor_core.RANK_TOL):
    """
    Largest numerical Schmidt rank over unit vectors of the span, together with
    a vector attaining it. Random combinations come first; when they stay
    below min(m, n) the smallest Schmidt coefficients are pushed up by
    maximizing log det of the reduced coefficient Gram matrix.
    """
    B, dims = _stack_basis(basis, dims)
    k = B.shape[1]
    target = min(dims)
    objective = _CoefficientObjective(B, dims, _logdet_objective)

    def rank_of(c):
        vector = objective.vector(c)
        return tensor_core.schmidt_decompose(vector, tol).numerical_rank, vector

    best_rank, best_vector = rank_of(np.eye(k, dtype=complex)[:, 0])
    if k > 1:
        rng = config.restart_rngs(1)[0]
        for _ in range(samples):
            if best_rank == target:
                break
            rank, vector = rank_of(tensor_core.random_complex_vector(k, rng))
            if rank > best_rank:
                best_rank, best_vector = rank, vector
        if best_rank < target:
            rank, vector = rank_of(_optimize_coefficients(objective, k, config))
            if rank > best_rank:
                best_rank, best_vector = rank, vector
    logger.debug(f"max Schmidt rank {best_rank}/{target} in a {k}-dimensional subspace")
    return best_rank, best_vector


def maximally_entangled_in_subspace(basis, config, dims=None, tol=1e-7):
    """
    A unit vector of the span with all min(m, n) Schmidt coefficients equal, or None.
    """
    B, dims = _stack_basis(basis, dims)
    k = B.shape[1]
    objective = _CoefficientObjective(B, dims, _max_entangled_objective)
    candidates = [np.eye(k, dtype=complex)[:, j] for j in range(k)]
    if k > 1:
        candidates.append(_optimize_coefficients(objective, k, config))
    for c in candidates:
        vector = objective.vector(c)
        if tensor_core.schmidt_decompose(vector).is_maximally_entangled(tol):
            return vector
    return None
