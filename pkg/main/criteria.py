"""
Optimality criteria for entanglement witnesses and positive maps.

Block-positivity is treated as a hypothesis. The sufficient criteria (kernel
Schmidt rank, maximally entangled trace bound, zero eigenvalues, spanning
product zeros, map trace) only ever announce Optimal/WeaklyOptimal under that
hypothesis; the necessary ones (operator inequalities, spectral bounds,
seesaw minimum, map trace bounds) can only falsify it.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import List, Tuple

import numpy as np

import main
from main import choi, tensor_core, unitary_opt
from main.errors import DimensionError, RankError, ValidationError
from main.models.operators import BipartiteOperator, BipartiteVector
from main.models.verdicts import CriterionVerdict, Status, WitnessReport
from main.unitary_opt import OptimizerConfig

logger = logging.getLogger(__name__)

NECESSARY = 'necessary-inequalities'
SPECTRAL = 'spectral-bounds'
KERNEL = 'kernel-schmidt'
TRACE_BOUND = 'trace-bound'
WEAK = 'weak-optimality'
SPANNING = 'spanning'
SEPARABLE_STATE = 'separable-state'
CHANNEL_CERTIFICATE = 'channel-certificate'
EB_CHANNEL = 'eb-channel'
CHANNEL_WEAK = 'channel-weak-optimality'
MAP_TRACE_BOUNDS = 'map-trace-bounds'
MAP_TRACE_OPTIMALITY = 'map-trace-optimality'
MAP_CHOI_INEQUALITIES = 'map-choi-inequalities'

# Fixed order used by run_all.
WITNESS_CRITERIA = (NECESSARY, SPECTRAL, KERNEL, TRACE_BOUND, WEAK, SPANNING)
MAP_CRITERIA = (MAP_TRACE_BOUNDS, MAP_TRACE_OPTIMALITY, MAP_CHOI_INEQUALITIES)
ALL_CRITERIA = WITNESS_CRITERIA + MAP_CRITERIA

_CONFIG_KEYS = {
    'hermitian_tol': 'HERMITIAN_TOL',
    'kernel_tol': 'KERNEL_TOL',
    'rank_tol': 'RANK_TOL',
    'eigen_match_tol': 'EIGEN_MATCH_TOL',
    'zero_tol': 'ZERO_TOL',
    'span_tol': 'SPAN_TOL',
    'seesaw_restarts': 'SEESAW_RESTARTS',
    'seesaw_max_iterations': 'SEESAW_MAX_ITERATIONS',
    'seesaw_improvement_tol': 'SEESAW_IMPROVEMENT_TOL',
    'subspace_samples': 'SUBSPACE_SAMPLES',
    'subspace_restarts': 'SUBSPACE_RESTARTS',
    'subspace_max_iterations': 'SUBSPACE_MAX_ITERATIONS',
    'max_entangled_tol': 'MAX_ENTANGLED_TOL',
    'max_entangled_samples': 'MAX_ENTANGLED_SAMPLES',
    'seed': 'DEFAULT_SEED',
}


@dataclass(frozen=True)
class CriteriaConfig:
    hermitian_tol: float = tensor_core.HERMITIAN_TOL
    kernel_tol: float = tensor_core.KERNEL_TOL
    rank_tol: float = tensor_core.RANK_TOL
    eigen_match_tol: float = 1e-8
    zero_tol: float = 1e-9
    span_tol: float = 1e-8
    seesaw_restarts: int = 64
    seesaw_max_iterations: int = 500
    seesaw_improvement_tol: float = 1e-12
    subspace_samples: int = 200
    subspace_restarts: int = 4
    subspace_max_iterations: int = 400
    max_entangled_tol: float = 1e-7
    max_entangled_samples: int = 1000
    seed: int = 20240101
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    @classmethod
    def from_mapping(cls, mapping, **overrides):
        values = {name: mapping[key] for name, key in _CONFIG_KEYS.items() if key in mapping}
        values['optimizer'] = OptimizerConfig.from_mapping(mapping)
        values.update({key: value for key, value in overrides.items() if value is not None})
        config = cls(**values)
        if config.optimizer.seed != config.seed:
            config = replace(config, optimizer=config.optimizer.with_overrides(seed=config.seed))
        return config

    def with_tolerance(self, tol):
        """
        The CLI --tol flag: one number for every "equals zero / equals target" decision.
        """
        if tol is None:
            return self
        if not tol > 0:
            raise ValidationError(f"tolerance must be positive, got {tol}")
        return replace(self, eigen_match_tol=tol, zero_tol=tol)

    def with_seed(self, seed):
        if seed is None:
            return self
        return replace(self, seed=seed, optimizer=self.optimizer.with_overrides(seed=seed))

    def with_restarts(self, restarts):
        if restarts is None:
            return self
        return replace(self, seesaw_restarts=restarts, optimizer=self.optimizer.with_overrides(restarts=restarts))

    @property
    def subspace_optimizer(self):
        return self.optimizer.with_overrides(
            restarts=self.subspace_restarts,
            max_iterations=self.subspace_max_iterations,
            seed=self.seed,
        )

    def rng(self, *salt):
        return np.random.default_rng(np.random.SeedSequence([self.seed, *salt]))

    def tolerances(self):
        return {
            'hermitian_tol': self.hermitian_tol,
            'kernel_tol': self.kernel_tol,
            'rank_tol': self.rank_tol,
            'eigen_match_tol': self.eigen_match_tol,
            'zero_tol': self.zero_tol,
            'span_tol': self.span_tol,
            'max_entangled_tol': self.max_entangled_tol,
        }


def _scale(W):
    return max(1.0, tensor_core.operator_norm(W))


def _hermitian(W, config):
    return W.with_matrix(tensor_core.require_hermitian(W, config.hermitian_tol, name='witness'))


def _min_eigenvalue(H):
    return tensor_core.hermitian_eig(H).min


def depolarized_second(W):
    """
    W + tr₂(W)⊗1, i.e. (n+1)(id⊗Ψ)(W) for the depolarizing channel Ψ of `choi.depolarizing_eb`.
    """
    return W + np.kron(tensor_core.partial_trace(W, 'second'), np.eye(W.dim_b))


def depolarized_first(W):
    return W + np.kron(np.eye(W.dim_a), tensor_core.partial_trace(W, 'first'))


def necessary_inequalities(W, threshold=0.0, config=None):
    """
    PSD constraints every block-positive operator satisfies:
    W + 1⊗tr₁(W) >= 0, W + tr₂(W)⊗1 >= 0, tr₁(W), tr₂(W) >= 0 and tr(W) >= 0.
    A threshold C is handled by testing the shifted witness W - C·1.
    """
    config = config or CriteriaConfig()
    W = _hermitian(W, config)
    if threshold:
        W = W - threshold * np.eye(W.size)
    checks = {
        'first_inequality': tensor_core.is_psd(depolarized_first(W), config.kernel_tol),
        'second_inequality': tensor_core.is_psd(depolarized_second(W), config.kernel_tol),
        'partial_trace_first': tensor_core.is_psd(tensor_core.partial_trace(W, 'first'), config.kernel_tol),
        'partial_trace_second': tensor_core.is_psd(tensor_core.partial_trace(W, 'second'), config.kernel_tol),
    }
    trace = W.trace().real
    evidence = {f'{name}_min_eigenvalue': lam_min for name, (_, lam_min) in checks.items()}
    evidence.update({'trace': trace, 'threshold': threshold})
    failed = [name for name, (ok, _) in checks.items() if not ok]
    if trace < -config.kernel_tol * _scale(W):
        failed.append('trace')
    if failed:
        return CriterionVerdict(NECESSARY, Status.NOT_BLOCK_POSITIVE, evidence,
                                notes=tuple(f'{name} violated' for name in failed),
                                headline=f"violated: {', '.join(failed)}")
    headline = f"min eigenvalues {evidence['first_inequality_min_eigenvalue']:.3g}, " \
               f"{evidence['second_inequality_min_eigenvalue']:.3g}"
    return CriterionVerdict(NECESSARY, Status.CONSISTENT, evidence, headline=headline)


def spectral_bounds(W, config=None):
    """
    λ_min(W) >= -tr(W), λ_min(W) >= -λ_max(tr₁W) and λ_min(W) >= -λ_max(tr₂W).
    """
    config = config or CriteriaConfig()
    W = _hermitian(W, config)
    lam_min = _min_eigenvalue(W)
    bounds = {
        'trace_bound': -W.trace().real,
        'partial_trace_first_bound': -tensor_core.hermitian_eig(tensor_core.partial_trace(W, 'first')).max,
        'partial_trace_second_bound': -tensor_core.hermitian_eig(tensor_core.partial_trace(W, 'second')).max,
    }
    slack = config.kernel_tol * _scale(W)
    violated = [name for name, bound in bounds.items() if lam_min < bound - slack]
    evidence = {'min_eigenvalue': lam_min, **bounds}
    evidence['tight'] = [name for name, bound in bounds.items() if abs(lam_min - bound) <= slack]
    if violated:
        return CriterionVerdict(SPECTRAL, Status.NOT_BLOCK_POSITIVE, evidence,
                                notes=tuple(f'{name} violated' for name in violated),
                                headline=f"λ_min {lam_min:.6g} below {', '.join(violated)}")
    return CriterionVerdict(SPECTRAL, Status.CONSISTENT, evidence, headline=f"λ_min {lam_min:.6g}")


def _kernel_vectors(H, dims, config):
    return [BipartiteVector(dims[0], dims[1], v) for v in tensor_core.kernel_basis(H, config.kernel_tol)]


def _compressed_channel_certificate(W, vector, config):
    """
    From a kernel vector vec(X) of W + tr₂(W)⊗1 with full Schmidt rank build
    Ψ̃ = X†Ψ(·)X for the depolarizing channel Ψ: CP, full Choi rank and
    tr(W·C(Ψ̃†)) = 0.
    """
    X = tensor_core.unvec(vector)
    compressed = choi.compress_channel(choi.depolarizing_eb(W.dim_b), X, config.rank_tol)
    overlap = np.trace(W.matrix @ choi.adjoint(compressed).choi.matrix)
    return compressed, {
        'certificate_channel_trace_overlap': float(overlap.real),
        'certificate_channel_min_choi_eigenvalue': _min_eigenvalue(compressed.choi),
    }


def kernel_schmidt_criterion(W, config=None):
    """
    W is optimal when ker(W + tr₂(W)⊗1) holds a vector of Schmidt rank m (m <= n),
    or ker(W + 1⊗tr₁(W)) one of Schmidt rank n (m >= n).
    """
    config = config or CriteriaConfig()
    W = _hermitian(W, config)
    m, n = W.dims
    target = min(m, n)
    branches = []
    if m <= n:
        branches.append(('second', depolarized_second(W)))
    if m >= n:
        branches.append(('first', depolarized_first(W)))

    evidence = {'target_rank': target}
    best = None
    for side, H in branches:
        kernel = _kernel_vectors(H, W.dims, config)
        evidence[f'kernel_dimension_{side}'] = len(kernel)
        evidence[f'min_eigenvalue_{side}'] = _min_eigenvalue(H)
        if not kernel:
            continue
        rank, vector = unitary_opt.max_schmidt_rank_in_subspace(
            kernel, config.subspace_optimizer, samples=config.subspace_samples, tol=config.rank_tol)
        evidence[f'max_schmidt_rank_{side}'] = rank
        if best is None or rank > best[1]:
            best = (side, rank, vector)
        if rank == target:
            break

    if best is None:
        return CriterionVerdict(KERNEL, Status.INCONCLUSIVE, evidence, notes=('empty kernel',),
                                headline='empty kernel')
    side, rank, vector = best
    certificate = {'kernel_vector': vector}
    if rank < target:
        return CriterionVerdict(KERNEL, Status.INCONCLUSIVE, evidence, certificate,
                                headline=f"rank {rank}/{target}")
    evidence['schmidt_coefficients'] = tensor_core.schmidt_decompose(vector, config.rank_tol).coefficients
    evidence['kernel_side'] = side
    if side == 'second':
        channel, channel_evidence = _compressed_channel_certificate(W, vector, config)
        evidence.update(channel_evidence)
        certificate['channel'] = channel
    return CriterionVerdict(KERNEL, Status.OPTIMAL, evidence, certificate, headline=f"rank {rank}/{target}")


def random_maximally_entangled(m, n, rng):
    """
    Unit vector with min(m, n) equal Schmidt coefficients and Haar-random local bases.
    """
    r = min(m, n)
    coefficients = tensor_core.random_unitary(m, rng)[:, :r] @ tensor_core.random_unitary(n, rng)[:r, :]
    return BipartiteVector(m, n, coefficients.reshape(-1) / np.sqrt(r))


def trace_bound_criterion(W, config=None):
    """
    ⟨Ω|W|Ω⟩ >= -tr(W)/min(m, n) for every maximally entangled Ω; equality at
    some Ω certifies optimality. Equality forces Ω into the eigenspace of the
    target value whenever that value is λ_min, which is where the search runs.
    """
    config = config or CriteriaConfig()
    W = _hermitian(W, config)
    m, n = W.dims
    r = min(m, n)
    target = -W.trace().real / r
    scale = _scale(W)
    decomposition = tensor_core.hermitian_eig(W)
    evidence = {'target': target, 'min_eigenvalue': decomposition.min}
    if m == n:
        evidence['gamma_value'] = W.expectation(tensor_core.gamma(n).coords).real / n

    rng = config.rng(2)
    states = [random_maximally_entangled(m, n, rng) for _ in range(config.max_entangled_samples)]
    sampled = [W.expectation(state.coords).real for state in states]
    if sampled:
        evidence['sampled_min'] = min(sampled)
        worst = int(np.argmin(sampled))
        if sampled[worst] < target - config.eigen_match_tol * scale:
            omega = states[worst]
            return CriterionVerdict(TRACE_BOUND, Status.BOUND_VIOLATED, evidence, {'omega': omega},
                                    notes=('maximally entangled state below -tr(W)/min(m,n)',),
                                    headline=f"value {sampled[worst]:.6g} < target {target:.6g}")

    if m == n and abs(evidence['gamma_value'] - target) <= config.eigen_match_tol * scale:
        omega = tensor_core.gamma(n).normalized()
        evidence['value'] = evidence['gamma_value']
        return CriterionVerdict(TRACE_BOUND, Status.OPTIMAL, evidence, {'omega': omega},
                                headline=f"value {evidence['value']:.6g} = target {target:.6g} at Γ")

    eigenspace = decomposition.eigenspace(target, config.eigen_match_tol * scale)
    evidence['eigenspace_dimension'] = eigenspace.shape[1]
    if eigenspace.shape[1] == 0:
        return CriterionVerdict(TRACE_BOUND, Status.INCONCLUSIVE, evidence,
                                notes=('target is not an eigenvalue',),
                                headline=f"target {target:.6g} not an eigenvalue")
    basis = [BipartiteVector(m, n, eigenspace[:, k]) for k in range(eigenspace.shape[1])]
    omega = unitary_opt.maximally_entangled_in_subspace(
        basis, config.subspace_optimizer, tol=config.max_entangled_tol)
    if omega is None:
        return CriterionVerdict(TRACE_BOUND, Status.INCONCLUSIVE, evidence,
                                notes=('no maximally entangled vector in the target eigenspace',),
                                headline=f"target {target:.6g}, no maximally entangled eigenvector")
    value = W.expectation(omega.coords).real
    evidence['value'] = value
    return CriterionVerdict(TRACE_BOUND, Status.OPTIMAL, evidence, {'omega': omega},
                            headline=f"value {value:.6g} = target {target:.6g}")


def weak_optimality_criterion(W, config=None):
    """
    A zero eigenvalue of W + tr₂(W)⊗1 or W + 1⊗tr₁(W) makes W weakly optimal.
    """
    config = config or CriteriaConfig()
    W = _hermitian(W, config)
    tol = config.eigen_match_tol * _scale(W)
    evidence = {}
    for side, H in (('second', depolarized_second(W)), ('first', depolarized_first(W))):
        decomposition = tensor_core.hermitian_eig(H)
        evidence[f'min_abs_eigenvalue_{side}'] = float(np.min(np.abs(decomposition.eigenvalues)))
        zero_space = decomposition.eigenspace(0.0, tol)
        if zero_space.shape[1]:
            return CriterionVerdict(WEAK, Status.WEAKLY_OPTIMAL, evidence,
                                    {'kernel_vector': BipartiteVector(W.dim_a, W.dim_b, zero_space[:, 0])},
                                    headline=f"zero eigenvalue ({side})")
    smallest = min(evidence.values())
    return CriterionVerdict(WEAK, Status.INCONCLUSIVE, evidence, headline=f"smallest |λ| {smallest:.3g}")


@dataclass(frozen=True)
class ProductZeros:
    """
    Seesaw outcome: the converged product vectors at value ~0 and the global minimum found.
    """
    zeros: List[BipartiteVector]
    min_value: float
    min_vector: BipartiteVector
    restart_values: Tuple[float, ...]

    def json(self):
        return {
            'zero_count': len(self.zeros),
            'min_value': self.min_value,
            'min_vector': self.min_vector.json(),
        }


def _bottom_eigenvector(H, rng, tol=1e-10):
    """
    Lowest eigenvector; a degenerate bottom eigenspace yields a random unit vector inside it.
    """
    decomposition = tensor_core.hermitian_eig((H + H.conj().T) / 2)
    lowest = decomposition.min
    space = decomposition.eigenspace(lowest, tol * max(1.0, abs(lowest), abs(decomposition.max)))
    if space.shape[1] > 1:
        vector = space @ tensor_core.random_complex_vector(space.shape[1], rng)
    else:
        vector = decomposition.eigenvectors[:, 0]
    return vector / np.linalg.norm(vector), lowest


def seesaw_minimize(W, rng, config):
    """
    Alternating minimization of ⟨x⊗y|W|x⊗y⟩ from one random start.
    """
    T = W.tensor()
    y = tensor_core.random_complex_vector(W.dim_b, rng)
    y /= np.linalg.norm(y)
    value = np.inf
    for iteration in range(config.seesaw_max_iterations):
        x, _ = _bottom_eigenvector(np.einsum('j,ijkl,l->ik', y.conj(), T, y), rng)
        y, new_value = _bottom_eigenvector(np.einsum('i,ijkl,k->jl', x.conj(), T, x), rng)
        improvement = value - new_value
        value = new_value
        if improvement < config.seesaw_improvement_tol:
            break
    return BipartiteVector(W.dim_a, W.dim_b, np.kron(x, y)), float(value)


def collect_product_zeros(W, restarts=None, seed=None, config=None):
    config = (config or CriteriaConfig()).with_seed(seed)
    W = _hermitian(W, config)
    restarts = restarts or config.seesaw_restarts
    threshold = config.zero_tol * _scale(W)
    children = np.random.SeedSequence(config.seed).spawn(restarts)
    results = [seesaw_minimize(W, np.random.default_rng(child), config) for child in children]
    values = [value for _, value in results]
    best = int(np.argmin(values))
    zeros = [vector for vector, value in results if abs(value) <= threshold]
    logger.debug(f"seesaw: {len(zeros)} zeros out of {restarts} restarts, minimum {values[best]:.3e}")
    return ProductZeros(zeros, values[best], results[best][0], tuple(values))


def _require_product(vector, config, label='vector'):
    rank = tensor_core.schmidt_decompose(vector, config.rank_tol).numerical_rank
    if rank != 1:
        raise ValidationError(f"{label} is not a product vector (Schmidt rank {rank})")


def spanning_certificate(W, zeros, config=None):
    """
    If the product zeros span the whole space, ρ = (1/C)Σ|z⟩⟨z| is a full-rank
    separable state with tr(Wρ) = 0, which is the spanning property.
    """
    config = config or CriteriaConfig()
    W = _hermitian(W, config)
    threshold = config.zero_tol * _scale(W)
    normalized = []
    for index, z in enumerate(zeros):
        z = z.normalized()
        value = W.expectation(z.coords).real
        if abs(value) > threshold:
            raise ValidationError(f"zero {index} has ⟨z|W|z⟩ = {value:.3e}, above tolerance {threshold:.1e}")
        _require_product(z, config, f'zero {index}')
        normalized.append(z)
    full = W.size
    # a zero at value ~zero_tol is only accurate to ~sqrt(zero_tol) in its coordinates
    span_tol = max(config.span_tol, float(np.sqrt(config.zero_tol)))
    dimension = tensor_core.span_dimension([z.coords for z in normalized], span_tol)
    evidence = {'span_dimension': dimension, 'full_dimension': full, 'zero_count': len(normalized),
                'span_tolerance': span_tol}
    if dimension < full:
        return CriterionVerdict(SPANNING, Status.INCONCLUSIVE, evidence,
                                headline=f"span {dimension}/{full}")
    rho_matrix = sum(z.projector().matrix for z in normalized) / len(normalized)
    rho = BipartiteOperator(W.dim_a, W.dim_b, rho_matrix)
    rank = tensor_core.numerical_rank(rho.matrix, config.rank_tol)
    overlap = float(np.trace(W.matrix @ rho.matrix).real)
    evidence.update({'state_rank': rank, 'trace_with_state': overlap})
    if rank < full:
        return CriterionVerdict(SPANNING, Status.INCONCLUSIVE, evidence,
                                notes=('zeros span numerically but the separable state is rank deficient',),
                                headline=f"span {dimension}/{full}, state rank {rank}")
    return CriterionVerdict(SPANNING, Status.OPTIMAL, evidence, {'separable_state': rho, 'zeros': normalized},
                            headline=f"span {dimension}/{full}")


def product_zero_search(W, config=None):
    """
    Seesaw zeros followed by the spanning certificate; a negative minimum falsifies block-positivity.
    """
    config = config or CriteriaConfig()
    W = _hermitian(W, config)
    found = collect_product_zeros(W, config=config)
    if found.min_value < -config.zero_tol * _scale(W):
        return CriterionVerdict(SPANNING, Status.NOT_BLOCK_POSITIVE,
                                {'seesaw_min': found.min_value, 'zero_count': len(found.zeros)},
                                {'product_vector': found.min_vector},
                                headline=f"product value {found.min_value:.6g} < 0")
    verdict = spanning_certificate(W, found.zeros, config)
    return replace(verdict, evidence={**verdict.evidence, 'seesaw_min': found.min_value})


def spanning_from_separable_state(W, rho, decomposition, config=None):
    """
    A full-rank separable ρ = Σ p_i |z_i⟩⟨z_i| with tr(Wρ) = 0 gives the spanning
    property. `decomposition` is a list of (p_i, product vector) pairs.
    """
    config = config or CriteriaConfig()
    W = _hermitian(W, config)
    if rho.dims != W.dims:
        raise DimensionError(f"state on {rho.dims} does not match witness on {W.dims}")
    positive, lam_min = tensor_core.is_psd(rho, config.kernel_tol)
    if not positive:
        raise ValidationError(f"state is not positive semi-definite (λ_min = {lam_min:.3e})")
    if abs(rho.trace() - 1) > 1e-9:
        raise ValidationError(f"state has trace {rho.trace().real:.12g}, expected 1")
    rank = tensor_core.numerical_rank(rho.matrix, config.rank_tol)
    if rank < rho.size:
        raise RankError(f"state has rank {rank}, full rank {rho.size} required")
    reassembled = np.zeros_like(rho.matrix)
    summand_values = []
    for index, (weight, z) in enumerate(decomposition):
        if weight < 0:
            raise ValidationError(f"decomposition weight {index} is negative")
        z = z.normalized()
        _require_product(z, config, f'decomposition vector {index}')
        reassembled = reassembled + weight * z.projector().matrix
        summand_values.append(W.expectation(z.coords).real)
    if not np.allclose(reassembled, rho.matrix, atol=1e-9):
        raise ValidationError("decomposition does not reassemble the state")

    threshold = config.zero_tol * _scale(W)
    overlap = float(np.trace(W.matrix @ rho.matrix).real)
    evidence = {'trace_with_state': overlap, 'state_rank': rank, 'summand_values': summand_values}
    if summand_values and min(summand_values) < -threshold:
        return CriterionVerdict(SEPARABLE_STATE, Status.NOT_BLOCK_POSITIVE, evidence,
                                headline=f"product value {min(summand_values):.6g} < 0")
    if abs(overlap) <= threshold:
        return CriterionVerdict(SEPARABLE_STATE, Status.OPTIMAL, evidence, {'separable_state': rho},
                                headline=f"tr(Wρ) = {overlap:.3g}, rank {rank}")
    return CriterionVerdict(SEPARABLE_STATE, Status.INCONCLUSIVE, evidence,
                            headline=f"tr(Wρ) = {overlap:.6g}")


def _entanglement_breaking(S, attested):
    """
    Attested, or decided by PPT on the normalized Choi matrix where PPT is equivalent.
    """
    if attested:
        return True, 'attested'
    choi_state = S.choi * (1 / S.choi.trace().real)
    verdict = choi.ppt_necessary_check(choi_state)
    if verdict.separability_decided and verdict.separable:
        return True, 'PPT decides separability'
    return False, 'entanglement breaking not established'


def channel_certificate_from_state(W, rho, config=None):
    """
    Ψ = C⁻¹(ρ)†, which is entanglement breaking with full Choi rank when ρ is separable and of full rank.
    """
    config = config or CriteriaConfig()
    W = _hermitian(W, config)
    channel = choi.adjoint(choi.map_from_state(rho))
    properties = choi.channel_properties(channel, config.kernel_tol)
    overlap = float(np.trace(W.matrix @ choi.adjoint(channel).choi.matrix).real)
    evidence = {'trace_overlap': overlap, **properties.json()}
    certificate = {'channel': channel}
    if properties.completely_positive and properties.full_choi_rank \
            and abs(overlap) <= config.zero_tol * _scale(W):
        return CriterionVerdict(CHANNEL_CERTIFICATE, Status.OPTIMAL, evidence, certificate,
                                notes=('entanglement breaking because the state is separable',),
                                headline=f"tr(W·C(Ψ†)) = {overlap:.3g}")
    return CriterionVerdict(CHANNEL_CERTIFICATE, Status.INCONCLUSIVE, evidence, certificate,
                            headline=f"tr(W·C(Ψ†)) = {overlap:.6g}")


def eb_channel_criterion(W, channel, entanglement_breaking_attested=False, config=None):
    """
    For Ψ: C^{n×n} -> C^{k×k} entanglement breaking with full Choi rank, W is
    optimal if tr(W·C(Ψ†)) = 0 (k = m) or if ker((id⊗Ψ)(W)) holds a vector of
    Schmidt rank m (k >= m).
    """
    config = config or CriteriaConfig()
    W = _hermitian(W, config)
    if channel.dim_in != W.dim_b:
        raise DimensionError(f"channel input {channel.dim_in} does not match second factor {W.dim_b}")
    properties = choi.channel_properties(channel, config.kernel_tol)
    breaking, reason = _entanglement_breaking(channel, entanglement_breaking_attested)
    evidence = {**properties.json(), 'entanglement_breaking': breaking}
    notes = (reason,)
    if not (properties.completely_positive and properties.full_choi_rank and breaking):
        return CriterionVerdict(EB_CHANNEL, Status.INCONCLUSIVE, evidence, notes=notes,
                                headline='channel is not a full-rank entanglement breaking channel')
    if channel.dim_out == W.dim_a:
        overlap = float(np.trace(W.matrix @ choi.adjoint(channel).choi.matrix).real)
        evidence['trace_overlap'] = overlap
        image = choi.extend_apply(channel, W, 'second')
        evidence['gamma_residual'] = float(np.linalg.norm(image.matrix @ tensor_core.gamma(W.dim_a).coords))
        if abs(overlap) <= config.zero_tol * _scale(W):
            return CriterionVerdict(EB_CHANNEL, Status.OPTIMAL, evidence, {'channel': channel}, notes,
                                    headline=f"tr(W·C(Ψ†)) = {overlap:.3g}")
    if channel.dim_out >= W.dim_a:
        image = choi.extend_apply(channel, W, 'second')
        kernel = _kernel_vectors(image, image.dims, config)
        evidence['kernel_dimension'] = len(kernel)
        if kernel:
            rank, vector = unitary_opt.max_schmidt_rank_in_subspace(
                kernel, config.subspace_optimizer, samples=config.subspace_samples, tol=config.rank_tol)
            evidence['max_schmidt_rank'] = rank
            if rank == W.dim_a:
                return CriterionVerdict(EB_CHANNEL, Status.OPTIMAL, evidence,
                                        {'channel': channel, 'kernel_vector': vector}, notes,
                                        headline=f"rank {rank}/{W.dim_a}")
    return CriterionVerdict(EB_CHANNEL, Status.INCONCLUSIVE, evidence, notes=notes, headline='no certificate')


def channel_weak_optimality(W, channel, entanglement_breaking_attested=False, config=None):
    """
    A zero eigenvalue of (id⊗Ψ)(W) for Ψ entanglement breaking with full Choi
    rank makes W weakly optimal. Without full Choi rank nothing follows: W = 1
    with Ψ = tr(·)|0⟩⟨0| has such a zero eigenvalue but is not weakly optimal.
    """
    config = config or CriteriaConfig()
    W = _hermitian(W, config)
    image = choi.extend_apply(channel, W, 'second')
    decomposition = tensor_core.hermitian_eig(image)
    zero_space = decomposition.eigenspace(0.0, config.eigen_match_tol * _scale(image))
    properties = choi.channel_properties(channel, config.kernel_tol)
    breaking, reason = _entanglement_breaking(channel, entanglement_breaking_attested)
    evidence = {'zero_eigenvalue': bool(zero_space.shape[1]), 'min_eigenvalue': decomposition.min,
                'full_choi_rank': properties.full_choi_rank, 'entanglement_breaking': breaking}
    if not zero_space.shape[1]:
        return CriterionVerdict(CHANNEL_WEAK, Status.INCONCLUSIVE, evidence, notes=(reason,),
                                headline='no zero eigenvalue')
    certificate = {'kernel_vector': BipartiteVector(image.dim_a, image.dim_b, zero_space[:, 0])}
    if not properties.full_choi_rank:
        return CriterionVerdict(CHANNEL_WEAK, Status.INCONCLUSIVE, evidence, certificate,
                                notes=('zero eigenvalue but the channel lacks full Choi rank',),
                                headline='zero eigenvalue, Choi rank deficient')
    if not breaking:
        return CriterionVerdict(CHANNEL_WEAK, Status.INCONCLUSIVE, evidence, certificate, notes=(reason,),
                                headline='zero eigenvalue, channel not known to be entanglement breaking')
    return CriterionVerdict(CHANNEL_WEAK, Status.WEAKLY_OPTIMAL, evidence, certificate, notes=(reason,),
                            headline='zero eigenvalue')


def _require_square(S):
    if not S.is_square:
        raise DimensionError(f"criterion needs a square map, got {S.dim_in}->{S.dim_out}")


def map_trace_bounds(S, config=None):
    """
    Trace bounds for a positive map on n×n matrices:
    tr(Φ) >= -tr(Φ(1)), tr(Φ) >= -n·min(‖Φ(1)‖, ‖Φ†(1)‖), and tr(Φ) >= -n when Φ is TP or unital.
    """
    config = config or CriteriaConfig()
    _require_square(S)
    n = S.dim_in
    trace = choi.superoperator_trace(S)
    image_of_identity = choi.apply_map(S, np.eye(n))
    adjoint_image = choi.apply_map(choi.adjoint(S), np.eye(n))
    properties = choi.channel_properties(S, config.kernel_tol)
    bounds = {
        'identity_image_bound': -float(np.trace(image_of_identity).real),
        'operator_norm_bound': -n * min(tensor_core.operator_norm(image_of_identity),
                                        tensor_core.operator_norm(adjoint_image)),
    }
    if properties.trace_preserving or properties.unital:
        bounds['normalized_bound'] = -float(n)
    slack = config.eigen_match_tol * max(1.0, abs(trace))
    violated = [name for name, bound in bounds.items() if trace < bound - slack]
    saturated = [name for name, bound in bounds.items() if abs(trace - bound) <= slack]
    evidence = {'trace': trace, **bounds, 'saturated': saturated,
                'trace_preserving': properties.trace_preserving, 'unital': properties.unital}
    if violated:
        return CriterionVerdict(MAP_TRACE_BOUNDS, Status.BOUND_VIOLATED, evidence,
                                notes=tuple(f'{name} violated: map is not positive' for name in violated),
                                headline=f"trace {trace:.6g} violates {', '.join(violated)}")
    return CriterionVerdict(MAP_TRACE_BOUNDS, Status.CONSISTENT, evidence, headline=f"trace {trace:.6g}")


def _check_unitary(U, n, tol=1e-9):
    U = tensor_core.as_matrix(U)
    if U.shape != (n, n):
        raise DimensionError(f"U must be {n}x{n}, got {U.shape}")
    if not np.allclose(U.conj().T @ U, np.eye(n), atol=tol):
        raise RankError("U is not unitary")
    return U


def map_trace_optimality(S, U=None, search=False, config=None):
    """
    ⟨vec U|C(Φ)|vec U⟩ = tr(Φ(U†(·)U)) = -tr(Φ(1)) for a unitary U makes both
    C(Φ) and C(Φ†) optimal. With `search` the left side is minimized over U(n).
    """
    config = config or CriteriaConfig()
    _require_square(S)
    n = S.dim_in
    U = np.eye(n, dtype=complex) if U is None else _check_unitary(U, n)
    target = -float(np.trace(choi.apply_map(S, np.eye(n))).real)
    tol = config.eigen_match_tol * max(1.0, abs(target))

    def value_at(V):
        return S.choi.expectation(V.T.reshape(-1)).real

    value = value_at(U)
    evidence = {'target': target, 'value': value, 'searched': False}
    if abs(value - target) > tol and search:
        result = unitary_opt.minimize_witness_functional(S.choi, config.optimizer)
        evidence.update({'searched': True, 'search_value': result.best_value * n})
        if result.best_value * n < value:
            U, value = result.best_point, result.best_value * n
            evidence['value'] = value
    if value < target - tol:
        return CriterionVerdict(MAP_TRACE_OPTIMALITY, Status.BOUND_VIOLATED, evidence, {'unitary': U},
                                notes=('value below -tr(Φ(1)): map is not positive',),
                                headline=f"value {value:.6g} < target {target:.6g}")
    if abs(value - target) <= tol:
        return CriterionVerdict(MAP_TRACE_OPTIMALITY, Status.OPTIMAL, evidence, {'unitary': U},
                                headline=f"value {value:.6g} = target {target:.6g}")
    return CriterionVerdict(MAP_TRACE_OPTIMALITY, Status.INCONCLUSIVE, evidence,
                            headline=f"value {value:.6g} > target {target:.6g}")


def map_choi_inequalities(S, config=None):
    """
    C(Φ†) + 1⊗Φ†(1) >= 0 and C(Φ†) + Φ(1)ᵀ⊗1 >= 0 for Φ positive; for TP or
    unital Φ this puts every Choi eigenvalue at or above -1.
    """
    config = config or CriteriaConfig()
    first_min, second_min = choi.local_choi_inequalities(S, config.kernel_tol)
    properties = choi.channel_properties(S, config.kernel_tol)
    scale = _scale(S.choi)
    evidence = {'first_min_eigenvalue': first_min, 'second_min_eigenvalue': second_min,
                'min_choi_eigenvalue': properties.min_choi_eigenvalue}
    violated = [name for name, lam in (('first', first_min), ('second', second_min))
                if lam < -config.kernel_tol * scale]
    if (properties.trace_preserving or properties.unital) \
            and properties.min_choi_eigenvalue < -1 - config.kernel_tol * scale:
        violated.append('choi_eigenvalue_floor')
    if violated:
        return CriterionVerdict(MAP_CHOI_INEQUALITIES, Status.BOUND_VIOLATED, evidence,
                                notes=tuple(f'{name} violated: map is not positive' for name in violated),
                                headline=f"violated: {', '.join(violated)}")
    return CriterionVerdict(MAP_CHOI_INEQUALITIES, Status.CONSISTENT, evidence,
                            headline=f"min eigenvalues {first_min:.3g}, {second_min:.3g}")


_WITNESS_RUNNERS = {
    NECESSARY: necessary_inequalities,
    SPECTRAL: spectral_bounds,
    KERNEL: kernel_schmidt_criterion,
    TRACE_BOUND: trace_bound_criterion,
    WEAK: weak_optimality_criterion,
    SPANNING: product_zero_search,
}

_MAP_RUNNERS = {
    MAP_TRACE_BOUNDS: map_trace_bounds,
    MAP_TRACE_OPTIMALITY: map_trace_optimality,
    MAP_CHOI_INEQUALITIES: map_choi_inequalities,
}


def run_all(spec, config=None, criteria=None):
    """
    Run every applicable criterion in the fixed order of ALL_CRITERIA and
    aggregate. Without a block-positivity attestation Optimal/WeaklyOptimal
    claims are downgraded to Inconclusive.
    """
    config = config or CriteriaConfig()
    selected = ALL_CRITERIA if criteria is None else tuple(criteria)
    unknown = [name for name in selected if name not in ALL_CRITERIA]
    if unknown:
        raise ValidationError(f"unknown criteria: {', '.join(unknown)}")

    verdicts = []
    for criterion_id in ALL_CRITERIA:
        if criterion_id not in selected:
            continue
        if criterion_id in _WITNESS_RUNNERS:
            verdict = _WITNESS_RUNNERS[criterion_id](spec.witness, config=config)
        elif spec.source_map is not None and spec.source_map.is_square:
            verdict = _MAP_RUNNERS[criterion_id](spec.source_map, config=config)
        else:
            continue
        if not spec.block_positive:
            verdict = verdict.downgraded()
        logger.info(verdict.summary_line())
        verdicts.append(verdict)

    return WitnessReport(
        name=spec.name,
        dims=spec.dims,
        verdicts=verdicts,
        seed=config.seed,
        tolerances=config.tolerances(),
        version=main.__version__,
        block_positive_attested=spec.block_positive,
        source_map=spec.source_map.name if spec.source_map else None,
    )
