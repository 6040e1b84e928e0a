"""
Catalog of witnesses and the positive maps they come from.

Every catalog entry stores the map Φ next to its witness W = C(Φ†) (see
`choi.adjoint`), so criteria can run on either side of the dictionary.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from main import choi, tensor_core
from main.errors import DimensionError, ValidationError
from main.models.operators import BipartiteOperator
from main.models.superoperator import SuperOperator
from main.models.witness_spec import WitnessSpec

logger = logging.getLogger(__name__)

PARAM_TOL = 1e-10
SIGMA_Y = np.array([[0, -1j], [1j, 0]])


def _spec_from_map(name, source_map, params, block_positive=True):
    return WitnessSpec(
        name=name,
        witness=choi.adjoint(source_map).choi,
        params=params,
        source_map=source_map,
        block_positive=block_positive,
    )


def _require_dimension(n, minimum=2, family='witness'):
    if int(n) != n or n < minimum:
        raise ValidationError(f"{family} needs dimension >= {minimum}, got {n}")
    return int(n)


def validate_antisymmetric(U, require_unitary=False, tol=PARAM_TOL, name='U'):
    """
    Uᵀ = -U and U†U <= 1 (or = 1 with `require_unitary`), each within `tol`.
    """
    U = tensor_core.as_matrix(U)
    if U.shape[0] != U.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {U.shape}")
    asymmetry = float(np.max(np.abs(U + U.T), initial=0.0))
    if asymmetry > tol:
        raise ValidationError(f"{name} is not antisymmetric: max |Uᵀ + U| = {asymmetry:.3e}")
    gram = U.conj().T @ U
    if require_unitary:
        defect = float(np.max(np.abs(gram - np.eye(U.shape[0])), initial=0.0))
        if defect > tol:
            raise ValidationError(f"{name} is not unitary: max |U†U - 1| = {defect:.3e}")
    else:
        top = float(np.linalg.eigvalsh((gram + gram.conj().T) / 2)[-1]) if U.size else 0.0
        if top > 1 + tol:
            raise ValidationError(f"{name} is not sub-unitary: λ_max(U†U) = {top:.12g}")
    return U


def transpose_conjugation(U):
    return lambda X: U @ X.T @ U.conj().T


def reduction(X):
    return np.trace(X) * np.eye(X.shape[0]) - X


def flip_witness(n):
    n = _require_dimension(n, family='flip witness')
    return _spec_from_map('flip', choi.transpose_map(n), {'n': n})


def reduction_witness(n):
    n = _require_dimension(n, family='reduction witness')
    return _spec_from_map('reduction', choi.reduction_map(n), {'n': n})


def choi_map():
    """
    X -> 2tr(X)1 - 2diag(X₃₃, X₁₁, X₂₂) - X on 3x3 matrices.
    """
    shift = [2, 0, 1]

    def apply(X):
        return 2 * np.trace(X) * np.eye(3) - 2 * np.diag(np.diag(X)[shift]) - X

    return SuperOperator.from_function(apply, 3, 3, 'choi')


def choi_witness(variant='original'):
    if variant == 'original':
        return _spec_from_map('choi', choi_map(), {'variant': variant})
    if variant == 'improved':
        W = choi_map_witness_matrix()
        for i, j in ((0, 1), (1, 2), (2, 0)):
            W[i * 3 + j, i * 3 + j] -= 1
        witness = BipartiteOperator(3, 3, W)
        source_map = choi.adjoint(choi.map_from_state(witness))
        return WitnessSpec('choi-improved', witness, {'variant': variant},
                           SuperOperator(3, 3, source_map.choi, 'choi-improved'))
    raise ValidationError(f"unknown Choi witness variant {variant!r}")


def choi_map_witness_matrix():
    """
    2·1⊗1 - 2(|02⟩⟨02| + |10⟩⟨10| + |21⟩⟨21|) - |Γ⟩⟨Γ|, written out entry by entry.
    """
    W = 2 * np.eye(9, dtype=complex)
    for i, j in ((0, 2), (1, 0), (2, 1)):
        W[i * 3 + j, i * 3 + j] -= 2
    W -= tensor_core.gamma(3).projector().matrix
    return W


def breuer_hall_map(n2, U):
    """
    X -> tr(X)1 - X - U Xᵀ U†.
    """
    R = transpose_conjugation(U)
    return SuperOperator.from_function(lambda X: reduction(X) - R(X), n2, n2, 'breuer-hall')


def breuer_hall_witness(n2, U=None):
    if int(n2) != n2 or n2 < 2 or n2 % 2:
        raise ValidationError(f"Breuer-Hall witness needs an even dimension, got {n2}")
    n2 = int(n2)
    if U is None:
        U = np.kron(np.eye(n2 // 2), SIGMA_Y)
    U = validate_antisymmetric(U)
    if U.shape != (n2, n2):
        raise DimensionError(f"U must be {n2}x{n2}, got {U.shape}")
    return _spec_from_map('breuer-hall', breuer_hall_map(n2, U), {'n2': n2, 'U': U})


def robertson_map(n, R, name='robertson'):
    """
    The block map on 2n x 2n matrices

        X -> 1/n [[tr(X₂₂)1, -X₁₂ - R(X₂₁)], [-X₂₁ - R(X₁₂), tr(X₁₁)1]]

    It is unital and trace-preserving for every R.
    """
    def apply(X):
        X11, X12 = X[:n, :n], X[:n, n:]
        X21, X22 = X[n:, :n], X[n:, n:]
        top = np.hstack([np.trace(X22) * np.eye(n), -X12 - R(X21)])
        bottom = np.hstack([-X21 - R(X12), np.trace(X11) * np.eye(n)])
        return np.vstack([top, bottom]) / n

    return SuperOperator.from_function(apply, 2 * n, 2 * n, name)


def robertson_witness(variant, n, U=None, R=None, positivity_attested=False, allow_subunitary=False):
    """
    gen1:    R(X) = tr(X)1 - X with block size n.
    gen2:    R(X) = U Xᵀ U† with U an antisymmetric unitary on the (even) block size n;
             `allow_subunitary` admits U†U <= 1.
    general: caller-supplied R; positivity of the block map is not checked, the
             attestation is carried on the spec instead.
    """
    n = _require_dimension(n, minimum=1, family='Robertson block')
    if variant == 'gen1':
        return _spec_from_map('robertson-gen1', robertson_map(n, reduction, 'robertson-gen1'),
                              {'variant': variant, 'n': n})
    if variant == 'gen2':
        if n % 2:
            raise ValidationError(f"gen2 needs an even block size (antisymmetric unitaries), got {n}")
        if U is None:
            U = np.kron(np.eye(n // 2), SIGMA_Y)
        U = validate_antisymmetric(U, require_unitary=not allow_subunitary)
        if U.shape != (n, n):
            raise DimensionError(f"U must be {n}x{n}, got {U.shape}")
        return _spec_from_map('robertson-gen2', robertson_map(n, transpose_conjugation(U), 'robertson-gen2'),
                              {'variant': variant, 'n': n, 'U': U})
    if variant == 'general':
        if R is None:
            raise ValidationError("general Robertson variant needs a map R")
        if isinstance(R, SuperOperator):
            if R.dim_in != n or R.dim_out != n:
                raise DimensionError(f"R must act on {n}x{n} matrices, got {R.dim_in}->{R.dim_out}")
            R_map = R
            R = lambda X: choi.apply_map(R_map, X)  # noqa: E731
        if not positivity_attested:
            logger.warning("general Robertson map used without a positivity attestation")
        return _spec_from_map('robertson-general', robertson_map(n, R, 'robertson-general'),
                              {'variant': variant, 'n': n, 'positivity_attested': positivity_attested},
                              block_positive=positivity_attested)
    raise ValidationError(f"unknown Robertson variant {variant!r}")


def local_transform(W, X):
    """
    (X⊗1)W(X†⊗1); keeps block-positivity, and optimality when X is invertible.
    """
    X = tensor_core.as_matrix(X)
    if X.shape != (W.dim_a, W.dim_a):
        raise DimensionError(f"local transform must be {W.dim_a}x{W.dim_a}, got {X.shape}")
    lift = np.kron(X, np.eye(W.dim_b))
    return W.with_matrix(lift @ W.matrix @ lift.conj().T)


def decomposable_operator(P, Q, tol=tensor_core.KERNEL_TOL):
    """
    P + Q^Γ for P, Q >= 0; block-positive by construction.
    """
    if P.dims != Q.dims:
        raise DimensionError(f"P on {P.dims} and Q on {Q.dims} do not match")
    for label, operator in (('P', P), ('Q', Q)):
        positive, lam_min = tensor_core.is_psd(operator, tol)
        if not positive:
            raise ValidationError(f"{label} is not positive semi-definite (λ_min = {lam_min:.3e})")
    return P + tensor_core.partial_transpose(Q, 'second')


def shifted_witness(W, threshold):
    """
    W - C·1: a witness to the threshold C, i.e. tr(Wρ) >= C on separable states.
    """
    return W - threshold * np.eye(W.size)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    dimension_rule: str
    source_map: str
    default_dim: int
    fixed_dim: Optional[int]
    builder: Callable[[int], WitnessSpec]

    def build(self, dim=None):
        if self.fixed_dim is not None:
            if dim is not None and dim != self.fixed_dim:
                raise ValidationError(f"{self.name} is only defined for dimension {self.fixed_dim}")
            return self.builder(self.fixed_dim)
        return self.builder(self.default_dim if dim is None else dim)


def _robertson_from_total(variant, multiple):
    def build(dim):
        if dim % multiple:
            raise ValidationError(f"robertson-{variant} needs a dimension divisible by {multiple}, got {dim}")
        return robertson_witness(variant, dim // 2)
    return build


CATALOG: Tuple[CatalogEntry, ...] = (
    CatalogEntry('flip', 'n >= 2', 'transpose', 2, None, flip_witness),
    CatalogEntry('reduction', 'n >= 2', 'tr(X)1 - X', 3, None, reduction_witness),
    CatalogEntry('choi', 'n = 3', 'Choi map', 3, 3, lambda _: choi_witness('original')),
    CatalogEntry('choi-improved', 'n = 3', 'Choi map minus diagonal projectors', 3, 3,
                 lambda _: choi_witness('improved')),
    CatalogEntry('breuer-hall', 'n even', 'tr(X)1 - X - U Xᵀ U†, U = 1⊗σ_y', 4, None, breuer_hall_witness),
    CatalogEntry('robertson-gen1', 'n even', 'block map, R = reduction', 4, None,
                 _robertson_from_total('gen1', 2)),
    CatalogEntry('robertson-gen2', 'n divisible by 4', 'block map, R = U(·)ᵀU†', 8, None,
                 _robertson_from_total('gen2', 4)),
)

CATALOG_NAMES = tuple(entry.name for entry in CATALOG)


def catalog_entry(name):
    for entry in CATALOG:
        if entry.name == name:
            return entry
    raise ValidationError(f"unknown witness {name!r}; known names: {', '.join(CATALOG_NAMES)}")


def build_witness(name, dim=None):
    spec = catalog_entry(name).build(dim)
    logger.debug(f"built {name} witness on {spec.dims[0]}x{spec.dims[1]}")
    return spec
