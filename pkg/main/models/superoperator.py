from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from main.errors import DimensionError
from main.models.operators import BipartiteOperator, complex_to_json


@dataclass(frozen=True)
class SuperOperator:
    """
    A linear map C^{n×n} -> C^{m×m} stored as its Choi matrix
    C(Φ) = (id⊗Φ)(|Γ⟩⟨Γ|) on n⊗m (input factor first).
    """
    dim_in: int
    dim_out: int
    choi: BipartiteOperator
    name: Optional[str] = None

    def __post_init__(self):
        if self.choi.dims != (self.dim_in, self.dim_out):
            raise DimensionError(
                f"Choi matrix on {self.choi.dims} does not match map {self.dim_in}->{self.dim_out}")

    @classmethod
    def from_choi(cls, choi_matrix, dim_in, dim_out, name=None):
        return cls(dim_in, dim_out, BipartiteOperator(dim_in, dim_out, choi_matrix), name)

    @classmethod
    def from_function(cls, func, dim_in, dim_out, name=None):
        """
        Build the Choi matrix Σ_jk |j⟩⟨k| ⊗ Φ(|j⟩⟨k|) by evaluating `func` on matrix units.
        """
        blocks = np.zeros((dim_in, dim_out, dim_in, dim_out), dtype=complex)
        for j in range(dim_in):
            for k in range(dim_in):
                unit = np.zeros((dim_in, dim_in), dtype=complex)
                unit[j, k] = 1
                image = np.asarray(func(unit), dtype=complex)
                if image.shape != (dim_out, dim_out):
                    raise DimensionError(
                        f"map returned shape {image.shape}, expected {(dim_out, dim_out)}")
                blocks[j, :, k, :] = image
        size = dim_in * dim_out
        return cls.from_choi(blocks.reshape(size, size), dim_in, dim_out, name)

    @property
    def is_square(self):
        return self.dim_in == self.dim_out

    def scaled(self, factor, name=None):
        return SuperOperator(self.dim_in, self.dim_out, self.choi * factor, name or self.name)

    def json(self):
        return {
            'name': self.name,
            'dim_in': self.dim_in,
            'dim_out': self.dim_out,
            'choi': complex_to_json(self.choi.matrix),
        }


@dataclass(frozen=True)
class KrausDecomposition:
    """
    Φ(X) = Σ_i α_i K_i X K_i† with Hilbert-Schmidt orthonormal K_i.
    """
    weights: np.ndarray
    operators: List[np.ndarray] = field(repr=False)

    def __len__(self):
        return len(self.operators)

    def apply(self, X):
        X = np.asarray(X, dtype=complex)
        result = None
        for weight, K in zip(self.weights, self.operators):
            term = weight * (K @ X @ K.conj().T)
            result = term if result is None else result + term
        return result


@dataclass(frozen=True)
class ChannelProperties:
    hermitian_preserving: bool
    completely_positive: bool
    trace_preserving: bool
    unital: bool
    choi_rank: int
    full_choi_rank: bool
    min_choi_eigenvalue: float

    def json(self):
        return {
            'hermitian_preserving': self.hermitian_preserving,
            'completely_positive': self.completely_positive,
            'trace_preserving': self.trace_preserving,
            'unital': self.unital,
            'choi_rank': self.choi_rank,
            'full_choi_rank': self.full_choi_rank,
            'min_choi_eigenvalue': self.min_choi_eigenvalue,
        }


@dataclass(frozen=True)
class PPTVerdict:
    """
    PPT / NPT outcome. `separable` is only decided on 2⊗2, 2⊗3 and 3⊗2;
    elsewhere a PPT state stays undecided (None).
    """
    status: str
    min_eigenvalue: float
    separability_decided: bool
    separable: Optional[bool]

    def json(self):
        return {
            'status': self.status,
            'min_eigenvalue': self.min_eigenvalue,
            'separability_decided': self.separability_decided,
            'separable': self.separable,
        }
