from dataclasses import dataclass, field
from typing import List

import numpy as np

from main.errors import DimensionError


def complex_to_json(array):
    array = np.asarray(array, dtype=complex)
    return {'real': array.real.tolist(), 'imag': array.imag.tolist()}


@dataclass(frozen=True)
class BipartiteOperator:
    """
    Dense operator on C^m ⊗ C^n, with both local dimensions carried explicitly.
    """
    dim_a: int
    dim_b: int
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        size = self.dim_a * self.dim_b
        if matrix.shape != (size, size):
            raise DimensionError(
                f"operator of shape {matrix.shape} does not act on {self.dim_a}x{self.dim_b}")
        if not np.all(np.isfinite(matrix)):
            raise DimensionError("operator has non-finite entries")
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    @property
    def dims(self):
        return self.dim_a, self.dim_b

    @property
    def size(self):
        return self.dim_a * self.dim_b

    def tensor(self):
        """
        Four-index view W[i, j, k, l] = <ij|W|kl>.
        """
        return self.matrix.reshape(self.dim_a, self.dim_b, self.dim_a, self.dim_b)

    def trace(self):
        return complex(np.trace(self.matrix))

    def expectation(self, vector):
        vector = np.asarray(vector, dtype=complex).ravel()
        return complex(np.vdot(vector, self.matrix @ vector))

    def with_matrix(self, matrix):
        return BipartiteOperator(self.dim_a, self.dim_b, matrix)

    def __add__(self, other):
        if isinstance(other, BipartiteOperator):
            if other.dims != self.dims:
                raise DimensionError(f"cannot add {self.dims} and {other.dims} operators")
            other = other.matrix
        return self.with_matrix(self.matrix + other)

    def __sub__(self, other):
        if isinstance(other, BipartiteOperator):
            if other.dims != self.dims:
                raise DimensionError(f"cannot subtract {other.dims} from {self.dims} operator")
            other = other.matrix
        return self.with_matrix(self.matrix - other)

    def __mul__(self, scalar):
        return self.with_matrix(self.matrix * scalar)

    __rmul__ = __mul__

    def json(self):
        return {'dims': [self.dim_a, self.dim_b], **complex_to_json(self.matrix)}


@dataclass(frozen=True)
class BipartiteVector:
    dim_a: int
    dim_b: int
    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=complex).ravel()
        if coords.size != self.dim_a * self.dim_b:
            raise DimensionError(
                f"vector of length {coords.size} does not live in {self.dim_a}x{self.dim_b}")
        coords.setflags(write=False)
        object.__setattr__(self, 'coords', coords)

    @property
    def dims(self):
        return self.dim_a, self.dim_b

    def norm(self):
        return float(np.linalg.norm(self.coords))

    def normalized(self):
        return BipartiteVector(self.dim_a, self.dim_b, self.coords / self.norm())

    def coefficient_matrix(self):
        """
        C[i, j] = <ij|v>; its singular values are the Schmidt coefficients.
        """
        return self.coords.reshape(self.dim_a, self.dim_b)

    def projector(self):
        return BipartiteOperator(self.dim_a, self.dim_b, np.outer(self.coords, self.coords.conj()))

    def json(self):
        return {'dims': [self.dim_a, self.dim_b], **complex_to_json(self.coords)}


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_vectors: List[np.ndarray]
    right_vectors: List[np.ndarray]
    numerical_rank: int
    tolerance_used: float

    def reassemble(self):
        return sum(c * np.kron(u, v) for c, u, v in
                   zip(self.coefficients, self.left_vectors, self.right_vectors))

    def is_maximally_entangled(self, tol=1e-7):
        """
        All min(m, n) coefficients equal (after normalization).
        """
        coefficients = self.coefficients / np.linalg.norm(self.coefficients)
        target = 1 / np.sqrt(len(coefficients))
        return bool(np.max(np.abs(coefficients - target)) <= tol)

    def json(self):
        return {
            'coefficients': self.coefficients.tolist(),
            'numerical_rank': self.numerical_rank,
            'tolerance_used': self.tolerance_used,
        }


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)

    @property
    def min(self):
        return float(self.eigenvalues[0])

    @property
    def max(self):
        return float(self.eigenvalues[-1])

    def reconstruct(self):
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T

    def eigenspace(self, value, tol):
        """
        Orthonormal columns spanning the eigenvectors with |λ - value| <= tol.
        """
        mask = np.abs(self.eigenvalues - value) <= tol
        return self.eigenvectors[:, mask]
