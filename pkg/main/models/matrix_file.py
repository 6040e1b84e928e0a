import json
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from main.errors import MatrixFileError
from main.models.operators import BipartiteOperator, complex_to_json


@dataclass(frozen=True)
class MatrixFile:
    """
    Plain JSON exchange format for bipartite operators:

        {"dims": [m, n], "real": [[...]], "imag": [[...]],
         "metadata": {"name": ..., "block_positive": true}}

    Floats are written with repr precision, so a load after dump gives back
    every entry bit for bit.
    """
    operator: BipartiteOperator
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def name(self):
        return self.metadata.get('name', 'matrix-file')

    @property
    def block_positive(self):
        return bool(self.metadata.get('block_positive', False))

    def json(self):
        return {
            'dims': [self.operator.dim_a, self.operator.dim_b],
            **complex_to_json(self.operator.matrix),
            'metadata': dict(self.metadata),
        }

    def dumps(self):
        return json.dumps(self.json(), sort_keys=True)

    def dump(self, path):
        with open(path, 'w') as handle:
            handle.write(self.dumps())
            handle.write('\n')

    @classmethod
    def from_json(cls, payload):
        try:
            dim_a, dim_b = (int(d) for d in payload['dims'])
            real = np.array(payload['real'], dtype=float)
            imag = np.array(payload.get('imag', np.zeros_like(real)), dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise MatrixFileError(f"malformed matrix file: {e}") from e
        size = dim_a * dim_b
        if real.shape != (size, size) or imag.shape != (size, size):
            raise MatrixFileError(
                f"dims {dim_a}x{dim_b} need {size}x{size} arrays, got {real.shape} and {imag.shape}")
        metadata = payload.get('metadata') or {}
        if not isinstance(metadata, dict):
            raise MatrixFileError("metadata must be an object")
        return cls(BipartiteOperator(dim_a, dim_b, real + 1j * imag), metadata)

    @classmethod
    def loads(cls, text):
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise MatrixFileError(f"matrix file is not valid JSON: {e}") from e
        if not isinstance(payload, dict):
            raise MatrixFileError("matrix file must contain a JSON object")
        return cls.from_json(payload)

    @classmethod
    def load(cls, path):
        with open(path) as handle:
            return cls.loads(handle.read())
