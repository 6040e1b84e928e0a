from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from main.models.operators import complex_to_json


class Status(str, Enum):
    OPTIMAL = 'Optimal'
    WEAKLY_OPTIMAL = 'WeaklyOptimal'
    CONSISTENT = 'Consistent'
    INCONCLUSIVE = 'Inconclusive'
    BOUND_VIOLATED = 'BoundViolated'
    NOT_BLOCK_POSITIVE = 'NotBlockPositive'

    @property
    def falsifies(self):
        """
        Evidence that the input is not block-positive (or the map not positive).
        """
        return self in (Status.NOT_BLOCK_POSITIVE, Status.BOUND_VIOLATED)


# Order for the aggregate; falsifying statuses are handled separately.
STATUS_RANK = {
    Status.INCONCLUSIVE: 0,
    Status.CONSISTENT: 1,
    Status.WEAKLY_OPTIMAL: 2,
    Status.OPTIMAL: 3,
}

ATTESTATION_NOTE = 'requires block-positivity attestation'


def to_plain(value):
    if hasattr(value, 'json'):
        return value.json()
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return complex_to_json(value)
        return value.tolist()
    if isinstance(value, (complex, np.complexfloating)):
        return {'real': float(value.real), 'imag': float(value.imag)}
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (list, tuple)):
        return [to_plain(item) for item in value]
    if isinstance(value, dict):
        return {str(key): to_plain(item) for key, item in value.items()}
    return value


@dataclass(frozen=True)
class CriterionVerdict:
    """
    Outcome of one optimality criterion.

    `evidence` holds the numbers the status was decided on, `certificate` the
    objects (vectors, states, channels) that let anyone re-check it.
    `headline` is the key number printed in the one-line summary.
    """
    criterion_id: str
    status: Status
    evidence: Dict[str, object] = field(default_factory=dict)
    certificate: Dict[str, object] = field(default_factory=dict)
    notes: Tuple[str, ...] = ()
    headline: str = ''

    def with_note(self, note):
        return replace(self, notes=self.notes + (note,))

    def downgraded(self, note=ATTESTATION_NOTE):
        """
        Optimal-type claims need a block-positive input; drop them when it is not attested.
        """
        if self.status in (Status.OPTIMAL, Status.WEAKLY_OPTIMAL):
            return replace(self, status=Status.INCONCLUSIVE, notes=self.notes + (note,))
        return self

    def summary_line(self):
        line = f"{self.criterion_id}: {self.status.value.upper()}"
        if self.headline:
            line += f", {self.headline}"
        return line

    def json(self):
        return {
            'criterion_id': self.criterion_id,
            'status': self.status.value,
            'evidence': to_plain(self.evidence),
            'certificate': to_plain(self.certificate),
            'notes': list(self.notes),
        }


def aggregate_status(verdicts):
    """
    Strongest established status. Any falsifying verdict wins; BoundViolated
    is reported as NotBlockPositive overall.
    """
    if any(verdict.status.falsifies for verdict in verdicts):
        return Status.NOT_BLOCK_POSITIVE
    statuses = [verdict.status for verdict in verdicts]
    if not statuses:
        return Status.INCONCLUSIVE
    return max(statuses, key=STATUS_RANK.__getitem__)


@dataclass(frozen=True)
class WitnessReport:
    name: str
    dims: Tuple[int, int]
    verdicts: List[CriterionVerdict]
    seed: int
    tolerances: Dict[str, float]
    version: str
    block_positive_attested: bool = True
    source_map: Optional[str] = None

    @property
    def overall(self):
        return aggregate_status(self.verdicts)

    def verdict(self, criterion_id):
        for verdict in self.verdicts:
            if verdict.criterion_id == criterion_id:
                return verdict
        raise KeyError(criterion_id)

    def summary_lines(self):
        lines = [f"{self.name} on {self.dims[0]}x{self.dims[1]}: overall {self.overall.value.upper()}"]
        lines.extend(f"  {verdict.summary_line()}" for verdict in self.verdicts)
        return lines

    def json(self):
        return {
            'version': self.version,
            'witness': {
                'name': self.name,
                'dims': list(self.dims),
                'block_positive_attested': self.block_positive_attested,
                'source_map': self.source_map,
            },
            'overall': self.overall.value,
            'verdicts': [verdict.json() for verdict in self.verdicts],
            'seed': self.seed,
            'tolerances': to_plain(self.tolerances),
        }
