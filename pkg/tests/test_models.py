import json

import numpy as np
import pytest

from main import tensor_core, witnesses
from main.errors import DimensionError, MatrixFileError
from main.models.matrix_file import MatrixFile
from main.models.operators import BipartiteOperator, BipartiteVector
from main.models.verdicts import (
    ATTESTATION_NOTE, CriterionVerdict, Status, WitnessReport, aggregate_status, to_plain)


def verdict(status, criterion_id='c'):
    return CriterionVerdict(criterion_id, status)


class TestOperators:
    """Test the bipartite value types."""

    def test_shape_is_checked(self):
        with pytest.raises(DimensionError):
            BipartiteOperator(2, 3, np.eye(4))
        with pytest.raises(DimensionError):
            BipartiteVector(2, 2, np.ones(3))

    def test_non_finite_entries(self):
        with pytest.raises(DimensionError):
            BipartiteOperator(1, 2, [[np.nan, 0], [0, 1]])

    def test_arithmetic_keeps_dims(self):
        F = tensor_core.flip_operator(2)
        W = 2 * F - np.eye(4)
        assert W.dims == (2, 2)
        assert W.trace() == pytest.approx(0)
        with pytest.raises(DimensionError):
            F + tensor_core.flip_operator(3)

    def test_immutable(self):
        F = tensor_core.flip_operator(2)
        with pytest.raises(ValueError):
            F.matrix[0, 0] = 5


class TestMatrixFile:
    """Test the JSON exchange format."""

    def setup_method(self):
        rng = np.random.default_rng(7)
        self.operator = BipartiteOperator(2, 3, tensor_core.random_psd(6, rng) / 7)

    def test_round_trip_is_exact(self, tmp_path):
        operator = self.operator
        path = str(tmp_path / 'op.json')
        MatrixFile(operator, {'name': 'random', 'block_positive': True}).dump(path)
        loaded = MatrixFile.load(path)
        assert np.array_equal(loaded.operator.matrix, operator.matrix)
        assert loaded.name == 'random'
        assert loaded.block_positive

    def test_defaults(self):
        loaded = MatrixFile.loads(json.dumps({'dims': [1, 1], 'real': [[2.0]]}))
        assert loaded.name == 'matrix-file'
        assert not loaded.block_positive
        assert loaded.operator.matrix[0, 0] == 2

    @pytest.mark.parametrize('text', [
        'not json',
        '[1, 2]',
        '{"real": [[1]]}',
        '{"dims": [2, 2], "real": [[1, 0], [0, 1]]}',
        '{"dims": [1, 1], "real": [[1]], "metadata": [1]}',
    ])
    def test_malformed(self, text):
        with pytest.raises(MatrixFileError):
            MatrixFile.loads(text)


class TestVerdicts:
    """Test status aggregation and the report surface."""

    def test_aggregate_order(self):
        assert aggregate_status([verdict(Status.INCONCLUSIVE), verdict(Status.CONSISTENT)]) is Status.CONSISTENT
        assert aggregate_status([verdict(Status.WEAKLY_OPTIMAL), verdict(Status.OPTIMAL)]) is Status.OPTIMAL
        assert aggregate_status([]) is Status.INCONCLUSIVE

    def test_falsifying_status_wins(self):
        statuses = [verdict(Status.OPTIMAL), verdict(Status.BOUND_VIOLATED)]
        assert aggregate_status(statuses) is Status.NOT_BLOCK_POSITIVE

    def test_downgraded(self):
        downgraded = verdict(Status.OPTIMAL).downgraded()
        assert downgraded.status is Status.INCONCLUSIVE
        assert downgraded.notes == (ATTESTATION_NOTE,)
        assert verdict(Status.CONSISTENT).downgraded().notes == ()

    def test_summary_line(self):
        line = CriterionVerdict('kernel-schmidt', Status.OPTIMAL, headline='rank 4/4').summary_line()
        assert line == 'kernel-schmidt: OPTIMAL, rank 4/4'

    def test_to_plain(self):
        plain = to_plain({'x': np.float64(1.5), 'n': np.int64(2), 'flag': np.bool_(True), 'z': 1 + 2j})
        assert plain == {'x': 1.5, 'n': 2, 'flag': True, 'z': {'real': 1.0, 'imag': 2.0}}

    def test_report_json(self):
        spec = witnesses.flip_witness(2)
        report = WitnessReport(spec.name, spec.dims, [verdict(Status.CONSISTENT, 'spectral-bounds')],
                               seed=1, tolerances={'zero_tol': 1e-9}, version='1.0.0')
        payload = report.json()
        assert set(payload) == {'version', 'witness', 'overall', 'verdicts', 'seed', 'tolerances'}
        assert payload['overall'] == 'Consistent'
        assert report.summary_lines()[0] == 'flip on 2x2: overall CONSISTENT'
        with pytest.raises(KeyError):
            report.verdict('kernel-schmidt')


if __name__ == '__main__':
    pytest.main([__file__])
