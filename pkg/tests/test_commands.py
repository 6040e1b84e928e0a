import json
from unittest.mock import patch

import numpy as np
import pytest

from main import tensor_core
from main.errors import DimensionError
from main.models.matrix_file import MatrixFile


@pytest.fixture
def npt_file(tmp_path):
    """ F - 1/2 on 2⊗2: negative on product vectors. """
    path = tmp_path / 'npt.json'
    MatrixFile(tensor_core.flip_operator(2) - 0.5 * np.eye(4), {'name': 'shifted-flip'}).dump(str(path))
    return str(path)


class TestCatalogCommands:
    """Test the catalog command group."""

    def test_list(self, runner):
        """Test that every catalog witness is listed."""
        result = runner.invoke(args=['catalog', 'list'])
        assert result.exit_code == 0
        for name in ('flip', 'reduction', 'choi', 'breuer-hall', 'robertson-gen1', 'robertson-gen2'):
            assert name in result.output

    def test_emit_to_stdout(self, runner):
        """Test that the emitted file parses back to the catalog operator."""
        result = runner.invoke(args=['catalog', 'emit', 'reduction', '--dim', '3'])
        assert result.exit_code == 0
        matrix_file = MatrixFile.loads(result.output)
        assert matrix_file.operator.dims == (3, 3)
        assert matrix_file.name == 'reduction'
        assert matrix_file.block_positive
        assert matrix_file.metadata['params'] == {'n': 3}

    def test_emit_then_check(self, runner, tmp_path):
        """Test that an emitted file can be checked like the catalog witness."""
        path = str(tmp_path / 'flip.json')
        result = runner.invoke(args=['catalog', 'emit', 'flip', '--dim', '2', '--out', path])
        assert result.exit_code == 0
        result = runner.invoke(args=['check', '--witness', path, '--criteria', 'kernel-schmidt'])
        assert result.exit_code == 0
        assert 'kernel-schmidt: OPTIMAL, rank 2/2' in result.output

    def test_emit_wrong_dimension(self, runner):
        """Test that a dimension outside the family rule fails with exit code 1."""
        result = runner.invoke(args=['catalog', 'emit', 'choi', '--dim', '4'])
        assert result.exit_code == 1
        assert 'Error:' in result.output

    def test_emit_unknown_name(self, runner):
        """Test that a name outside the catalog fails with exit code 1."""
        result = runner.invoke(args=['catalog', 'emit', 'werner'])
        assert result.exit_code == 1
        assert "unknown witness 'werner'" in result.output


class TestCheckCommand:
    """Test the check command."""

    def test_flip_kernel(self, runner):
        """Test the kernel criterion on the 4⊗4 flip."""
        result = runner.invoke(args=['check', '--witness', 'flip', '--dim', '4', '--criteria', 'kernel-schmidt'])
        assert result.exit_code == 0
        assert 'flip on 4x4: overall OPTIMAL' in result.output
        assert 'kernel-schmidt: OPTIMAL, rank 4/4' in result.output

    def test_choi(self, runner):
        """Test the full report on the Choi witness."""
        result = runner.invoke(args=['check', '--witness', 'choi'])
        assert result.exit_code == 0
        assert 'necessary-inequalities: CONSISTENT' in result.output
        assert 'kernel-schmidt: INCONCLUSIVE, empty kernel' in result.output
        assert 'trace-bound: INCONCLUSIVE' in result.output

    def test_json_is_deterministic(self, runner, tmp_path):
        """Test that two runs with the same seed write identical JSON reports."""
        paths = [tmp_path / 'first.json', tmp_path / 'second.json']
        for path in paths:
            result = runner.invoke(args=['check', '--witness', 'flip', '--dim', '3', '--seed', '11',
                                         '--json', str(path)])
            assert result.exit_code == 0
            assert 'flip on 3x3: overall OPTIMAL' in result.output
        assert paths[0].read_text() == paths[1].read_text()
        report = json.loads(paths[0].read_text())
        assert report['seed'] == 11
        assert report['witness']['dims'] == [3, 3]
        assert [verdict['criterion_id'] for verdict in report['verdicts']][:2] == [
            'necessary-inequalities', 'spectral-bounds']

    def test_json_file(self, runner, tmp_path):
        """Test that --json FILE writes the report and keeps the summary on stdout."""
        path = tmp_path / 'report.json'
        result = runner.invoke(args=['check', '--witness', 'flip', '--criteria', 'weak-optimality',
                                     '--json', str(path)])
        assert result.exit_code == 0
        assert 'weak-optimality: WEAKLYOPTIMAL, zero eigenvalue (second)' in result.output
        report = json.loads(path.read_text())
        assert report['overall'] == 'WeaklyOptimal'

    def test_json_to_stdout(self, runner):
        """Test that --json - prints the JSON report instead of the summary."""
        result = runner.invoke(args=['check', '--witness', 'flip', '--criteria', 'weak-optimality', '--json', '-'])
        assert result.exit_code == 0
        assert json.loads(result.output)['overall'] == 'WeaklyOptimal'

    def test_no_attest(self, runner):
        """Test that --no-attest downgrades optimality claims."""
        result = runner.invoke(args=['check', '--witness', 'flip', '--criteria', 'kernel-schmidt', '--no-attest'])
        assert result.exit_code == 0
        assert 'kernel-schmidt: INCONCLUSIVE' in result.output

    def test_not_block_positive_file(self, runner, npt_file):
        """Test that a falsified input exits with code 2."""
        result = runner.invoke(args=['check', '--witness', npt_file, '--criteria', 'necessary-inequalities'])
        assert result.exit_code == 2
        assert 'overall NOTBLOCKPOSITIVE' in result.output

    def test_unknown_witness(self, runner):
        result = runner.invoke(args=['check', '--witness', 'no-such-witness'])
        assert result.exit_code == 1
        assert 'neither a catalog witness' in result.output

    def test_malformed_file(self, runner, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"dims": [2, 2], "real": [[1, 0]]}')
        result = runner.invoke(args=['check', '--witness', str(path)])
        assert result.exit_code == 1
        assert 'Error:' in result.output

    def test_unknown_criterion(self, runner):
        result = runner.invoke(args=['check', '--witness', 'flip', '--criteria', 'bogus'])
        assert result.exit_code == 1
        assert 'unknown criteria: bogus' in result.output

    def test_zero_tolerance(self, runner):
        result = runner.invoke(args=['check', '--witness', 'flip', '--tol', '0'])
        assert result.exit_code == 1
        assert 'tolerance must be positive' in result.output

    @patch('main.commands.criteria.run_all')
    def test_toolkit_error(self, mock_run_all, runner):
        """Test that an error raised inside the toolkit becomes exit code 1."""
        mock_run_all.side_effect = DimensionError('dimension mismatch')
        result = runner.invoke(args=['check', '--witness', 'flip'])
        assert result.exit_code == 1
        assert 'Error: dimension mismatch' in result.output


class TestOptimizeCommand:
    """Test the unitary search for the maximally entangled minimum."""

    def test_reduction(self, runner):
        """Test that the reduction witness on 3⊗3 reaches -tr(W)/3 = -2."""
        result = runner.invoke(args=['optimize', '--witness', 'reduction', '--dim', '3', '--json', '-'])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload['status'] == 'Optimal'
        assert payload['threshold'] == pytest.approx(-2)
        assert payload['best_value'] == pytest.approx(-2, abs=1e-7)
        assert 'certificate_unitary' in payload

    def test_summary(self, runner):
        result = runner.invoke(args=['optimize', '--witness', 'flip', '--dim', '2'])
        assert result.exit_code == 0
        assert 'flip on 2x2: OPTIMAL' in result.output
        assert 'certificate unitary:' in result.output

    def test_violation(self, runner, npt_file):
        """Test that a value below the threshold exits with code 2."""
        result = runner.invoke(args=['optimize', '--witness', npt_file])
        assert result.exit_code == 2
        assert 'BOUNDVIOLATED' in result.output


class TestDemoCommand:
    """Test the worked examples."""

    def test_product_zeros(self, runner):
        result = runner.invoke(args=['demo', 'appendix-a'])
        assert result.exit_code == 0
        assert 'matches reference: True' in result.output
        assert 'separable-state: OPTIMAL' in result.output

    def test_json(self, runner, tmp_path):
        path = tmp_path / 'demo.json'
        result = runner.invoke(args=['demo', 'appendix-c', '--json', str(path)])
        assert result.exit_code == 0
        assert 'Superoperator trace of the generalized Robertson maps' in result.output
        payload = json.loads(path.read_text())
        assert payload['name'] == 'appendix-c'
        assert {row['verdict'] for row in payload['tables']['traces']} == {'Optimal'}

    def test_unknown_demo(self, runner):
        result = runner.invoke(args=['demo', 'appendix-z'])
        assert result.exit_code == 2


if __name__ == '__main__':
    pytest.main([__file__])
