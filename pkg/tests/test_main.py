import json

import pytest
from click.testing import CliRunner

import main
from main import cli
from reference import B3, B3_OVERLINE, B3_UNDERLINE, BAND_C, SKEW_A, SKEW_B, matrix
from utils import parse_matrix, to_json


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


def _json(result):
    return json.loads(result.stdout)


def _matrix_payload(A):
    return json.loads(to_json(A))


class TestMatrixCommands:
    def test_kleene(self, runner, write_matrix):
        result = runner.invoke(cli, ['kleene', write_matrix('B.mat', B3)])
        assert result.exit_code == 0
        assert _json(result) == _matrix_payload(B3_OVERLINE)

    def test_kleene_text(self, runner, write_matrix):
        result = runner.invoke(cli, ['--format', 'text', 'kleene', write_matrix('B.mat', B3)])
        assert result.exit_code == 0
        assert parse_matrix(result.stdout) == B3_OVERLINE

    def test_pow(self, runner, write_matrix):
        result = runner.invoke(cli, ['pow', '-k', '2', write_matrix('B.mat', B3)])
        assert _json(result) == _matrix_payload(B3 @ B3)

    def test_underline_and_overline(self, runner, write_matrix):
        path = write_matrix('B.mat', B3)
        assert _json(runner.invoke(cli, ['underline', path])) == _matrix_payload(B3_UNDERLINE)
        assert _json(runner.invoke(cli, ['overline', path])) == _matrix_payload(B3_OVERLINE)

    def test_overline_dump(self, runner, write_matrix):
        result = runner.invoke(cli, ['overline', '--dump-h', write_matrix('B.mat', B3)])
        payload = _json(result)
        assert 'h' in payload and 'h_star' not in payload

    def test_non_commuting_pair(self, runner, write_matrix):
        result = runner.invoke(cli, [
            'check-commute', write_matrix('A.mat', SKEW_A), write_matrix('B.mat', SKEW_B),
        ])
        assert result.exit_code == 0
        assert _json(result)['commutes'] is False
        assert 'do not commute' in result.stderr

    def test_out_file(self, runner, write_matrix, tmp_path):
        target = tmp_path / 'star.json'
        result = runner.invoke(cli, ['--out', str(target), 'kleene', write_matrix('B.mat', B3)])
        assert result.exit_code == 0
        assert result.stdout == ''
        assert json.loads(target.read_text(encoding='utf-8')) == _matrix_payload(B3_OVERLINE)


class TestInputErrors:
    def test_malformed_matrix(self, runner, tmp_path):
        path = tmp_path / 'bad.mat'
        path.write_text('2 2\n0 0\n0 x\n', encoding='utf-8')
        result = runner.invoke(cli, ['kleene', str(path)])
        assert result.exit_code == 2
        assert f'{path}:3' in result.stderr

    def test_missing_file(self, runner, tmp_path):
        result = runner.invoke(cli, ['kleene', str(tmp_path / 'missing.mat')])
        assert result.exit_code == 2

    def test_not_normal(self, runner, write_matrix):
        result = runner.invoke(cli, ['kleene', write_matrix('A.mat', parse_matrix('2 2\n0 1\n0 0'))])
        assert result.exit_code == 2


class TestPerturbCommands:
    def test_make_p(self, runner):
        result = runner.invoke(cli, ['perturb', 'make-p', '--p', '3,3,3', '--eps', '1'])
        assert result.exit_code == 0
        assert _json(result) == _matrix_payload(BAND_C)

    def test_check(self, runner):
        result = runner.invoke(cli, ['perturb', 'check', '--p', '4,3,5', '--delta', '2', '--eps', '1'])
        assert result.exit_code == 0
        assert _json(result)['status'] == 'success'

    def test_check_hypothesis_fails(self, runner):
        result = runner.invoke(cli, ['perturb', 'check', '--p', '4,3,5', '--delta', '2', '--eps', '2'])
        assert result.exit_code == 0
        assert _json(result)['status'] == 'skipped'

    def test_bad_vector(self, runner):
        result = runner.invoke(cli, ['perturb', 'make-p', '--p', 'a,b', '--eps', '1'])
        assert result.exit_code == 2

    def test_box_pair_commutes(self, runner):
        result = runner.invoke(cli, ['--seed', '3', 'perturb', 'box-pair', '--r', '-1', '-n', '4'])
        assert result.exit_code == 0
        assert _json(result)['commutes'] is True


class TestSpans:
    def test_span_contains(self, runner, write_matrix):
        result = runner.invoke(cli, [
            'span-contains', write_matrix('A.mat', SKEW_A), write_matrix('B.mat', SKEW_B),
        ])
        assert _json(result) == {'contains': False, 'missing_column': 3}

    def test_span_member(self, runner, write_matrix):
        result = runner.invoke(cli, ['span-member', write_matrix('B.mat', B3), '--point', '0,-4,-5'])
        assert _json(result)['member'] is True

    def test_render_to_file(self, runner, write_matrix, tmp_path):
        target = tmp_path / 'fig.svg'
        result = runner.invoke(cli, ['render', write_matrix('B.mat', B3), '-o', str(target)])
        assert result.exit_code == 0
        assert target.read_text(encoding='utf-8').startswith('<?xml')

    def test_render_rejects_other_orders(self, runner, write_matrix):
        result = runner.invoke(cli, ['render', write_matrix('A.mat', matrix('0 -1; -1 0'))])
        assert result.exit_code == 2


class TestChecks:
    def test_neigh_test(self, runner, write_matrix):
        result = runner.invoke(cli, ['neigh-test', '--count', '20', write_matrix('C.mat', BAND_C)])
        assert result.exit_code == 0
        assert _json(result)['status'] == 'success'

    def test_grid_oracle(self, runner, write_matrix):
        result = runner.invoke(cli, ['grid-oracle', '--alphabet', '0,-1,-inf', write_matrix('B.mat', B3)])
        assert result.exit_code == 0
        payload = _json(result)
        assert payload['total'] == 729 and payload['violations'] == []

    def test_grid_oracle_cap(self, runner, write_matrix):
        result = runner.invoke(cli, ['grid-oracle', '--cap', '10', write_matrix('B.mat', B3)])
        assert result.exit_code == 2

    def test_grid_oracle_clear_cache(self, runner, write_matrix, monkeypatch):
        patterns = []
        monkeypatch.setattr(main, 'invalidate_cache_pattern', lambda pattern: patterns.append(pattern) or 4)
        result = runner.invoke(cli, ['grid-oracle', '--clear-cache', '--alphabet', '0,-inf', write_matrix('B.mat', B3)])
        assert result.exit_code == 0
        assert patterns == ['oracle_*']
        assert 'Dropped 4 cached shard reports' in result.stderr

    def test_golden_suite(self, runner):
        result = runner.invoke(cli, ['--format', 'text', 'golden-suite'])
        assert result.exit_code == 0
        assert 'FAIL' not in result.stdout

    def test_paper_suite_matches_golden_suite(self, runner):
        paper = runner.invoke(cli, ['paper-suite'])
        golden = runner.invoke(cli, ['golden-suite'])
        assert paper.exit_code == golden.exit_code == 0
        assert paper.stdout == golden.stdout
        assert all(r['status'] == 'success' for r in _json(paper))
        assert {'paper-suite', 'golden-suite'} <= set(cli.commands)

    def test_suite(self, runner):
        result = runner.invoke(cli, ['--seed', '5', 'suite', '--count', '3', '--shards', '2'])
        assert result.exit_code == 0
        payload = _json(result)
        assert all(r['status'] == 'success' and r['trials'] == 3 for r in payload)

    def test_suite_is_deterministic(self, runner):
        args = ['--seed', '9', 'suite', '--count', '4', '--name', 'chain', '--name', 'pq']
        assert runner.invoke(cli, args).stdout == runner.invoke(cli, args).stdout
