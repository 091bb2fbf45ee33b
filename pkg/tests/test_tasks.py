from oracle import run_grid_oracle, shard_ranges
from reference import B3
from tasks import grid_shard, merge_grid_reports, run_grid_shard_task, run_property_shard_task
from utils import format_matrix

ALPHABET = ['0', '-1', '-inf']


def _apply(task, *args):
    return task.apply(args=args).get()


class TestGridShardTask:
    def test_shard_matches_direct_run(self):
        result = _apply(run_grid_shard_task, format_matrix(B3), ALPHABET, 0, 100)
        assert result['status'] == 'success'
        direct = run_grid_oracle(B3, ALPHABET, start=0, stop=100, check_union=False)
        assert result['report'] == direct.to_dict()

    def test_merged_shards_match_single_run(self):
        text = format_matrix(B3)
        single = grid_shard(text, ALPHABET, 0, 729)
        parts = [_apply(run_grid_shard_task, text, ALPHABET, lo, hi) for lo, hi in shard_ranges(729, 3)]
        merged = merge_grid_reports(parts)
        assert merged['status'] == 'success'
        assert merged['report'] == single

    def test_rejected_input_is_reported(self):
        result = _apply(run_grid_shard_task, '2 2\n0 1\n0 0\n', ['0', '-1'], 0, 16)
        assert result['status'] == 'error'
        assert (result['start'], result['stop']) == (0, 16)
        assert result['message']

    def test_cap(self):
        result = _apply(run_grid_shard_task, format_matrix(B3), ALPHABET, 0, 729, 10)
        assert result['status'] == 'error'
        assert 'cap' in result['message']

    def test_merge_propagates_errors(self):
        merged = merge_grid_reports([{'status': 'error', 'message': 'boom'}])
        assert merged == {'status': 'error', 'message': 'boom'}


class TestPropertyShardTask:
    def test_runs_suite(self):
        result = _apply(run_property_shard_task, 'chain', 3, 4, 1)
        assert result['status'] == 'success'
        assert (result['suite'], result['shard'], result['trials']) == ('chain', 1, 4)

    def test_unknown_suite(self):
        assert _apply(run_property_shard_task, 'nope', 3, 4)['status'] == 'error'
