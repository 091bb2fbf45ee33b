import random

import pytest

from properties import SUITES, merge_suite_results, random_spec, random_system, run_suite, shard_seed


@pytest.mark.parametrize('name', sorted(SUITES))
def test_suite_passes(name):
    result = run_suite(name, seed=7, count=25)
    assert result['status'] == 'success', result['failures'][:3]
    assert result['trials'] == 25


def test_suite_is_deterministic():
    assert run_suite('bars', 11, 10) == run_suite('bars', 11, 10)


def test_unknown_suite():
    result = run_suite('nope', 1, 1)
    assert result['status'] == 'error'
    assert 'nope' in result['message']


def test_shards_draw_different_matrices():
    assert shard_seed(1, 'yoeli', 0) != shard_seed(1, 'yoeli', 1)
    first = random.Random(shard_seed(1, 'yoeli', 0)).random()
    second = random.Random(shard_seed(1, 'yoeli', 1)).random()
    assert first != second


def test_merge_shards():
    parts = [run_suite('chain', 3, 5, shard) for shard in (1, 0)]
    merged = merge_suite_results(parts)
    assert merged == {'status': 'success', 'suite': 'chain', 'trials': 10, 'failures': []}


def test_merge_keeps_errors():
    merged = merge_suite_results([
        {'status': 'success', 'suite': 'x', 'shard': 0, 'trials': 1, 'failures': []},
        {'status': 'error', 'suite': 'x', 'shard': 1, 'message': 'boom'},
    ])
    assert merged['status'] == 'error'


def test_random_spec_satisfies_hypothesis(rng):
    for _ in range(50):
        assert random_spec(rng, rng.randint(3, 7)).hypothesis_holds


def test_random_system_size(rng):
    system = random_system(rng)
    assert 2 <= system.nvars <= 5
