import pytest

from reference import GoldenCheckFailed, expect, golden_checks, run_golden_checks


@pytest.mark.parametrize('check', golden_checks(), ids=lambda check: check.name)
def test_golden_check(check):
    check.run()


def test_every_check_reports_success():
    results = run_golden_checks()
    assert len(results) == len(golden_checks())
    assert all(result['status'] == 'success' for result in results), results


def test_expect():
    expect(True, 'never raised')
    with pytest.raises(GoldenCheckFailed, match='boom'):
        expect(False, 'boom')
