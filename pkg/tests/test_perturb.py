import random
from fractions import Fraction

import pytest

from perturb import (
    PerturbationSpec, check_pq_theorem, expected_Q_product, make_box_pair, make_P, make_Q,
    nbhd_sample, non_idempotent_join_check, same_size, small_wrt,
)
from reference import PAIR_A, PAIR_B, BAND_A, BAND_B, BAND_C, BAND_P, matrix
from tropcore import DimensionError, DomainError, is_idempotent, mat_add, offdiag_positions, zero
from utils import to_json


class TestSize:
    @pytest.mark.parametrize('a,b,expected', [
        (2, 4, True),
        (2, 3, True),
        (1, 3, False),
        (Fraction(1, 2), 1, True),
        (5, 5, True),
    ])
    def test_same_size(self, a, b, expected):
        assert same_size(a, b) is expected
        assert small_wrt(a, b) is not expected

    def test_order(self):
        with pytest.raises(DomainError, match='a <= b'):
            same_size(3, 1)

    def test_positive(self):
        with pytest.raises(DomainError, match='positive'):
            same_size(0, 1)


class TestBandMatrices:
    def test_reference_bands(self):
        assert make_P(BAND_P, 2) == BAND_A
        assert make_P(BAND_P, 1) == BAND_B
        assert make_P((3, 3, 3), 1) == BAND_C

    def test_Q(self):
        Q = make_Q((4, 3, 5, 2), 1)
        assert Q == matrix('0 0 -1 -2; -4 0 0 -1; -1 -3 0 0; 0 -1 -5 0')

    def test_P_and_Q_agree_without_eps(self):
        assert make_P((4, 3, 5, 2), 0) == make_Q((4, 3, 5, 2), 0)

    def test_P_needs_three(self):
        with pytest.raises(DimensionError, match='n >= 3'):
            make_P((1, 1), 0)

    def test_Q_needs_four(self):
        with pytest.raises(DimensionError, match='n >= 4'):
            make_Q((1, 1, 1), 0)

    def test_magnitudes_non_negative(self):
        with pytest.raises(DomainError, match='non-negative'):
            make_P((1, -1, 1), 0)


class TestPerturbationSpec:
    def test_hypothesis(self):
        assert PerturbationSpec(BAND_P, eps=1, delta=2).hypothesis_holds
        assert not PerturbationSpec(BAND_P, eps=2, delta=2).hypothesis_holds

    def test_values_are_exact(self):
        spec = PerturbationSpec(('4', '3/2', 5), eps='1/2')
        assert spec.p == (4, Fraction(3, 2), 5)
        assert spec.n == 3

    def test_p_positive(self):
        with pytest.raises(DomainError, match='positive'):
            PerturbationSpec((4, 0, 5))

    def test_eps_non_negative(self):
        with pytest.raises(DomainError, match='eps'):
            PerturbationSpec(BAND_P, eps=-1)


class TestTheorem:
    def test_reference_bands_commute(self):
        report = check_pq_theorem(PerturbationSpec(BAND_P, eps=1, delta=2))
        assert report.status == 'success'
        assert report.clauses[0].left == BAND_C
        assert report.clauses[1].status == 'skipped'

    def test_order_four(self):
        report = check_pq_theorem(PerturbationSpec((4, 3, 5, 2), eps=1, delta=1))
        assert report.status == 'success'
        assert [c.status for c in report.clauses] == ['success', 'success']

    def test_order_five_products_vanish(self):
        spec = PerturbationSpec(
            (Fraction(13, 2), Fraction(11, 4), Fraction(11, 4), Fraction(15, 4), Fraction(1, 4)),
            eps=Fraction(5, 32), delta=Fraction(3, 32),
        )
        report = check_pq_theorem(spec)
        assert report.status == 'success'
        q = report.clauses[1]
        assert q.left == q.right == zero(5)
        assert 'zero matrix' in q.to_dict()['note']

    @pytest.mark.parametrize('n', [5, 6, 7])
    def test_Q_products_vanish_from_order_five(self, n):
        Q = make_Q([3] * n, 1)
        assert Q @ make_Q([3] * n, 2) == zero(n)
        assert expected_Q_product(n, 1) == zero(n)

    def test_Q_product_at_order_four(self):
        assert expected_Q_product(4, 1) == make_Q((1, 1, 1, 1), 0)
        assert make_Q((4, 3, 5, 2), 1) @ make_Q((4, 3, 5, 2), 2) == make_Q((1, 1, 1, 1), 0)

    def test_hypothesis_fails(self):
        report = check_pq_theorem(PerturbationSpec(BAND_P, eps=2, delta=2))
        assert report.status == 'skipped'
        assert 'hypothesis' in report.message

    def test_random_specs(self, rng):
        for n in range(3, 8):
            for _ in range(20):
                p = [Fraction(rng.randint(1, 32), 4) for _ in range(n)]
                delta = Fraction(rng.randint(0, 8), 8) * min(p)
                eps = Fraction(rng.randint(0, 8), 8) * (min(p) - delta)
                assert check_pq_theorem(PerturbationSpec(tuple(p), eps=eps, delta=delta)).status == 'success'

    def test_report_serializes(self):
        text = to_json(check_pq_theorem(PerturbationSpec(BAND_P, eps=1, delta=2)))
        assert '"status": "success"' in text


class TestBoxPair:
    def test_entries_in_range(self):
        A, B = make_box_pair(-1, 4, seed=5)
        for M in (A, B):
            assert all(-2 <= M[p] <= -1 for p in offdiag_positions(4))

    def test_pair_commutes_with_join(self):
        A, B = make_box_pair(Fraction(-3, 2), 5, seed=11, denominator=8)
        assert is_idempotent(A) and is_idempotent(B)
        assert A @ B == B @ A == mat_add(A, B)

    def test_seeded(self):
        assert make_box_pair(-1, 3, seed=2) == make_box_pair(-1, 3, seed=2)
        assert make_box_pair(-1, 3, seed=random.Random(2)) == make_box_pair(-1, 3, seed=2)

    def test_r_negative(self):
        with pytest.raises(DomainError, match='r < 0'):
            make_box_pair(0, 3)

    def test_neighbourhood_samples(self, rng):
        A = matrix('0 -3/2 -3/2; -3/2 0 -3/2; -3/2 -3/2 0')
        samples = list(nbhd_sample(A, -1, rng, 25, denominator=16))
        assert len(samples) == 25
        for X in samples:
            assert all(-2 < X[p] < -1 for p in offdiag_positions(3))
            assert A @ X == X @ A == mat_add(A, X)

    def test_neighbourhood_center(self, rng):
        with pytest.raises(DomainError, match='strictly inside'):
            list(nbhd_sample(matrix('0 -1; -1 0'), -1, rng, 1))


class TestJoin:
    def test_four_by_four(self):
        report = non_idempotent_join_check(PAIR_A, PAIR_B)
        assert report['factors_idempotent'] and report['product_idempotent']
        assert report['commute'] and report['products_equal_join_squared']
        assert not report['join_idempotent']
        assert report['differences'] == [[4, 1]]
        assert not report['max_product_criterion']
