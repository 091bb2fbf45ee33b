import random
from fractions import Fraction

import pytest

from reference import B3, B3_OVERLINE, B3_ZERO, PAIR_A, PAIR_AB, PAIR_B, H_SEVEN, H_SEVEN_STAR, matrix
from tropcore import (
    BOTTOM, DimensionError, DomainError, NotNormalError, TropMatrix, const_matrix,
    ext, format_ext, identity, is_border, is_idempotent, is_kleene_star, is_normal,
    is_real, is_strictly_normal, kleene_star, mat_add, mat_le, mat_min, mat_mul,
    mat_pow, max_offdiag, min_offdiag, normalize_A0, offdiag_positions, parse_ext,
    powers_family, scalar_mul, stabilization_index, t_add, t_mul, transpose,
    tropical_radius, unit_perturbation, zero,
)
from utils import random_normal, random_rational


class TestScalars:
    def test_sum_and_product(self):
        assert t_add(3, -7) == 3
        assert t_mul(3, -7) == -4

    def test_bottom_is_neutral_and_absorbing(self):
        assert t_add(BOTTOM, Fraction(-2)) == -2
        assert t_add(BOTTOM, BOTTOM) is BOTTOM
        assert t_mul(BOTTOM, Fraction(5)) is BOTTOM
        assert t_mul(Fraction(5), BOTTOM) is BOTTOM

    def test_bottom_orders_below_everything(self):
        assert BOTTOM < Fraction(-10 ** 9)
        assert Fraction(-10 ** 9) > BOTTOM
        assert BOTTOM <= BOTTOM and not BOTTOM < BOTTOM
        assert max([Fraction(-3), BOTTOM]) == -3

    def test_bottom_cannot_be_negated(self):
        with pytest.raises(DomainError, match='\\+inf'):
            -BOTTOM
        with pytest.raises(DomainError, match='\\+inf'):
            Fraction(1) - BOTTOM

    @pytest.mark.parametrize('token,expected', [
        ('-inf', BOTTOM),
        ('−∞', BOTTOM),
        ('-5', Fraction(-5)),
        ('-5/2', Fraction(-5, 2)),
        ('0.25', Fraction(1, 4)),
        (' 3 ', Fraction(3)),
    ])
    def test_parse(self, token, expected):
        assert parse_ext(token) == expected

    @pytest.mark.parametrize('value,text', [
        (BOTTOM, '-inf'),
        (Fraction(-5), '-5'),
        (Fraction(-5, 2), '-5/2'),
        (Fraction(0), '0'),
    ])
    def test_format(self, value, text):
        assert format_ext(value) == text

    def test_parse_rejects_garbage(self):
        with pytest.raises(DomainError, match='not an exact number'):
            parse_ext('abc')

    @pytest.mark.parametrize('value', [1.5, True, None])
    def test_ext_rejects_inexact(self, value):
        with pytest.raises(DomainError):
            ext(value)


class TestMatrix:
    def test_ragged_rows(self):
        with pytest.raises(DimensionError, match='row 2'):
            TropMatrix([[0, 1], [2]])

    def test_empty(self):
        with pytest.raises(DimensionError):
            TropMatrix([])

    def test_indexing_and_shape(self):
        A = matrix('0 -1 -inf; -2 0 -3')
        assert A.shape == (2, 3)
        assert A[0, 2] is BOTTOM
        assert A.col(1) == (-1, 0)
        assert A.replace((0, 2), -7)[0, 2] == -7
        assert A[0, 2] is BOTTOM

    def test_order_needs_square(self):
        with pytest.raises(DimensionError, match='not square'):
            matrix('0 -1 -2; -2 0 -3').order

    def test_equality_and_hash(self):
        assert matrix('0 -1; -2 0') == TropMatrix([[0, -1], [-2, 0]])
        assert len({matrix('0 -1; -2 0'), TropMatrix([['0', '-1'], ['-2', '0']])}) == 1

    def test_product_shape_mismatch(self):
        with pytest.raises(DimensionError):
            mat_mul(matrix('0 -1'), matrix('0 -1'))

    def test_offdiag_positions_row_major(self):
        assert offdiag_positions(3) == [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]


class TestOperations:
    def test_reference_product(self):
        assert PAIR_A @ PAIR_B == PAIR_AB
        assert PAIR_B @ PAIR_A == PAIR_AB

    def test_identity_and_zero(self):
        assert identity(3) @ B3 == B3 == B3 @ identity(3)
        assert zero(3) @ B3 == zero(3)

    def test_sum_min_and_order(self):
        A, B = matrix('0 -1; -4 0'), matrix('0 -3; -2 0')
        assert mat_add(A, B) == matrix('0 -1; -2 0')
        assert mat_min(A, B) == matrix('0 -3; -4 0')
        assert mat_le(mat_min(A, B), A) and mat_le(A, mat_add(A, B))
        assert not mat_le(A, B)

    def test_transpose_and_scalar(self):
        assert transpose(matrix('0 -1; -4 0')) == matrix('0 -4; -1 0')
        assert scalar_mul(-2, matrix('0 -inf')) == matrix('-2 -inf')

    def test_const_and_unit_matrices(self):
        assert const_matrix(-2, 2) == matrix('0 -2; -2 0')
        assert unit_perturbation(3, 0, 2, -1) == matrix('0 0 -1; 0 0 0; 0 0 0')

    def test_const_matrix_positive(self):
        with pytest.raises(DomainError, match='r <= 0'):
            const_matrix(1, 3)

    def test_unit_perturbation_diagonal(self):
        with pytest.raises(DomainError, match='i != j'):
            unit_perturbation(3, 1, 1, -1)


class TestPredicates:
    def test_normality(self):
        assert is_normal(B3) and is_real(B3)
        assert is_strictly_normal(PAIR_A)
        assert is_border(B3) and not is_border(PAIR_A)
        assert not is_normal(matrix('1 -1; -1 0'))
        assert not is_normal(matrix('0 -1 -2; -1 0 -3'))
        assert is_normal(identity(3)) and not is_real(identity(3))

    def test_require_normal(self):
        with pytest.raises(NotNormalError, match='not normal'):
            mat_pow(matrix('0 1; 0 0'), 2)

    def test_idempotent(self):
        assert is_idempotent(PAIR_A)
        assert not is_idempotent(B3)


class TestPowers:
    def test_power_zero_is_identity(self):
        assert mat_pow(B3, 0) == identity(3)

    def test_powers_by_squaring_agree(self):
        assert mat_pow(B3, 5) == B3 @ B3 @ B3 @ B3 @ B3

    def test_kleene_star(self):
        assert kleene_star(B3) == B3_OVERLINE
        assert is_kleene_star(B3_OVERLINE)
        assert not is_kleene_star(B3)

    def test_seven_by_seven_stabilizes_at_star(self):
        k = stabilization_index(H_SEVEN)
        assert k <= 3
        assert mat_pow(H_SEVEN, k) == H_SEVEN_STAR == kleene_star(H_SEVEN)

    def test_powers_family(self):
        family = powers_family(B3)
        assert family == (identity(3), B3, B3 @ B3, zero(3))

    def test_negative_power(self):
        with pytest.raises(DomainError):
            mat_pow(B3, -1)


class TestExtremes:
    def test_min_and_max(self):
        assert min_offdiag(B3) == -6 and max_offdiag(B3) == 0
        assert tropical_radius(B3) == 6

    def test_min_needs_real(self):
        with pytest.raises(DomainError, match='real'):
            min_offdiag(identity(3))

    def test_normalize(self):
        A0 = normalize_A0(B3)
        assert A0 == B3_ZERO
        assert A0.row(2) == (0, 0, 0)

    def test_normalize_needs_real_last_row(self):
        with pytest.raises(DomainError, match='real last row'):
            normalize_A0(identity(3))


def _random_matrices(seed, count, n=None, bottom_rate=0.25):
    rng = random.Random(seed)
    return [random_normal(rng, n or rng.randint(2, 6), bottom_rate=bottom_rate) for _ in range(count)]


class TestRandomLaws:
    @pytest.mark.parametrize('seed', range(5))
    def test_scalar_laws(self, seed):
        rng = random.Random(seed)
        values = [BOTTOM] + [random_rational(rng, -8, 8, 8) for _ in range(6)]
        for a in values:
            assert t_add(a, a) == a
            assert t_mul(0, a) == a and t_add(BOTTOM, a) == a
            for b in values:
                assert t_add(a, b) == t_add(b, a) and t_mul(a, b) == t_mul(b, a)
                for c in values:
                    assert t_mul(a, t_add(b, c)) == t_add(t_mul(a, b), t_mul(a, c))
                    assert t_add(t_add(a, b), c) == t_add(a, t_add(b, c))

    @pytest.mark.parametrize('seed', range(5))
    def test_product_is_associative(self, seed):
        rng = random.Random(seed)
        n = rng.randint(2, 6)
        A, B, C = _random_matrices(seed + 100, 3, n)
        assert mat_mul(mat_mul(A, B), C) == mat_mul(A, mat_mul(B, C))
        assert A @ mat_add(B, C) == mat_add(A @ B, A @ C)

    @pytest.mark.parametrize('seed', range(5))
    def test_product_is_monotone(self, seed):
        A, other, B = _random_matrices(seed, 3, 4)
        larger = mat_add(A, other)
        assert mat_le(A @ B, larger @ B)
        assert mat_le(B @ A, B @ larger)

    @pytest.mark.parametrize('seed', range(5))
    def test_star_is_idempotent(self, seed):
        for A in _random_matrices(seed, 4):
            star = kleene_star(A)
            assert star @ star == star
            assert kleene_star(star) == star
            assert is_kleene_star(star)

    @pytest.mark.parametrize('seed', range(5))
    def test_order_two_pairs_commute(self, seed):
        A, B = _random_matrices(seed, 2, 2, bottom_rate=0.3)
        assert A @ B == B @ A == mat_add(A, B)
