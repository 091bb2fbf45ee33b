import json
import random
from fractions import Fraction

import pytest

from reference import B3
from tropcore import BOTTOM, DomainError, is_normal, is_strictly_normal, offdiag_positions
from utils import (
    MatrixFormatError, format_matrix, make_rng, parse_alphabet, parse_matrix,
    parse_vector, random_normal, random_rational, read_matrix, to_json,
)


class TestMatrixText:
    def test_parse(self):
        A = parse_matrix('2 2\n0 -inf\n-1.5 0\n')
        assert A[0, 1] is BOTTOM
        assert A[1, 0] == Fraction(-3, 2)

    def test_integer_round_trip(self):
        assert format_matrix(B3) == '3 3\n0 -3 -1\n-4 0 -6\n-5 0 0\n'
        assert parse_matrix(format_matrix(B3)) == B3

    def test_fractions_print_exactly(self):
        assert format_matrix(parse_matrix('1 2\n-2.5 1/3')) == '1 2\n-5/2 1/3\n'

    @pytest.mark.parametrize('text,line,column', [
        ('', 1, None),
        ('2 x\n0 0\n0 0', 1, 1),
        ('2 2\n0 0', 2, None),
        ('2 2\n0 0\n0', 3, None),
        ('2 2\n0 0\n0  abc', 3, 4),
    ])
    def test_locations(self, text, line, column):
        with pytest.raises(MatrixFormatError) as info:
            parse_matrix(text, 'A.mat')
        assert info.value.path == 'A.mat'
        assert info.value.line == line
        assert info.value.column == column
        assert str(info.value).startswith('A.mat:')

    def test_read_missing_file(self, tmp_path):
        with pytest.raises(MatrixFormatError, match='cannot read'):
            read_matrix(tmp_path / 'missing.mat')

    def test_read(self, write_matrix):
        assert read_matrix(write_matrix('B.mat', B3)) == B3


class TestVectors:
    def test_vector(self):
        assert parse_vector('1,-2,0') == (1, -2, 0)
        assert parse_vector('1/2, -inf') == (Fraction(1, 2), BOTTOM)

    def test_empty_vector(self):
        with pytest.raises(DomainError, match='empty'):
            parse_vector(' , ')

    def test_default_alphabet(self):
        assert parse_alphabet() == (0, -1, -2, BOTTOM)

    @pytest.mark.parametrize('text,message', [
        ('-1,-2', 'contain 0'),
        ('0,1', '<= 0'),
        ('0,-1,-1', 'repeated'),
    ])
    def test_bad_alphabet(self, text, message):
        with pytest.raises(DomainError, match=message):
            parse_alphabet(text)


class TestJson:
    def test_exact_numbers(self):
        payload = json.loads(to_json({'m': B3, 'x': Fraction(-5, 2), 'b': BOTTOM, 't': (1, 2)}))
        assert payload['m'][0] == ['0', '-3', '-1']
        assert payload['x'] == '-5/2'
        assert payload['b'] == '-inf'
        assert payload['t'] == [1, 2]

    def test_sorted_and_stable(self):
        assert to_json({'b': 1, 'a': 2}) == '{\n  "a": 2,\n  "b": 1\n}\n'

    def test_unknown_type(self):
        with pytest.raises(TypeError):
            to_json({'x': object()})


class TestRandom:
    def test_seeded(self):
        assert make_rng(4).random() == random.Random(4).random()

    def test_rational_grid(self, rng):
        for _ in range(50):
            value = random_rational(rng, -2, 0, 8)
            assert -2 <= value <= 0
            assert (value * 4).denominator == 1

    def test_random_normal(self, rng):
        A = random_normal(rng, 4)
        assert is_normal(A)
        assert is_strictly_normal(random_normal(rng, 5, strict=True))

    def test_bottom_rate(self, rng):
        A = random_normal(rng, 6, bottom_rate=1)
        assert all(A[p] is BOTTOM for p in offdiag_positions(6))
