import json
import random
from fractions import Fraction

from config import Config
from tropcore import (
    BOTTOM, DomainError, TropMatrix, TropicalError, format_ext, parse_ext,
)


class MatrixFormatError(TropicalError):
    """Malformed matrix text, with the location of the problem"""

    def __init__(self, message, path='<string>', line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        location = path
        if line is not None:
            location += f':{line}'
            if column is not None:
                location += f':{column}'
        super().__init__(f'{location}: {message}')


def parse_matrix(text, path='<string>'):
    """Parse the "n m" header plus n rows of m tokens"""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise MatrixFormatError('empty input, expected a "rows cols" header', path, 1)
    header = lines[0].split()
    if len(header) != 2 or not all(token.isdigit() for token in header):
        raise MatrixFormatError('header must be two positive integers "rows cols"', path, 1, 1)
    rows, cols = (int(token) for token in header)
    if rows < 1 or cols < 1:
        raise MatrixFormatError('matrix dimensions must be positive', path, 1, 1)
    body = lines[1:]
    if len(body) != rows:
        raise MatrixFormatError(f'expected {rows} rows, found {len(body)}', path, len(lines))
    data = []
    for offset, line in enumerate(body, start=2):
        tokens = line.split()
        if len(tokens) != cols:
            raise MatrixFormatError(f'expected {cols} entries, found {len(tokens)}', path, offset)
        row = []
        column = 0
        for token in tokens:
            column = line.index(token, column) + 1
            try:
                row.append(parse_ext(token))
            except DomainError:
                raise MatrixFormatError(f'bad entry {token!r}', path, offset, column) from None
            column += len(token) - 1
        data.append(row)
    return TropMatrix(data)


def format_matrix(matrix):
    lines = [f'{matrix.rows} {matrix.cols}']
    lines.extend(' '.join(format_ext(entry) for entry in row) for row in matrix)
    return '\n'.join(lines) + '\n'


def read_matrix(path):
    try:
        with open(path, encoding='utf-8') as handle:
            text = handle.read()
    except OSError as e:
        raise MatrixFormatError(f'cannot read file: {e.strerror}', str(path)) from None
    return parse_matrix(text, str(path))


def parse_vector(text):
    """Comma separated exact numbers, e.g. "1,-2,0" """
    values = [parse_ext(token) for token in text.split(',') if token.strip()]
    if not values:
        raise DomainError('empty vector')
    return tuple(values)


def parse_alphabet(text=None):
    alphabet = parse_vector(text or Config.GRID_ALPHABET)
    if len(set(alphabet)) != len(alphabet):
        raise DomainError('grid alphabet has repeated values')
    if 0 not in alphabet:
        raise DomainError('grid alphabet must contain 0')
    if any(value > 0 for value in alphabet):
        raise DomainError('grid alphabet entries must be <= 0')
    return alphabet


def matrix_to_json(matrix):
    return [[format_ext(entry) for entry in row] for row in matrix]


def _default(value):
    if isinstance(value, TropMatrix):
        return matrix_to_json(value)
    if isinstance(value, Fraction) or value is BOTTOM:
        return format_ext(value)
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    raise TypeError(f'{type(value).__name__} is not JSON serializable')


def to_json(payload):
    """Deterministic JSON with exact numbers as strings"""
    return json.dumps(_exact(payload), indent=2, sort_keys=True, ensure_ascii=False, default=_default) + '\n'


def _exact(value):
    # json.dumps never calls default() for tuples, so convert them first
    if isinstance(value, dict):
        return {key: _exact(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_exact(item) for item in value]
    if isinstance(value, Fraction) or value is BOTTOM:
        return format_ext(value)
    return value


def make_rng(seed=None):
    return random.Random(Config.SEED if seed is None else seed)


def random_rational(rng, lo, hi, denominator=None):
    """Uniform on the grid lo + (hi - lo) k / denominator"""
    denominator = denominator or Config.SAMPLE_DENOMINATOR
    lo, hi = Fraction(lo), Fraction(hi)
    return lo + (hi - lo) * Fraction(rng.randint(0, denominator), denominator)


def random_normal(rng, n, lo=-8, denominator=4, strict=False, bottom_rate=0):
    """Random normal matrix with off-diagonal entries in [lo, 0]"""
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(Fraction(0))
            elif bottom_rate and rng.random() < bottom_rate:
                row.append(BOTTOM)
            else:
                value = random_rational(rng, lo, 0, denominator)
                if strict and value == 0:
                    value = Fraction(-1, denominator)
                row.append(value)
        rows.append(row)
    return TropMatrix(rows)
