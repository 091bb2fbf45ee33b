"""Exact max-plus scalars and matrices.

Scalars are ``fractions.Fraction`` values plus the singleton ``BOTTOM``
standing for -inf. ``BOTTOM`` orders below every rational and absorbs
addition, so the builtin ``max``, ``min``, ``+`` and comparisons carry the
whole semiring: ``a (+) b = max(a, b)`` and ``a (x) b = a + b``.

Matrices are immutable and 0-indexed; the text format and JSON layers
translate to 1-based positions.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Iterable, Iterator, List, Sequence, Tuple, Union

logger = logging.getLogger(__name__)


class TropicalError(ValueError):
    """Base class for every error raised by tropcomm"""


class DimensionError(TropicalError):
    """Operand shapes do not fit the operation"""


class NotNormalError(TropicalError):
    """A normal-only operation received a matrix outside N_n"""


class DomainError(TropicalError):
    """An argument lies outside the documented range"""


class Bottom:
    """The tropical zero, -inf."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __reduce__(self):
        return (Bottom, ())

    def __repr__(self):
        return 'BOTTOM'

    def __str__(self):
        return '-inf'

    def __hash__(self):
        return hash('tropcomm.BOTTOM')

    def __eq__(self, other):
        return other is self

    def __ne__(self, other):
        return other is not self

    def __lt__(self, other):
        return other is not self

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise DomainError('-inf - (-inf) is undefined')
        return self

    def __rsub__(self, other):
        raise DomainError('subtracting -inf would produce +inf')

    def __neg__(self):
        raise DomainError('negating -inf would produce +inf')


BOTTOM = Bottom()

ExtReal = Union[Fraction, Bottom]
Position = Tuple[int, int]

_BOTTOM_TOKENS = {'-inf', '-infinity', '−inf', '-∞', '−∞'}


def ext(value) -> ExtReal:
    """Coerce ``value`` to an exact extended real"""
    if value is BOTTOM:
        return BOTTOM
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f'not a number: {value!r}')
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_ext(value)
    raise DomainError(f'cannot represent {value!r} exactly; pass an int, Fraction or string')


def parse_ext(token: str) -> ExtReal:
    """Parse ``-inf``, integers, decimals and ``p/q`` without rounding"""
    text = token.strip().replace('−', '-')
    if text.lower() in _BOTTOM_TOKENS:
        return BOTTOM
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise DomainError(f'not an exact number: {token!r}') from None
    return value


def format_ext(value: ExtReal) -> str:
    """Exact string form: ``-5``, ``-5/2`` or ``-inf``"""
    if value is BOTTOM:
        return '-inf'
    return str(value)


def t_add(a: ExtReal, b: ExtReal) -> ExtReal:
    return a if a >= b else b


def t_mul(a: ExtReal, b: ExtReal) -> ExtReal:
    return a + b


class TropMatrix:
    """Dense rows x cols matrix over the max-plus semiring."""

    __slots__ = ('_rows',)

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(ext(entry) for entry in row) for row in rows)
        if not data or not data[0]:
            raise DimensionError('a matrix needs at least one row and one column')
        width = len(data[0])
        for index, row in enumerate(data):
            if len(row) != width:
                raise DimensionError(f'row {index + 1} has {len(row)} entries, expected {width}')
        self._rows = data

    @classmethod
    def _trusted(cls, rows):
        matrix = cls.__new__(cls)
        matrix._rows = tuple(tuple(row) for row in rows)
        return matrix

    @property
    def rows(self) -> int:
        return len(self._rows)

    @property
    def cols(self) -> int:
        return len(self._rows[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def order(self) -> int:
        if self.rows != self.cols:
            raise DimensionError(f'{self.rows}x{self.cols} matrix is not square')
        return self.rows

    @property
    def entries(self) -> Tuple[ExtReal, ...]:
        return tuple(entry for row in self._rows for entry in row)

    def row(self, i: int) -> Tuple[ExtReal, ...]:
        return self._rows[i]

    def col(self, j: int) -> Tuple[ExtReal, ...]:
        return tuple(row[j] for row in self._rows)

    def columns(self) -> List[Tuple[ExtReal, ...]]:
        return [tuple(column) for column in zip(*self._rows)]

    def to_lists(self) -> List[List[ExtReal]]:
        return [list(row) for row in self._rows]

    def replace(self, position: Position, value) -> 'TropMatrix':
        i, j = position
        rows = self.to_lists()
        rows[i][j] = ext(value)
        return TropMatrix._trusted(rows)

    def __getitem__(self, position: Position) -> ExtReal:
        i, j = position
        return self._rows[i][j]

    def __iter__(self) -> Iterator[Tuple[ExtReal, ...]]:
        return iter(self._rows)

    def __eq__(self, other):
        if not isinstance(other, TropMatrix):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def __matmul__(self, other: 'TropMatrix') -> 'TropMatrix':
        return mat_mul(self, other)

    def __repr__(self):
        body = '; '.join(' '.join(format_ext(e) for e in row) for row in self._rows)
        return f'TropMatrix([{body}])'

    def __str__(self):
        return '\n'.join(' '.join(format_ext(e) for e in row) for row in self._rows)


def offdiag_positions(n: int) -> List[Position]:
    """Row-major list of the n^2 - n off-diagonal positions"""
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def _same_shape(A: TropMatrix, B: TropMatrix, op: str):
    if A.shape != B.shape:
        raise DimensionError(f'{op}: shapes {A.shape} and {B.shape} differ')


def mat_mul(A: TropMatrix, B: TropMatrix) -> TropMatrix:
    """(AB)_ij = max_k a_ik + b_kj"""
    if A.cols != B.rows:
        raise DimensionError(f'cannot multiply {A.rows}x{A.cols} by {B.rows}x{B.cols}')
    columns = B.columns()
    return TropMatrix._trusted(
        tuple(max(a + b for a, b in zip(row, column)) for column in columns)
        for row in A
    )


def mat_add(A: TropMatrix, B: TropMatrix) -> TropMatrix:
    _same_shape(A, B, 'mat_add')
    return TropMatrix._trusted(
        tuple(t_add(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(A, B)
    )


def mat_min(A: TropMatrix, B: TropMatrix) -> TropMatrix:
    _same_shape(A, B, 'mat_min')
    return TropMatrix._trusted(
        tuple(min(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(A, B)
    )


def mat_le(A: TropMatrix, B: TropMatrix) -> bool:
    _same_shape(A, B, 'mat_le')
    return all(a <= b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def transpose(A: TropMatrix) -> TropMatrix:
    return TropMatrix._trusted(A.columns())


def scalar_mul(lam, A: TropMatrix) -> TropMatrix:
    lam = ext(lam)
    return TropMatrix._trusted(tuple(lam + a for a in row) for row in A)


def identity(n: int) -> TropMatrix:
    return const_matrix(BOTTOM, n)


def zero(n: int) -> TropMatrix:
    return const_matrix(0, n)


def const_matrix(r, n: int) -> TropMatrix:
    """K(r): zero diagonal, r elsewhere"""
    r = ext(r)
    if r > 0:
        raise DomainError(f'K(r) needs r <= 0, got {format_ext(r)}')
    if n < 1:
        raise DimensionError('order must be positive')
    zero_ = Fraction(0)
    return TropMatrix._trusted(
        tuple(zero_ if i == j else r for j in range(n)) for i in range(n)
    )


def unit_perturbation(n: int, i: int, j: int, r) -> TropMatrix:
    """E_ij(r): r at (i, j), zero everywhere else"""
    if i == j:
        raise DomainError('E_ij(r) needs i != j')
    if not (0 <= i < n and 0 <= j < n):
        raise DimensionError(f'position ({i}, {j}) outside order {n}')
    r = ext(r)
    if r > 0:
        raise DomainError(f'E_ij(r) needs r <= 0, got {format_ext(r)}')
    return zero(n).replace((i, j), r)


def diag(d: Sequence) -> TropMatrix:
    values = [ext(v) for v in d]
    n = len(values)
    return TropMatrix._trusted(
        tuple(values[i] if i == j else BOTTOM for j in range(n)) for i in range(n)
    )


def is_square(A: TropMatrix) -> bool:
    return A.rows == A.cols


def is_real(A: TropMatrix) -> bool:
    return all(entry is not BOTTOM for entry in A.entries)


def is_normal(A: TropMatrix) -> bool:
    """I <= A <= 0"""
    if not is_square(A):
        return False
    return all(
        (entry == 0) if i == j else (entry <= 0)
        for i, row in enumerate(A) for j, entry in enumerate(row)
    )


def is_strictly_normal(A: TropMatrix) -> bool:
    return is_normal(A) and all(A[p] < 0 for p in offdiag_positions(A.rows))


def is_border(A: TropMatrix) -> bool:
    return is_normal(A) and any(A[p] == 0 or A[p] is BOTTOM for p in offdiag_positions(A.rows))


def is_idempotent(A: TropMatrix) -> bool:
    return is_square(A) and A @ A == A


def require_normal(A: TropMatrix, name: str = 'A') -> int:
    if not is_normal(A):
        raise NotNormalError(f'{name} is not normal (needs zero diagonal and entries <= 0)')
    return A.rows


def require_real(A: TropMatrix, name: str = 'A'):
    if not is_real(A):
        raise DomainError(f'{name} must be real (no -inf entries)')


def require_real_normal(A: TropMatrix, name: str = 'A') -> int:
    n = require_normal(A, name)
    require_real(A, name)
    return n


def mat_pow(A: TropMatrix, k: int) -> TropMatrix:
    """A^k by binary exponentiation; A^0 = I"""
    n = require_normal(A)
    if k < 0:
        raise DomainError('negative powers are not defined')
    result = identity(n)
    base = A
    while k:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


def kleene_star(A: TropMatrix) -> TropMatrix:
    """A* = A^(n-1), by repeated squaring"""
    n = require_normal(A)
    star = A
    reached = 1
    while reached < n - 1:
        star = star @ star
        reached *= 2
    return star


def is_kleene_star(A: TropMatrix) -> bool:
    return is_normal(A) and kleene_star(A) == A


def stabilization_index(A: TropMatrix) -> int:
    """Smallest k with A^k = A^(k+1)"""
    require_normal(A)
    k, power = 0, identity(A.rows)
    while True:
        following = power @ A
        if following == power:
            return k
        k, power = k + 1, following


def powers_family(A: TropMatrix) -> Tuple[TropMatrix, ...]:
    """P(A) = (I, A, A^2, ..., A^(n-1), 0)"""
    n = require_real_normal(A)
    family = [identity(n)]
    for _ in range(1, n):
        family.append(family[-1] @ A)
    family.append(zero(n))
    return tuple(family)


def normalize_A0(A: TropMatrix) -> TropMatrix:
    """A0 = A diag(-row(A, n)); its last row is zero"""
    last = A.row(A.rows - 1)
    if any(entry is BOTTOM for entry in last):
        raise DomainError('A0 needs a real last row')
    return A @ diag([-entry for entry in last])


def min_offdiag(A: TropMatrix) -> Fraction:
    """m(A)"""
    require_real_normal(A)
    return min(A.entries)


def max_offdiag(A: TropMatrix) -> Fraction:
    """M(A)"""
    n = require_real_normal(A)
    if n < 2:
        raise DomainError('M(A) needs order >= 2')
    return max(A[p] for p in offdiag_positions(n))


def tropical_radius(A: TropMatrix) -> Fraction:
    """Largest tropical distance from the origin to the span section, -m(A)"""
    return -min_offdiag(A)
