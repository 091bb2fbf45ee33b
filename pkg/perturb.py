"""Commuting families built from entry-range conditions, and the cyclic
band perturbations P(-p, -eps) and Q(-p, -eps)."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from commutant import max_product_criterion
from config import Config
from tropcore import (
    DimensionError, DomainError, TropMatrix, ext, format_ext, is_idempotent,
    mat_add, offdiag_positions, require_real_normal, zero,
)
from utils import random_rational

logger = logging.getLogger(__name__)


def _positive(value, name):
    value = ext(value)
    if not value > 0:
        raise DomainError(f'{name} must be a positive rational, got {format_ext(value)}')
    return value


def same_size(a, b) -> bool:
    """a and b are of the same size iff b <= 2a, for 0 < a <= b"""
    a, b = _positive(a, 'a'), _positive(b, 'b')
    if a > b:
        raise DomainError('same_size expects a <= b')
    return b <= 2 * a


def small_wrt(a, b) -> bool:
    return not same_size(a, b)


@dataclass(frozen=True)
class PerturbationSpec:
    p: Tuple[Fraction, ...]
    eps: Fraction = Fraction(0)
    delta: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, 'p', tuple(_positive(v, 'p_i') for v in self.p))
        for name in ('eps', 'delta'):
            value = ext(getattr(self, name))
            if not value >= 0:
                raise DomainError(f'{name} must be non-negative')
            object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def hypothesis_holds(self) -> bool:
        return self.delta + self.eps <= min(self.p)


def _band_values(p: Sequence, eps) -> Tuple[List[Fraction], Fraction]:
    values = [ext(v) for v in p]
    eps = ext(eps)
    if any(not v >= 0 for v in values) or not eps >= 0:
        raise DomainError('band magnitudes must be non-negative')
    return values, eps


def make_P(p: Sequence, eps) -> TropMatrix:
    """-p on the cyclic subdiagonal, -eps elsewhere off the diagonal"""
    values, eps = _band_values(p, eps)
    n = len(values)
    if n < 3:
        raise DimensionError('P(-p, -eps) needs n >= 3')
    rows = [[Fraction(0) if i == j else -eps for j in range(n)] for i in range(n)]
    for i in range(n):
        rows[(i + 1) % n][i] = -values[i]
    return TropMatrix(rows)


def make_Q(p: Sequence, eps) -> TropMatrix:
    """-p on the cyclic subdiagonal, -eps on the next one, 0 elsewhere"""
    values, eps = _band_values(p, eps)
    n = len(values)
    if n < 4:
        raise DimensionError('Q(-p, -eps) needs n >= 4')
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        rows[(i + 1) % n][i] = -values[i]
        rows[(i + 2) % n][i] = -eps
    return TropMatrix(rows)


@dataclass(frozen=True)
class ClauseResult:
    clause: str
    status: str
    left: TropMatrix = None
    right: TropMatrix = None
    expected: TropMatrix = None
    note: str = ''

    @property
    def passed(self) -> bool:
        return self.status == 'success'

    def to_dict(self) -> Dict:
        payload = {'clause': self.clause, 'status': self.status}
        for name in ('left', 'right', 'expected'):
            value = getattr(self, name)
            if value is not None:
                payload[name] = value
        if self.note:
            payload['note'] = self.note
        return payload


@dataclass(frozen=True)
class PQReport:
    spec: PerturbationSpec
    status: str
    clauses: Tuple[ClauseResult, ...] = field(default=())
    message: str = ''

    def to_dict(self) -> Dict:
        return {
            'status': self.status,
            'n': self.spec.n,
            'p': list(self.spec.p),
            'delta': self.spec.delta,
            'eps': self.spec.eps,
            'message': self.message,
            'clauses': [clause.to_dict() for clause in self.clauses],
        }


def _clause(name, first, second, expected, note='') -> ClauseResult:
    left, right = first @ second, second @ first
    status = 'success' if left == expected and right == expected else 'failure'
    return ClauseResult(name, status, left, right, expected, note)


def expected_Q_product(n: int, low) -> TropMatrix:
    """Q(-(m,...,m), 0) for n = 4; the zero matrix for n >= 5

    For n >= 5 every entry of either product has a path through two zero
    entries of the factors, so both products are 0.
    """
    if n == 4:
        return make_Q([low] * n, 0)
    return zero(n)


def check_pq_theorem(spec: PerturbationSpec) -> PQReport:
    """Check both products of the P pair, and of the Q pair when n >= 4"""
    if not spec.hypothesis_holds:
        return PQReport(spec, 'skipped', message='hypothesis delta + eps <= min p does not hold')
    n = spec.n
    if n < 3:
        return PQReport(spec, 'skipped', message='P(-p, -eps) needs n >= 3')
    low = min(spec.delta, spec.eps)
    clauses = [_clause(
        'P',
        make_P(spec.p, spec.delta), make_P(spec.p, spec.eps),
        make_P([spec.delta + spec.eps] * n, low),
    )]
    if n >= 4:
        clauses.append(_clause(
            'Q',
            make_Q(spec.p, spec.delta), make_Q(spec.p, spec.eps),
            expected_Q_product(n, low),
            '' if n == 4 else 'n >= 5: both products are the zero matrix',
        ))
    else:
        clauses.append(ClauseResult('Q', 'skipped'))
    failed = [c for c in clauses if c.status == 'failure']
    if failed:
        logger.info('P/Q products differ from the predicted band for p=%s', [format_ext(v) for v in spec.p])
    return PQReport(spec, 'failure' if failed else 'success', tuple(clauses))


def make_box_pair(r, n: int, seed=None, denominator: int = None) -> Tuple[TropMatrix, TropMatrix]:
    """Two random normal matrices with off-diagonal entries in [2r, r]"""
    r = ext(r)
    if not r < 0:
        raise DomainError('make_box_pair needs r < 0')
    if n < 1:
        raise DimensionError('order must be positive')
    rng = seed if isinstance(seed, random.Random) else random.Random(Config.SEED if seed is None else seed)

    def draw():
        return TropMatrix(
            [0 if i == j else random_rational(rng, 2 * r, r, denominator) for j in range(n)]
            for i in range(n)
        )

    return draw(), draw()


def nbhd_sample(A: TropMatrix, r, rng: random.Random, count: int, denominator: int = None):
    """Matrices with every off-diagonal entry strictly inside (2r, r)"""
    n = require_real_normal(A)
    r = ext(r)
    if not r < 0:
        raise DomainError('nbhd_sample needs r < 0')
    if not all(2 * r < A[p] < r for p in offdiag_positions(n)):
        raise DomainError('A must have its off-diagonal entries strictly inside (2r, r)')
    denominator = denominator or Config.SAMPLE_DENOMINATOR
    for _ in range(count):
        yield TropMatrix(
            [0 if i == j else 2 * r + (-r) * Fraction(rng.randint(1, denominator - 1), denominator)
             for j in range(n)]
            for i in range(n)
        )


def non_idempotent_join_check(A: TropMatrix, B: TropMatrix) -> Dict:
    """Compare AB, BA, M = A (+) B and M^2"""
    joined = mat_add(A, B)
    AB, BA = A @ B, B @ A
    squared = joined @ joined
    return {
        'status': 'success',
        'join': joined,
        'join_idempotent': squared == joined,
        'factors_idempotent': is_idempotent(A) and is_idempotent(B),
        'product_idempotent': is_idempotent(AB),
        'commute': AB == BA,
        'products_equal_join_squared': AB == BA == squared,
        'max_product_criterion': max_product_criterion(A, B),
        'differences': [
            [i + 1, j + 1] for i in range(joined.rows) for j in range(joined.cols)
            if AB[i, j] != joined[i, j]
        ],
        'product': AB,
    }
