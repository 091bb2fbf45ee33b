"""Commutation tests, winner witnesses and the per-winner constraint systems."""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, Mapping, Optional, Tuple

from config import Config
from polytope import DiffConstraintSystem, Relabeling
from tropcore import (
    BOTTOM, DimensionError, DomainError, ExtReal, Position, TropMatrix,
    TropicalError, const_matrix, format_ext, identity, is_strictly_normal,
    kleene_star, mat_add, mat_le, mat_pow, max_offdiag, min_offdiag,
    offdiag_positions, require_normal, require_real_normal, unit_perturbation,
    zero,
)

logger = logging.getLogger(__name__)


class CapExceededError(TropicalError):
    """A combinatorial enumeration would exceed its configured cap"""


def _offdiag_index(n: int, i: int, j: int) -> int:
    return i * (n - 1) + (j if j < i else j - 1)


@dataclass(frozen=True)
class Winner:
    """Assignment (i, j) -> (w1, w2) on the off-diagonal positions, row-major."""

    n: int
    entries: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if len(self.entries) != self.n * self.n - self.n:
            raise DimensionError(f'winner of order {self.n} needs {self.n * self.n - self.n} entries')
        for pair in self.entries:
            if len(pair) != 2 or not all(0 <= v < self.n for v in pair):
                raise DomainError(f'winner value {pair!r} outside order {self.n}')

    @classmethod
    def from_mapping(cls, n: int, mapping: Mapping[Position, Tuple[int, int]]) -> 'Winner':
        positions = offdiag_positions(n)
        missing = [p for p in positions if p not in mapping]
        if missing or len(mapping) != len(positions):
            raise DomainError(f'winner must be defined exactly on the off-diagonal positions; missing {missing}')
        return cls(n, tuple(tuple(mapping[p]) for p in positions))

    def __getitem__(self, position: Position) -> Tuple[int, int]:
        i, j = position
        if i == j:
            raise DomainError('winners are not defined on the diagonal')
        return self.entries[_offdiag_index(self.n, i, j)]

    def items(self):
        return zip(offdiag_positions(self.n), self.entries)

    def replace(self, position: Position, value: Tuple[int, int]) -> 'Winner':
        entries = list(self.entries)
        entries[_offdiag_index(self.n, *position)] = tuple(value)
        return Winner(self.n, tuple(entries))

    def to_json(self) -> Dict:
        return {
            'n': self.n,
            'entries': {f'{i + 1},{j + 1}': [w1 + 1, w2 + 1] for (i, j), (w1, w2) in self.items()},
        }

    @classmethod
    def from_json(cls, payload: Dict) -> 'Winner':
        try:
            n = int(payload['n'])
            mapping = {}
            for key, value in payload['entries'].items():
                i, j = (int(part) - 1 for part in key.split(','))
                w1, w2 = (int(part) - 1 for part in value)
                mapping[(i, j)] = (w1, w2)
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise DomainError(f'malformed winner JSON: {e}') from None
        return cls.from_mapping(n, mapping)


def identity_winner(n: int) -> Winner:
    return Winner(n, tuple(offdiag_positions(n)))


def transposition_winner(n: int) -> Winner:
    return Winner(n, tuple((j, i) for i, j in offdiag_positions(n)))


@dataclass(frozen=True)
class WitnessSet:
    """Per-position argmax sets of a commuting pair, never expanded eagerly."""

    n: int
    choices: Tuple[Tuple[FrozenSet[int], FrozenSet[int]], ...] = ()
    empty: bool = False

    def __bool__(self):
        return not self.empty

    def at(self, position: Position) -> Tuple[FrozenSet[int], FrozenSet[int]]:
        return self.choices[_offdiag_index(self.n, *position)]

    def contains(self, w: Winner) -> bool:
        if self.empty or w.n != self.n:
            return False
        return all(w1 in left and w2 in right for (w1, w2), (left, right) in zip(w.entries, self.choices))

    def count(self) -> int:
        if self.empty:
            return 0
        total = 1
        for left, right in self.choices:
            total *= len(left) * len(right)
        return total

    def first(self) -> Optional[Winner]:
        if self.empty:
            return None
        return Winner(self.n, tuple((min(left), min(right)) for left, right in self.choices))

    def expand(self, cap: int = None) -> Iterator[Winner]:
        cap = Config.WITNESS_CAP if cap is None else cap
        total = self.count()
        if total > cap:
            logger.info('witness expansion of %d winners exceeds cap %d', total, cap)
            raise CapExceededError(f'{total} winners exceed the expansion cap {cap}')
        if self.empty:
            return
        pools = [list(itertools.product(sorted(left), sorted(right))) for left, right in self.choices]
        for entries in itertools.product(*pools):
            yield Winner(self.n, tuple(entries))


@dataclass(frozen=True)
class CommutationReport:
    commutes: bool
    product: Optional[TropMatrix]
    in_omega_A: bool
    in_omega_prime: bool
    witnesses: WitnessSet = field(repr=False)

    def to_dict(self) -> Dict:
        payload = {
            'commutes': self.commutes,
            'in_omega_A': self.in_omega_A,
            'in_omega_prime': self.in_omega_prime,
            'witness_count': self.witnesses.count(),
        }
        if self.product is not None:
            payload['product'] = self.product
        return payload


def _check_pair(A: TropMatrix, X: TropMatrix) -> int:
    n = require_real_normal(A)
    require_normal(X, 'X')
    if X.rows != n:
        raise DimensionError(f'A has order {n}, X has order {X.rows}')
    return n


def _witnesses(A: TropMatrix, X: TropMatrix, AX: TropMatrix, XA: TropMatrix) -> WitnessSet:
    n = A.rows
    if AX != XA:
        return WitnessSet(n, (), empty=True)
    choices = []
    for i, j in offdiag_positions(n):
        target = AX[i, j]
        left = frozenset(k for k in range(n) if A[i, k] + X[k, j] == target)
        right = frozenset(t for t in range(n) if X[i, t] + A[t, j] == target)
        choices.append((left, right))
    return WitnessSet(n, tuple(choices))


def witness_winners(A: TropMatrix, X: TropMatrix) -> WitnessSet:
    _check_pair(A, X)
    return _witnesses(A, X, A @ X, X @ A)


def commutes(A: TropMatrix, X: TropMatrix) -> CommutationReport:
    _check_pair(A, X)
    AX, XA = A @ X, X @ A
    witnesses = _witnesses(A, X, AX, XA)
    if not witnesses:
        return CommutationReport(False, None, False, False, witnesses)
    return CommutationReport(True, AX, AX == A, AX == X, witnesses)


def omega_w_contains(A: TropMatrix, w: Winner, X: TropMatrix) -> bool:
    """X in Omega_w(A), read straight off the products"""
    n = _check_pair(A, X)
    if w.n != n:
        raise DimensionError(f'winner of order {w.n} for matrices of order {n}')
    AX, XA = A @ X, X @ A
    if AX != XA:
        return False
    return all(
        A[i, w1] + X[w1, j] == AX[i, j] == X[i, w2] + A[w2, j]
        for (i, j), (w1, w2) in w.items()
    )


def _tautological(position: Position, value: Tuple[int, int]) -> bool:
    i, j = position
    return value == (i, j) or value == (j, i)


def omega_w_system(A: TropMatrix, w: Winner, relabeling: Optional[Relabeling] = None) -> DiffConstraintSystem:
    """Equalities and dominance inequalities cutting out Omega_w(A).

    Each relation ``a + x_p <= b + x_q`` becomes ``x_p - x_q <= b - a``;
    diagonal entries of X are the constant 0.
    """
    n = require_real_normal(A)
    if w.n != n:
        raise DimensionError(f'winner of order {w.n} for a matrix of order {n}')
    labels = relabeling or Relabeling.row_major(n)

    def var(r: int, c: int) -> Optional[int]:
        return None if r == c else labels.index((r, c))

    system = DiffConstraintSystem(len(labels), labels.var_names())
    for index in range(len(labels)):
        system.add_box(index, hi=0)
    for (i, j), (w1, w2) in w.items():
        left_const, left_var = A[i, w1], var(w1, j)
        right_const, right_var = A[w2, j], var(i, w2)
        if not _tautological((i, j), (w1, w2)):
            system.add_equal(left_var, right_var, right_const - left_const)
        for s in range(n):
            if s != w1:
                system.add_le(var(s, j), left_var, left_const - A[i, s])
        for t in range(n):
            if t != w2:
                system.add_le(var(i, t), right_var, right_const - A[t, j])
    return system.freeze()


def omega_w_empty_quick(A: TropMatrix, w: Winner) -> bool:
    """One-sided emptiness test: two parallel hyperplanes forced by a swapped pair"""
    n = require_real_normal(A)
    for (i, j), (s, t) in w.items():
        if s == t or (s, t) in ((i, j), (j, i)):
            continue
        if w[(s, t)] != (i, j):
            continue
        if A[i, s] + A[s, i] != A[j, t] + A[t, j]:
            return True
    return False


def omega_w_dim_bound(A: TropMatrix, w: Winner) -> int:
    n = require_real_normal(A)
    if w.n != n:
        raise DimensionError(f'winner of order {w.n} for a matrix of order {n}')
    nontrivial = sum(1 for position, value in w.items() if not _tautological(position, value))
    return n * n - n - nontrivial


def neigh_identity_box(A: TropMatrix) -> Tuple[TropMatrix, TropMatrix]:
    """I <= X <= K(m(A)) lies in Omega^A(A)"""
    n = require_real_normal(A)
    return identity(n), const_matrix(min_offdiag(A), n)


def neigh_zero_box(A: TropMatrix) -> Tuple[TropMatrix, TropMatrix]:
    """K(M(A)) <= X <= 0 lies in Omega'(A)"""
    n = require_real_normal(A)
    if not is_strictly_normal(A):
        raise DomainError('neigh_zero_box needs a strictly normal matrix')
    return const_matrix(max_offdiag(A), n), zero(n)


def between_powers_check(A: TropMatrix, B: TropMatrix) -> bool:
    """A^(n-2) <= B <= A*"""
    n = require_real_normal(A)
    if B.shape != A.shape:
        raise DimensionError(f'A is {A.shape}, B is {B.shape}')
    return mat_le(mat_pow(A, max(n - 2, 0)), B) and mat_le(B, kleene_star(A))


def max_product_criterion(A: TropMatrix, B: TropMatrix) -> bool:
    """a_ik + b_kj <= (A (+) B)_ij for all i, j, k"""
    n = require_normal(A)
    require_normal(B, 'B')
    joined = mat_add(A, B)
    return all(
        A[i, k] + B[k, j] <= joined[i, j]
        for i in range(n) for j in range(n) for k in range(n)
    )


def find_unit_commuter(A: TropMatrix) -> Tuple[int, int, Fraction]:
    """(i, j, eps) with E_ij(-eps) commuting with A"""
    n = require_real_normal(A)
    if n < 2:
        raise DomainError('find_unit_commuter needs order >= 2')
    zeros = [p for p in offdiag_positions(n) if A[p] == 0]
    if zeros:
        (i, j), eps = zeros[0], Fraction(1)
    else:
        (i, j), eps = (0, 1), -max_offdiag(A) / 2
    E = unit_perturbation(n, i, j, -eps)
    if A @ E != E @ A:
        raise TropicalError(f'E_{i + 1}{j + 1}({format_ext(-eps)}) does not commute with A')
    return i, j, eps


def power_class(A: TropMatrix, X: TropMatrix) -> Optional[int]:
    """Smallest j with AX = XA = A^j, if the common product is a power of A"""
    report = commutes(A, X)
    if not report.commutes:
        return None
    power = identity(A.rows)
    for j in range(A.rows + 1):
        if power == report.product:
            return j
        power = power @ A
    return None


def random_entry(rng: random.Random, lo: ExtReal, hi: Fraction, denominator: int) -> ExtReal:
    """Uniform rational in [lo, hi]; an unbounded lower end also yields -inf"""
    if lo is BOTTOM:
        if rng.random() < 0.125:
            return BOTTOM
        lo = hi - 2 * (abs(hi) + 1)
    return lo + (hi - lo) * Fraction(rng.randint(0, denominator), denominator)


def sample_box(lower: TropMatrix, upper: TropMatrix, rng: random.Random,
               count: int, denominator: int = None) -> Iterator[TropMatrix]:
    """Seeded draws from the box lower <= X <= upper, corners first"""
    denominator = denominator or Config.SAMPLE_DENOMINATOR
    if lower.shape != upper.shape or not mat_le(lower, upper):
        raise DomainError('sample_box needs lower <= upper of equal shape')
    emitted = 0
    for corner in (lower, upper):
        if emitted < count:
            emitted += 1
            yield corner
    while emitted < count:
        emitted += 1
        yield TropMatrix._trusted(
            tuple(
                lo if lo == hi else random_entry(rng, lo, hi, denominator)
                for lo, hi in zip(row_lo, row_hi)
            )
            for row_lo, row_hi in zip(lower, upper)
        )
