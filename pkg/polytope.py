"""Alcoved polytopes as difference-constraint systems.

A system over N variables is held as its lower-bound matrix H of order
N + 1: ``h[i][k]`` is the largest known c with ``y_i - y_k >= c`` and the
last index is the affine coordinate, fixed at 0. ``BOTTOM`` means no
constraint. Tightening is the max-plus closure of H.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from tropcore import (
    BOTTOM, DimensionError, DomainError, ExtReal, Position, TropMatrix,
    TropicalError, ext, format_ext, mat_le, offdiag_positions, parse_ext,
    require_real_normal, require_normal,
)

logger = logging.getLogger(__name__)


class InfeasibleError(TropicalError):
    """The constraint system has no solution"""


def position_name(position: Position, n: int) -> str:
    i, j = position
    if n < 10:
        return f'x_{i + 1}{j + 1}'
    return f'x_{i + 1},{j + 1}'


@dataclass(frozen=True)
class Relabeling:
    """Bijection between off-diagonal positions and variable indices."""

    n: int
    positions: Tuple[Position, ...]

    def __post_init__(self):
        if sorted(self.positions) != offdiag_positions(self.n) or len(set(self.positions)) != len(self.positions):
            raise DomainError(f'not a relabeling of the {self.n * self.n - self.n} off-diagonal positions')

    @classmethod
    def row_major(cls, n: int) -> 'Relabeling':
        return cls(n, tuple(offdiag_positions(n)))

    @classmethod
    def from_order(cls, n: int, positions: Sequence[Position]) -> 'Relabeling':
        return cls(n, tuple(tuple(p) for p in positions))

    def __len__(self):
        return len(self.positions)

    def index(self, position: Position) -> int:
        return self.positions.index(tuple(position))

    def position(self, index: int) -> Position:
        return self.positions[index]

    def var_names(self) -> List[str]:
        return [position_name(p, self.n) for p in self.positions]


class DiffConstraintSystem:
    """Bounds c_i <= y_i <= b_i and c_ik <= y_i - y_k <= b_ik.

    Variables are addressed by index; ``None`` addresses the affine zero
    coordinate, so ``add_le(i, None, b)`` is the box bound ``y_i <= b``.
    """

    def __init__(self, nvars: int, var_names: Optional[Sequence[str]] = None):
        if nvars < 0:
            raise DimensionError('nvars must be non-negative')
        names = list(var_names) if var_names is not None else [f'y_{k + 1}' for k in range(nvars)]
        if len(names) != nvars:
            raise DimensionError(f'{len(names)} names for {nvars} variables')
        self._nvars = nvars
        self._names = names
        size = nvars + 1
        self._h: List[List[ExtReal]] = [
            [Fraction(0) if i == k else BOTTOM for k in range(size)] for i in range(size)
        ]
        self._frozen = False

    @property
    def nvars(self) -> int:
        return self._nvars

    @property
    def var_names(self) -> List[str]:
        return list(self._names)

    def _slot(self, var: Optional[int]) -> int:
        if var is None:
            return self._nvars
        if not 0 <= var < self._nvars:
            raise DimensionError(f'variable {var} outside 0..{self._nvars - 1}')
        return var

    @property
    def frozen(self) -> bool:
        return self._frozen

    def freeze(self) -> 'DiffConstraintSystem':
        """Reject further bounds; ``copy()`` gives a mutable system again"""
        self._frozen = True
        return self

    def _raise_bound(self, i: int, k: int, value: ExtReal):
        if self._frozen:
            raise DomainError('constraint system is frozen; add bounds to a copy()')
        if value > self._h[i][k]:
            self._h[i][k] = value

    def add_ge(self, p: Optional[int], q: Optional[int], bound) -> 'DiffConstraintSystem':
        """y_p - y_q >= bound"""
        self._raise_bound(self._slot(p), self._slot(q), ext(bound))
        return self

    def add_le(self, p: Optional[int], q: Optional[int], bound) -> 'DiffConstraintSystem':
        """y_p - y_q <= bound"""
        bound = ext(bound)
        if bound is BOTTOM:
            raise DomainError('an upper bound of -inf admits no real point')
        self._raise_bound(self._slot(q), self._slot(p), -bound)
        return self

    def add_box(self, i: int, lo=BOTTOM, hi=None) -> 'DiffConstraintSystem':
        return self.add_diff(i, None, lo, hi)

    def add_diff(self, i: Optional[int], k: Optional[int], lo=BOTTOM, hi=None) -> 'DiffConstraintSystem':
        self.add_ge(i, k, lo)
        if hi is not None:
            self.add_le(i, k, hi)
        return self

    def add_equal(self, p: Optional[int], q: Optional[int], value=0) -> 'DiffConstraintSystem':
        return self.add_diff(p, q, value, value)

    def box(self, i: int) -> Tuple[ExtReal, Optional[Fraction]]:
        return self.diff(i, None)

    def diff(self, i: Optional[int], k: Optional[int]) -> Tuple[ExtReal, Optional[Fraction]]:
        a, b = self._slot(i), self._slot(k)
        upper = self._h[b][a]
        return self._h[a][b], (None if upper is BOTTOM else -upper)

    @property
    def contradictory(self) -> bool:
        return any(self._h[i][i] > 0 for i in range(self._nvars + 1))

    def to_matrix(self) -> TropMatrix:
        return TropMatrix._trusted(self._h)

    @classmethod
    def from_matrix(cls, H: TropMatrix, var_names: Optional[Sequence[str]] = None) -> 'DiffConstraintSystem':
        size = H.order
        system = cls(size - 1, var_names)
        for i, row in enumerate(H):
            for k, value in enumerate(row):
                system._raise_bound(i, k, value)
        return system.freeze()

    def copy(self) -> 'DiffConstraintSystem':
        duplicate = DiffConstraintSystem(self._nvars, self._names)
        duplicate._h = [list(row) for row in self._h]
        return duplicate

    def satisfies(self, point: Sequence) -> bool:
        """Evaluate every bound at ``point`` in additive form"""
        if len(point) != self._nvars:
            raise DimensionError(f'point has {len(point)} coordinates, system has {self._nvars} variables')
        y = [ext(v) for v in point] + [Fraction(0)]
        for i, row in enumerate(self._h):
            if row[i] > 0:
                return False
            for k, bound in enumerate(row):
                if i != k and not bound + y[k] <= y[i]:
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, DiffConstraintSystem):
            return NotImplemented
        return self._names == other._names and self._h == other._h

    def __repr__(self):
        return f'DiffConstraintSystem(nvars={self._nvars})'

    def describe(self) -> List[str]:
        """Readable bound listing, one line per constrained variable or pair"""
        if self.contradictory:
            return ['0 <= -1']
        lines = []
        for i, name in enumerate(self._names):
            line = _bound_line(name, *self.box(i))
            if line:
                lines.append(line)
        for i in range(self._nvars):
            for k in range(i + 1, self._nvars):
                line = _bound_line(f'{self._names[i]} - {self._names[k]}', *self.diff(i, k))
                if line:
                    lines.append(line)
        return lines

    def to_json(self) -> Dict:
        boxes = []
        for i in range(self._nvars):
            lo, hi = self.box(i)
            boxes.append([format_ext(lo), None if hi is None else format_ext(hi)])
        diffs = []
        for i in range(self._nvars):
            for k in range(i + 1, self._nvars):
                lo, hi = self.diff(i, k)
                if lo is BOTTOM and hi is None:
                    continue
                diffs.append({
                    'i': i + 1, 'k': k + 1,
                    'lo': format_ext(lo), 'hi': None if hi is None else format_ext(hi),
                })
        payload = {'nvars': self._nvars, 'vars': list(self._names), 'box': boxes, 'diff': diffs}
        if self.contradictory:
            payload['contradiction'] = True
        return payload

    @classmethod
    def from_json(cls, payload: Dict) -> 'DiffConstraintSystem':
        try:
            nvars = int(payload['nvars'])
            system = cls(nvars, payload.get('vars'))
            for i, (lo, hi) in enumerate(payload.get('box', [])):
                system.add_box(i, _json_lo(lo), _json_hi(hi))
            for entry in payload.get('diff', []):
                system.add_diff(int(entry['i']) - 1, int(entry['k']) - 1,
                                _json_lo(entry.get('lo')), _json_hi(entry.get('hi')))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, TropicalError):
                raise
            raise DomainError(f'malformed constraint system: {e}') from None
        if payload.get('contradiction'):
            system.add_le(None, None, -1)
        return system.freeze()


def _json_lo(value) -> ExtReal:
    return BOTTOM if value is None else parse_ext(str(value))


def _json_hi(value) -> Optional[Fraction]:
    if value is None:
        return None
    parsed = parse_ext(str(value))
    if parsed is BOTTOM:
        raise DomainError('upper bounds cannot be -inf')
    return parsed


def _bound_line(label: str, lo: ExtReal, hi: Optional[Fraction]) -> Optional[str]:
    if hi is not None and lo == hi:
        return f'{label} = {format_ext(hi)}'
    if lo is BOTTOM and hi is None:
        return None
    if lo is BOTTOM:
        return f'{label} <= {format_ext(hi)}'
    if hi is None:
        return f'{format_ext(lo)} <= {label}'
    return f'{format_ext(lo)} <= {label} <= {format_ext(hi)}'


def closure(H: TropMatrix) -> TropMatrix:
    """Floyd-Warshall max-plus closure H* of a square H.

    Entries are scaled to integers by the common denominator, so the
    triple loop runs on plain ints. Raises InfeasibleError as soon as a
    diagonal entry becomes positive.
    """
    size = H.order
    scale = math.lcm(*(e.denominator for e in H.entries if e is not BOTTOM))
    h = [[None if e is BOTTOM else e.numerator * (scale // e.denominator) for e in row] for row in H]
    if any(h[i][i] is not None and h[i][i] > 0 for i in range(size)):
        raise InfeasibleError('system contains a contradictory bound')
    for k in range(size):
        hk = h[k]
        for i in range(size):
            hik = h[i][k]
            if hik is None:
                continue
            hi = h[i]
            for j in range(size):
                hkj = hk[j]
                if hkj is None:
                    continue
                value = hik + hkj
                current = hi[j]
                if current is None or value > current:
                    hi[j] = value
        for i in range(size):
            if h[i][i] is not None and h[i][i] > 0:
                logger.debug('closure: positive cycle through index %d after pivot %d', i, k)
                raise InfeasibleError(f'bounds force a positive cycle through variable {i + 1}')
    return TropMatrix._trusted(
        tuple(BOTTOM if v is None else Fraction(v, scale) for v in row) for row in h
    )


def tighten(S: DiffConstraintSystem) -> DiffConstraintSystem:
    return DiffConstraintSystem.from_matrix(closure(S.to_matrix()), S.var_names)


def is_tight(S: DiffConstraintSystem) -> bool:
    matrix = S.to_matrix()
    return closure(matrix) == matrix


def is_empty(S: DiffConstraintSystem) -> bool:
    try:
        closure(S.to_matrix())
    except InfeasibleError:
        return True
    return False


def _pin(h: List[List[ExtReal]], i: int, affine: int, value: Fraction):
    """Fix y_i = value in a closed matrix and restore closedness"""
    for u, v, weight in ((i, affine, value), (affine, i, -value)):
        if weight <= h[u][v]:
            continue
        h[u][v] = weight
        size = len(h)
        for a in range(size):
            hau = h[a][u]
            if hau is BOTTOM:
                continue
            for b in range(size):
                hvb = h[v][b]
                if hvb is BOTTOM:
                    continue
                candidate = hau + weight + hvb
                if candidate > h[a][b]:
                    h[a][b] = candidate


def _pick(lo: ExtReal, hi: Optional[Fraction], rng: Optional[random.Random], denominator: int) -> Fraction:
    if rng is None:
        if lo is not BOTTOM:
            return lo
        return hi if hi is not None else Fraction(0)
    step = Fraction(rng.randint(0, denominator), denominator)
    if lo is not BOTTOM and hi is not None:
        return lo + (hi - lo) * step
    if lo is not BOTTOM:
        return lo + step
    if hi is not None:
        return hi - step
    return step - Fraction(1, 2)


def sample_point(S: DiffConstraintSystem, seed=None, denominator: int = 256) -> Optional[Tuple[Fraction, ...]]:
    """A feasible point, or None for an empty system.

    Without a seed every coordinate takes its tight lower bound where one
    exists, which for bounded systems is the last column of H*. With a
    seed the coordinates are drawn one by one inside their current tight
    range.
    """
    try:
        h = closure(S.to_matrix()).to_lists()
    except InfeasibleError:
        return None
    rng = random.Random(seed) if seed is not None else None
    affine = S.nvars
    point = []
    for i in range(affine):
        upper = h[affine][i]
        value = _pick(h[i][affine], None if upper is BOTTOM else -upper, rng, denominator)
        _pin(h, i, affine, value)
        point.append(value)
    return tuple(point)


def compute_underline(A: TropMatrix) -> TropMatrix:
    """Entrywise minimum of A and the row/column difference bounds"""
    n = require_real_normal(A)
    result = A.to_lists()
    for i in range(n):
        for j in range(i + 1, n):
            row_diff = [a - b for a, b in zip(A.row(i), A.row(j))]
            col_diff = [a - b for a, b in zip(A.col(i), A.col(j))]
            result[i][j] = min(A[i, j], min(row_diff), -max(col_diff))
            result[j][i] = min(A[j, i], -max(row_diff), min(col_diff))
    return TropMatrix._trusted(result)


def _relabeling(n: int, relabeling: Optional[Relabeling]) -> Relabeling:
    if relabeling is None:
        return Relabeling.row_major(n)
    if relabeling.n != n:
        raise DimensionError(f'relabeling is for order {relabeling.n}, matrix has order {n}')
    return relabeling


def lower_box(A: TropMatrix, relabeling: Optional[Relabeling] = None) -> DiffConstraintSystem:
    """{X : X <= underline(A)}"""
    n = require_real_normal(A)
    labels = _relabeling(n, relabeling)
    bound = compute_underline(A)
    system = DiffConstraintSystem(len(labels), labels.var_names())
    for k, position in enumerate(labels.positions):
        system.add_box(k, hi=bound[position])
    return system.freeze()


def upper_set_system(A: TropMatrix, relabeling: Optional[Relabeling] = None) -> DiffConstraintSystem:
    """{X normal : A <= underline(X)}"""
    n = require_real_normal(A)
    labels = _relabeling(n, relabeling)
    y = labels.index
    system = DiffConstraintSystem(len(labels), labels.var_names())
    for k, j in offdiag_positions(n):
        value = A[k, j]
        system.add_box(y((k, j)), lo=value)
        for i in range(n):
            if i in (k, j):
                continue
            system.add_diff(y((i, j)), y((i, k)), lo=value)
            system.add_diff(y((k, i)), y((j, i)), lo=value)
    for index in range(len(labels)):
        system.add_box(index, hi=0)
    return system.freeze()


def card_q(S: DiffConstraintSystem) -> int:
    """Number of index pairs i < k <= N with h_ik = h_ki = 0"""
    h = S.to_matrix()
    size = h.order
    return sum(
        1 for i in range(size) for k in range(i + 1, size)
        if h[i, k] == 0 and h[k, i] == 0
    )


def polytope_dim(S: DiffConstraintSystem) -> int:
    """Dimension of a tight system: equality classes of indices, minus one.

    Indices i, k share a class when h_ik + h_ki = 0. When every equality
    has value zero and pairs off at most two indices, as in the Omega_w(A)
    and upper-set systems of small matrices, this equals N - card_q(S);
    counting classes stays right for longer chains of equalities.
    """
    if not is_tight(S):
        raise DomainError('polytope_dim needs a tightened system')
    h = S.to_matrix()
    size = h.order
    parent = list(range(size))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(size):
        for k in range(i + 1, size):
            forward, backward = h[i, k], h[k, i]
            if forward is BOTTOM or backward is BOTTOM:
                continue
            if forward + backward == 0:
                parent[find(i)] = find(k)
    return len({find(a) for a in range(size)}) - 1


@dataclass(frozen=True)
class OverlineReport:
    system: DiffConstraintSystem
    tight: DiffConstraintSystem
    overline: TropMatrix
    dim: int

    def to_dict(self) -> Dict:
        return {
            'h': self.system.to_matrix(),
            'h_star': self.tight.to_matrix(),
            'overline': self.overline,
            'dim': self.dim,
        }


def overline_report(A: TropMatrix, relabeling: Optional[Relabeling] = None) -> OverlineReport:
    n = require_real_normal(A)
    labels = _relabeling(n, relabeling)
    system = upper_set_system(A, labels)
    try:
        tight = tighten(system)
    except InfeasibleError as e:
        raise TropicalError(f'upper set of a real normal matrix came out empty: {e}') from e
    h_star = tight.to_matrix()
    affine = len(labels)
    result = A.to_lists()
    for k, position in enumerate(labels.positions):
        result[position[0]][position[1]] = h_star[k, affine]
    return OverlineReport(system, tight, TropMatrix._trusted(result), polytope_dim(tight))


def compute_overline(A: TropMatrix, relabeling: Optional[Relabeling] = None) -> TropMatrix:
    return overline_report(A, relabeling).overline


def bars_check(A: TropMatrix) -> bool:
    """underline(A) <= A <= overline(A)"""
    return mat_le(compute_underline(A), A) and mat_le(A, compute_overline(A))


def c_polytope(A: TropMatrix) -> DiffConstraintSystem:
    """C_A: a_in <= x_i <= -a_ni and a_ik <= x_i - x_k <= -a_ki"""
    n = require_normal(A)
    return DiffConstraintSystem.from_matrix(A, [f'x_{i + 1}' for i in range(n - 1)])
