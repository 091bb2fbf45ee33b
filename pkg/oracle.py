"""Exhaustive desk-scale oracle over a finite grid of candidate matrices."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from commutant import CapExceededError, commutes, omega_w_system
from config import Config
from polytope import compute_overline, compute_underline
from tropcore import (
    DomainError, TropMatrix, const_matrix, ext, format_ext, is_strictly_normal,
    mat_le, max_offdiag, min_offdiag, offdiag_positions, require_real_normal,
)
from utils import format_matrix, parse_matrix

logger = logging.getLogger(__name__)

CHECKS = (
    'omega_A_below_underline',
    'omega_prime_above_overline',
    'own_witness_system',
    'witness_union',
    'identity_box_in_omega_A',
    'zero_box_in_omega_prime',
)


def grid_size(n: int, alphabet: Sequence) -> int:
    return len(alphabet) ** (n * n - n)


def candidate(n: int, alphabet: Sequence, index: int) -> TropMatrix:
    """Grid member number ``index``; the last off-diagonal position varies fastest"""
    rows = [[0] * n for _ in range(n)]
    base = len(alphabet)
    for i, j in reversed(offdiag_positions(n)):
        index, digit = divmod(index, base)
        rows[i][j] = alphabet[digit]
    return TropMatrix(rows)


@dataclass
class GridOracleReport:
    matrix: TropMatrix
    alphabet: Tuple
    total: int
    start: int
    stop: int
    commuting: int = 0
    omega_A: int = 0
    omega_prime: int = 0
    validated: Dict[str, int] = field(default_factory=lambda: {name: 0 for name in CHECKS})
    violations: List[Dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict:
        return {
            'matrix': format_matrix(self.matrix),
            'alphabet': [format_ext(a) for a in self.alphabet],
            'total': self.total,
            'start': self.start,
            'stop': self.stop,
            'commuting': self.commuting,
            'omega_A': self.omega_A,
            'omega_prime': self.omega_prime,
            'validated': dict(self.validated),
            'violations': list(self.violations),
        }

    @classmethod
    def from_dict(cls, payload: Dict) -> 'GridOracleReport':
        return cls(
            matrix=parse_matrix(payload['matrix']),
            alphabet=tuple(ext(a) for a in payload['alphabet']),
            total=payload['total'],
            start=payload['start'],
            stop=payload['stop'],
            commuting=payload['commuting'],
            omega_A=payload['omega_A'],
            omega_prime=payload['omega_prime'],
            validated=dict(payload['validated']),
            violations=list(payload['violations']),
        )


def _violation(check: str, index: int, X: TropMatrix, detail: str = '') -> Dict:
    logger.warning('grid oracle: %s violated by candidate %d', check, index)
    return {'check': check, 'index': index, 'witness': format_matrix(X), 'detail': detail}


def run_grid_oracle(A: TropMatrix, alphabet: Sequence = None, cap: int = None,
                    start: int = 0, stop: Optional[int] = None,
                    check_union: bool = True) -> GridOracleReport:
    """Classify every grid candidate in [start, stop) and check the inclusions.

    The union check tests every non-commuting candidate against the
    witness systems collected from the commuting ones in the same range,
    so it is exhaustive only for unsharded runs.
    """
    n = require_real_normal(A)
    alphabet = tuple(ext(a) for a in (alphabet or Config.GRID_ALPHABET.split(',')))
    if 0 not in alphabet or any(a > 0 for a in alphabet):
        raise DomainError('grid alphabet must contain 0 and only values <= 0')
    cap = Config.GRID_CAP if cap is None else cap
    total = grid_size(n, alphabet)
    if total > cap:
        raise CapExceededError(f'{total} grid candidates exceed the cap {cap}')
    stop = total if stop is None else min(stop, total)
    report = GridOracleReport(A, alphabet, total, start, stop)

    underline = compute_underline(A)
    overline = compute_overline(A)
    identity_upper = const_matrix(min_offdiag(A), n)
    zero_lower = const_matrix(max_offdiag(A), n) if is_strictly_normal(A) else None

    systems = {}
    outsiders = []
    for index in range(start, stop):
        X = candidate(n, alphabet, index)
        result = commutes(A, X)
        if mat_le(X, identity_upper):
            if result.in_omega_A:
                report.validated['identity_box_in_omega_A'] += 1
            else:
                report.violations.append(_violation('identity_box_in_omega_A', index, X))
        if zero_lower is not None and mat_le(zero_lower, X):
            if result.in_omega_prime:
                report.validated['zero_box_in_omega_prime'] += 1
            else:
                report.violations.append(_violation('zero_box_in_omega_prime', index, X))
        if not result.commutes:
            outsiders.append((index, X))
            continue
        report.commuting += 1
        if result.in_omega_A:
            report.omega_A += 1
            if mat_le(X, underline):
                report.validated['omega_A_below_underline'] += 1
            else:
                report.violations.append(_violation('omega_A_below_underline', index, X))
        if result.in_omega_prime:
            report.omega_prime += 1
            if mat_le(overline, X):
                report.validated['omega_prime_above_overline'] += 1
            else:
                report.violations.append(_violation('omega_prime_above_overline', index, X))
        w = result.witnesses.first()
        if w not in systems:
            systems[w] = omega_w_system(A, w)
        point = [X[p] for p in offdiag_positions(n)]
        if systems[w].satisfies(point):
            report.validated['own_witness_system'] += 1
        else:
            report.violations.append(_violation('own_witness_system', index, X, str(w.to_json())))

    if check_union:
        for index, X in outsiders:
            point = [X[p] for p in offdiag_positions(n)]
            if any(system.satisfies(point) for system in systems.values()):
                report.violations.append(_violation('witness_union', index, X))
            else:
                report.validated['witness_union'] += 1
    logger.info('grid oracle [%d, %d): %d commuting, %d violations',
                start, stop, report.commuting, len(report.violations))
    return report


def shard_ranges(total: int, shards: int = None) -> List[Tuple[int, int]]:
    shards = max(1, shards or Config.ORACLE_SHARDS)
    step = -(-total // shards)
    return [(lo, min(lo + step, total)) for lo in range(0, total, step)]


def merge_reports(parts: Sequence[GridOracleReport]) -> GridOracleReport:
    """Merge shard reports in candidate order"""
    if not parts:
        raise DomainError('nothing to merge')
    ordered = sorted(parts, key=lambda part: part.start)
    first = ordered[0]
    merged = GridOracleReport(first.matrix, first.alphabet, first.total, first.start, ordered[-1].stop)
    for part in ordered:
        merged.commuting += part.commuting
        merged.omega_A += part.omega_A
        merged.omega_prime += part.omega_prime
        for name, count in part.validated.items():
            merged.validated[name] = merged.validated.get(name, 0) + count
        merged.violations.extend(part.violations)
    merged.violations.sort(key=lambda v: (v['index'], v['check']))
    return merged
