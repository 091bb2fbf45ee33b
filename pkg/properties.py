"""Seeded randomized property suites over random normal matrices.

Every suite takes a ``random.Random`` and a trial count and returns the
list of failures; ``run_suite`` wraps one in a status dict. Shards of a
suite draw from independent generators seeded by ``shard_seed``.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List

from commutant import (
    Winner, commutes, neigh_identity_box, neigh_zero_box, omega_w_empty_quick,
    omega_w_system, sample_box,
)
from geomviz import sector_check
from perturb import PerturbationSpec, check_pq_theorem, make_box_pair
from polytope import DiffConstraintSystem, bars_check, is_empty, tighten
from tropcore import (
    BOTTOM, TropMatrix, format_ext, identity, is_idempotent, kleene_star, mat_add, mat_le,
    mat_pow, offdiag_positions, t_add, t_mul, zero,
)
from utils import format_matrix, random_normal, random_rational

logger = logging.getLogger(__name__)

MAX_ORDER = 6
BOX_SAMPLES = 4
POINTS_PER_SYSTEM = 50


@dataclass(frozen=True)
class Suite:
    name: str
    description: str
    run: Callable[[random.Random, int], List[Dict]]


SUITES: Dict[str, Suite] = {}


def suite(name, description):
    def decorator(func):
        SUITES[name] = Suite(name, description, func)
        return func
    return decorator


def _failure(trial, matrix=None, detail=''):
    failure = {'trial': trial, 'detail': detail}
    if matrix is not None:
        failure['matrix'] = format_matrix(matrix)
    return failure


def _order(rng):
    return rng.randint(2, MAX_ORDER)


def random_scalar(rng):
    if rng.random() < 0.2:
        return BOTTOM
    return random_rational(rng, -8, 8, 8)


@suite('semiring', 'max-plus scalar laws')
def semiring_suite(rng, count):
    failures = []
    for trial in range(count):
        a, b, c = (random_scalar(rng) for _ in range(3))
        laws = {
            'add neutral': t_add(BOTTOM, a) == a,
            'mul neutral': t_mul(Fraction(0), a) == a,
            'mul absorbing': t_mul(BOTTOM, a) is BOTTOM,
            'add idempotent': t_add(a, a) == a,
            'add commutes': t_add(a, b) == t_add(b, a),
            'mul commutes': t_mul(a, b) == t_mul(b, a),
            'add associative': t_add(t_add(a, b), c) == t_add(a, t_add(b, c)),
            'mul associative': t_mul(t_mul(a, b), c) == t_mul(a, t_mul(b, c)),
            'distributive': t_mul(a, t_add(b, c)) == t_add(t_mul(a, b), t_mul(a, c)),
        }
        broken = [law for law, holds in laws.items() if not holds]
        if broken:
            values = ', '.join(format_ext(v) for v in (a, b, c))
            failures.append(_failure(trial, detail=f"{', '.join(broken)} at ({values})"))
    return failures


@suite('assoc', '(AB)C = A(BC) and A(B (+) C) = AB (+) AC')
def assoc_suite(rng, count):
    failures = []
    for trial in range(count):
        n = _order(rng)
        A, B, C = (random_normal(rng, n, bottom_rate=0.25) for _ in range(3))
        if (A @ B) @ C != A @ (B @ C):
            failures.append(_failure(trial, A, 'associativity'))
        elif A @ mat_add(B, C) != mat_add(A @ B, A @ C):
            failures.append(_failure(trial, A, 'distributivity'))
    return failures


@suite('monotone', "A <= A' gives AB <= A'B and BA <= BA'")
def monotone_suite(rng, count):
    failures = []
    for trial in range(count):
        n = _order(rng)
        A = random_normal(rng, n, bottom_rate=0.25)
        larger = mat_add(A, random_normal(rng, n, bottom_rate=0.25))
        B = random_normal(rng, n, bottom_rate=0.25)
        if not (mat_le(A @ B, larger @ B) and mat_le(B @ A, B @ larger)):
            failures.append(_failure(trial, A, format_matrix(B)))
    return failures


@suite('star', 'A* A* = A* and (A*)* = A*')
def star_suite(rng, count):
    failures = []
    for trial in range(count):
        A = random_normal(rng, _order(rng), bottom_rate=0.25)
        star = kleene_star(A)
        if star @ star != star or kleene_star(star) != star:
            failures.append(_failure(trial, A))
    return failures


@suite('n2', '2x2 normal matrices commute with AB = BA = A (+) B')
def order_two_suite(rng, count):
    failures = []
    for trial in range(count):
        A, B = (random_normal(rng, 2, bottom_rate=0.25) for _ in range(2))
        if not (A @ B == B @ A == mat_add(A, B)):
            failures.append(_failure(trial, A, format_matrix(B)))
    return failures


@suite('yoeli', 'A^(n-1) = A^n')
def yoeli_suite(rng, count):
    failures = []
    for trial in range(count):
        n = _order(rng)
        A = random_normal(rng, n)
        if mat_pow(A, n - 1) != mat_pow(A, n):
            failures.append(_failure(trial, A))
    return failures


@suite('chain', 'I <= A <= A^2 <= ... <= A^(n-1) <= 0')
def chain_suite(rng, count):
    failures = []
    for trial in range(count):
        n = _order(rng)
        A = random_normal(rng, n)
        chain = [identity(n)] + [mat_pow(A, k) for k in range(1, n)] + [zero(n)]
        for k, (low, high) in enumerate(zip(chain, chain[1:])):
            if not mat_le(low, high):
                failures.append(_failure(trial, A, f'link {k}'))
                break
    return failures


@suite('bars', 'underline(A) <= A <= overline(A)')
def bars_suite(rng, count):
    failures = []
    for trial in range(count):
        A = random_normal(rng, _order(rng))
        if not bars_check(A):
            failures.append(_failure(trial, A))
    return failures


@suite('neighI', 'I <= X <= K(m(A)) gives AX = XA = A')
def neigh_identity_suite(rng, count):
    failures = []
    for trial in range(count):
        A = random_normal(rng, _order(rng))
        lower, upper = neigh_identity_box(A)
        for X in sample_box(lower, upper, rng, BOX_SAMPLES):
            if not (A @ X == X @ A == A):
                failures.append(_failure(trial, A, format_matrix(X)))
                break
    return failures


@suite('neigh0', 'K(M(A)) <= X <= 0 gives AX = XA = X for strictly normal A')
def neigh_zero_suite(rng, count):
    failures = []
    for trial in range(count):
        A = random_normal(rng, _order(rng), strict=True)
        lower, upper = neigh_zero_box(A)
        for X in sample_box(lower, upper, rng, BOX_SAMPLES):
            if not (A @ X == X @ A == X):
                failures.append(_failure(trial, A, format_matrix(X)))
                break
    return failures


@suite('box_pair', 'entries in [2r, r] give A = A^2 and AB = BA = A (+) B')
def box_pair_suite(rng, count):
    failures = []
    for trial in range(count):
        n = _order(rng)
        r = -random_rational(rng, Fraction(1, 4), 4, 16)
        A, B = make_box_pair(r, n, seed=rng, denominator=16)
        if not is_idempotent(A):
            failures.append(_failure(trial, A, 'not idempotent'))
        elif not (A @ B == B @ A == mat_add(A, B)):
            failures.append(_failure(trial, A, format_matrix(B)))
    return failures


@suite('sector', 'columns of A0 lie in their sectors')
def sector_suite(rng, count):
    failures = []
    for trial in range(count):
        A = random_normal(rng, 3)
        if not sector_check(A):
            failures.append(_failure(trial, A))
    return failures


def random_spec(rng, n):
    p = [random_rational(rng, Fraction(1, 4), 8, 4) for _ in range(n)]
    delta = random_rational(rng, 0, min(p), 4)
    eps = random_rational(rng, 0, min(p) - delta, 4)
    return PerturbationSpec(tuple(p), eps=eps, delta=delta)


@suite('pq', 'P and Q band products for delta + eps <= min p')
def pq_suite(rng, count):
    failures = []
    for trial in range(count):
        spec = random_spec(rng, rng.randint(3, 7))
        report = check_pq_theorem(spec)
        if report.status != 'success':
            failures.append(_failure(trial, detail=str(report.to_dict()['clauses'])))
    return failures


def random_system(rng):
    nvars = rng.randint(2, 5)
    system = DiffConstraintSystem(nvars)
    for _ in range(2 * nvars):
        i = rng.randrange(nvars)
        k = rng.choice([None] + [v for v in range(nvars) if v != i])
        lo = random_rational(rng, -4, 2, 4)
        hi = lo + random_rational(rng, 0, 4, 4) if rng.random() < 0.7 else None
        system.add_diff(i, k, lo, hi)
    return system.freeze()


@suite('tighten', 'S and tighten(S) have the same points, tighten is idempotent')
def tighten_suite(rng, count):
    failures = []
    for trial in range(count):
        system = random_system(rng)
        points = [
            tuple(random_rational(rng, -6, 6, 4) for _ in range(system.nvars))
            for _ in range(POINTS_PER_SYSTEM)
        ]
        if is_empty(system):
            if any(system.satisfies(point) for point in points):
                failures.append(_failure(trial, detail='empty system has a point'))
            continue
        tight = tighten(system)
        if tighten(tight) != tight:
            failures.append(_failure(trial, detail='tighten not idempotent'))
        elif any(system.satisfies(point) != tight.satisfies(point) for point in points):
            failures.append(_failure(trial, detail='membership differs'))
    return failures


@suite('empty_quick', 'the quick emptiness test implies infeasibility')
def empty_quick_suite(rng, count):
    failures = []
    for trial in range(count):
        n = rng.randint(3, 4)
        A = random_normal(rng, n)
        # half of the winners get a swapped pair planted
        entries = {p: (rng.randrange(n), rng.randrange(n)) for p in offdiag_positions(n)}
        if rng.random() < 0.5:
            (i, j), (s, t) = rng.sample(offdiag_positions(n), 2)
            entries[(i, j)], entries[(s, t)] = (s, t), (i, j)
        w = Winner.from_mapping(n, entries)
        if omega_w_empty_quick(A, w) and not is_empty(omega_w_system(A, w)):
            failures.append(_failure(trial, A, str(w.to_json())))
    return failures


def shard_seed(seed, name, shard):
    return f'{seed}:{name}:{shard}'


def run_suite(name, seed, count, shard=0) -> Dict:
    """Run ``count`` trials of one suite; never raises"""
    if name not in SUITES:
        return {'status': 'error', 'suite': name, 'message': f'unknown suite {name!r}'}
    rng = random.Random(shard_seed(seed, name, shard))
    try:
        failures = SUITES[name].run(rng, count)
    except Exception as e:
        logger.exception('suite %s raised', name)
        return {'status': 'error', 'suite': name, 'message': f'{type(e).__name__}: {e}'}
    if failures:
        logger.warning('suite %s: %d of %d trials failed', name, len(failures), count)
    return {
        'status': 'failure' if failures else 'success',
        'suite': name,
        'shard': shard,
        'trials': count,
        'failures': failures,
    }


def merge_suite_results(results: List[Dict]) -> Dict:
    """Combine shard results of one suite, ordered by shard"""
    results = sorted(results, key=lambda r: r.get('shard', 0))
    errors = [r for r in results if r['status'] == 'error']
    if errors:
        return dict(errors[0])
    failures = [f for r in results for f in r['failures']]
    return {
        'status': 'failure' if failures else 'success',
        'suite': results[0]['suite'],
        'trials': sum(r['trials'] for r in results),
        'failures': failures,
    }
