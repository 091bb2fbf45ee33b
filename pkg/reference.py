"""Worked example matrices and the golden checks that reproduce them."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List

from commutant import (
    Winner, between_powers_check, commutes, find_unit_commuter, identity_winner,
    max_product_criterion, neigh_identity_box, omega_w_dim_bound, omega_w_empty_quick,
    omega_w_system, transposition_winner, witness_winners,
)
from geomviz import (
    first_missing_column, section_complex, sector_check, span_contains,
    span_intersection_check,
)
from perturb import (
    PerturbationSpec, check_pq_theorem, make_P, make_Q, non_idempotent_join_check,
    same_size,
)
from polytope import (
    bars_check, card_q, compute_overline, compute_underline, is_empty,
    polytope_dim, tighten, upper_set_system,
)
from tropcore import (
    BOTTOM, TropMatrix, identity, is_idempotent, kleene_star, mat_add, mat_le, mat_pow,
    max_offdiag, min_offdiag, normalize_A0, offdiag_positions, t_add, t_mul,
    unit_perturbation, zero,
)

logger = logging.getLogger(__name__)


def matrix(text):
    """Rows separated by ';', entries by whitespace"""
    return TropMatrix([row.split() for row in text.split(';')])


def winner(n, entries):
    """Winner from 1-based {(i, j): (w1, w2)}"""
    return Winner.from_mapping(n, {
        (i - 1, j - 1): (w1 - 1, w2 - 1) for (i, j), (w1, w2) in entries.items()
    })


# 4x4 commuting pair
PAIR_A = matrix('0 -4 -6 -3; -6 0 -4 -3; -3 -6 0 -3; -6 -3 -3 0')
PAIR_B = matrix('0 -4 -4 -6; -2 0 -3 -4; -5 -6 0 -5; -6 -5 -2 0')
PAIR_AB = matrix('0 -4 -4 -3; -2 0 -3 -3; -3 -6 0 -3; -5 -3 -2 0')
PAIR_W = winner(4, {
    (1, 2): (1, 1), (1, 3): (1, 3), (1, 4): (4, 1),
    (2, 1): (2, 1), (2, 3): (2, 3), (2, 4): (4, 2),
    (3, 1): (1, 3), (3, 2): (2, 2), (3, 4): (4, 3),
    (4, 1): (2, 3), (4, 2): (2, 4), (4, 3): (4, 3),
})
PAIR_SWAP = identity_winner(4).replace((0, 2), (1, 3)).replace((1, 3), (0, 2))

# 3x3 matrix with its bounding matrices
B3 = matrix('0 -3 -1; -4 0 -6; -5 0 0')
B3_UNDERLINE = matrix('0 -3 -3; -5 0 -6; -5 -2 0')
B3_OVERLINE = matrix('0 -1 -1; -4 0 -5; -4 0 0')
B3_ZERO = matrix('5 -3 -1; 1 0 -6; 0 0 0')
B3_UNDERLINE_ZERO = matrix('5 -1 -3; 0 2 -6; 0 0 0')
B3_OVERLINE_ZERO = matrix('4 -1 -1; 0 0 -5; 0 0 0')

H_SEVEN = matrix(
    '0 0 -inf -inf -inf -1 -3;'
    '-6 0 -inf -3 -inf -inf -1;'
    '-inf -inf 0 -5 -6 -inf -4;'
    '-inf -4 -1 0 -inf -inf -6;'
    '-inf -inf 0 -inf 0 -4 -5;'
    '-5 -inf -inf -inf -3 0 0;'
    '0 0 0 0 0 0 0'
)
H_SEVEN_STAR = matrix(
    '0 0 -1 -1 -1 -1 -1;'
    '-1 0 -1 -1 -1 -1 -1;'
    '-4 -4 0 -4 -4 -4 -4;'
    '-5 -4 -1 0 -5 -5 -5;'
    '-4 -4 0 -4 0 -4 -4;'
    '0 0 0 0 0 0 0;'
    '0 0 0 0 0 0 0'
)

# X between the bounds that does not commute, and X in [B*, 0] that does not
COUNTER1_X = matrix('0 -2 -2; -4 0 -5; -4 0 0')
COUNTER1_XB = matrix('0 -2 -1; -4 0 -5; -4 0 0')
COUNTER2_X = matrix('0 -1 -1; 0 0 -1; -1 0 0')
COUNTER2_BX = matrix('0 -1 -1; 0 0 -1; 0 0 0')

# A <= B without span containment
SKEW_A = matrix('0 -1 -3; 0 0 -4; 0 0 0')
SKEW_B = matrix('0 -1 -2; 0 0 -4; 0 0 0')
SKEW_AB = matrix('0 -1 -2; 0 0 -2; 0 0 0')
SKEW_BA = matrix('0 -1 -2; 0 0 -3; 0 0 0')

# band perturbations with p = (4, 3, 5)
BAND_P = (4, 3, 5)
BAND_A = matrix('0 -2 -5; -4 0 -2; -2 -3 0')
BAND_B = matrix('0 -1 -5; -4 0 -1; -1 -3 0')
BAND_C = matrix('0 -1 -3; -3 0 -1; -1 -3 0')
BAND_A0 = matrix('2 1 -5; -2 3 -2; 0 0 0')
BAND_P0_ZERO = matrix('0 3 -5; -4 3 0; 0 0 0')
BAND_B0 = matrix('1 2 -5; -3 3 -1; 0 0 0')
BAND_C0 = matrix('1 2 -3; -2 3 -1; 0 0 0')


class GoldenCheckFailed(AssertionError):
    pass


def expect(condition, message):
    if not condition:
        raise GoldenCheckFailed(message)


@dataclass(frozen=True)
class GoldenCheck:
    name: str
    run: Callable[[], None]


_registry: List[GoldenCheck] = []


def golden(name):
    def decorator(func):
        _registry.append(GoldenCheck(name, func))
        return func
    return decorator


@golden('scalar sum and product')
def _scalars():
    expect(t_add(3, -7) == 3 and t_mul(3, -7) == -4, '3 (+) -7 and 3 (x) -7')
    expect(t_mul(BOTTOM, 5) is BOTTOM and t_add(BOTTOM, -2) == -2, '-inf is neutral and absorbing')


@golden('4x4 pair commutes with the reference product')
def _pair_product():
    report = commutes(PAIR_A, PAIR_B)
    expect(report.commutes and report.product == PAIR_AB, 'AB = BA = reference product')
    expect(PAIR_A @ PAIR_B == PAIR_B @ PAIR_A == PAIR_AB, 'both orders')


@golden('4x4 winner is a witness with dimension bound 9')
def _pair_winner():
    expect(witness_winners(PAIR_A, PAIR_B).contains(PAIR_W), 'reference winner among witnesses')
    expect(omega_w_dim_bound(PAIR_A, PAIR_W) == 9, 'dimension bound 16 - 4 - 3')
    expect(not omega_w_empty_quick(PAIR_A, PAIR_W), 'no swapped pair')


@golden('4x4 winner system fixes x12, x32 and ties x21 to x43')
def _pair_system():
    system = omega_w_system(PAIR_A, PAIR_W)
    point = [PAIR_B[p] for p in offdiag_positions(4)]
    expect(system.satisfies(point), 'B satisfies its own system')
    tight = tighten(system)
    positions = offdiag_positions(4)
    x12, x32 = positions.index((0, 1)), positions.index((2, 1))
    x21, x43 = positions.index((1, 0)), positions.index((3, 2))
    expect(tight.box(x12) == (-4, -4), 'x12 = -4')
    expect(tight.box(x32) == (-6, -6), 'x32 = -6')
    expect(tight.diff(x21, x43) == (0, 0), 'x21 = x43')


@golden('swapped winner gives an empty piece')
def _swapped_winner():
    expect(omega_w_empty_quick(PAIR_A, PAIR_SWAP), 'parallel hyperplanes detected')
    expect(is_empty(omega_w_system(PAIR_A, PAIR_SWAP)), 'closure finds the system infeasible')


@golden('identity and transposition winners')
def _witness_winners():
    for A in (PAIR_A, B3):
        n = A.rows
        expect(witness_winners(A, identity(n)).contains(transposition_winner(n)), 'I in Omega_tr(A)')
        expect(witness_winners(A, zero(n)).contains(identity_winner(n)), '0 in Omega_id(A)')
        expect(witness_winners(A, kleene_star(A)).contains(identity_winner(n)), 'A* in Omega_id(A)')


@golden('powers of A commute into the next power')
def _powers():
    for A in (PAIR_A, B3):
        n = A.rows
        expect(commutes(A, identity(n)).in_omega_A, 'AI = IA = A')
        expect(commutes(A, kleene_star(A)).in_omega_prime, 'A A* = A* A = A*')
        expect(commutes(A, zero(n)).in_omega_prime, 'A0 = 0A = 0')
        for j in range(1, n + 1):
            report = commutes(A, mat_pow(A, j - 1))
            expect(report.product == mat_pow(A, j), f'A^{j - 1} has product A^{j}')
        expect(between_powers_check(A, mat_pow(A, n - 2)), 'A^(n-2) lies between the powers')


@golden('3x3 products differ in entry (2,3)')
def _skew_pair():
    expect(SKEW_A @ SKEW_B == SKEW_AB and SKEW_B @ SKEW_A == SKEW_BA, 'reference products')
    expect(SKEW_AB[1, 2] == -2 and SKEW_BA[1, 2] == -3, 'entry (2,3)')
    expect(not commutes(SKEW_A, SKEW_B).commutes, 'pair does not commute')
    expect(first_missing_column(SKEW_A, SKEW_B) == 2, 'third column of B lies outside span(A)')


@golden('Kleene star equals overline')
def _kleene():
    expect(kleene_star(B3) == B3_OVERLINE, 'B* = reference overline')
    expect(compute_overline(B3) == B3_OVERLINE, 'overline(B) = reference')


@golden('normalized generator matrices')
def _zeros():
    expect(normalize_A0(B3) == B3_ZERO, 'B0')
    expect(normalize_A0(B3_UNDERLINE) == B3_UNDERLINE_ZERO, 'underline(B)0')
    expect(normalize_A0(B3_OVERLINE) == B3_OVERLINE_ZERO, 'overline(B)0')
    expect(normalize_A0(BAND_A) == BAND_A0, 'A0')
    expect(normalize_A0(make_P(BAND_P, 0)) == BAND_P0_ZERO, 'P(-p,0)0')
    expect(normalize_A0(BAND_B) == BAND_B0, 'B0')
    expect(normalize_A0(BAND_C) == BAND_C0, 'C0')


@golden('underline of the 3x3 and 4x4 matrices')
def _underline():
    expect(compute_underline(B3) == B3_UNDERLINE, 'underline(B) = reference')
    expect(compute_underline(PAIR_A) == PAIR_A, 'underline(A) = A')


@golden('upper set system and its tight form')
def _upper_set():
    system = upper_set_system(B3)
    expect(system.to_matrix() == H_SEVEN, 'H = reference system')
    expect(mat_pow(H_SEVEN, 3) == mat_pow(H_SEVEN, 4) == H_SEVEN_STAR, 'H^3 = H^4 = H*')
    tight = tighten(system)
    expect(tight.to_matrix() == H_SEVEN_STAR, 'closure gives H*')
    expect(polytope_dim(tight) == 5 and card_q(tight) == 1, 'dimension 5')


@golden('bounding matrices sandwich B and nest the spans')
def _bars():
    expect(bars_check(B3), 'underline(B) <= B <= overline(B)')
    expect(span_contains(B3_UNDERLINE, B3) and span_contains(B3, B3_OVERLINE), 'span nesting')
    expect(is_idempotent(B3_UNDERLINE), 'underline(B) is idempotent')


@golden('counterexamples between the bounds')
def _counterexamples():
    expect(B3 @ COUNTER1_X == B3_OVERLINE and COUNTER1_X @ B3 == COUNTER1_XB, 'BX = overline(B) != XB')
    expect(mat_le(B3_UNDERLINE, COUNTER1_X) and mat_le(COUNTER1_X, B3_OVERLINE), 'X between the bounds')
    expect(COUNTER2_X @ B3 == COUNTER2_X and B3 @ COUNTER2_X == COUNTER2_BX, 'XB = X != BX')
    expect(mat_le(B3_OVERLINE, COUNTER2_X) and mat_le(COUNTER2_X, zero(3)), 'B* <= X <= 0')


@golden('cyclic band perturbations with p = (4,3,5)')
def _band_products():
    expect(make_P(BAND_P, 2) == BAND_A and make_P(BAND_P, 1) == BAND_B, 'P(-p,-2) and P(-p,-1)')
    expect(BAND_A @ BAND_B == BAND_B @ BAND_A == BAND_C == make_P((3, 3, 3), 1), 'product P(-(3,3,3),-1)')
    expect(check_pq_theorem(PerturbationSpec(BAND_P, eps=1, delta=2)).status == 'success', 'theorem check')
    expect(make_P((4, 3, 5, 2), 0) == make_Q((4, 3, 5, 2), 0), 'P(-p,0) = Q(-p,0)')


@golden('size comparison')
def _size():
    expect(same_size(2, 4) and not same_size(1, 3), 'b <= 2a')


@golden('join of the 4x4 pair is not idempotent')
def _join():
    report = non_idempotent_join_check(PAIR_A, PAIR_B)
    expect(report['factors_idempotent'] and report['product_idempotent'], 'A, B and AB idempotent')
    expect(not report['join_idempotent'] and report['products_equal_join_squared'], 'M^2 = AB = BA != M')
    expect(report['differences'] == [[4, 1]], 'AB and M differ only at (4,1)')
    expect(not max_product_criterion(PAIR_A, PAIR_B), 'criterion fails')


@golden('unit perturbations commute')
def _unit():
    i, j, eps = find_unit_commuter(B3)
    expect((i, j) == (2, 1), 'zero entry b32 is used')
    E = unit_perturbation(3, i, j, -eps)
    expect(B3 @ E == E @ B3 == zero(3), 'both products are 0')
    A = PAIR_A
    i, j, eps = find_unit_commuter(A)
    E = unit_perturbation(4, i, j, -eps)
    expect(A @ E == E @ A == E, 'strictly normal case gives E')


@golden('extreme entries and the identity box')
def _extremes():
    expect(min_offdiag(PAIR_A) == -6 and max_offdiag(PAIR_A) == -3, 'm(A), M(A)')
    expect(min_offdiag(B3) == -6 and max_offdiag(B3) == 0, 'm(B), M(B)')
    lower, upper = neigh_identity_box(PAIR_A)
    expect(lower == identity(4) and upper == matrix('0 -6 -6 -6; -6 0 -6 -6; -6 -6 0 -6; -6 -6 -6 0'), 'K(-6)')


@golden('2x2 normal matrices commute with product the join')
def _order_two():
    for a, b in ((-1, -3), (0, -2), (-5, 0)):
        A = matrix(f'0 {a}; {b} 0')
        B = matrix(f'0 {b}; -1 0')
        expect(A @ B == B @ A == mat_add(A, B), '2x2 pair')


@golden('section of span(B)')
def _section():
    section = section_complex(B3)
    expect(section.generators == ((5, 1), (-3, 0), (-1, -6)), 'generators from B0')
    expect(len(section.two_cells()) == 1 and len(section.one_cells()) == 3, 'one 2-cell and three antennas')
    expect(section.is_connected(), 'connected')
    soma = section_complex(B3_OVERLINE)
    expect(soma.generators == ((4, 0), (-1, 0), (-1, -5)), 'overline generators')
    expect(section.soma() >= set(soma.generators), 'soma corners are the overline generators')
    expect(sector_check(B3), 'sectors')
    expect(section_complex(BAND_C).generators == ((1, -2), (2, 3), (-3, -1)), 'C0 generators')
    expect(span_intersection_check(BAND_A, BAND_B), 'span(AB) inside both spans')


def golden_checks() -> List[GoldenCheck]:
    return list(_registry)


def run_golden_checks() -> List[Dict]:
    """Run every check; each result is a status dict"""
    results = []
    for check in _registry:
        try:
            check.run()
            results.append({'name': check.name, 'status': 'success'})
        except GoldenCheckFailed as e:
            logger.warning('golden check %r failed: %s', check.name, e)
            results.append({'name': check.name, 'status': 'failure', 'message': str(e)})
        except Exception as e:
            logger.exception('golden check %r raised', check.name)
            results.append({'name': check.name, 'status': 'error', 'message': f'{type(e).__name__}: {e}'})
    return results
