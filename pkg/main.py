import json
import random
import logging
import sys

import click
from celery import group
from colorama import Fore, Style

from cache import invalidate_cache_pattern
from commutant import (
    Winner, commutes, neigh_identity_box, neigh_zero_box, omega_w_dim_bound,
    omega_w_empty_quick, omega_w_system, sample_box,
)
from config import Config
from geomviz import first_missing_column, render_svg, render_svg_text, section_complex, span_member
from oracle import grid_size, shard_ranges
from perturb import (
    PerturbationSpec, check_pq_theorem, make_box_pair, make_P, make_Q,
)
from polytope import (
    DiffConstraintSystem, compute_underline, is_empty, overline_report,
    sample_point, tighten,
)
from properties import SUITES, merge_suite_results, run_suite
from reference import run_golden_checks
from tasks import grid_shard, merge_grid_reports, run_grid_shard_task, run_property_shard_task
from tropcore import (
    TropMatrix, TropicalError, format_ext, is_strictly_normal, kleene_star, mat_pow, parse_ext,
)
from utils import format_matrix, parse_alphabet, parse_vector, read_matrix, to_json

logger = logging.getLogger('tropcomm')

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def status(marker, message, color=''):
    click.echo(f"{color}{marker} {message}{Style.RESET_ALL if color else ''}", err=True)


class TropcommGroup(click.Group):
    """Maps typed library errors on user input to exit code 2"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except TropicalError as e:
            status('❌', str(e), Fore.RED)
            ctx.exit(EXIT_USAGE)
        except (OSError, json.JSONDecodeError) as e:
            status('❌', f'cannot read input: {e}', Fore.RED)
            ctx.exit(EXIT_USAGE)


def _text(payload, indent=''):
    if isinstance(payload, TropMatrix):
        return ''.join(f'{indent}{line}\n' for line in format_matrix(payload).splitlines())
    if isinstance(payload, dict):
        out = []
        for key in sorted(payload):
            value = payload[key]
            if isinstance(value, (TropMatrix, dict)):
                out.append(f'{indent}{key}:\n{_text(value, indent + "  ")}')
            elif isinstance(value, list) and value and isinstance(value[0], (dict, TropMatrix)):
                out.append(f'{indent}{key}:\n' + ''.join(_text(item, indent + '  ') for item in value))
            else:
                out.append(f'{indent}{key}: {value if isinstance(value, str) else json.dumps(json.loads(to_json(value)))}\n')
        return ''.join(out)
    if isinstance(payload, list):
        return ''.join(_text(item, indent) for item in payload)
    return f'{indent}{payload}\n'


def emit(ctx, payload, text=None):
    """Machine output to stdout or --out"""
    options = ctx.find_root().obj
    if options['format'] == 'json':
        output = to_json(payload)
    else:
        output = text if text is not None else _text(payload)
    if options['out']:
        with open(options['out'], 'w', encoding='utf-8') as handle:
            handle.write(output)
        status('📊', f"Report written to {options['out']}", Fore.GREEN)
    else:
        click.echo(output, nl=False)


def _seed(ctx):
    return ctx.find_root().obj['seed']


matrix_arg = click.argument('matrix', type=click.Path(dir_okay=False))


@click.group(cls=TropcommGroup)
@click.option('--seed', type=int, default=None, help='Seed of every sampling command (default: TROPCOMM_SEED).')
@click.option('--format', 'fmt', type=click.Choice(['json', 'text']), default='json', show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Write the report here instead of stdout.')
@click.option('--verbose', is_flag=True, help='Debug logging.')
@click.pass_context
def cli(ctx, seed, fmt, out, verbose):
    """Exact max-plus algebra of commuting normal matrices."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )
    ctx.obj = {'seed': Config.SEED if seed is None else seed, 'format': fmt, 'out': out}


@cli.command('check-commute')
@matrix_arg
@click.argument('other', type=click.Path(dir_okay=False))
@click.pass_context
def check_commute(ctx, matrix, other):
    """Decide AX = XA and classify X."""
    report = commutes(read_matrix(matrix), read_matrix(other))
    if report.commutes:
        status('✅', 'Matrices commute', Fore.GREEN)
    else:
        status('⚠️ ', 'Matrices do not commute', Fore.YELLOW)
    emit(ctx, report.to_dict())


@cli.command()
@matrix_arg
@click.pass_context
def kleene(ctx, matrix):
    """Kleene star A* of a normal matrix."""
    star = kleene_star(read_matrix(matrix))
    emit(ctx, star, format_matrix(star))


@cli.command('pow')
@matrix_arg
@click.option('-k', '--power', type=click.IntRange(min=0), required=True)
@click.pass_context
def power(ctx, matrix, power):
    """Tropical power A^k."""
    result = mat_pow(read_matrix(matrix), power)
    emit(ctx, result, format_matrix(result))


@cli.command()
@matrix_arg
@click.pass_context
def underline(ctx, matrix):
    """Greatest matrix whose lower box lies in Omega^A(A)."""
    result = compute_underline(read_matrix(matrix))
    emit(ctx, result, format_matrix(result))


@cli.command()
@matrix_arg
@click.option('--dump-h', is_flag=True, help='Include the system matrix H.')
@click.option('--dump-hstar', is_flag=True, help='Include its closure H*.')
@click.pass_context
def overline(ctx, matrix, dump_h, dump_hstar):
    """Least matrix of the upper set, by tightening."""
    report = overline_report(read_matrix(matrix))
    if not (dump_h or dump_hstar):
        emit(ctx, report.overline, format_matrix(report.overline))
        return
    payload = report.to_dict()
    if not dump_h:
        payload.pop('h')
    if not dump_hstar:
        payload.pop('h_star')
    emit(ctx, payload)


@cli.command()
@matrix_arg
@click.pass_context
def dim(ctx, matrix):
    """Dimension of the tightened upper set system."""
    report = overline_report(read_matrix(matrix))
    emit(ctx, {'dim': report.dim}, f'{report.dim}\n')


@cli.command('omega-w')
@matrix_arg
@click.option('--winner', 'winner_path', type=click.Path(dir_okay=False), required=True)
@click.option('--tight', is_flag=True, help='Dump the tightened system.')
@click.pass_context
def omega_w(ctx, matrix, winner_path, tight):
    """Constraint system of Omega_w(A)."""
    A = read_matrix(matrix)
    with open(winner_path, encoding='utf-8') as handle:
        w = Winner.from_json(json.load(handle))
    system = omega_w_system(A, w)
    empty = omega_w_empty_quick(A, w) or is_empty(system)
    if tight and not empty:
        system = tighten(system)
    if empty:
        status('⚠️ ', 'Omega_w(A) is empty', Fore.YELLOW)
    payload = {
        'system': system.to_json(),
        'empty': empty,
        'dim_bound': omega_w_dim_bound(A, w),
    }
    emit(ctx, payload, '\n'.join(system.describe()) + '\n')


@cli.command()
@click.argument('system_path', type=click.Path(dir_okay=False))
@click.pass_context
def feasible(ctx, system_path):
    """Feasibility of a constraint system, with a sample point."""
    with open(system_path, encoding='utf-8') as handle:
        system = DiffConstraintSystem.from_json(json.load(handle))
    point = sample_point(system)
    if point is None:
        status('⚠️ ', 'System is infeasible', Fore.YELLOW)
        emit(ctx, {'feasible': False})
        return
    status('✅', 'System is feasible', Fore.GREEN)
    emit(ctx, {'feasible': True, 'point': list(point), 'tight': tighten(system).to_json()})


@cli.command('neigh-test')
@matrix_arg
@click.option('--count', type=click.IntRange(min=1), default=None)
@click.pass_context
def neigh_test(ctx, matrix, count):
    """Sample the identity and zero neighbourhood boxes."""
    A = read_matrix(matrix)
    count = count or Config.SAMPLE_COUNT
    rng = random.Random(_seed(ctx))
    payload = {}
    lower, upper = neigh_identity_box(A)
    bad = [X for X in sample_box(lower, upper, rng, count) if not (A @ X == X @ A == A)]
    payload['identity_box'] = {'samples': count, 'failures': [format_matrix(X) for X in bad[:5]]}
    failed = bool(bad)
    if is_strictly_normal(A):
        lower, upper = neigh_zero_box(A)
        bad = [X for X in sample_box(lower, upper, rng, count) if not (A @ X == X @ A == X)]
        payload['zero_box'] = {'samples': count, 'failures': [format_matrix(X) for X in bad[:5]]}
        failed = failed or bool(bad)
    else:
        status('⚠️ ', 'A is not strictly normal, zero box skipped', Fore.YELLOW)
    payload['status'] = 'failure' if failed else 'success'
    emit(ctx, payload)
    if failed:
        status('❌', 'Neighbourhood samples outside the commutant', Fore.RED)
        ctx.exit(EXIT_FAILED)
    status('✅', 'All neighbourhood samples commute', Fore.GREEN)


@cli.group()
def perturb():
    """Cyclic band perturbations P(-p,-eps) and Q(-p,-eps)."""


def _vector(ctx, param, value):
    try:
        return parse_vector(value)
    except TropicalError as e:
        raise click.BadParameter(str(e)) from None


def _number(ctx, param, value):
    if value is None:
        return None
    try:
        return parse_ext(value)
    except TropicalError as e:
        raise click.BadParameter(str(e)) from None


@perturb.command('make-p')
@click.option('--p', 'p', required=True, callback=_vector, help='Comma separated magnitudes, e.g. 4,3,5.')
@click.option('--eps', required=True, callback=_number)
@click.pass_context
def make_p(ctx, p, eps):
    result = make_P(p, eps)
    emit(ctx, result, format_matrix(result))


@perturb.command('make-q')
@click.option('--p', 'p', required=True, callback=_vector)
@click.option('--eps', required=True, callback=_number)
@click.pass_context
def make_q(ctx, p, eps):
    result = make_Q(p, eps)
    emit(ctx, result, format_matrix(result))


@perturb.command('check')
@click.option('--p', 'p', required=True, callback=_vector)
@click.option('--delta', required=True, callback=_number)
@click.option('--eps', required=True, callback=_number)
@click.pass_context
def perturb_check(ctx, p, delta, eps):
    """Both products of the P pair (and Q pair for n >= 4)."""
    report = check_pq_theorem(PerturbationSpec(p, eps=eps, delta=delta))
    emit(ctx, report.to_dict())
    if report.status == 'failure':
        status('❌', 'Products differ from the predicted band matrix', Fore.RED)
        ctx.exit(EXIT_FAILED)
    if report.status == 'skipped':
        status('⚠️ ', report.message, Fore.YELLOW)
    else:
        status('✅', 'Products match', Fore.GREEN)


@perturb.command('box-pair')
@click.option('--r', 'r', required=True, callback=_number)
@click.option('-n', '--order', type=click.IntRange(min=1), required=True)
@click.pass_context
def box_pair(ctx, r, order):
    """Random pair with entries in [2r, r] and its product."""
    A, B = make_box_pair(r, order, seed=_seed(ctx))
    report = commutes(A, B)
    emit(ctx, {'A': A, 'B': B, 'commutes': report.commutes, 'product': report.product})


@cli.command('span-member')
@matrix_arg
@click.option('--point', required=True, callback=_vector)
@click.pass_context
def span_member_cmd(ctx, matrix, point):
    certificate = span_member(read_matrix(matrix), point)
    emit(ctx, {'member': certificate.member, 'lambda': list(certificate.lam), 'image': list(certificate.image)})


@cli.command('span-contains')
@matrix_arg
@click.argument('other', type=click.Path(dir_okay=False))
@click.pass_context
def span_contains_cmd(ctx, matrix, other):
    """Whether span(A) contains span(B)."""
    column = first_missing_column(read_matrix(matrix), read_matrix(other))
    payload = {'contains': column is None}
    if column is not None:
        payload['missing_column'] = column + 1
    emit(ctx, payload)


@cli.command()
@click.argument('matrices', nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.option('-o', '--output', type=click.Path(dir_okay=False), default=None, help='SVG file to write.')
@click.option('--labels', default=None, help='Comma separated panel labels.')
@click.pass_context
def render(ctx, matrices, output, labels):
    """Sections of the column spans of 3x3 matrices, one panel each."""
    sections = [section_complex(read_matrix(path)) for path in matrices]
    label_list = labels.split(',') if labels else None
    target = output or ctx.find_root().obj['out']
    if target:
        render_svg(sections, target, label_list)
        status('✅', f'Figure written to {target}', Fore.GREEN)
    else:
        click.echo(render_svg_text(sections, label_list), nl=False)


@cli.command('grid-oracle')
@matrix_arg
@click.option('--alphabet', default=None, help='Comma separated entries, e.g. 0,-1,-2,-inf.')
@click.option('--cap', type=click.IntRange(min=1), default=None)
@click.option('--distributed', is_flag=True, help='Dispatch shards to Celery workers.')
@click.option('--shards', type=click.IntRange(min=1), default=None)
@click.option('--cache', 'use_cache', is_flag=True, help='Reuse shard reports cached in Redis.')
@click.option('--clear-cache', is_flag=True, help='Drop cached shard reports before running.')
@click.pass_context
def grid_oracle(ctx, matrix, alphabet, cap, distributed, shards, use_cache, clear_cache):
    """Enumerate the grid and check the commutant inclusions."""
    A = read_matrix(matrix)
    letters = [format_ext(a) for a in parse_alphabet(alphabet)]
    if clear_cache:
        dropped = invalidate_cache_pattern('oracle_*')
        status('🗑️', f'Dropped {dropped} cached shard reports', Fore.YELLOW)
    if use_cache:
        Config.CACHE_ENABLED = True
    text = format_matrix(A)
    total = grid_size(A.rows, letters)
    cap = Config.GRID_CAP if cap is None else cap
    if total > cap:
        status('❌', f'{total} candidates exceed the cap {cap}', Fore.RED)
        ctx.exit(EXIT_USAGE)
    if distributed:
        jobs = group(run_grid_shard_task.s(text, letters, lo, hi, cap) for lo, hi in shard_ranges(total, shards))
        status('📊', f'Dispatched {len(jobs.tasks)} shards over {total} candidates', Fore.GREEN)
        try:
            parts = jobs.apply_async().get(timeout=Config.CELERY_RESULT_TIMEOUT)
        except Exception as e:
            status('❌', f'Workers unavailable: {e}', Fore.RED)
            ctx.exit(EXIT_USAGE)
        result = merge_grid_reports(parts)
        if result['status'] != 'success':
            status('❌', result['message'], Fore.RED)
            ctx.exit(EXIT_USAGE)
        report = result['report']
    else:
        report = grid_shard(text, letters, 0, total, check_union=True, cap=cap)
    emit(ctx, report)
    if report['violations']:
        status('❌', f"{len(report['violations'])} inclusion violations", Fore.RED)
        ctx.exit(EXIT_FAILED)
    status('✅', f"No violations over {report['stop'] - report['start']} candidates "
                 f"({report['commuting']} commuting)", Fore.GREEN)


@cli.command('paper-suite')
@click.pass_context
def golden_suite(ctx):
    """Reproduce every worked example and print a pass/fail table."""
    results = run_golden_checks()
    width = max(len(r['name']) for r in results)
    table = ''.join(
        f"{r['name'].ljust(width)}  {'PASS' if r['status'] == 'success' else 'FAIL'}"
        f"{'  ' + r['message'] if r.get('message') else ''}\n"
        for r in results
    )
    emit(ctx, results, table)
    failed = [r for r in results if r['status'] != 'success']
    if failed:
        status('❌', f'{len(failed)} of {len(results)} golden checks failed', Fore.RED)
        ctx.exit(EXIT_FAILED)
    status('✅', f'All {len(results)} golden checks passed', Fore.GREEN)


cli.add_command(golden_suite, 'golden-suite')


@cli.command()
@click.option('--count', type=click.IntRange(min=1), default=None, help='Trials per suite.')
@click.option('--name', 'names', multiple=True, type=click.Choice(sorted(SUITES)), help='Run only these suites.')
@click.option('--shards', type=click.IntRange(min=1), default=1, show_default=True)
@click.option('--distributed', is_flag=True, help='Dispatch shards to Celery workers.')
@click.pass_context
def suite(ctx, count, names, shards, distributed):
    """Seeded randomized property suites."""
    count = count or Config.SAMPLE_COUNT
    seed = _seed(ctx)
    names = names or tuple(SUITES)
    sizes = [count // shards + (1 if k < count % shards else 0) for k in range(shards)]
    sizes = [size for size in sizes if size]
    results = []
    for name in names:
        if distributed:
            jobs = group(run_property_shard_task.s(name, seed, size, k) for k, size in enumerate(sizes))
            try:
                parts = jobs.apply_async().get(timeout=Config.CELERY_RESULT_TIMEOUT)
            except Exception as e:
                status('❌', f'Workers unavailable: {e}', Fore.RED)
                ctx.exit(EXIT_USAGE)
        else:
            parts = [run_suite(name, seed, size, k) for k, size in enumerate(sizes)]
        results.append(merge_suite_results(parts))
    table = ''.join(
        f"{r['suite'].ljust(12)}  {r.get('trials', 0):>6}  {r['status'].upper()}\n" for r in results
    )
    emit(ctx, results, table)
    failed = [r for r in results if r['status'] != 'success']
    if failed:
        status('❌', f"Failing suites: {', '.join(r['suite'] for r in failed)}", Fore.RED)
        ctx.exit(EXIT_FAILED)
    status('✅', f'{len(results)} suites passed with seed {seed}', Fore.GREEN)


if __name__ == '__main__':
    cli()
