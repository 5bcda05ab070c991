'''bergnorm command line: constants, audit, verify <suite>, bracket <T|P>

Exit codes: 0 ok, 1 hard-check failure (or every sweep point failed),
2 usage error (including an empty sweep).

'''
import logging
import functools

import click
from toolz.curried import pipe, concat, map

from ..logging import setup_logging, timed
from ..parallel import pmap as parallel_map
from ..bounds import audit, sandwich_findings
from ..operators import bracket_T_norm, bracket_P_norm
from ..verify import SUITES, run_suite, hard_failures
from ..reports import (
    constants_row, sweep_rows, failed_rows, report_document, render,
    write_report,
)
from .common import (
    FORMATS, run_config, read_config_file, require_sweep, combo_params,
)

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

RUN_OPTIONS = (
    click.option('--config', 'config_path', type=click.Path(exists=True),
                 help='YAML file whose keys mirror the long flag names'),
    click.option('--n', help='Dimension(s), comma separated (default 2)'),
    click.option('--alpha', help='Weight parameter(s) alpha > 0 (default 1)'),
    click.option('--p', help='Exponent(s) p > 1 (default 2)'),
    click.option('--m', help='Derivative order(s); default: smallest'
                 ' admissible for each (n, p)'),
    click.option('--seed', type=int, help='Seed (default 20240101)'),
    click.option('--radial-order', type=int,
                 help='Radial nodes of the norm rules'),
    click.option('--sphere-order', type=int,
                 help='Angular order of the norm rules'),
    click.option('--degree-cap', type=int,
                 help='Largest kernel series degree (default 200)'),
    click.option('--rel-tol', type=float,
                 help='Kernel series tail tolerance (default 1e-8)'),
    click.option('--max-terms', type=int,
                 help='Term budget of the hypergeometric series'),
    click.option('--trials', type=int,
                 help='Random witness candidates per bracket (default 100)'),
    click.option('--format', 'format', type=click.Choice(FORMATS),
                 help='Report format (default json)'),
    click.option('--out', type=click.Path(dir_okay=False),
                 help='Report path (default stdout)'),
    click.option('--workers', type=int, help='Worker threads (default 1)'),
    click.option('--radius', type=float,
                 help='Radius r < 1 of rB-restricted checks (default 0.9)'),
)

def run_options(func):
    '''Apply the shared sweep/quadrature/output flags to a command'''
    return functools.reduce(
        lambda f, option: option(f), reversed(RUN_OPTIONS), func,
    )

def _config(config_path, flags):
    return run_config(read_config_file(config_path), flags)

def _emit(ctx, config, command, rows, **extra):
    document = report_document(command, config.resolved(), rows, **extra)
    write_report(render(document, config.format), config.out)
    return document

def _mapper(config):
    return parallel_map('thread', config.workers)

def _finish(ctx, rows, hard_failed=False):
    if rows and len(failed_rows(rows)) == len(rows):
        log.error('every sweep point failed')
        ctx.exit(1)
    if hard_failed:
        ctx.exit(1)
    ctx.exit(0)

@click.group()
@click.option(
    '--loglevel', default='warning',
    type=click.Choice(['debug', 'info', 'warning', 'error', 'critical']),
    help='Console log level',
)
def main(loglevel):
    '''Norm estimates for the weighted harmonic Bergman projection and
    the T_k^alpha operators on the unit ball

    '''
    setup_logging(loglevel)

@main.command()
@run_options
@click.pass_context
def constants(ctx, config_path, **flags):
    '''One row of named constants (all variants) per Params point'''
    config = _config(config_path, flags)
    combos = require_sweep(config)
    with timed(log, 'constants'):
        rows = sweep_rows(
            lambda combo: constants_row(combo_params(combo)),
            combos, _mapper(config),
        )
    _emit(ctx, config, 'constants', rows)
    _finish(ctx, rows)

@main.command(name='audit')
@run_options
@click.pass_context
def audit_command(ctx, config_path, **flags):
    '''ConstantReports for D, D~, A, B, M and beta, plus A <= D findings'''
    config = _config(config_path, flags)
    combos = require_sweep(config)

    def point(combo):
        reports = audit(combo_params(combo))
        return {
            'reports': [r.row() for r in reports],
            'findings': [
                dict(row) for row in sandwich_findings(reports)
                if not row['consistent']
            ],
        }

    results = sweep_rows(point, combos, _mapper(config))
    rows = pipe(
        results,
        map(lambda r: r['reports'] if 'reports' in r else [r]),
        concat, tuple,
    )
    findings = pipe(
        results, map(lambda r: r.get('findings', [])), concat, tuple,
    )
    _emit(ctx, config, 'audit', rows, findings=findings)
    _finish(ctx, results)

@main.command()
@click.argument('suite', type=click.Choice(sorted(SUITES)))
@run_options
@click.pass_context
def verify(ctx, suite, config_path, **flags):
    '''Run one verification suite; exit 1 iff a hard check fails'''
    config = _config(config_path, flags)
    require_sweep(config)
    with timed(log, f'verify {suite}'):
        results = run_suite(suite, config.resolved())
    failures = hard_failures(results)
    for r in failures:
        log.error(f'hard check failed: {r.name} ({r.detail})')
    _emit(ctx, config, f'verify {suite}', results,
          passed=not failures)
    _finish(ctx, [r.row() for r in results], hard_failed=bool(failures))

@main.command()
@click.argument('operator', type=click.Choice(['T', 'P']))
@run_options
@click.pass_context
def bracket(ctx, operator, config_path, **flags):
    '''Two-sided norm bracket of T_k^alpha (T) or P_alpha (P)'''
    config = _config(config_path, flags)
    combos = require_sweep(config)

    def point(combo):
        params = combo_params(combo)
        if operator == 'T':
            result = bracket_T_norm(
                params, trials=config.trials, seed=config.seed,
                workers=config.workers, norm_split=config.split,
            )
        else:
            result = bracket_P_norm(
                params, trials=config.trials, seed=config.seed,
                workers=config.workers, norm_split=config.split,
                series=config.kernel_series(params),
            )
        return result.report()

    with timed(log, f'bracket {operator}'):
        rows = sweep_rows(point, combos)
    _emit(ctx, config, f'bracket {operator}', rows)
    _finish(ctx, rows)
