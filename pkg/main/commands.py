import json
import logging
import os

import click
import numpy as np
import pandas as pd
from flask import current_app
from flask.cli import AppGroup, with_appcontext

import main
from main import criteria, demos, unitary_opt, witnesses
from main.decorators import handles_witness_errors
from main.errors import ValidationError
from main.models.matrix_file import MatrixFile
from main.models.operators import complex_to_json
from main.models.verdicts import Status, to_plain
from main.models.witness_spec import WitnessSpec

logger = logging.getLogger(__name__)

EXIT_NOT_BLOCK_POSITIVE = 2
JSON_PATH = click.Path(dir_okay=False, writable=True, allow_dash=True)

catalog_cli = AppGroup('catalog', help='List and export catalog witnesses.')


def resolve_witness(witness, dim=None):
    if witness in witnesses.CATALOG_NAMES:
        return witnesses.build_witness(witness, dim)
    if os.path.exists(witness):
        matrix_file = MatrixFile.load(witness)
        if dim is not None and dim not in matrix_file.operator.dims:
            raise ValidationError(f"--dim {dim} does not match file dims {matrix_file.operator.dims}")
        if not matrix_file.block_positive:
            logger.warning(f"{witness} carries no block-positivity attestation")
        return WitnessSpec(matrix_file.name, matrix_file.operator, dict(matrix_file.metadata),
                           block_positive=matrix_file.block_positive)
    raise ValidationError(
        f"{witness!r} is neither a catalog witness ({', '.join(witnesses.CATALOG_NAMES)}) nor a file")


def criteria_config(seed=None, tol=None, restarts=None):
    config = criteria.CriteriaConfig.from_mapping(current_app.config)
    return config.with_seed(seed).with_tolerance(tol).with_restarts(restarts)


def dump_report(payload):
    return json.dumps(to_plain(payload), sort_keys=True, indent=2)


def emit(payload, summary_lines, json_path=None):
    """
    The summary goes to stdout unless json_path is '-', which prints the JSON
    report instead; any other json_path receives the JSON report as a file.
    """
    if json_path == '-':
        click.echo(dump_report(payload))
        return
    if json_path:
        with open(json_path, 'w') as handle:
            handle.write(dump_report(payload))
            handle.write('\n')
        logger.info(f"report written to {json_path}")
    click.echo('\n'.join(summary_lines))


@catalog_cli.command('list')
@handles_witness_errors
def catalog_list():
    table = pd.DataFrame([{
        'name': entry.name,
        'dimension': entry.dimension_rule,
        'default dim': entry.default_dim,
        'source map': entry.source_map,
    } for entry in witnesses.CATALOG]).set_index('name')
    click.echo(table.to_string())


@catalog_cli.command('emit')
@click.argument('name')
@click.option('--dim', type=int, default=None, help='Local dimension.')
@click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None)
@handles_witness_errors
def catalog_emit(name, dim, out):
    spec = witnesses.build_witness(name, dim)
    matrix_file = MatrixFile(spec.witness, {
        'name': spec.name,
        'block_positive': spec.block_positive,
        'params': to_plain(spec.params),
    })
    if out:
        matrix_file.dump(out)
    else:
        click.echo(matrix_file.dumps())


@click.command('check')
@with_appcontext
@click.option('--witness', required=True, help='Catalog name or matrix file.')
@click.option('--dim', type=int, default=None, help='Local dimension for catalog witnesses.')
@click.option('--criteria', 'criteria_ids', default=None,
              help=f"Comma separated subset of: {', '.join(criteria.ALL_CRITERIA)}.")
@click.option('--restarts', type=int, default=None)
@click.option('--seed', type=int, default=None)
@click.option('--tol', type=float, default=None)
@click.option('--json', 'json_path', type=JSON_PATH, default=None,
              help="Write the JSON report to this file, or '-' for stdout.")
@click.option('--no-attest', is_flag=True, default=False, help='Drop the block-positivity attestation.')
@handles_witness_errors
def check(witness, dim, criteria_ids, restarts, seed, tol, json_path, no_attest):
    spec = resolve_witness(witness, dim)
    if no_attest:
        spec = WitnessSpec(spec.name, spec.witness, spec.params, spec.source_map, block_positive=False)
    selected = [name.strip() for name in criteria_ids.split(',')] if criteria_ids else None
    report = criteria.run_all(spec, criteria_config(seed, tol, restarts), selected)
    emit(report.json(), report.summary_lines(), json_path)
    if report.overall is Status.NOT_BLOCK_POSITIVE:
        raise SystemExit(EXIT_NOT_BLOCK_POSITIVE)


@click.command('optimize')
@with_appcontext
@click.option('--witness', required=True, help='Catalog name or matrix file.')
@click.option('--dim', type=int, default=None)
@click.option('--restarts', type=int, default=None)
@click.option('--seed', type=int, default=None)
@click.option('--tol', type=float, default=None)
@click.option('--json', 'json_path', type=JSON_PATH, default=None)
@handles_witness_errors
def optimize(witness, dim, restarts, seed, tol, json_path):
    """Minimize ⟨Ω|W|Ω⟩ over maximally entangled Ω and compare with -tr(W)/n."""
    spec = resolve_witness(witness, dim)
    config = criteria_config(seed, tol, restarts)
    W = spec.witness
    result = unitary_opt.minimize_witness_functional(W, config.optimizer)
    threshold = -W.trace().real / W.dim_a
    gap = result.best_value - threshold
    scale = max(1.0, abs(threshold))
    if gap < -config.eigen_match_tol * scale:
        status = Status.BOUND_VIOLATED
    elif gap <= config.eigen_match_tol * scale:
        status = Status.OPTIMAL if spec.block_positive else Status.INCONCLUSIVE
    else:
        status = Status.INCONCLUSIVE
    payload = {
        'version': main.__version__,
        'witness': {'name': spec.name, 'dims': list(spec.dims), 'block_positive_attested': spec.block_positive},
        'best_value': result.best_value,
        'threshold': threshold,
        'gap': gap,
        'status': status.value,
        'optimizer': config.optimizer.json(),
        'result': result.json(),
    }
    lines = [
        f"{spec.name} on {spec.dims[0]}x{spec.dims[1]}: {status.value.upper()}",
        f"  best value {result.best_value:.12g}",
        f"  threshold  {threshold:.12g}",
        f"  gap        {gap:.3e}",
    ]
    if status is Status.OPTIMAL:
        payload['certificate_unitary'] = complex_to_json(result.best_point)
        lines.append('  certificate unitary:')
        lines.extend(f"    {row}" for row in np.array2string(np.round(result.best_point, 8)).splitlines())
    emit(payload, lines, json_path)
    if status is Status.BOUND_VIOLATED:
        raise SystemExit(EXIT_NOT_BLOCK_POSITIVE)


@click.command('demo')
@with_appcontext
@click.argument('name', type=click.Choice(list(demos.DEMOS)))
@click.option('--json', 'json_path', type=JSON_PATH, default=None)
@handles_witness_errors
def demo(name, json_path):
    result = demos.run_demo(name, criteria.CriteriaConfig.from_mapping(current_app.config))
    emit(result.json(), [result.render()], json_path)


def register_commands(app):
    app.cli.add_command(catalog_cli)
    app.cli.add_command(check)
    app.cli.add_command(optimize)
    app.cli.add_command(demo)
