import functools
import json
import sys
from pathlib import Path

import click
from dotenv import dotenv_values
from flask import Blueprint, current_app
from rich.console import Console
from rich.table import Table

from app.exceptions import ColexError, ConfigError
from app.models import POSITIONS, RATING_DIMS
from app.pipeline import ANALYSES, RunConfig, build as run_build, \
    analyze as run_analyze, subgraph as run_subgraph, run_stages
from app.synth import generate_corpus, write_corpus

bp = Blueprint('cli', __name__, cli_group=None)


def report_errors(f):
    """Turn a ColexError into ``error[<code>] <location>`` plus the message
    on stderr, and exit with the error's status."""
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except ColexError as e:
            click.echo(f'error[{e.code}] {e.location}', err=True)
            click.echo(e.message, err=True)
            current_app.logger.error('%s failed: %s', f.__name__, e)
            sys.exit(e.exit_code)
    return wrapper


def run_options(f):
    """Options every pipeline command accepts."""
    options = [
        click.option('--config', 'config_file',
                     type=click.Path(dir_okay=False),
                     help='key=value file mirroring the long options.'),
        click.option('--strict/--lenient', 'strict', default=None,
                     help='Abort on the first bad input line (default) or '
                          'skip and log it.'),
        click.option('--alpha', type=float, default=None,
                     help='Family-wise significance level.'),
        click.option('--report-threshold', type=float, default=None,
                     help='Minimum |r| for a significant result to be '
                          'reported.'),
        click.option('--out-dir', default=None,
                     help='Directory holding the build artifacts.'),
        click.option('--normalize-underscores/--keep-underscores',
                     default=None,
                     help='Read underscores in lemmas and sense words as '
                          'spaces.'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def resolve_config(config_file=None, strict=None, **overrides):
    """Defaults from the app config, then the --config file, then the
    command line."""
    config = RunConfig.from_app_config(current_app.config)
    if config_file is not None:
        if not Path(config_file).is_file():
            raise ConfigError('config file not found', path=config_file)
        config.update_from_file(config_file, dotenv_values(config_file))
    if strict is not None:
        overrides['mode'] = 'strict' if strict else 'lenient'
    return config.update(overrides, source='command line')


def input_options(f):
    options = [
        click.option('--lexicon', default=None,
                     help='Lexicon TSV: language, lemma, synset id.'),
        click.option('--pronunciations', default=None,
                     help='Pronunciation TSV file or directory of them.'),
        click.option('--concreteness', default=None,
                     help='Concreteness norms CSV.'),
        click.option('--affect', default=None,
                     help='Valence/arousal/dominance norms CSV.'),
        click.option('--feature-table', default=None,
                     help='Articulatory feature table CSV.'),
        click.option('--languages', default=None,
                     help='Language metadata CSV: code, family, macroarea.'),
        click.option('--resegment/--no-resegment', default=None,
                     help='Tile unsegmented pronunciations with the feature '
                          'table inventory.'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


@bp.cli.command()
@input_options
@run_options
@report_errors
def build(**options):
    """Ingest the inputs and write graph, dataset, summary and manifest."""
    config = resolve_config(**options)
    state = run_build(config)
    click.echo(f'{len(state.dataset)} dataset rows, {len(state.records)} '
               f'concept pairs written to {config.out_dir}')


@bp.cli.command()
@click.argument('name', type=click.Choice(ANALYSES))
@click.option('--position', type=click.Choice(POSITIONS), default='initial',
              help='Phoneme position for phoneme-position.')
@click.option('--rating', type=click.Choice(RATING_DIMS),
              default='concreteness', help='Rating dimension to correlate.')
@run_options
@report_errors
def analyze(name, position, rating, **options):
    """Run one analysis over the build artifacts and write its report."""
    config = resolve_config(**options)
    analysis, paths = run_analyze(config, name, position=position,
                                  rating=rating)
    click.echo(f'{analysis.name}: {len(analysis.reports)} correlations, '
               f'{len(analysis.reported())} reported, '
               f'{len(analysis.diagnostics)} skipped')
    for path in paths:
        click.echo(f'  {path}')


@bp.cli.command()
@click.argument('concept')
@click.option('--depth', type=click.IntRange(min=1), default=1,
              help='Breadth-first radius around the concept.')
@click.option('--output', type=click.Path(dir_okay=False), default=None,
              help='DOT file to write (default: in the output directory).')
@run_options
@report_errors
def subgraph(concept, depth, output, **options):
    """Write the colexification neighborhood of a concept as DOT."""
    config = resolve_config(**options)
    _, path = run_subgraph(
        config, concept, depth,
        max_penwidth=current_app.config['DOT_MAX_PENWIDTH'], output=output)
    click.echo(str(path))


@bp.cli.command()
@input_options
@run_options
@click.option('--json', 'as_json', is_flag=True,
              help='Print JSON instead of a table.')
@report_errors
def summary(as_json, **options):
    """Print the dataset statistics without writing anything."""
    config = resolve_config(**options).validate()
    stats = run_stages(config).summary.to_dict()
    if as_json:
        click.echo(json.dumps(stats, indent=2))
        return
    table = Table(title='Dataset statistics')
    table.add_column('statistic')
    table.add_column('value', justify='right')
    for name, value in stats.items():
        table.add_row(name.replace('_', ' '), str(value))
    Console().print(table)


@bp.cli.command()
@click.argument('directory', type=click.Path(file_okay=False))
@click.option('--seed', type=int, default=0, help='Random seed.')
@click.option('--languages', type=click.IntRange(min=1), default=14)
@click.option('--concepts', type=click.IntRange(min=2), default=150)
def synthesize(directory, seed, languages, concepts):
    """Write a seeded synthetic corpus and a config file pointing at it."""
    corpus = generate_corpus(seed, n_languages=languages,
                             n_concepts=concepts)
    config = write_corpus(corpus, directory)
    click.echo(f'{len(corpus.entries)} entries over '
               f'{len(corpus.languages)} languages; build with '
               f'"flask build --config {config}"')
