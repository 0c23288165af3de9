"""The `runtumble` console script.

```
runtumble [--config FILE] [--out DIR] [--seed N] [--threads N] [-v] SUBCOMMAND [overrides]
```

Exit codes: 0 when every verdict passes, 1 when a probe fails, a run leaves the
domain of its analysis or a reproduction diverges, 2 on an invalid configuration. `RUNTUMBLE_OUT` overrides `--out`.
"""

import argparse
import logging
import os
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, get_args

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from runtumble.__about__ import __version__
from runtumble.errors import ConfigError, RunTumbleError
from runtumble.semigroup import OPERATOR_TAGS

from .config import PIPELINES, Scenario, SteadyMethodName, load_scenario
from .manifest import reproduce, write_run
from .pipelines import PipelineResult, run_pipeline

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

DEFAULT_OUT = Path('runtumble-out')
OUT_ENV = 'RUNTUMBLE_OUT'

# Subcommand option to scenario field.
OVERRIDES = {
    'chi': 'model.chi',
    'gamma': 'model.gamma',
    'dim': 'model.dim',
    'L': 'model.L',
    'n_x': 'model.n_x',
    'n_v': 'model.n_v',
    'tag': 'model.tag',
    'scheme': 'model.scheme',
    'T': 'run.T',
    'method': 'probe.method',
    'probes': 'probe.probes',
    'input': 'probe.input',
    'n_particles': 'particles.n',
}


def _global_options() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand from resetting options given before it.
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument('--config', type=Path, help='scenario TOML file')
    common.add_argument('--out', type=Path, help=f'output root (default {DEFAULT_OUT})')
    common.add_argument('--seed', type=int, help='root seed')
    common.add_argument('--threads', type=int, help='worker threads')
    common.add_argument('-v', '--verbose', action='count', help='-v for INFO, -vv for DEBUG')
    return common


def _override_options() -> argparse.ArgumentParser:
    overrides = argparse.ArgumentParser(add_help=False)
    overrides.add_argument('--chi', type=float)
    overrides.add_argument('--gamma', type=float)
    overrides.add_argument('--dim', type=int, choices=(1, 2))
    overrides.add_argument('--L', dest='L', type=float)
    overrides.add_argument('--n-x', dest='n_x', type=int)
    overrides.add_argument('--n-v', dest='n_v', type=int)
    overrides.add_argument('--tag', choices=OPERATOR_TAGS)
    overrides.add_argument('--scheme', choices=('upwind', 'muscl'))
    overrides.add_argument('--T', dest='T', type=float, help='final time')
    overrides.add_argument('--method', choices=get_args(SteadyMethodName))
    overrides.add_argument(
        '--probe', dest='probes', action='append', help='probe to run (repeatable)'
    )
    overrides.add_argument('--input', help='t,value CSV for fit-decay')
    overrides.add_argument('--n-particles', dest='n_particles', type=int)
    return overrides


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    overrides = _override_options()
    parser = argparse.ArgumentParser(
        prog='runtumble',
        description='Numerical laboratory for the linear run-and-tumble equation.',
        parents=[common],
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser(
        'run', parents=[common, overrides], help='run the pipeline named in --config'
    )
    for name in PIPELINES:
        sub.add_parser(name, parents=[common, overrides], help=f'run the {name} pipeline')
    rep = sub.add_parser('reproduce', parents=[common], help='rerun a manifest and compare')
    rep.add_argument('manifest', type=Path)
    return parser


def configure_logging(verbosity: int, console: Console | None = None) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    handler = RichHandler(console=console or Console(stderr=True), show_path=False)
    logging.basicConfig(level=level, format='%(message)s', handlers=[handler], force=True)


def resolve_scenario(args: argparse.Namespace) -> Scenario:
    """The scenario from `--config` (or the defaults) with the command-line overrides."""
    config = getattr(args, 'config', None)
    scenario = load_scenario(config) if config is not None else Scenario()
    overrides: dict[str, Any] = {}
    for dest, dotted in OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is not None:
            overrides[dotted] = tuple(value) if isinstance(value, list) else value
    if args.command != 'run':
        overrides['pipeline'] = args.command
    overrides['seed'] = getattr(args, 'seed', None)
    return scenario.with_overrides(**overrides)


def _scalar(value: object) -> str | None:
    match value:
        case bool() | str():
            return str(value)
        case int():
            return str(value)
        case float():
            return f'{value:.6g}'
        case _:
            return None


def print_summary(result: PipelineResult, directory: Path, console: Console) -> None:
    for report in result.reports:
        table = Table(title=f'{report.probe}: {report.verdict or "reported"}')
        table.add_column('value')
        table.add_column('')
        for key, value in report.to_dict()['values'].items():  # type: ignore[union-attr]
            text = _scalar(value)
            if text is not None:
                table.add_row(key, text)
        console.print(table)
    console.print(f'outputs in {directory}')


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(getattr(args, 'verbose', 0) or 0)
    console = Console()
    threads = getattr(args, 'threads', None)
    try:
        if args.command == 'reproduce':
            outcome = reproduce(args.manifest, threads=threads)
            if outcome.ok:
                console.print(f'reproduced {args.manifest}')
                return EXIT_OK
            logger.error('divergence: %s', outcome.divergence)
            return EXIT_FAIL
        scenario = resolve_scenario(args)
        result = run_pipeline(scenario, threads or 1)
        out_root = os.environ.get(OUT_ENV) or getattr(args, 'out', None) or DEFAULT_OUT
        directory = write_run(scenario, result, out_root, threads or 1)
    except ConfigError as e:
        logger.error('%s', e)
        print(f'runtumble: error: {e}', file=sys.stderr)
        return EXIT_CONFIG
    except RunTumbleError as e:
        logger.error('%s', e)
        print(f'runtumble: failed: {e}', file=sys.stderr)
        return EXIT_FAIL
    print_summary(result, directory, console)
    return EXIT_OK if result.passed else EXIT_FAIL


if __name__ == '__main__':  # pragma: no cover
    sys.exit(main())
