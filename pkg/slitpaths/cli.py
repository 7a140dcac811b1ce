"""
SlitPaths - Command Line
click command group: simulate, sweep-efficiency, invert, sorkin

Exit codes: 0 success, 1 configuration or usage error, 2 convergence
failure, 3 file input/output error.
"""

import sys
import logging
import functools

import click
from click.core import ParameterSource

from slitpaths import __version__, configure_logging
from slitpaths.errors import SlitPathsError, exit_code_for

logger = logging.getLogger(__name__)

# click parameter name -> configuration key
OVERRIDE_OPTIONS = {
    'out': 'out',
    'mode': 'mode',
    'classical_only': 'classical_only',
    'nodes_per_wavelength': 'nodes_per_wavelength',
    'efficiency': 'efficiencies',
    'window': 'window',
    'workers': 'workers',
    'cache_dir': 'cache_dir',
    'verify': 'verify_convergence',
}


class SlitPathsGroup(click.Group):
    """Group whose main() maps every failure onto the documented exit codes"""

    def main(self, args=None, prog_name=None, **extra):
        extra.pop('standalone_mode', None)
        try:
            rv = super().main(args=args, prog_name=prog_name, standalone_mode=False, **extra)
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(1)
        except click.ClickException as e:
            e.show()
            sys.exit(1)
        except (SlitPathsError, OSError, ValueError, ArithmeticError) as e:
            logger.debug("Command failed", exc_info=True)
            click.echo(f"Error: {e}", err=True)
            sys.exit(exit_code_for(e))
        sys.exit(rv if isinstance(rv, int) else 0)


def run_options(func):
    """Options shared by every subcommand"""
    options = [
        click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
                     help='TOML configuration file.'),
        click.option('--out', type=click.Path(dir_okay=False), help='Output CSV path.'),
        click.option('--mode', type=click.Choice(['fraunhofer', 'exact']),
                     help='Propagator form.'),
        click.option('--classical-only/--with-nonclassical', default=False,
                     help='Switch the inter-slit (non-classical) paths off.'),
        click.option('--nodes-per-wavelength', type=int, help='Quadrature node density.'),
        click.option('--window', help='Averaging window "y1,y2" (unit suffixes allowed).'),
        click.option('--workers', type=int, help='Threads for grid evaluation.'),
        click.option('--cache-dir', type=click.Path(file_okay=False),
                     help='Directory for cached screen fields.'),
        click.option('--verify/--no-verify', default=True,
                     help='Fail (exit 2) when node doubling moves a result beyond the tolerance.'),
        click.option('-v', '--verbose', count=True, help='-v for progress, -vv for detail.'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _load(ctx, config_path, **params):
    """RunConfig from file/environment, overridden by flags given on the command line"""
    from slitpaths.config import load_config

    overrides = {}
    for name, key in OVERRIDE_OPTIONS.items():
        if name in params and ctx.get_parameter_source(name) is ParameterSource.COMMANDLINE:
            overrides[key.upper()] = params[name]
    config = load_config(config_path, overrides)
    logger.debug(f"Configuration digest {config.digest()}")
    return config


def with_config(func):
    """Pass a loaded RunConfig to the command instead of raw options"""
    @functools.wraps(func)
    def wrapper(config_path, verbose, **params):
        configure_logging(verbose)
        ctx = click.get_current_context()
        extra = {name: params.pop(name) for name in list(params) if name not in OVERRIDE_OPTIONS}
        config = _load(ctx, config_path, **params)
        return func(config, **extra)
    return wrapper


@click.group(cls=SlitPathsGroup)
@click.version_option(__version__, prog_name='slitpaths')
def cli():
    """Double-slit path-integral simulations with which-way detectors."""


@cli.command()
@run_options
@with_config
def simulate(config):
    """Perfect-detector profiles, Delta1, Delta2 and I_AB."""
    from slitpaths.commands import cmd_simulate

    path = cmd_simulate(config)
    click.echo(f"Wrote {path}")


@cli.command('sweep-efficiency')
@run_options
@click.option('--efficiency', help='Comma-separated detector efficiencies.')
@with_config
def sweep_efficiency(config):
    """Imperfect-detector profiles and the Delta_av summary over efficiencies."""
    from slitpaths.commands import cmd_sweep_efficiency

    profile_path, summary_file = cmd_sweep_efficiency(config)
    click.echo(f"Wrote {profile_path}")
    click.echo(f"Wrote {summary_file}")


@cli.command()
@run_options
@click.option('--measured', required=True, type=click.Path(dir_okay=False),
              help='CSV with y_m, P_AB and the *_prime columns.')
@click.option('--efficiency', 'n', required=True, type=float,
              help='Efficiency the measured profiles were taken at.')
@with_config
def invert(config, measured, n):
    """Recover perfect-detector profiles from measured imperfect ones."""
    from slitpaths.commands import cmd_invert

    path = cmd_invert(config, measured, n)
    click.echo(f"Wrote {path}")


@cli.command()
@run_options
@with_config
def sorkin(config):
    """Triple-slit profiles and the Sorkin parameter."""
    from slitpaths.commands import cmd_sorkin

    path = cmd_sorkin(config)
    click.echo(f"Wrote {path}")


def main():
    cli()
