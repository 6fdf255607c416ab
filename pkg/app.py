"""
QuantumEraserLab — command-line entry point.

Registers the subcommands, configures logging and maps library errors to
exit codes: 0 success, 1 property violation, 2 invalid input, 3 I/O failure.
"""
import logging
import sys

import click
from dotenv import load_dotenv

# Load environment variables from .env file BEFORE importing modules that use them
load_dotenv()

from config import Config
from commands.options import RunContext
from commands.scenario import scenario_cmd
from commands.simulate import simulate_cmd
from commands.sweep import sweep_cmd
from commands.verify import verify_cmd
from modules.errors import QuantumEraserError, ScenarioError
from modules.scenario import load_scenario_file

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INVALID = 2
EXIT_IO = 3

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def configure_logging(level):
    """Log to stderr so stdout carries only the report."""
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT,
                        stream=sys.stderr, force=True)


class ErasureGroup(click.Group):
    """Click group with a single place that turns library errors into exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ScenarioError as e:
            logger.error(f"Invalid scenario field {e.field}: {e.message}")
            click.echo(f"error: invalid {e.field}: {e.message}", err=True)
            ctx.exit(EXIT_INVALID)
        except QuantumEraserError as e:
            logger.error(f"{type(e).__name__}: {e}")
            click.echo(f"error: {type(e).__name__}: {e}", err=True)
            ctx.exit(EXIT_INVALID)
        except OSError as e:
            logger.error(f"I/O failure: {e}")
            click.echo(f"error: {e}", err=True)
            ctx.exit(EXIT_IO)


@click.group(cls=ErasureGroup)
@click.option('--seed', type=int, default=None, help='Seed for every Monte Carlo stream.')
@click.option('--eta', type=float, default=None, help='Mode-overlap factor in [0, 1].')
@click.option('--output', type=click.Path(dir_okay=False), default=None, help='Write the report here instead of stdout.')
@click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default=None, help='Output format.')
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
              help='Flat JSON scenario document; command-line flags win over its values.')
@click.option('--log-level', default=Config.LOG_LEVEL, show_default=True)
@click.version_option(Config.APP_VERSION)
@click.pass_context
def cli(ctx, seed, eta, output, fmt, config_path, log_level):
    """Quantum-erasure complementarity laboratory."""
    configure_logging(log_level)
    file_values = load_scenario_file(config_path) if config_path else {}
    ctx.obj = RunContext(seed=seed, eta=eta, output=output, fmt=fmt, file_values=file_values)


cli.add_command(scenario_cmd)
cli.add_command(sweep_cmd)
cli.add_command(simulate_cmd)
cli.add_command(verify_cmd)


if __name__ == '__main__':
    cli()
