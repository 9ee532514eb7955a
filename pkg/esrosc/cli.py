"""
CLI interface for esr-osc.
"""

import sys
from pathlib import Path
from typing import Callable, Optional

import click
from colorama import Fore, Style, init

from . import __version__
from .core.exceptions import InputError, NumericalError
from .core.models import RunConfig
from .core.simulator import ESRSimulator
from .core.states import FockVector
from .utils.config_loader import ConfigLoader
from .utils.logging import resolve_log_level, setup_logging

init(autoreset=True)

EXIT_FAILURE = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


def print_success(message: str):
    """Print success message in green."""
    click.echo(f"{Fore.GREEN}✓ {message}{Style.RESET_ALL}", err=True)


def print_error(message: str):
    """Print error message in red."""
    click.echo(f"{Fore.RED}✗ {message}{Style.RESET_ALL}", err=True)


def print_warning(message: str):
    """Print warning message in yellow."""
    click.echo(f"{Fore.YELLOW}⚠ {message}{Style.RESET_ALL}", err=True)


def print_info(message: str):
    """Print info message in blue."""
    click.echo(f"{Fore.BLUE}ℹ {message}{Style.RESET_ALL}", err=True)


def load_config(
    config_path: str,
    seed: Optional[int],
    threads: Optional[int],
    verbose: bool,
    debug: bool,
) -> RunConfig:
    """Load the run configuration and apply command-line overrides."""
    cfg = ConfigLoader.load_from_file(config_path)
    if seed is not None:
        cfg.seed = seed
    if threads is not None:
        cfg.thread_count = threads
    if verbose:
        cfg.verbose = True
    if debug:
        cfg.debug = True
    return cfg


def write_output(text: str, out: Optional[str], what: str, verbose: bool):
    """Write text to a file, or to stdout when no path is given."""
    if out:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        if verbose:
            print_success(f"{what} written to {out}")
    else:
        click.echo(text, nl=False)


def grid_companion_path(out: str) -> str:
    """Path of the grid CSV written next to a Fock-basis state file."""
    path = Path(out)
    return str(path.with_name(f"{path.stem}_grid{path.suffix or '.csv'}"))


def run_command(
    config_path: str,
    seed: Optional[int],
    threads: Optional[int],
    verbose: bool,
    debug: bool,
    action: Callable[[ESRSimulator, RunConfig], None],
):
    """
    Shared command driver: load config, set up logging, run, map errors to exit codes.

    Args:
        config_path: Path of the run config
        seed: --seed override
        threads: --threads override
        verbose: --verbose flag
        debug: --debug flag
        action: Callback doing the command's work
    """
    log_level = resolve_log_level(verbose, debug)
    setup_logging(log_level)

    try:
        cfg = load_config(config_path, seed, threads, verbose, debug)
        config_level = resolve_log_level(cfg.verbose, cfg.debug)
        if config_level < log_level:
            setup_logging(config_level)
        if cfg.verbose:
            print_info(f"Loaded configuration from {config_path}")

        simulator = ESRSimulator(cfg, base_dir=Path(config_path).resolve().parent)
        action(simulator, cfg)

    except InputError as e:
        print_error(f"Configuration error: {e}")
        sys.exit(EXIT_INPUT_ERROR)
    except NumericalError as e:
        print_error(f"Numerical failure: {e}")
        sys.exit(EXIT_NUMERICAL_ERROR)
    except KeyboardInterrupt:
        print_error("Operation cancelled by user")
        sys.exit(EXIT_FAILURE)
    except Exception as e:
        print_error(f"Fatal error: {e}")
        if debug:
            import traceback
            traceback.print_exc()
        sys.exit(EXIT_FAILURE)


def common_options(func):
    """Options shared by every command."""
    decorators = [
        click.option(
            '--config', '-c', 'config_path',
            type=click.Path(exists=True, dir_okay=False),
            required=True,
            help='Path to the run configuration (JSON, or YAML by .yaml/.yml suffix)'
        ),
        click.option(
            '--out', '-o',
            type=click.Path(dir_okay=False),
            help='Output file path (default: stdout)'
        ),
        click.option(
            '--seed',
            type=click.IntRange(0, 2 ** 64 - 1),
            help='Unsigned 64-bit seed overriding the config'
        ),
        click.option(
            '--threads', '-t',
            type=click.IntRange(min=1),
            help='Sampler worker threads (capped by ESR_OSC_THREADS)'
        ),
        click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging'),
        click.option('--debug', '-d', is_flag=True, help='Enable debug logging'),
    ]
    for decorator in reversed(decorators):
        func = decorator(func)
    return func


@click.group()
@click.version_option(version=__version__, prog_name='esr-osc')
def main():
    """
    ESR-model predictions for the one-dimensional harmonic oscillator.

    Every command reads one run configuration and writes CSV.
    Exit codes: 0 success, 2 configuration error, 3 numerical failure.
    """


@main.command()
@common_options
def probs(config_path, out, seed, threads, verbose, debug):
    """Conditional, detection and overall probabilities per outcome."""
    def action(simulator: ESRSimulator, cfg: RunConfig):
        write_output(simulator.generate_probs(), out, "Probability table", cfg.verbose)

    run_command(config_path, seed, threads, verbose, debug, action)


@main.command()
@common_options
def expect(config_path, out, seed, threads, verbose, debug):
    """Expectation values of H, H0, Q, Q0 and their gaps."""
    def action(simulator: ESRSimulator, cfg: RunConfig):
        write_output(simulator.generate_expect(), out, "Expectation table", cfg.verbose)

    run_command(config_path, seed, threads, verbose, debug, action)


@main.command()
@common_options
def collapse(config_path, out, seed, threads, verbose, debug):
    """
    Post-measurement state for the branch named in the config.

    Fock-basis results written with --out also get a <stem>_grid.csv
    companion with the state sampled on the grid.
    """
    def action(simulator: ESRSimulator, cfg: RunConfig):
        state = simulator.collapse()
        write_output(simulator.generate_state(state), out, "Post-measurement state", cfg.verbose)
        if out and isinstance(state, FockVector):
            companion = grid_companion_path(out)
            grid_text = simulator.generate_state(simulator.grid_view(state))
            write_output(grid_text, companion, "Grid samples", cfg.verbose)

    run_command(config_path, seed, threads, verbose, debug, action)


@main.command()
@common_options
def sample(config_path, out, seed, threads, verbose, debug):
    """Monte Carlo trajectories of the configured measurement sequence."""
    def action(simulator: ESRSimulator, cfg: RunConfig):
        text = simulator.generate_trajectories()
        write_output(text, out, "Trajectories", cfg.verbose)
        if cfg.verbose:
            print_info(f"Sampled {cfg.trials} trial(s) with seed {cfg.seed}")

    run_command(config_path, seed, threads, verbose, debug, action)


@main.command()
@common_options
def compare(config_path, out, seed, threads, verbose, debug):
    """Standard quantum and ESR predictions side by side."""
    def action(simulator: ESRSimulator, cfg: RunConfig):
        rows = simulator.comparison_rows()
        if cfg.verbose and not any(r.outcome == "no_detection_fidelity" for r in rows):
            print_warning("No-detection fidelity omitted: detection is certain for one observable")
        write_output(simulator.generate_compare(rows), out, "Comparison table", cfg.verbose)

    run_command(config_path, seed, threads, verbose, debug, action)


if __name__ == '__main__':
    main()
