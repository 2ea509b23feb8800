"""
CLI interface for the LoRa uplink simulator.
Runs the distance sweep for one or both channel models and writes a CSV
curve plus a reproducibility manifest per channel.
"""

import argparse
import os
import time
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv
from rich.console import Console
from rich.markup import escape

from ..logging.logger import Logger
from ..schemas.sim_schemas import FadingKind, RunManifest, SimConfig
from ..simulation import __version__
from ..simulation.config import apply_overrides, load_config
from ..simulation.engine import run_coverage, run_sweep
from ..simulation.errors import ConfigurationError, LoraSimError
from .curve_formatter import format_coverage_panel, format_curve_table, format_outputs
from .curve_writer import remove_outputs, write_run

console = Console()
error_console = Console(stderr=True)
logger = Logger(__name__)

CHANNELS = {
    'rayleigh': [FadingKind.RAYLEIGH],
    'rician': [FadingKind.RICIAN],
    'both': [FadingKind.RAYLEIGH, FadingKind.RICIAN],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='lorasim',
        description='Monte Carlo uplink success probability for multi-cell LoRa networks.',
    )
    parser.add_argument('--config', type=Path, help='key = value configuration file')
    parser.add_argument('--seed', type=int, help='master seed (overrides the config)')
    parser.add_argument('--trials', type=int, help='trials per distance bin (overrides the config)')
    parser.add_argument('--workers', type=int, help='worker processes (overrides LORASIM_WORKERS and the config)')
    parser.add_argument('--channel', choices=sorted(CHANNELS), help='channel model(s) to simulate')
    parser.add_argument('--out', type=Path, default=Path('results'), help='output directory')
    parser.add_argument('--coverage', action='store_true', help='also estimate the network-averaged success')
    parser.add_argument('--quiet', action='store_true', help='suppress progress and tables')
    return parser


def _env_workers() -> Optional[int]:
    raw = os.getenv('LORASIM_WORKERS')
    if raw is None or not raw.strip():
        return None
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigurationError(f"malformed value '{raw}'", key='LORASIM_WORKERS') from e


def resolve_config(args: argparse.Namespace) -> SimConfig:
    """File (or defaults), then environment, then command-line flags."""
    config = load_config(args.config) if args.config is not None else SimConfig()
    config = apply_overrides(config, workers=_env_workers())
    return apply_overrides(config, seed=args.seed, trials=args.trials, workers=args.workers)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the simulator.

    Returns:
        int: 0 on success, 1 on a configuration, simulation or I/O failure
    """
    load_dotenv()
    args = build_parser().parse_args(argv)
    written: List[Path] = []

    try:
        config = resolve_config(args)
        kinds = CHANNELS[args.channel] if args.channel else [config.fading]
        logger.log('info', 'Simulator started', {
            'version': __version__,
            'channels': [k.value for k in kinds],
            'seed': config.seed,
            'trials': config.trials,
        })

        for kind in kinds:
            channel_config = apply_overrides(config, fading=kind)
            if not args.quiet:
                console.print(f"\n[cyan]Simulating {kind.value} channel "
                              f"({len(channel_config.bins)} bins x {channel_config.trials} trials)...[/cyan]")

            started = time.perf_counter()
            curve = run_sweep(channel_config)
            coverage = run_coverage(channel_config) if args.coverage else None
            manifest = RunManifest(
                config=channel_config,
                version=__version__,
                channel=kind.value,
                duration_s=time.perf_counter() - started,
                trials_per_bin=[b.trials for b in curve.bins],
                no_gateway_trials=sum(b.no_gateway for b in curve.bins),
                coverage=coverage,
            )

            paths = write_run(args.out, curve, manifest)
            written.extend(paths)
            logger.log('info', 'Saved curves to file', {
                'channel': kind.value,
                'csv': str(paths[0]),
                'manifest': str(paths[1]),
                'duration_s': round(manifest.duration_s, 3),
            })

            if not args.quiet:
                console.print(format_curve_table(curve, kind.value))
                if coverage is not None:
                    console.print(format_coverage_panel(coverage))
                console.print(format_outputs(paths))

    except (LoraSimError, OSError) as e:
        remove_outputs(written)
        error_msg = str(e)
        logger.log('error', 'Simulation failed', {'error': error_msg, 'type': type(e).__name__})
        error_console.print(f"[red]Error: {escape(error_msg)}[/red]", soft_wrap=True)
        return 1
    except Exception as e:
        remove_outputs(written)
        error_msg = str(e)
        logger.log('error', 'Unexpected failure', {'error': error_msg, 'type': type(e).__name__})
        error_console.print(f"[red]Unexpected error ({type(e).__name__}): {escape(error_msg)}[/red]",
                            soft_wrap=True)
        return 1
    except KeyboardInterrupt:
        remove_outputs(written)
        logger.log('info', 'User interrupted the program')
        error_console.print("\n[yellow]Interrupted.[/yellow]")
        return 130

    logger.log('info', 'Simulator finished', {'files': [str(p) for p in written]})
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
