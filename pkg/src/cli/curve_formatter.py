"""
Formatting utilities for simulated success-probability curves.
"""

from pathlib import Path
from typing import Tuple

from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from ..schemas.sim_schemas import CoverageEstimate, CurveEstimate


def _pct(p: float, ci: float) -> str:
    return f"{p:.3f} ± {ci:.3f}"


def format_curve_table(result: CurveEstimate, channel: str) -> Table:
    """
    Format a distance sweep as a table, one row per bin.

    Args:
        result (CurveEstimate): Sweep to display
        channel (str): Channel label for the title

    Returns:
        Table: Rich table with probabilities, SF and throughput
    """
    table = Table(title=f"📡 {channel} uplink", title_style="bold cyan", border_style="cyan")
    table.add_column("d [km]", justify="right")
    table.add_column("SF", justify="right", style="magenta")
    table.add_column("P(H1)", justify="right")
    table.add_column("oracle H1", justify="right", style="dim")
    table.add_column("P(H2)", justify="right")
    table.add_column("P(success)", justify="right", style="green")
    table.add_column("bps", justify="right", style="yellow")

    for b in result.bins:
        table.add_row(
            f"{b.distance_km:.2f}",
            str(b.sf),
            _pct(b.p_h1, b.p_h1_ci),
            f"{b.analytic_h1:.3f}",
            _pct(b.p_h2, b.p_h2_ci),
            _pct(b.p_success, b.p_success_ci),
            f"{b.throughput_bps:.3f}",
        )
    return table


def format_coverage_panel(coverage: CoverageEstimate) -> Panel:
    """Format the network-averaged estimate."""
    content = Text.assemble(
        Text(f"P(H1) {_pct(coverage.p_h1, coverage.p_h1_ci)}\n"),
        Text(f"P(H2) {_pct(coverage.p_h2, coverage.p_h2_ci)}\n"),
        Text(f"P(success) {_pct(coverage.p_success, coverage.p_success_ci)}\n", style="green"),
        Text(f"Mean throughput {coverage.mean_throughput_bps:.3f} bps\n", style="yellow"),
        Text(f"{coverage.no_gateway} of {coverage.trials} trials had no gateway", style="dim"),
    )
    return Panel(content, border_style="green", title="Network average")


def format_outputs(paths: Tuple[Path, Path]) -> Text:
    csv_path, manifest_path = paths
    return Text(f"Curves saved to {csv_path}\nManifest saved to {manifest_path}", style="dim")
