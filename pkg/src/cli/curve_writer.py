"""
CSV and manifest emission for simulated curves.
"""

from pathlib import Path
from typing import List, TextIO, Tuple, Union

import pandas as pd

from ..schemas.sim_schemas import CurveEstimate, RunManifest
from ..simulation.config import MANIFEST_HEADER, config_to_lines
from ..simulation.engine import THROUGHPUT_FORMULA
from ..simulation.lora_params import PACKET_BYTES

CSV_COLUMNS = [
    'distance_km',
    'p_h1',
    'p_h1_ci',
    'p_h2',
    'p_h2_ci',
    'p_success',
    'p_success_ci',
    'trials',
    'sf',
    'throughput_bps',
]


def curve_frame(result: CurveEstimate) -> pd.DataFrame:
    """One row per distance bin, columns in CSV order."""
    rows = [{column: getattr(b, column) for column in CSV_COLUMNS} for b in result.bins]
    frame = pd.DataFrame(rows, columns=CSV_COLUMNS)
    return frame.astype({'trials': 'int64', 'sf': 'int64'})


def emit_curves(result: CurveEstimate, destination: TextIO) -> None:
    """
    Write the curve as CSV.

    Probabilities, half-widths, distances and throughput use fixed
    6-decimal notation; trial counts and SFs are plain integers.
    """
    curve_frame(result).to_csv(destination, index=False, float_format='%.6f', lineterminator='\n')


def _join(values) -> str:
    return ','.join(repr(float(v)) if isinstance(v, float) else str(v) for v in values)


def manifest_lines(manifest: RunManifest, result: CurveEstimate) -> List[str]:
    """Manifest in the configuration grammar; behind the header line, result-only keys are skipped when re-parsed."""
    lines = [MANIFEST_HEADER, *config_to_lines(manifest.config)]
    lines += [
        f"version = {manifest.version}",
        f"channel = {manifest.channel}",
        f"duration_s = {manifest.duration_s:.3f}",
        f"trials_per_bin = {_join(manifest.trials_per_bin)}",
        f"no_gateway_trials = {manifest.no_gateway_trials}",
        f"packet_bytes = {PACKET_BYTES}",
        f"throughput_formula = {THROUGHPUT_FORMULA}",
        f"sf_boundaries_resolved = {_join(result.boundaries.d)}",
        f"analytic_h1 = {_join(b.analytic_h1 for b in result.bins)}",
    ]
    coverage = manifest.coverage
    if coverage is not None:
        lines += [
            f"coverage_trials = {coverage.trials}",
            f"coverage_p_h1 = {coverage.p_h1!r}",
            f"coverage_p_h2 = {coverage.p_h2!r}",
            f"coverage_p_success = {coverage.p_success!r}",
            f"coverage_p_success_ci = {coverage.p_success_ci!r}",
            f"coverage_no_gateway = {coverage.no_gateway}",
            f"coverage_mean_throughput_bps = {coverage.mean_throughput_bps!r}",
        ]
    return lines


def write_run(out_dir: Union[str, Path], result: CurveEstimate, manifest: RunManifest) -> Tuple[Path, Path]:
    """
    Write `<channel>_curves.csv` and `<channel>_manifest.txt` into `out_dir`.

    Returns:
        Tuple[Path, Path]: CSV path and manifest path

    Raises:
        OSError: If either file cannot be written; both files are removed first
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{manifest.channel}_curves.csv"
    manifest_path = out_dir / f"{manifest.channel}_manifest.txt"
    try:
        with open(csv_path, 'w', encoding='utf-8', newline='') as f:
            emit_curves(result, f)
        with open(manifest_path, 'w', encoding='utf-8') as f:
            f.write('\n'.join(manifest_lines(manifest, result)) + '\n')
    except OSError:
        remove_outputs([csv_path, manifest_path])
        raise
    return csv_path, manifest_path


def remove_outputs(paths: List[Path]) -> None:
    for path in paths:
        Path(path).unlink(missing_ok=True)
