"""Command-line front end: simulate, table1, fig10, and sweep subcommands.

Every command writes its data files plus a ``run_manifest.txt`` describing
the run. Data files are byte-identical across reruns with the same config
and seed; the manifest is excluded from that guarantee because it records
wall time.
"""

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .config import build_scenario, format_config, parse_config
from .constants import (
    DEFAULT_SEPARATIONS_M,
    DEFAULT_SWEEP_TRIALS,
    PAPER_CHANNEL_COUNTS,
)
from .errors import ConfigError, EmptyResultError, ParameterError, PipelineError
from .experiments import (
    monte_carlo_error,
    resolution_sweep,
    run_scenario_detailed,
    write_error_csv,
    write_resolution_csv,
)
from .ifft_detector import METHODS, RangeProfile
from .serialize import (
    write_profile_csv,
    write_pseudospectrum_csv,
    write_result_record,
    write_table_csv,
)

MANIFEST_NAME = "run_manifest.txt"


@dataclass
class RunManifest:
    """What a command produced and how it was configured."""

    config_snapshot: dict
    artifact_version: str
    output_paths: list = field(default_factory=list)
    wall_time_s: float = 0.0


def _write_manifest(out_dir: Path, manifest: RunManifest) -> Path:
    path = out_dir / MANIFEST_NAME
    lines = [f"artifact_version = {manifest.artifact_version}"]
    lines.append(f"wall_time_s = {manifest.wall_time_s!r}")
    for out in manifest.output_paths:
        lines.append(f"output = {out}")
    snapshot = format_config(manifest.config_snapshot)
    lines.append("[config]")
    lines.append(snapshot.rstrip("\n"))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _prepare_out_dir(out_dir) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_simulate(config_path, out_dir) -> RunManifest:
    """Run one configured scenario; write the detection curve and result."""
    started = time.perf_counter()
    out = _prepare_out_dir(out_dir)
    values = parse_config(config_path)
    cfg = build_scenario(values)
    result, curve = run_scenario_detailed(cfg)

    outputs = []
    if isinstance(curve, RangeProfile):
        curve_path = out / "profile.csv"
        write_profile_csv(curve_path, curve)
    else:
        curve_path = out / "pseudospectrum.csv"
        write_pseudospectrum_csv(curve_path, curve, result.metadata["music_bin_spacing_hz"])
    outputs.append(str(curve_path))

    result_path = out / "result.txt"
    write_result_record(result_path, result)
    outputs.append(str(result_path))

    manifest = RunManifest(
        config_snapshot=values,
        artifact_version=__version__,
        output_paths=outputs,
        wall_time_s=time.perf_counter() - started,
    )
    _write_manifest(out, manifest)
    return manifest


def _table_rows(rows: list) -> list:
    by_cell = {(r.channel_count, r.method): r for r in rows}
    channels = sorted({r.channel_count for r in rows})
    table = []
    for c in channels:
        ifft_res = by_cell[(c, "IFFT")].min_resolved_separation_m
        music_res = by_cell[(c, "MUSIC")].min_resolved_separation_m
        improvement = 100.0 * ifft_res / music_res if music_res > 0 else float("nan")
        table.append((c, ifft_res, music_res, improvement))
    return table


def cmd_table1(
    out_dir,
    channels=PAPER_CHANNEL_COUNTS,
    trials=DEFAULT_SWEEP_TRIALS,
    base_seed=0,
    separations_m=DEFAULT_SEPARATIONS_M,
    **scenario_overrides,
) -> RunManifest:
    """Reproduce the per-channel resolution table for both methods."""
    started = time.perf_counter()
    out = _prepare_out_dir(out_dir)

    rows = resolution_sweep(
        list(channels), list(METHODS), list(separations_m), trials, base_seed,
        **scenario_overrides,
    )
    resolution_path = out / "resolution.csv"
    write_resolution_csv(resolution_path, rows)
    table_path = out / "table1.csv"
    write_table_csv(table_path, _table_rows(rows))

    manifest = RunManifest(
        config_snapshot={
            "channels": ",".join(str(c) for c in channels),
            "trials": trials,
            "seed": base_seed,
            "separations_m": ",".join(format(s, ".12g") for s in separations_m),
        },
        artifact_version=__version__,
        output_paths=[str(resolution_path), str(table_path)],
        wall_time_s=time.perf_counter() - started,
    )
    _write_manifest(out, manifest)
    return manifest


def cmd_fig10(
    iterations, out_dir, base_seed=0, channels=PAPER_CHANNEL_COUNTS, **scenario_overrides
) -> RunManifest:
    """Monte Carlo error-percentage curves for both methods."""
    if iterations < 1:
        raise ParameterError("iterations must be >= 1")
    started = time.perf_counter()
    out = _prepare_out_dir(out_dir)

    points = monte_carlo_error(
        list(channels), list(METHODS), iterations, base_seed, **scenario_overrides
    )
    curve_path = out / "error_curve.csv"
    write_error_csv(curve_path, points)

    snapshot = {
        "iterations": iterations,
        "seed": base_seed,
        "channels": ",".join(str(c) for c in channels),
    }
    if iterations < 10:
        snapshot["low_confidence"] = True
    manifest = RunManifest(
        config_snapshot=snapshot,
        artifact_version=__version__,
        output_paths=[str(curve_path)],
        wall_time_s=time.perf_counter() - started,
    )
    _write_manifest(out, manifest)
    return manifest


def cmd_sweep(
    out_dir,
    channels=PAPER_CHANNEL_COUNTS,
    methods=METHODS,
    separations_m=DEFAULT_SEPARATIONS_M,
    trials=DEFAULT_SWEEP_TRIALS,
    base_seed=0,
    **scenario_overrides,
) -> RunManifest:
    """Resolution sweep without the table aggregation."""
    started = time.perf_counter()
    out = _prepare_out_dir(out_dir)
    rows = resolution_sweep(
        list(channels), list(methods), list(separations_m), trials, base_seed,
        **scenario_overrides,
    )
    resolution_path = out / "resolution.csv"
    write_resolution_csv(resolution_path, rows)
    manifest = RunManifest(
        config_snapshot={
            "channels": ",".join(str(c) for c in channels),
            "methods": ",".join(methods),
            "trials": trials,
            "seed": base_seed,
            "separations_m": ",".join(format(s, ".12g") for s in separations_m),
        },
        artifact_version=__version__,
        output_paths=[str(resolution_path)],
        wall_time_s=time.perf_counter() - started,
    )
    _write_manifest(out, manifest)
    return manifest


def _int_list(text: str) -> list:
    return [int(t) for t in text.split(",") if t.strip()]


def _float_list(text: str) -> list:
    return [float(t) for t in text.split(",") if t.strip()]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fmradar",
        description="FM passive-radar delay-resolution simulator (IFFT and MUSIC detectors)",
    )
    parser.add_argument("--version", action="version", version=f"fmradar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one scenario from a config file")
    p_sim.add_argument("--config", required=True, help="path to key=value config file")
    p_sim.add_argument("--out", required=True, help="output directory")

    p_table = sub.add_parser("table1", help="resolution table over channel counts")
    p_table.add_argument("--out", required=True)
    p_table.add_argument("--channels", type=_int_list, default=list(PAPER_CHANNEL_COUNTS))
    p_table.add_argument("--trials", type=int, default=DEFAULT_SWEEP_TRIALS)
    p_table.add_argument("--seed", type=int, default=0)
    p_table.add_argument("--separations", type=_float_list, default=list(DEFAULT_SEPARATIONS_M))

    p_fig = sub.add_parser("fig10", help="Monte Carlo delay-error curves")
    p_fig.add_argument("--iterations", type=int, required=True)
    p_fig.add_argument("--out", required=True)
    p_fig.add_argument("--seed", type=int, default=0)
    p_fig.add_argument("--channels", type=_int_list, default=list(PAPER_CHANNEL_COUNTS))

    p_sweep = sub.add_parser("sweep", help="raw resolve-rate sweep")
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--channels", type=_int_list, default=list(PAPER_CHANNEL_COUNTS))
    p_sweep.add_argument("--methods", default="IFFT,MUSIC")
    p_sweep.add_argument("--separations", type=_float_list, default=list(DEFAULT_SEPARATIONS_M))
    p_sweep.add_argument("--trials", type=int, default=DEFAULT_SWEEP_TRIALS)
    p_sweep.add_argument("--seed", type=int, default=0)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            cmd_simulate(args.config, args.out)
        elif args.command == "table1":
            cmd_table1(
                args.out,
                channels=args.channels,
                trials=args.trials,
                base_seed=args.seed,
                separations_m=args.separations,
            )
        elif args.command == "fig10":
            cmd_fig10(args.iterations, args.out, base_seed=args.seed, channels=args.channels)
        elif args.command == "sweep":
            cmd_sweep(
                args.out,
                channels=args.channels,
                methods=[m.strip().upper() for m in args.methods.split(",")],
                separations_m=args.separations,
                trials=args.trials,
                base_seed=args.seed,
            )
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except (ParameterError, EmptyResultError) as exc:
        print(f"error: parameter: {exc}", file=sys.stderr)
        return 2
    except PipelineError as exc:
        print(f"error: pipeline: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
