"""Command-line entry points: ``simulate`` and ``summarize``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import presets
from .boats import boats_from_spec
from .config import SimConfig, load_config, validate_config
from .engine import run, write_run
from .errors import AllZeroVideo, ConfigError, InputFileError, MissingLog, ShipTrackError
from .metrics import format_summary, summarize_run
from .render import read_pgm
from .wind import wind_from_spec

EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_RUNTIME = 4

log = logging.getLogger("shiptracks")


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simulate",
                                description="Simulate ship-track packets, observations and frames.")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="flat TOML config file")
    src.add_argument("--preset", choices=sorted(presets.PRESETS), help="built-in scenario")
    p.add_argument("--seed", type=_seed, help="master seed (overrides the config)")
    p.add_argument("--out", type=Path, default=Path("run"), help="output directory")
    p.add_argument("--frames", action=argparse.BooleanOptionalAction, default=True,
                   help="write PGM frames (default: yes)")
    p.add_argument("--format", choices=["pgm"], default="pgm", help="frame format")
    p.add_argument("--wind", help="wind spec: paper_circular[:cw], uniform:U,V or a CSV path")
    p.add_argument("--boats", nargs="+", help="boat preset names and/or waypoint CSV paths")
    p.add_argument("--background", type=Path, help="grayscale PGM advected with the wind")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve(args) -> tuple[SimConfig, object, list, object]:
    """Turn parsed flags into ``(config, wind, boats, background)``."""
    if args.preset:
        cfg, wind, boats = presets.PRESETS[args.preset]()
        inputs = {}
    elif args.config:
        cfg, inputs = load_config(args.config)
        wind = boats = None
    else:
        raise InputFileError("one of --config or --preset is required")
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    cfg = validate_config(cfg)
    wind_spec = args.wind or inputs.get("wind")
    if wind_spec is not None or wind is None:
        wind = wind_from_spec(wind_spec or "paper_circular", cfg.n_frames, cfg.dt)
    boat_spec = args.boats or inputs.get("boats")
    if boat_spec is not None or boats is None:
        boats = boats_from_spec(boat_spec or ["paper_red", "paper_blue", "paper_purple", "paper_yellow"],
                                cfg.n_frames, cfg.dt)
    bg_path = args.background or inputs.get("background")
    background = read_pgm(bg_path) if bg_path else None
    return cfg, wind, boats, background


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg, wind, boats, background = resolve(args)
    except ConfigError as exc:
        for v in exc.violations:
            print(f"config error {v.code} ({v.field}): {v.message}", file=sys.stderr)
        return EXIT_CONFIG
    except InputFileError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        result = run(cfg, wind, boats, background=background, strict=False)
        write_run(result, args.out, frames=args.frames)
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ShipTrackError, ValueError) as exc:
        print(f"runtime error {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if not result.max_intensity > 0:
        print(f"runtime error {AllZeroVideo.__name__}: nothing visible in any frame; "
              f"logs written to {args.out}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"wrote {cfg.n_frames} frames, {len(result.tracks)} tracks to {args.out}")
    return 0


def summarize_main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="summarize", description="Report metrics for a run directory.")
    p.add_argument("run_dir", type=Path)
    p.add_argument("--json", action="store_true", help="print JSON instead of text")
    p.add_argument("--bin-width", type=float, default=1.0, help="age bin width in hours")
    args = p.parse_args(argv)
    try:
        summary = summarize_run(args.run_dir, args.bin_width)
    except MissingLog as exc:
        print(f"error MissingLog: {exc}", file=sys.stderr)
        return EXIT_INPUT
    (args.run_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(json.dumps(summary, indent=2) if args.json else format_summary(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
