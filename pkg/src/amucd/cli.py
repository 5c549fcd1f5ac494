"""Batch driver: ``amucd --signal f.json --out results/``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import io
from .errors import (
    AllCandidatesDependent,
    BandViolation,
    LinearDependence,
    MultiplicityError,
    NumericalConsistencyError,
    ParseError,
    SchemaError,
)
from .greedy import (
    CandidateGrid,
    StoppingRule,
    decompose,
    default_grid,
    parse_grid_spec,
    project_fixed_points,
)
from .rkhs import SpaceModel

log = logging.getLogger("amucd")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_NUMERICAL = 4
EXIT_DEPENDENCE = 5


@dataclass
class RunConfig:
    signal: Path
    out: Path
    space: str | None = None
    h: float | None = None
    mode: str = "adaptive"
    grid: str | None = None
    points: Path | None = None
    stop: StoppingRule = field(default_factory=StoppingRule)
    formats: tuple = ("json", "csv")
    refine: bool = True
    threads: int | None = None


def _resolve_space(cfg: RunConfig, signal_space: SpaceModel) -> SpaceModel:
    if cfg.space is not None and cfg.space != signal_space.kind:
        raise SchemaError(f"--space {cfg.space} conflicts with the signal's space {signal_space.kind}")
    if cfg.h is not None and (signal_space.is_hardy or cfg.h != signal_space.h):
        raise SchemaError(f"--h {cfg.h} conflicts with the signal spec")
    return signal_space


def _grid_for(cfg: RunConfig, space: SpaceModel) -> CandidateGrid:
    if cfg.grid is None:
        return default_grid(space)
    try:
        grid = parse_grid_spec(cfg.grid)
    except ValueError as exc:
        raise SchemaError(f"--grid: {exc}") from exc
    if (grid.kind == "rect") == space.is_hardy:
        raise SchemaError(f"--grid {cfg.grid!r} does not fit the {space.kind} space")
    return grid


def run(cfg: RunConfig) -> int:
    """Run one decomposition and write its reports; returns the exit status."""
    try:
        signal = io.parse_signal_spec(cfg.signal)
        space = _resolve_space(cfg, signal.space)
        if cfg.mode == "fixed":
            if cfg.points is None:
                raise SchemaError("--mode fixed requires --points")
            elements = io.parse_points_file(cfg.points)
            grid = None
        elif cfg.mode == "adaptive":
            grid = _grid_for(cfg, space)
        else:
            raise SchemaError(f"unknown mode {cfg.mode!r}")
    except (ParseError, SchemaError, BandViolation, MultiplicityError) as exc:
        log.error("%s", exc)
        return EXIT_PARSE

    try:
        if grid is None:
            d = project_fixed_points(space, signal, elements)
        else:
            d = decompose(space, signal, grid, cfg.stop, refine_grid=cfg.refine, threads=cfg.threads)
    except (LinearDependence, AllCandidatesDependent) as exc:
        log.error("%s", exc)
        return EXIT_DEPENDENCE
    except NumericalConsistencyError as exc:
        log.error("%s", exc)
        return EXIT_NUMERICAL
    except MultiplicityError as exc:
        log.error("%s", exc)
        return EXIT_PARSE

    cfg.out.mkdir(parents=True, exist_ok=True)
    if "json" in cfg.formats:
        io.write_decomposition(cfg.out / "decomposition.json", d)
    if "csv" in cfg.formats:
        (cfg.out / "iterations.csv").write_text(io.iteration_csv(d))
    summary = {
        "space": space.kind,
        "h": None if space.is_hardy else space.h,
        "mode": cfg.mode,
        "status": d.status,
        "iterations": len(d.elements),
        "norm_sq_f": d.norm_sq_f,
        "residual_energy": d.residual_energy,
        "relative_residual": d.relative_residual,
    }
    (cfg.out / "summary.json").write_text(io.dumps(summary))
    log.info("%s: %d element(s), relative residual %.3e", d.status, len(d.elements), d.relative_residual)
    if d.status == "all_candidates_dependent":
        return EXIT_DEPENDENCE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="amucd",
        description="Greedy sparse decomposition in Hardy and Paley-Wiener spaces.",
    )
    p.add_argument("--signal", required=True, type=Path, help="SignalSpec JSON file")
    p.add_argument("--out", required=True, type=Path, help="output directory")
    p.add_argument("--space", choices=["hardy", "pw"], help="must match the signal file")
    p.add_argument("--h", type=float, help="Paley-Wiener sampling step (must match the signal)")
    p.add_argument("--mode", choices=["adaptive", "fixed"], default="adaptive")
    p.add_argument("--grid", help='"radial:64,angular:128,rmax:0.995" or "rect:8,8,step:0.125"')
    p.add_argument("--points", type=Path, help="element list for --mode fixed")
    p.add_argument("--iters", type=int, default=25)
    p.add_argument("--energy-tol", type=float, default=1e-12)
    p.add_argument("--stagnation-tol", type=float, default=0.0)
    p.add_argument("--format", default="json,csv", help="comma-separated subset of json,csv")
    p.add_argument("--no-refine", action="store_true", help="skip local grid refinement")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    formats = tuple(s.strip() for s in args.format.split(",") if s.strip())
    if not set(formats) <= {"json", "csv"}:
        log.error("--format accepts json and/or csv")
        return EXIT_USAGE
    try:
        stop = StoppingRule(args.iters, args.energy_tol, args.stagnation_tol)
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    cfg = RunConfig(
        signal=args.signal, out=args.out, space=args.space, h=args.h, mode=args.mode,
        grid=args.grid, points=args.points, stop=stop, formats=formats,
        refine=not args.no_refine,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
