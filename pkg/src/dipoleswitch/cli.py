"""Command-line front end.

Four subcommands: ``sweep`` (full x/kT grids to CSV), ``spectrum`` (print the
eigenvalues at one x), ``point`` (concurrence of chosen pairs at one x and
kT), and ``feasibility`` (laboratory-unit energy scales). Dipole indices are
1-based on the command line and in the CSV output, matching how array sites
are usually numbered; internally everything is 0-based and converted at the
parse boundary.

Exit codes: 0 success, 1 computation or output failure, 2 usage error.
Progress goes to stderr; data goes only to stdout or the output files.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DipoleSwitchError
from .geometry import (
    DipoleGeometry,
    PhysicalParams,
    build_geometry,
    coupling_matrix,
    physical_to_model,
)
from .hamiltonian import build_hamiltonian
from .spectral import beta_from_kt, diagonalize, thermal_state
from .entanglement import concurrence, reduce_to_pair
from .sweep import SweepConfig, emit_csv, run_sweep, transitions_path_for


@dataclass(frozen=True)
class CliInvocation:
    """One parsed command, ready to run."""

    subcommand: str
    sweep_config: Optional[SweepConfig] = None
    geometry: Optional[DipoleGeometry] = None
    x: Optional[float] = None
    kt: Optional[float] = None
    pairs: Optional[tuple[tuple[int, int], ...]] = None
    physical: Optional[PhysicalParams] = None
    out: Optional[str] = None
    verbosity: int = 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dipoleswitch",
        description="Entanglement switch simulator for arrays of trapped dipoles.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_geometry_flags(p):
        p.add_argument(
            "--geometry",
            required=True,
            choices=("chain", "rect", "cubic"),
            help="array kind",
        )
        p.add_argument(
            "--extents",
            required=True,
            help="lattice extents, e.g. 9 or 2,4 or 2,2,2",
        )
        p.add_argument(
            "--field-dir",
            default="0,0,1",
            help="field direction x,y,z, or 'iso' for the all-perpendicular "
            "convention (positive 1/r^3 couplings)",
        )
        p.add_argument("-v", "--verbose", action="count", default=0)

    p_sweep = sub.add_parser("sweep", help="sweep x = omega/Omega and temperature")
    add_geometry_flags(p_sweep)
    p_sweep.add_argument("--x-min", type=float, required=True)
    p_sweep.add_argument("--x-max", type=float, required=True)
    p_sweep.add_argument("--x-step", type=float, required=True)
    p_sweep.add_argument(
        "--kt",
        type=float,
        action="append",
        required=True,
        help="temperature in coupling units; repeatable",
    )
    p_sweep.add_argument(
        "--pairs",
        default="all",
        help="'all' or 1-based pairs like 1:2,1:3",
    )
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument(
        "--no-detect",
        action="store_true",
        help="skip transition detection",
    )
    p_sweep.add_argument("--fidelity-threshold", type=float, default=0.5)
    p_sweep.add_argument("--workers", type=int, default=1)

    p_spec = sub.add_parser("spectrum", help="print all eigenvalues at one x")
    add_geometry_flags(p_spec)
    p_spec.add_argument("--x", type=float, required=True)

    p_point = sub.add_parser("point", help="pair concurrence at one (x, kT)")
    add_geometry_flags(p_point)
    p_point.add_argument("--x", type=float, required=True)
    p_point.add_argument("--kt", type=float, required=True)
    p_point.add_argument("--pairs", default="all", help="'all' or 1-based pairs")

    p_feas = sub.add_parser(
        "feasibility", help="energy scales for laboratory parameters"
    )
    p_feas.add_argument(
        "--dipole", type=float, required=True, help="dipole moment in Debye"
    )
    p_feas.add_argument(
        "--field", type=float, required=True, help="field magnitude in V/m"
    )
    p_feas.add_argument(
        "--spacing", type=float, required=True, help="lattice spacing in meters"
    )
    p_feas.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def parse_args(argv: Sequence[str]) -> CliInvocation:
    """Parse and validate argv into an invocation; exits with code 2 on usage errors."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.subcommand == "feasibility":
        try:
            physical = PhysicalParams(
                dipole_moment=args.dipole,
                field_magnitude=args.field,
                spacing=args.spacing,
            )
        except DipoleSwitchError as exc:
            parser.error(str(exc))
        return CliInvocation(
            subcommand="feasibility", physical=physical, verbosity=args.verbose
        )

    try:
        geometry = build_geometry(
            args.geometry,
            _parse_extents(args.extents),
            _parse_field_dir(args.field_dir),
        )
    except (DipoleSwitchError, ValueError) as exc:
        parser.error(str(exc))

    if args.subcommand == "sweep":
        try:
            config = SweepConfig(
                geometry=geometry,
                x_start=args.x_min,
                x_stop=args.x_max,
                x_step=args.x_step,
                temperatures=tuple(args.kt),
                pairs=_parse_pairs(args.pairs, geometry.n),
                transition_detection=not args.no_detect,
                fidelity_threshold=args.fidelity_threshold,
                workers=args.workers,
            )
        except (DipoleSwitchError, ValueError) as exc:
            parser.error(str(exc))
        return CliInvocation(
            subcommand="sweep",
            sweep_config=config,
            out=args.out,
            verbosity=args.verbose,
        )

    if args.subcommand == "spectrum":
        return CliInvocation(
            subcommand="spectrum", geometry=geometry, x=args.x, verbosity=args.verbose
        )

    # point
    if args.kt < 0:
        parser.error(f"--kt must be >= 0, got {args.kt}")
    try:
        pairs = _parse_pairs(args.pairs, geometry.n)
        if pairs == "all":
            n = geometry.n
            pairs = tuple((i, j) for i in range(n) for j in range(i + 1, n))
    except ValueError as exc:
        parser.error(str(exc))
    return CliInvocation(
        subcommand="point",
        geometry=geometry,
        x=args.x,
        kt=args.kt,
        pairs=pairs,
        verbosity=args.verbose,
    )


def _parse_extents(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"bad --extents value {text!r}") from None


def _parse_field_dir(text: str):
    if text.strip().lower() in ("iso", "none"):
        return None
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"--field-dir needs x,y,z or 'iso', got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise ValueError(f"bad --field-dir value {text!r}") from None


def _parse_pairs(text: str, n: int):
    if text.strip().lower() == "all":
        return "all"
    pairs = []
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) != 2:
            raise ValueError(f"bad pair {part!r}, expected i:j")
        try:
            i, j = int(bits[0]), int(bits[1])
        except ValueError:
            raise ValueError(f"bad pair {part!r}, expected integers i:j") from None
        if i < 1 or j < 1:
            raise ValueError(f"pair indices are 1-based, got {part!r}")
        pairs.append((i - 1, j - 1))
    return tuple(pairs)


def run(invocation: CliInvocation) -> int:
    """Execute a parsed invocation; returns the process exit code."""
    try:
        if invocation.subcommand == "sweep":
            return _run_sweep(invocation)
        if invocation.subcommand == "spectrum":
            return _run_spectrum(invocation)
        if invocation.subcommand == "point":
            return _run_point(invocation)
        return _run_feasibility(invocation)
    except DipoleSwitchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _run_sweep(invocation: CliInvocation) -> int:
    config = invocation.sweep_config
    if invocation.verbosity:
        print(
            f"sweep: {config.geometry.kind}{config.geometry.extents}, "
            f"{config.x_grid().shape[0]} x-points, "
            f"{len(config.temperatures)} temperature(s)",
            file=sys.stderr,
        )
    result = run_sweep(config)
    emit_csv(result, invocation.out)
    if invocation.verbosity:
        print(
            f"sweep: wrote {invocation.out} and {transitions_path_for(invocation.out)}",
            file=sys.stderr,
        )
    return 0


def _run_spectrum(invocation: CliInvocation) -> int:
    couplings = coupling_matrix(invocation.geometry)
    h = build_hamiltonian(couplings, omega=invocation.x, representation="blocked")
    dec = diagonalize(h)
    for value in dec.eigenvalues:
        print(f"{value:.12g}")
    return 0


def _run_point(invocation: CliInvocation) -> int:
    couplings = coupling_matrix(invocation.geometry)
    h = build_hamiltonian(couplings, omega=invocation.x, representation="blocked")
    dec = diagonalize(h)
    state = thermal_state(dec, beta_from_kt(invocation.kt))
    for i, j in invocation.pairs:
        value = concurrence(reduce_to_pair(state, i, j))
        print(f"{i + 1}:{j + 1} {value:.9g}")
    return 0


def _run_feasibility(invocation: CliInvocation) -> int:
    scales = physical_to_model(invocation.physical)
    print(f"transition_energy_J = {scales.transition_energy_j:.6g}")
    print(f"transition_energy_K = {scales.transition_energy_k:.6g}")
    print(f"coupling_energy_J = {scales.coupling_energy_j:.6g}")
    print(f"coupling_energy_K = {scales.coupling_energy_k:.6g}")
    print(f"omega_over_Omega = {scales.ratio:.6g}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        invocation = parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    return run(invocation)


if __name__ == "__main__":
    sys.exit(main())
