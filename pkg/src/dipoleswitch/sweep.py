"""Sweeps over the switch ratio and temperature, with transition detection.

A sweep walks a uniform grid in x = omega/Omega. Each grid point is
diagonalized once and the spectrum shared by every temperature, after which
pair reductions and concurrences are batch-evaluated by the kernels. Sweep
points are independent; with ``workers > 1`` they run on a thread pool
(LAPACK releases the GIL) and results are assembled by grid index, so the
output is deterministic regardless of scheduling.

Transitions are located by scanning the overlap of ground spaces at adjacent
grid points and refining each drop by bisection on the change of the
ground-level ordering, down to an interval of 1e-6. Concurrence jumps above
0.05 between adjacent grid points are recorded as secondary annotations.
"""

from __future__ import annotations

import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from . import kernels
from .entanglement import WEIGHT_CUTOFF
from .errors import InvalidConfigError, OutputError
from .geometry import DipoleGeometry, coupling_matrix
from .hamiltonian import build_hamiltonian
from .spectral import beta_from_kt, diagonalize, thermal_state

ROW_DTYPE = np.dtype(
    [("x", "f8"), ("kt", "f8"), ("i", "i4"), ("j", "i4"), ("concurrence", "f8")]
)

#: Adjacent-point concurrence step reported as a "jump" annotation.
JUMP_THRESHOLD = 0.05

#: Bisection stops once the bracketing interval is this narrow.
REFINE_TOL = 1e-6

CSV_HEADER = b"x,kT,i,j,concurrence\n"
TRANSITIONS_HEADER = b"x_star,kT,kind\n"


class Transition(NamedTuple):
    """A detected feature of the sweep: refined crossing, jump or flagged region."""

    x_star: float
    kt: float
    kind: str


@dataclass(frozen=True)
class SweepConfig:
    """Validated description of one sweep.

    ``pairs`` is either ``"all"`` or an explicit list of 0-based index pairs;
    pairs are normalized to (low, high) and deduplicated. Temperatures are in
    units of the reference coupling; 0 means the exact ground state and is
    handled as beta = inf.
    """

    geometry: DipoleGeometry
    x_start: float = 0.0
    x_stop: float = 2.0
    x_step: float = 1e-3
    temperatures: tuple[float, ...] = (1e-4,)
    pairs: Union[str, tuple[tuple[int, int], ...]] = "all"
    transition_detection: bool = True
    fidelity_threshold: float = 0.5
    workers: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.x_step) and self.x_step > 0.0):
            raise InvalidConfigError(f"x_step must be > 0, got {self.x_step}")
        if not self.x_start < self.x_stop:
            raise InvalidConfigError(
                f"need x_start < x_stop, got [{self.x_start}, {self.x_stop}]"
            )
        temps = tuple(float(t) for t in self.temperatures)
        if not temps:
            raise InvalidConfigError("at least one temperature is required")
        for t in temps:
            if math.isnan(t) or t < 0.0:
                raise InvalidConfigError(f"temperatures must be >= 0, got {t}")
        object.__setattr__(self, "temperatures", tuple(sorted(set(temps))))
        if not 0.0 < self.fidelity_threshold <= 1.0:
            raise InvalidConfigError("fidelity_threshold must be in (0, 1]")
        if self.workers < 1:
            raise InvalidConfigError("workers must be >= 1")
        n = self.geometry.n
        if self.pairs != "all":
            normalized = sorted(
                {(min(i, j), max(i, j)) for i, j in self.pairs}
            )
            if not normalized:
                raise InvalidConfigError("pair list must not be empty")
            for i, j in normalized:
                if i == j or not (0 <= i < n and 0 <= j < n):
                    raise InvalidConfigError(
                        f"pair ({i}, {j}) invalid for {n} dipoles"
                    )
            object.__setattr__(self, "pairs", tuple(normalized))

    def x_grid(self) -> np.ndarray:
        count = int(math.floor((self.x_stop - self.x_start) / self.x_step + 1e-9)) + 1
        return self.x_start + self.x_step * np.arange(count)

    def resolved_pairs(self) -> tuple[tuple[int, int], ...]:
        if self.pairs == "all":
            n = self.geometry.n
            return tuple((i, j) for i in range(n) for j in range(i + 1, n))
        return self.pairs


@dataclass(frozen=True)
class SweepResult:
    """Structured concurrence records plus detected transitions.

    ``rows`` is a structured array with fields x, kt, i, j, concurrence,
    sorted by (kt, x, i, j) with 0-based indices; the CSV renderer converts
    indices to the 1-based labels used everywhere on the user surface.
    """

    rows: np.ndarray
    transitions: tuple[Transition, ...]

    def series(self, kt: float, pair: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
        """(x values, concurrences) for one temperature and 0-based pair."""
        lo, hi = min(pair), max(pair)
        sel = (self.rows["kt"] == kt) & (self.rows["i"] == lo) & (self.rows["j"] == hi)
        picked = self.rows[sel]
        return picked["x"].copy(), picked["concurrence"].copy()


class _GroundInfo(NamedTuple):
    sectors: frozenset
    basis: np.ndarray  # (dim, multiplicity)


def run_sweep(config: SweepConfig) -> SweepResult:
    """Evaluate pairwise concurrence on the configured (x, kT) grid.

    Each x is diagonalized exactly once; thermal states for every requested
    temperature reuse that spectrum. Rows come out sorted by (kT, x, i, j).
    """
    pairs = config.resolved_pairs()
    if not pairs:
        raise InvalidConfigError("geometry has no pairs to evaluate")
    couplings = coupling_matrix(config.geometry)
    xs = config.x_grid()
    temps = config.temperatures
    betas = [beta_from_kt(t) for t in temps]

    def solve(x: float) -> tuple[np.ndarray, _GroundInfo]:
        h = build_hamiltonian(couplings, omega=float(x), representation="blocked")
        dec = diagonalize(h)
        conc = np.empty((len(temps), len(pairs)))
        for ti, beta in enumerate(betas):
            state = thermal_state(dec, beta)
            kept = state.kept_indices(WEIGHT_CUTOFF)
            weights = state.weights[kept]
            weights = weights / weights.sum()
            conc[ti] = kernels.concurrence_batch(
                _reduced_pair_batch(dec, kept, weights, pairs)
            )
        ground = dec.ground_indices()
        info = _GroundInfo(
            sectors=frozenset(int(s) for s in dec.sector_labels[ground]),
            basis=dec.eigenvectors_full(ground).T,
        )
        return conc, info

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            solved = list(pool.map(solve, xs))
    else:
        solved = [solve(float(x)) for x in xs]
    conc_grid = np.stack([c for c, _ in solved])  # (n_x, n_temps, n_pairs)
    infos = [g for _, g in solved]

    rows = np.empty(len(temps) * len(xs) * len(pairs), dtype=ROW_DTYPE)
    pos = 0
    for ti, kt in enumerate(temps):
        for xi, x in enumerate(xs):
            for pi, (i, j) in enumerate(pairs):
                rows[pos] = (x, kt, i, j, conc_grid[xi, ti, pi])
                pos += 1

    transitions: list[Transition] = []
    if config.transition_detection:
        probe = _make_probe(couplings)
        crossings, regions = _scan_transitions(
            xs, config.fidelity_threshold, probe, infos=infos
        )
        for kt in temps:
            for x_star in crossings:
                transitions.append(Transition(x_star, kt, "crossing"))
            for lo, hi in regions:
                transitions.append(Transition(lo, kt, "degenerate-start"))
                transitions.append(Transition(hi, kt, "degenerate-end"))
        for ti, kt in enumerate(temps):
            jump_xs = set()
            for pi in range(len(pairs)):
                series = conc_grid[:, ti, pi]
                steps = np.abs(np.diff(series))
                for t in np.nonzero(steps > JUMP_THRESHOLD)[0]:
                    jump_xs.add(0.5 * (float(xs[t]) + float(xs[t + 1])))
            for x_mid in sorted(jump_xs):
                transitions.append(Transition(x_mid, kt, "jump"))
        transitions.sort(key=lambda tr: (tr.kt, tr.x_star, tr.kind))

    return SweepResult(rows=rows, transitions=tuple(transitions))


def detect_transitions(
    geometry: DipoleGeometry,
    kt: float,
    x_range: tuple[float, float, float],
    fidelity_threshold: float = 0.5,
) -> list[float]:
    """Refined level-crossing positions of the ground state over ``x_range``.

    ``x_range`` is (start, stop, step). The scan compares ground spaces at
    adjacent grid points and refines every detected change by bisection to an
    interval below 1e-6. Crossings are properties of the spectrum alone, so
    ``kt`` only labels the request; intervals where the ground space stays
    degenerate are excluded from the returned points (run_sweep reports them
    as flagged regions).
    """
    start, stop, step = x_range
    config = SweepConfig(
        geometry=geometry,
        x_start=start,
        x_stop=stop,
        x_step=step,
        temperatures=(float(kt),),
        pairs="all",
        fidelity_threshold=fidelity_threshold,
    )
    couplings = coupling_matrix(geometry)
    crossings, _ = _scan_transitions(
        config.x_grid(), config.fidelity_threshold, _make_probe(couplings)
    )
    return crossings


def _make_probe(couplings) -> Callable[[float], _GroundInfo]:
    def probe(x: float) -> _GroundInfo:
        h = build_hamiltonian(couplings, omega=float(x), representation="blocked")
        dec = diagonalize(h)
        ground = dec.ground_indices()
        return _GroundInfo(
            sectors=frozenset(int(s) for s in dec.sector_labels[ground]),
            basis=dec.eigenvectors_full(ground).T,
        )

    return probe


def _changed(a: _GroundInfo, b: _GroundInfo, threshold: float) -> bool:
    """Whether the ground space differs between two probes.

    Uses the smallest principal overlap between the two ground subspaces, so
    basis rotations inside a degenerate multiplet do not count as change.
    """
    if a.sectors != b.sectors:
        return True
    if a.basis.shape[1] != b.basis.shape[1]:
        return True
    overlaps = np.linalg.svd(a.basis.T @ b.basis, compute_uv=False)
    return bool(overlaps.min() < threshold)


def _scan_transitions(
    xs: np.ndarray,
    threshold: float,
    probe: Callable[[float], _GroundInfo],
    infos: Optional[Sequence[_GroundInfo]] = None,
) -> tuple[list[float], list[tuple[float, float]]]:
    if infos is None:
        infos = [probe(float(x)) for x in xs]
    crossings: list[float] = []
    regions: list[tuple[float, float]] = []
    for t in range(len(xs) - 1):
        if _changed(infos[t], infos[t + 1], threshold):
            x_star, region = _refine(
                float(xs[t]), float(xs[t + 1]), infos[t], infos[t + 1], threshold, probe
            )
            if region is not None:
                regions.append(region)
            elif not crossings or abs(x_star - crossings[-1]) > 2.0 * REFINE_TOL:
                crossings.append(x_star)
    return crossings, regions


def _refine(
    lo: float,
    hi: float,
    info_lo: _GroundInfo,
    info_hi: _GroundInfo,
    threshold: float,
    probe: Callable[[float], _GroundInfo],
) -> tuple[Optional[float], Optional[tuple[float, float]]]:
    """Bisect a bracketing interval down to REFINE_TOL.

    Returns (crossing, None) normally, or (None, (lo, hi)) when the ground
    space is degenerate across the interval and no ordering change can be
    localized."""
    while hi - lo > REFINE_TOL:
        mid = 0.5 * (lo + hi)
        info_mid = probe(mid)
        left = _changed(info_lo, info_mid, threshold)
        right = _changed(info_mid, info_hi, threshold)
        if left:
            hi, info_hi = mid, info_mid
        elif right:
            lo, info_lo = mid, info_mid
        else:
            if info_lo.basis.shape[1] > 1 or info_hi.basis.shape[1] > 1:
                return None, (lo, hi)
            # change seen across [lo, hi] but in neither half: give up on the
            # left half; an isolated crossing cannot hide there
            lo, info_lo = mid, info_mid
    return 0.5 * (lo + hi), None


def render_csv(result: SweepResult) -> bytes:
    """Data stream: header plus one record per row, 9 significant digits."""
    lines = [CSV_HEADER]
    for row in result.rows:
        lines.append(
            f"{row['x']:.9g},{row['kt']:.9g},{row['i'] + 1},{row['j'] + 1},"
            f"{row['concurrence']:.9g}\n".encode()
        )
    return b"".join(lines)


def render_transitions_csv(result: SweepResult) -> bytes:
    """Transitions stream for the sibling file."""
    lines = [TRANSITIONS_HEADER]
    for tr in result.transitions:
        lines.append(f"{tr.x_star:.9g},{tr.kt:.9g},{tr.kind}\n".encode())
    return b"".join(lines)


def transitions_path_for(destination: Union[str, os.PathLike]) -> Path:
    """Sibling path of a data CSV, e.g. fig1.csv -> fig1.transitions.csv."""
    path = Path(destination)
    return path.with_name(path.stem + ".transitions" + (path.suffix or ".csv"))


def emit_csv(
    result: SweepResult,
    destination,
    transitions_destination=None,
) -> bytes:
    """Serialize a sweep to CSV and return the data stream bytes.

    ``destination`` may be a path or a binary file-like object. For a path,
    the file is written atomically (temp file + rename) and the transitions
    stream goes to the sibling path unless ``transitions_destination`` says
    otherwise; for a file-like destination the transitions are only written
    when an explicit ``transitions_destination`` is provided.
    """
    data = render_csv(result)
    trans = render_transitions_csv(result)
    if hasattr(destination, "write"):
        destination.write(data)
    else:
        _atomic_write(Path(destination), data)
        if transitions_destination is None:
            transitions_destination = transitions_path_for(destination)
    if transitions_destination is not None:
        if hasattr(transitions_destination, "write"):
            transitions_destination.write(trans)
        else:
            _atomic_write(Path(transitions_destination), trans)
    return data


def _reduced_pair_batch(dec, kept, weights, pairs) -> np.ndarray:
    """(n_pairs, 4, 4) reduced density matrices of a Gibbs mixture."""
    rhos = np.zeros((len(pairs), 4, 4))
    chunk = max(1, (1 << 22) // dec.dim)
    for start in range(0, kept.shape[0], chunk):
        sel = kept[start : start + chunk]
        vectors = dec.eigenvectors_full(sel)
        chunk_w = weights[start : start + chunk]
        for pi, (i, j) in enumerate(pairs):
            rhos[pi] += kernels.pair_rho(vectors, chunk_w, i, j)
    return rhos


def _atomic_write(path: Path, data: bytes) -> None:
    parent = path.parent if str(path.parent) else Path(".")
    try:
        fd, tmp = tempfile.mkstemp(dir=parent, prefix=path.name + ".", suffix=".tmp")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise OutputError(f"cannot write {path}: {exc}") from exc
