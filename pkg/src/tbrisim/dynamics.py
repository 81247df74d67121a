"""Exact time evolution of an initially excited basis state.

All dynamics are evaluated spectrally: with row i of the eigenvector matrix
written as c_k = C_i(k), the amplitude on basis state f at time t is

    A_f(t) = sum_k c_k C_f(k) exp(-i E_k t)        (hbar = 1),

so every quantity is exact at any t with no step-size error.  Occupation
numbers, the survival probability W0, cascade-class populations and the
diagonal-ensemble (infinite-time) occupations all derive from these
amplitudes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .basis import Basis, ClassPartition, occupancy_matrix
from .exceptions import ParameterError, PreconditionError
from .spectral import EigenDecomposition

UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class TimeGrid:
    """Ascending, non-negative times in units of inverse energy."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.size and (pts[0] < 0 or np.any(np.diff(pts) <= 0)):
            raise ParameterError("time grid must be non-negative and strictly increasing")

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class AmplitudeFrame:
    """Complex amplitudes over the whole basis at one time."""

    t: float
    amplitudes: np.ndarray


@dataclass(frozen=True)
class OccupationTrajectory:
    """Occupations n_alpha(t), survival W0(t) and class populations W_s(t)."""

    grid: TimeGrid
    occupations: np.ndarray      # (m, T)
    w0: np.ndarray               # (T,)
    class_populations: np.ndarray  # (n_classes + 1, T)


def _times(grid) -> np.ndarray:
    return np.asarray(getattr(grid, "points", grid), dtype=float)


def default_grid(
    delta_e: float, gamma: float, n_classes: int, *, points: int = 400
) -> TimeGrid:
    """Log-spaced grid resolving the quadratic, exponential and saturated zones.

    Runs from 0.01/Delta_E to 10*n_classes/Gamma with a linear refinement
    around 1/Gamma, plus t = 0.  Degenerate widths (free fermions) fall back
    to a linear grid on [0, 10*n_classes].
    """
    if delta_e <= 0 or gamma <= 0:
        return TimeGrid(np.linspace(0.0, 10.0 * max(n_classes, 1), points))
    start = 0.01 / delta_e
    stop = 10.0 * max(n_classes, 1) / gamma
    if stop <= start:
        stop = 100.0 * start
    n_lin = points // 5
    log_part = np.geomspace(start, stop, points - n_lin)
    lin_part = np.linspace(0.2 / gamma, min(3.0 / gamma, stop), n_lin)
    merged = np.unique(np.concatenate(([0.0], log_part, lin_part)))
    return TimeGrid(merged)


def evolve_amplitudes(decomp: EigenDecomposition, i: int, grid) -> list[AmplitudeFrame]:
    """Amplitude frames A_f(t) for an initial basis state i; unitary at every t."""
    if not 0 <= i < decomp.size:
        raise PreconditionError(f"basis index {i} outside [0, {decomp.size})")
    times = _times(grid)
    phases = np.exp(-1j * np.outer(decomp.energies, times))   # (N, T)
    amplitudes = decomp.vectors @ (decomp.vectors[i, :, None] * phases)
    norms = np.abs(amplitudes) ** 2
    worst = np.abs(norms.sum(axis=0) - 1.0).max() if times.size else 0.0
    if worst > UNITARITY_TOL:
        raise PreconditionError(f"evolution lost unitarity: |sum - 1| = {worst:.3e}")
    return [AmplitudeFrame(t=float(t), amplitudes=amplitudes[:, j]) for j, t in enumerate(times)]


def _probability_matrix(frames) -> np.ndarray:
    """(N, T) squared amplitudes of a frame sequence."""
    if not frames:
        return np.zeros((0, 0))
    return np.abs(np.stack([fr.amplitudes for fr in frames], axis=1)) ** 2


def occupation_numbers(frames, basis: Basis) -> np.ndarray:
    """(m, T) occupations n_alpha(t) = sum_f |A_f|^2 [alpha occupied in f]."""
    prob = _probability_matrix(frames)
    if prob.size == 0:
        return np.zeros((basis.m, 0))
    return occupancy_matrix(basis) @ prob


def survival_probability(decomp: EigenDecomposition, i: int, grid) -> np.ndarray:
    """W0(t) = |sum_k w_k exp(-i E_k t)|^2 with w_k the strength weights of i."""
    if not 0 <= i < decomp.size:
        raise PreconditionError(f"basis index {i} outside [0, {decomp.size})")
    weights = decomp.vectors[i, :] ** 2
    times = _times(grid)
    amplitude = np.exp(-1j * np.outer(times, decomp.energies)) @ weights
    return np.abs(amplitude) ** 2


def class_populations(frames, partition: ClassPartition) -> np.ndarray:
    """(n_classes + 1, T) populations W_s(t) summed over each cascade class."""
    prob = _probability_matrix(frames)
    if prob.size == 0:
        return np.zeros((partition.n_classes + 1, 0))
    out = np.zeros((partition.n_classes + 1, prob.shape[1]))
    for cls in range(partition.n_classes + 1):
        members = partition.members(cls)
        if len(members):
            out[cls] = prob[members].sum(axis=0)
    return out


def diagonal_weights(decomp: EigenDecomposition, i: int) -> np.ndarray:
    """S_q^(d) for every q: the time-independent part of |A_q(t)|^2."""
    w_sq = decomp.vectors**2
    return w_sq @ w_sq[i]


def split_occupation_terms(
    decomp: EigenDecomposition, i: int, q: int, grid
) -> tuple[float, np.ndarray]:
    """Diagonal term S_q^(d) and fluctuating series S_q^(fl)(t).

    The fluctuating part is computed as |A_q(t)|^2 - S_q^(d), which is
    algebraically identical to the double eigenstate sum but O(N) per time.
    """
    for idx in (i, q):
        if not 0 <= idx < decomp.size:
            raise PreconditionError(f"basis index {idx} outside [0, {decomp.size})")
    s_diag = float(diagonal_weights(decomp, i)[q])
    times = _times(grid)
    phases = np.exp(-1j * np.outer(times, decomp.energies))
    amp_q = phases @ (decomp.vectors[i, :] * decomp.vectors[q, :])
    return s_diag, np.abs(amp_q) ** 2 - s_diag


def asymptotic_occupations(decomp: EigenDecomposition, i: int, basis: Basis) -> np.ndarray:
    """Diagonal-ensemble occupations n_alpha(inf) = sum_q S_q^(d) [alpha in q]."""
    return occupancy_matrix(basis) @ diagonal_weights(decomp, i)


def simulate_trajectory(
    decomp: EigenDecomposition,
    basis: Basis,
    partition: ClassPartition,
    i: int,
    grid,
) -> OccupationTrajectory:
    """Full trajectory bundle for one initial state on one grid."""
    times = TimeGrid(_times(grid))
    frames = evolve_amplitudes(decomp, i, times)
    return OccupationTrajectory(
        grid=times,
        occupations=occupation_numbers(frames, basis),
        w0=survival_probability(decomp, i, times),
        class_populations=class_populations(frames, partition),
    )


def long_time_grid(
    decomp: EigenDecomposition,
    i: int,
    *,
    samples: int = 256,
    spacing_factor: float = 1.137,
) -> np.ndarray:
    """Equidistant sampling times for infinite-time averages.

    Spacing is ``spacing_factor`` * pi / D with D the central mean level
    spacing, which decorrelates the eigenphases; the first sample starts
    past the decay zone estimated from the strength-function width.
    """
    if samples < 200:
        raise ParameterError(f"need >= 200 samples for a stable average, got {samples}")
    energies = decomp.energies
    if len(energies) < 3:
        return np.arange(1, samples + 1, dtype=float)
    count = min(51, len(energies))
    median = np.median(energies)
    order = np.sort(np.abs(energies - median))
    window = energies[np.abs(energies - median) <= order[count - 1] * (1 + 1e-12)]
    spacing_mid = (window[-1] - window[0]) / max(len(window) - 1, 1)
    if spacing_mid <= 0:
        spacing_mid = max((energies[-1] - energies[0]) / (len(energies) - 1), 1e-12)
    dt = spacing_factor * np.pi / spacing_mid
    weights = decomp.vectors[i, :] ** 2
    e_mean = weights @ energies
    width = np.sqrt(max(weights @ (energies - e_mean) ** 2, 0.0))
    t0 = max(dt, 50.0 / width) if width > 0 else dt
    return t0 + dt * np.arange(samples)


def average_survival(decomp: EigenDecomposition, i: int, *, samples: int = 256) -> float:
    """Long-time average of W0 over the decorrelating sample grid."""
    times = long_time_grid(decomp, i, samples=samples)
    return float(survival_probability(decomp, i, times).mean())


def average_occupations(
    decomp: EigenDecomposition, basis: Basis, i: int, *, samples: int = 256
) -> np.ndarray:
    """Long-time average of n_alpha(t) over the decorrelating sample grid."""
    times = long_time_grid(decomp, i, samples=samples)
    frames = evolve_amplitudes(decomp, i, times)
    return occupation_numbers(frames, basis).mean(axis=1)


def write_trajectory_csv(traj: OccupationTrajectory, path, *, header_lines=()) -> None:
    """One row per time: t, n_0..n_{m-1}, W0, W_1..W_{n_c}; 17 significant digits."""
    m = traj.occupations.shape[0]
    n_classes = traj.class_populations.shape[0] - 1
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["t"]
            + [f"n_{a}" for a in range(m)]
            + ["W0"]
            + [f"W_{s}" for s in range(1, n_classes + 1)]
        )
        for j, t in enumerate(traj.grid.points):
            row = [f"{t:.17g}"]
            row += [f"{x:.17g}" for x in traj.occupations[:, j]]
            row.append(f"{traj.w0[j]:.17g}")
            row += [f"{x:.17g}" for x in traj.class_populations[1:, j]]
            writer.writerow(row)


def write_trajectory_sidecar(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
