"""Exact diagonalization and spectral statistics of the dense Hamiltonian."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .exceptions import EigensolverError, InsufficientStatisticsError, PreconditionError
from .hamiltonian import HamiltonianMatrix, ModelParams

ORTHONORMALITY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (ascending) and the orthonormal eigenvector matrix.

    Column k of ``vectors`` holds the components of eigenstate k over the
    basis; row f holds the expansion of basis state f over eigenstates.
    """

    energies: np.ndarray
    vectors: np.ndarray

    @property
    def size(self) -> int:
        return len(self.energies)


@dataclass(frozen=True)
class SpectralStats:
    """Smoothed level density and the mean level spacing at mid-spectrum."""

    rho: Callable[[np.ndarray], np.ndarray]
    mean_spacing_mid: float
    bandwidth: float
    window: float


def diagonalize(h: HamiltonianMatrix | np.ndarray) -> EigenDecomposition:
    """Full symmetric eigendecomposition with a fixed sign gauge.

    The gauge makes the largest-magnitude component of every eigenvector
    positive, so repeated runs and dumps are reproducible.  Orthonormality
    and reconstruction residuals are checked against fixed tolerances.
    """
    matrix = h.entries if isinstance(h, HamiltonianMatrix) else np.asarray(h, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise PreconditionError("matrix contains non-finite entries")
    try:
        energies, vectors = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver did not converge: {exc}") from exc

    lead = np.argmax(np.abs(vectors), axis=0)
    flip = vectors[lead, np.arange(vectors.shape[1])] < 0
    vectors = vectors * np.where(flip, -1.0, 1.0)

    ortho = np.abs(vectors.T @ vectors - np.eye(len(energies))).max()
    if ortho > ORTHONORMALITY_TOL:
        raise EigensolverError("eigenvectors not orthonormal", residual=float(ortho))
    scale = np.abs(matrix).max() or 1.0
    recon = np.abs(matrix @ vectors - vectors * energies).max()
    if recon > RECONSTRUCTION_TOL * scale:
        raise EigensolverError("reconstruction residual too large", residual=float(recon))
    return EigenDecomposition(energies=energies, vectors=vectors)


def spectral_stats(
    decomp: EigenDecomposition,
    window: float | None = None,
    *,
    bandwidth_spacings: float = 3.0,
) -> SpectralStats:
    """Gaussian-kernel density of the spectrum and the central mean spacing.

    The density smooths the level staircase with bandwidth equal to
    ``bandwidth_spacings`` global mean spacings and integrates to the number
    of levels.  ``mean_spacing_mid`` averages nearest-neighbour spacings over
    the levels within ``window`` of the median energy (default: the ~51
    central levels).
    """
    energies = decomp.energies
    n_levels = len(energies)
    if n_levels < 3:
        raise PreconditionError(f"need at least 3 levels, got {n_levels}")
    mean_spacing = (energies[-1] - energies[0]) / (n_levels - 1)
    bandwidth = bandwidth_spacings * mean_spacing

    def rho(e, _energies=energies, _bw=bandwidth):
        e = np.asarray(e, dtype=float)
        z = (e[..., None] - _energies) / _bw
        return np.exp(-0.5 * z * z).sum(axis=-1) / (_bw * np.sqrt(2 * np.pi))

    median = float(np.median(energies))
    if window is None:
        count = min(51, n_levels)
        window = float(np.sort(np.abs(energies - median))[count - 1]) * (1 + 1e-12)
    inside = energies[np.abs(energies - median) <= window]
    if len(inside) < 10:
        raise InsufficientStatisticsError(
            f"only {len(inside)} levels within {window} of the median; need >= 10"
        )
    spacing_mid = float(inside[-1] - inside[0]) / (len(inside) - 1)
    return SpectralStats(
        rho=rho, mean_spacing_mid=spacing_mid, bandwidth=bandwidth, window=float(window)
    )


_DUMP_MAGIC = b"TBRD"
_DUMP_VERSION = 1
_HEADER = struct.Struct("<4sIQQIIddd")  # magic, version, N, seed, n, m, eta, d0, jitter


def dump_decomposition(decomp: EigenDecomposition, params: ModelParams, path) -> None:
    """Binary dump: header, energies, then column-major eigenvectors."""
    header = _HEADER.pack(
        _DUMP_MAGIC, _DUMP_VERSION, decomp.size, params.seed,
        params.n, params.m, params.eta, params.d0, params.jitter,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(decomp.energies.tobytes())
        fh.write(np.asfortranarray(decomp.vectors).tobytes(order="F"))


def load_decomposition(path) -> tuple[EigenDecomposition, dict]:
    """Read a decomposition dump; arrays round-trip bit for bit."""
    raw = Path(path).read_bytes()
    magic, version, size, seed, n, m, eta, d0, jitter = _HEADER.unpack_from(raw)
    if magic != _DUMP_MAGIC or version != _DUMP_VERSION:
        raise PreconditionError(f"not a decomposition dump: {path}")
    offset = _HEADER.size
    energies = np.frombuffer(raw, dtype=np.float64, count=size, offset=offset).copy()
    offset += size * 8
    vectors = np.frombuffer(raw, dtype=np.float64, count=size * size, offset=offset)
    vectors = vectors.reshape((size, size), order="F").copy(order="F")
    header = {"size": size, "seed": seed, "n": n, "m": m, "eta": eta, "d0": d0, "jitter": jitter}
    return EigenDecomposition(energies=energies, vectors=vectors), header
