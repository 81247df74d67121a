"""Random two-body interaction Hamiltonian H = H0 + V on the Fock basis.

H0 is a fixed single-particle ladder (mean spacing d0, optional uniform
jitter); V is a Gaussian random two-body operator

    V = sum_{p<q, r<s} V[(p,q),(r,s)] a+_p a+_q a_s a_r,

with one independent draw per unordered pair of index pairs and
V[(p,q),(r,s)] = V[(r,s),(p,q)], so V is real symmetric.  The dimensionless
strength eta fixes the element variance: var(V) = eta * d0**2.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .basis import Basis, FockState, fermionic_phase, occupied_orbitals
from .exceptions import ParameterError, PreconditionError

_RNG_ALGORITHM = "numpy PCG64 via default_rng([seed, stream])"
_SPECTRUM_STREAM = 0
_TENSOR_STREAM = 1


@dataclass(frozen=True)
class ModelParams:
    """Defining parameters of one disorder realization.

    eta is the mean squared two-body element in units of d0**2; jitter
    displaces each single-particle level by jitter*d0*u with u uniform on
    [-1/2, 1/2].  The seed fixes both the level jitter and the tensor.
    """

    n: int
    m: int
    eta: float
    seed: int
    d0: float = 1.0
    jitter: float = 0.0

    def __post_init__(self):
        if self.n <= 0 or self.n > self.m:
            raise ParameterError(f"need 0 < n <= m, got n={self.n}, m={self.m}")
        if self.d0 <= 0:
            raise ParameterError(f"d0 must be positive, got {self.d0}")
        if self.eta < 0:
            raise ParameterError(f"eta must be non-negative, got {self.eta}")
        if not 0 <= self.jitter < 1:
            raise ParameterError(f"jitter must lie in [0, 1), got {self.jitter}")


@dataclass(frozen=True)
class SingleParticleSpectrum:
    """Ascending orbital energies eps_s."""

    epsilon: np.ndarray

    @property
    def m(self) -> int:
        return len(self.epsilon)

    def mean_spacing(self) -> float:
        return float(self.epsilon[-1] - self.epsilon[0]) / (self.m - 1)


class TwoBodyTensor:
    """Symmetric table of two-body amplitudes indexed by orbital pairs.

    Pairs (p, q) with p < q are enumerated lexicographically; ``matrix`` is
    the (P, P) symmetric array of amplitudes between pair indices.
    """

    def __init__(self, m: int, matrix: np.ndarray):
        pairs = list(combinations(range(m), 2))
        if matrix.shape != (len(pairs), len(pairs)):
            raise ParameterError(
                f"tensor for m={m} needs shape {(len(pairs),) * 2}, got {matrix.shape}"
            )
        if not np.array_equal(matrix, matrix.T):
            raise ParameterError("two-body tensor must be symmetric in its pair indices")
        self.m = m
        self.pairs = pairs
        self.pair_index = {pq: a for a, pq in enumerate(pairs)}
        self.matrix = matrix

    def element(self, p: int, q: int, r: int, s: int) -> float:
        """Amplitude V[(p,q),(r,s)]; requires p < q and r < s."""
        return float(self.matrix[self.pair_index[(p, q)], self.pair_index[(r, s)]])

    def scaled(self, c: float) -> "TwoBodyTensor":
        return TwoBodyTensor(self.m, c * self.matrix)


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Dense symmetric many-body matrix together with its basis."""

    entries: np.ndarray
    basis: Basis

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def diagonal(self) -> np.ndarray:
        return np.diag(self.entries)


def sample_spectrum(params: ModelParams) -> SingleParticleSpectrum:
    """Equidistant ladder eps_s = d0*s with optional seeded uniform jitter."""
    rng = np.random.default_rng([params.seed, _SPECTRUM_STREAM])
    eps = params.d0 * np.arange(params.m, dtype=float)
    if params.jitter > 0:
        eps = eps + params.jitter * params.d0 * (rng.random(params.m) - 0.5)
    return SingleParticleSpectrum(epsilon=np.sort(eps))


def sample_two_body(params: ModelParams) -> TwoBodyTensor:
    """Draw the symmetric Gaussian pair-pair table, one draw per canonical element."""
    n_pairs = params.m * (params.m - 1) // 2
    rng = np.random.default_rng([params.seed, _TENSOR_STREAM])
    scale = np.sqrt(params.eta) * params.d0
    matrix = np.zeros((n_pairs, n_pairs))
    # Row-major upper triangle, mirrored: each (a <= b) element is one draw.
    for a in range(n_pairs):
        row = scale * rng.standard_normal(n_pairs - a)
        matrix[a, a:] = row
        matrix[a:, a] = row
    return TwoBodyTensor(params.m, matrix)


def build_hamiltonian(
    basis: Basis,
    spectrum: SingleParticleSpectrum,
    tensor: TwoBodyTensor,
    *,
    one_orbital_terms: bool = True,
    diagonal_pair_terms: bool = True,
) -> HamiltonianMatrix:
    """Assemble the dense symmetric matrix of H0 + V on the basis.

    Matrix elements follow the two-body selection rule: states differing in
    more than two orbitals are not connected.  ``one_orbital_terms`` and
    ``diagonal_pair_terms`` switch off the spectator-summed single-move
    elements and the V contribution to the diagonal, for comparing
    conventions of the random-interaction ensemble.
    """
    if spectrum.m != basis.m or tensor.m != basis.m:
        raise ParameterError(
            f"inconsistent orbital counts: basis m={basis.m}, "
            f"spectrum m={spectrum.m}, tensor m={tensor.m}"
        )
    eps = spectrum.epsilon.tolist()
    v = tensor.matrix.tolist()
    pair_index = tensor.pair_index
    index = basis.index
    n_states = basis.size
    entries = np.zeros((n_states, n_states))
    all_orbitals = range(basis.m)

    for fi, f_np in enumerate(basis.states):
        f = int(f_np)
        occ = occupied_orbitals(f)
        unocc = tuple(s for s in all_orbitals if not f >> s & 1)

        diag = sum(eps[s] for s in occ)
        if diagonal_pair_terms:
            for pq in combinations(occ, 2):
                a = pair_index[pq]
                diag += v[a][a]
        entries[fi, fi] = diag

        for pq in combinations(occ, 2):
            a = pair_index[pq]
            removed = f ^ (1 << pq[0]) ^ (1 << pq[1])
            for rs in combinations(unocc, 2):
                g = removed | (1 << rs[0]) | (1 << rs[1])
                gi = index[g]
                if gi < fi:
                    continue  # already filled from the partner row
                sign = fermionic_phase(f, pq, rs)
                entries[fi, gi] = entries[gi, fi] = sign * v[a][pair_index[rs]]

        if one_orbital_terms:
            for p in occ:
                removed = f ^ (1 << p)
                for q in unocc:
                    gi = index[removed | (1 << q)]
                    if gi < fi:
                        continue
                    element = 0.0
                    for s in occ:
                        if s == p:
                            continue
                        ps = (p, s) if p < s else (s, p)
                        qs = (q, s) if q < s else (s, q)
                        element += fermionic_phase(f, ps, qs) * v[pair_index[ps]][pair_index[qs]]
                    entries[fi, gi] = entries[gi, fi] = element

    return HamiltonianMatrix(entries=entries, basis=basis)


_DUMP_MAGIC = b"TBRH"
_DUMP_VERSION = 1
_HEADER = struct.Struct("<4sIIIQddQ")  # magic, version, n, m, seed, eta, d0, N


def dump_hamiltonian(h: HamiltonianMatrix, params: ModelParams, path) -> None:
    """Binary dump: fixed header then row-major float64 entries."""
    header = _HEADER.pack(
        _DUMP_MAGIC, _DUMP_VERSION, params.n, params.m,
        params.seed, params.eta, params.d0, h.size,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(h.entries).tobytes())


def load_hamiltonian(path) -> tuple[np.ndarray, dict]:
    """Read a dump back; returns (entries, header dict), bit-identical payload."""
    raw = Path(path).read_bytes()
    magic, version, n, m, seed, eta, d0, size = _HEADER.unpack_from(raw)
    if magic != _DUMP_MAGIC or version != _DUMP_VERSION:
        raise PreconditionError(f"not a Hamiltonian dump: {path}")
    entries = np.frombuffer(raw, dtype=np.float64, offset=_HEADER.size)
    entries = entries.reshape(size, size).copy()
    return entries, {"n": n, "m": m, "seed": seed, "eta": eta, "d0": d0, "size": size}
