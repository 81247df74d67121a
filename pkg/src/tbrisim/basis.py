"""Many-body Fock basis for n spinless fermions on m orbitals.

A basis state (Slater determinant) is stored as a plain integer bitmask:
bit s set means orbital s is occupied.  The reference ket is built by
applying creation operators in ascending orbital order to the vacuum, so a
state with occupied orbitals f1 < f2 < ... < fn means

    |f> = a+_{f1} a+_{f2} ... a+_{fn} |0>.

All fermionic signs in this package are derived from that single ordering
convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .exceptions import ParameterError, PreconditionError

FockState = int


def occupied_orbitals(state: FockState) -> tuple[int, ...]:
    """Ascending orbital indices set in the bitmask."""
    orbs = []
    s = state
    while s:
        low = s & -s
        orbs.append(low.bit_length() - 1)
        s ^= low
    return tuple(orbs)


def state_from_orbitals(orbitals) -> FockState:
    mask = 0
    for s in orbitals:
        bit = 1 << s
        if mask & bit:
            raise PreconditionError(f"orbital {s} listed twice")
        mask |= bit
    return mask


@dataclass(frozen=True)
class Basis:
    """All binomial(m, n) states of n fermions on m orbitals.

    States are sorted by ascending bitmask value; ``index`` maps a bitmask
    back to its position and is the exact inverse of ``states``.
    """

    n: int
    m: int
    states: np.ndarray                       # int64, ascending bitmasks
    index: dict[int, int] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.states)

    def position(self, state: FockState) -> int:
        try:
            return self.index[int(state)]
        except KeyError:
            raise PreconditionError(
                f"state {state:#x} is not an {self.n}-particle state on {self.m} orbitals"
            ) from None


@dataclass(frozen=True)
class ClassPartition:
    """Partition of a basis by two-body distance from a reference state.

    ``class_of[j]`` is the minimal number of two-body moves from the
    reference to basis state j.  One move relocates one or two particles,
    so class 1 is exactly the set of states directly coupled by a two-body
    interaction (Hamming distance 2 or 4 from the reference).
    """

    reference: FockState
    class_of: np.ndarray    # int64, one entry per basis state
    n_classes: int          # class-index bound, min(n, m - n)
    sizes: np.ndarray       # occupancy count per class, length n_classes + 1

    def members(self, cls: int) -> np.ndarray:
        return np.nonzero(self.class_of == cls)[0]


def build_basis(n: int, m: int) -> Basis:
    """Enumerate all n-of-m occupation bitmasks in ascending order."""
    if n <= 0 or n > m:
        raise ParameterError(f"need 0 < n <= m, got n={n}, m={m}")
    masks = sorted(
        sum(1 << s for s in occ) for occ in combinations(range(m), n)
    )
    states = np.array(masks, dtype=np.int64)
    assert len(states) == comb(m, n)
    return Basis(n=n, m=m, states=states, index={v: j for j, v in enumerate(masks)})


def orbital_difference(f: FockState, g: FockState) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Orbitals occupied in f but not g, and in g but not f (both ascending)."""
    return occupied_orbitals(f & ~g), occupied_orbitals(g & ~f)


def fermionic_phase(state: FockState, annihilate, create) -> int:
    """Sign of <g| a+_{c1} a+_{c2} a_{a2} a_{a1} |f> for f = ``state``.

    The operator pairs are taken in canonical ascending order a1 < a2 and
    c1 < c2 and applied right to left; each application contributes
    (-1)^(number of occupied orbitals below the target orbital).
    """
    a1, a2 = sorted(annihilate)
    c1, c2 = sorted(create)
    if a1 == a2:
        raise PreconditionError(f"cannot annihilate orbital {a1} twice")
    if c1 == c2:
        raise PreconditionError(f"cannot create orbital {c1} twice")
    sign = 1
    s = int(state)
    for orb in (a1, a2):
        bit = 1 << orb
        if not s & bit:
            raise PreconditionError(f"orbital {orb} is empty, cannot annihilate")
        if (s & (bit - 1)).bit_count() & 1:
            sign = -sign
        s &= ~bit
    for orb in (c2, c1):
        bit = 1 << orb
        if s & bit:
            raise PreconditionError(f"orbital {orb} already occupied, cannot create")
        if (s & (bit - 1)).bit_count() & 1:
            sign = -sign
        s |= bit
    return sign


def classify(basis: Basis, reference: FockState) -> ClassPartition:
    """Group basis states by the number of two-body moves from ``reference``.

    A state whose occupancy differs in j particles (Hamming distance 2j) is
    ceil(j/2) moves away, because each two-body move relocates at most two
    particles.  Class sizes are reported up to the bound min(n, m - n);
    classes above the largest reachable move count are empty.
    """
    ref = int(reference)
    basis.position(ref)
    n_classes = min(basis.n, basis.m - basis.n)
    class_of = np.array(
        [((int(s) ^ ref).bit_count() // 2 + 1) // 2 for s in basis.states],
        dtype=np.int64,
    )
    sizes = np.bincount(class_of, minlength=n_classes + 1)
    return ClassPartition(
        reference=ref, class_of=class_of, n_classes=n_classes, sizes=sizes
    )


def occupancy_matrix(basis: Basis) -> np.ndarray:
    """(m, N) 0/1 matrix; row alpha flags the states occupying orbital alpha."""
    occ = np.zeros((basis.m, basis.size))
    for j, s in enumerate(basis.states):
        for alpha in occupied_orbitals(int(s)):
            occ[alpha, j] = 1.0
    return occ
