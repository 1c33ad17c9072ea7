"""Four-mode bosonic Fock basis at fixed total particle number.

The modes are (well, level) combinations for a double well with two on-site
levels: (L,0), (R,0), (L,1), (R,1).  States are ordered canonically by the
triple (M, nL1, nL0) ascending, where M = nL1 + nR1 is the occupancy of the
excited level.  The block of fixed M has size (M+1)(N-M+1), so the block
boundaries for N=20 fall after indices 20 and 60.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

# Full bases above this N are refused by default: the dimension grows as N^3/6
# and exact-diagonalization paths stop being a desk-scale computation.
MAX_EXACT_N = 40


@dataclass(frozen=True)
class FockState:
    """Occupation numbers |nL0, nR0> x |nL1, nR1>."""

    nL0: int
    nR0: int
    nL1: int
    nR1: int

    def __post_init__(self):
        if min(self.nL0, self.nR0, self.nL1, self.nR1) < 0:
            raise ValueError(f"negative occupation in {self!r}")

    @property
    def total(self) -> int:
        return self.nL0 + self.nR0 + self.nL1 + self.nR1

    @property
    def excited(self) -> int:
        """Number of atoms in the upper level, M."""
        return self.nL1 + self.nR1

    def mirrored(self) -> "FockState":
        """Swap the wells L <-> R."""
        return FockState(self.nR0, self.nL0, self.nR1, self.nL1)


def dimension(N: int) -> int:
    """Hilbert-space dimension (N+3)(N+2)(N+1)/6 at fixed total N, exact."""
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    return (N + 3) * (N + 2) * (N + 1) // 6


class Basis:
    """Ordered Fock basis with O(1) closed-form state <-> index maps.

    Immutable after construction; safe to share across worker threads.
    """

    def __init__(self, N: int, states: tuple[FockState, ...], one_level: bool):
        self.N = N
        self.states = states
        self.dim = len(states)
        self.one_level = one_level
        # cumulative block starts: _block_start[M] = index of first state with
        # excited occupancy M
        starts = [0]
        for M in range(N + 1):
            starts.append(starts[-1] + (M + 1) * (N - M + 1))
        self._block_start = starts

    def block_start(self, M: int) -> int:
        """Index of the first state with excited occupancy M."""
        if not 0 <= M <= self.N:
            raise ValueError(f"M={M} out of range for N={self.N}")
        return self._block_start[M]

    def state_at(self, index: int) -> FockState:
        if not 0 <= index < self.dim:
            raise IndexError(f"index {index} out of range for dim {self.dim}")
        return self.states[index]

    def index_of(self, s: FockState) -> int:
        idx = self.try_index(s)
        if idx is None:
            raise ValueError(f"{s!r} is not a member of this basis (N={self.N}, "
                             f"one_level={self.one_level})")
        return idx

    def try_index(self, s: FockState) -> int | None:
        """Closed-form index, or None when the state lies outside the basis."""
        if s.total != self.N:
            return None
        M = s.excited
        if self.one_level and M > 0:
            return None
        return self._block_start[M] + s.nL1 * (self.N - M + 1) + s.nL0

    def __len__(self) -> int:
        return self.dim

    def __iter__(self):
        return iter(self.states)


def _states_for(N: int, M_values) -> tuple[FockState, ...]:
    out = []
    for M in M_values:
        for nL1 in range(M + 1):
            for nL0 in range(N - M + 1):
                out.append(FockState(nL0, N - M - nL0, nL1, M - nL1))
    return tuple(out)


def enumerate_basis(N: int, max_n: int = MAX_EXACT_N) -> Basis:
    """Full two-level basis at total N in canonical order."""
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    if N > max_n:
        raise ValueError(
            f"N={N} exceeds the basis cap {max_n} (dim would be {dimension(N)}); "
            f"raise max_n explicitly if you really want this")
    return Basis(N, _states_for(N, range(N + 1)), one_level=False)


def one_level_basis(N: int, max_n: int = MAX_EXACT_N) -> Basis:
    """M=0 block only: the (N+1)-dimensional single-level basis."""
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    if N > max(max_n, 10_000):
        raise ValueError(f"N={N} is unreasonably large for a one-level basis")
    return Basis(N, _states_for(N, (0,)), one_level=True)


def brute_force_states(N: int) -> set[tuple[int, int, int, int]]:
    """All occupation tuples with total N, by direct search (test oracle)."""
    return {occ for occ in product(range(N + 1), repeat=4) if sum(occ) == N}
