"""Sparse symmetric Hamiltonian of N bosons in a tilted two-level double well.

Terms, per level l in {0,1} and well j in {L,R}:

  * tunneling     -J^l (b_L^l+ b_R^l + b_R^l+ b_L^l)
  * interaction    U^l n_j^l (n_j^l - 1)            (no 1/2 -- note convention)
  * tilt           (dV/2)(n_L^l - n_R^l)
  * level spacing  hw (n_L^1 + n_R^1)               (lower level at zero)
  * cross density  4 U01 (n_L^0 n_L^1 + n_R^0 n_R^1)
  * pair hop       U01 b_j^l+ b_j^l+ b_j^l' b_j^l'  (two atoms change level)

The cross-density factor 4 comes from the ordered-pair sum over l != l', each
ordered pair contributing 2 n^l n^l'.  Single-atom inter-level moves carry no
amplitude.  With the n(n-1) convention the tilt resonances sit at dV = 2pU0,
which the test suite checks numerically.
"""

from __future__ import annotations

import sys
import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .fock import Basis, FockState


class ConfigurationError(ValueError):
    """Params and basis disagree (e.g. two-level params on a one-level basis)."""


@dataclass(frozen=True)
class ModelParams:
    """The seven model energies, all in one declared unit.

    hw=None selects one-level mode: the basis must then be an M=0 block and
    J1, U1, U01 are ignored (there is no second level to couple to).
    """

    J0: float
    J1: float = 0.0
    U0: float = 0.0
    U1: float = 0.0
    U01: float = 0.0
    dV: float = 0.0
    hw: float | None = 1.0
    unit: str = "hw"

    @property
    def two_level(self) -> bool:
        return self.hw is not None

    def __post_init__(self):
        if self.hw is not None and self.hw <= 0:
            raise ConfigurationError(f"hw must be positive in two-level mode, got {self.hw}")
        vals = [self.J0, self.J1, self.U0, self.U1, self.U01, self.dV]
        if self.hw is not None:
            vals.append(self.hw)
        if not all(np.isfinite(vals)):
            raise ConfigurationError(f"non-finite parameter in {self}")

    @classmethod
    def harmonic_ratios(cls, J0: float, J1: float, U0: float, dV: float = 0.0,
                        hw: float = 1.0, unit: str = "hw") -> "ModelParams":
        """Two-level params with the harmonic-orbital ratios U1=3U0/4, U01=U0/2."""
        return cls(J0=J0, J1=J1, U0=U0, U1=0.75 * U0, U01=0.5 * U0,
                   dV=dV, hw=hw, unit=unit)

    @classmethod
    def one_level(cls, J0: float, U0: float, dV: float = 0.0,
                  unit: str = "U0") -> "ModelParams":
        return cls(J0=J0, U0=U0, dV=dV, hw=None, unit=unit)

    def normalized(self) -> "ModelParams":
        """Rescale so hw = 1 (two-level) or U0 = 1 (one-level)."""
        if self.two_level:
            s = self.hw
            return replace(self, J0=self.J0 / s, J1=self.J1 / s, U0=self.U0 / s,
                           U1=self.U1 / s, U01=self.U01 / s, dV=self.dV / s,
                           hw=1.0, unit="hw")
        if self.U0 == 0:
            raise ConfigurationError("cannot normalize one-level params with U0=0")
        s = abs(self.U0)
        return replace(self, J0=self.J0 / s, U0=self.U0 / s, dV=self.dV / s,
                       unit="U0")

    def check_regime(self, N: int) -> bool:
        """Warn outside |N U0| <= 2 hw, where the two-level model degrades."""
        if self.two_level and abs(N * self.U0) > 2 * self.hw:
            warnings.warn(
                f"|N*U0| = {abs(N * self.U0):g} exceeds 2*hw = {2 * self.hw:g}; "
                "the two-level description is unreliable here", stacklevel=2)
            return False
        return True


@dataclass
class SparseHamiltonian:
    """Real symmetric matrix stored as its upper triangle in coordinate form."""

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    unit: str

    def to_csr(self) -> sp.csr_matrix:
        """Symmetric completion as a scipy CSR matrix."""
        off = self.rows != self.cols
        r = np.concatenate([self.rows, self.cols[off]])
        c = np.concatenate([self.cols, self.rows[off]])
        v = np.concatenate([self.vals, self.vals[off]])
        return sp.csr_matrix((v, (r, c)), shape=(self.dim, self.dim))

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.dim, self.dim))
        H[self.rows, self.cols] = self.vals
        off = self.rows != self.cols
        H[self.cols[off], self.rows[off]] = self.vals[off]
        return H

    def diagonal(self) -> np.ndarray:
        d = np.zeros(self.dim)
        on = self.rows == self.cols
        d[self.rows[on]] = self.vals[on]
        return d

    def norm_bound(self) -> float:
        """Infinity-norm of the completed matrix (upper bound on |eigenvalues|)."""
        acc = np.zeros(self.dim)
        np.add.at(acc, self.rows, np.abs(self.vals))
        off = self.rows != self.cols
        np.add.at(acc, self.cols[off], np.abs(self.vals[off]))
        return float(acc.max()) if self.dim else 0.0

    def nnz_stored(self) -> int:
        return len(self.vals)

    def dump(self, fh=sys.stdout) -> None:
        """Coordinate-list text dump `row col value`, sorted by (row, col)."""
        order = np.lexsort((self.cols, self.rows))
        for i in order:
            fh.write(f"{self.rows[i]} {self.cols[i]} {self.vals[i]:.17g}\n")


def diagonal_energy(params: ModelParams, s: FockState) -> float:
    """<s|H|s> for a single Fock state."""
    e = params.U0 * (s.nL0 * (s.nL0 - 1) + s.nR0 * (s.nR0 - 1))
    e += 0.5 * params.dV * (s.nL0 - s.nR0)
    if params.two_level:
        e += params.U1 * (s.nL1 * (s.nL1 - 1) + s.nR1 * (s.nR1 - 1))
        e += 0.5 * params.dV * (s.nL1 - s.nR1)
        e += params.hw * (s.nL1 + s.nR1)
        e += 4.0 * params.U01 * (s.nL0 * s.nL1 + s.nR0 * s.nR1)
    return e


def _check_modes(params: ModelParams, basis: Basis) -> None:
    if params.two_level and basis.one_level:
        raise ConfigurationError(
            "two-level params (hw set) on a one-level basis; use hw=None")
    if not params.two_level and not basis.one_level:
        raise ConfigurationError(
            "one-level params (hw=None) on a full two-level basis")


def build(params: ModelParams, basis: Basis) -> SparseHamiltonian:
    """Assemble the upper triangle of H over the given basis.

    Each unordered off-diagonal pair is generated exactly once: tunneling from
    the L->R move, pair hopping from the level 1 -> level 0 drop.
    """
    _check_modes(params, basis)
    if basis.dim == 0:
        raise ConfigurationError("empty basis")
    rows, cols, vals = [], [], []
    J = (params.J0, params.J1)
    for i, s in enumerate(basis.states):
        rows.append(i)
        cols.append(i)
        vals.append(diagonal_energy(params, s))
        occ = [s.nL0, s.nR0, s.nL1, s.nR1]
        # tunneling, one atom L -> R within level l
        for l, (iL, iR) in enumerate(((0, 1), (2, 3))):
            if occ[iL] >= 1:
                t = list(occ)
                t[iL] -= 1
                t[iR] += 1
                j = basis.try_index(FockState(*t))
                if j is not None:
                    amp = -J[l] * np.sqrt(occ[iL] * (occ[iR] + 1))
                    a, b = (i, j) if i <= j else (j, i)
                    rows.append(a)
                    cols.append(b)
                    vals.append(amp)
        # pair hop, two atoms drop level 1 -> level 0 in well j
        if params.two_level:
            for i0, i1 in ((0, 2), (1, 3)):
                if occ[i1] >= 2:
                    t = list(occ)
                    t[i1] -= 2
                    t[i0] += 2
                    j = basis.try_index(FockState(*t))
                    if j is not None:
                        amp = params.U01 * np.sqrt(
                            occ[i1] * (occ[i1] - 1) * (occ[i0] + 1) * (occ[i0] + 2))
                        a, b = (i, j) if i <= j else (j, i)
                        rows.append(a)
                        cols.append(b)
                        vals.append(amp)
    return SparseHamiltonian(
        dim=basis.dim,
        rows=np.asarray(rows, dtype=np.int64),
        cols=np.asarray(cols, dtype=np.int64),
        vals=np.asarray(vals, dtype=np.float64),
        unit=params.unit,
    )


def matrix_element(params: ModelParams, bra: FockState, ket: FockState) -> float:
    """<bra|H|ket> from the operator rules directly (element-wise oracle).

    Zero for any pair of states not connected by the Hamiltonian; in
    particular one atom moving between levels carries no amplitude.
    """
    if bra.total != ket.total:
        return 0.0
    if bra == ket:
        return diagonal_energy(params, ket)
    b = (bra.nL0, bra.nR0, bra.nL1, bra.nR1)
    k = (ket.nL0, ket.nR0, ket.nL1, ket.nR1)
    diff = tuple(bi - ki for bi, ki in zip(b, k))
    nonzero = [(m, d) for m, d in enumerate(diff) if d != 0]
    if len(nonzero) != 2:
        return 0.0
    (m1, d1), (m2, d2) = nonzero
    if d1 + d2 != 0:
        return 0.0
    # tunneling: one atom between wells, same level
    if abs(d1) == 1 and {m1, m2} in ({0, 1}, {2, 3}):
        l = 0 if {m1, m2} == {0, 1} else 1
        if l == 1 and not params.two_level:
            return 0.0
        src = m1 if d1 == -1 else m2       # mode losing one atom in the ket
        dst = m2 if d1 == -1 else m1
        J = params.J0 if l == 0 else params.J1
        return -J * np.sqrt(k[src] * (k[dst] + 1))
    # pair hop: two atoms between levels, same well
    if abs(d1) == 2 and {m1, m2} in ({0, 2}, {1, 3}):
        if not params.two_level:
            return 0.0
        src = m1 if d1 == -2 else m2
        dst = m2 if d1 == -2 else m1
        return params.U01 * np.sqrt(
            k[src] * (k[src] - 1) * (k[dst] + 1) * (k[dst] + 2))
    return 0.0


def number_operator(basis: Basis, level: int | None = None,
                    well: str | None = None) -> np.ndarray:
    """Diagonal of the selected occupancy operator.

    level/well both None gives the total number; level in {0,1} or well in
    {"L","R"} select partial sums; both given select the single mode.
    """
    if well is not None and well not in ("L", "R"):
        raise ValueError(f"well must be 'L' or 'R', got {well!r}")
    if level is not None and level not in (0, 1):
        raise ValueError(f"level must be 0 or 1, got {level!r}")
    out = np.empty(basis.dim)
    for i, s in enumerate(basis.states):
        picks = {("L", 0): s.nL0, ("R", 0): s.nR0,
                 ("L", 1): s.nL1, ("R", 1): s.nR1}
        out[i] = sum(v for (w, l), v in picks.items()
                     if (well is None or w == well) and (level is None or l == level))
    return out


def swap_permutation(basis: Basis) -> np.ndarray:
    """Permutation pi with pi[i] = index of the L<->R mirror of state i.

    The well-swap operator acts on coefficient vectors as (Pv)[i] = v[pi[i]]
    (pi is an involution).
    """
    return np.array([basis.index_of(s.mirrored()) for s in basis.states],
                    dtype=np.int64)
