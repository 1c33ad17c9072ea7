"""Eigensolvers and near-degenerate pair post-processing.

Dense LAPACK for small dimensions, ARPACK (Lanczos) for the lowest k of large
problems.  Splittings of symmetric-trap pairs routinely fall below machine
resolution, so eigensolvers return arbitrary mixtures inside those 2D
subspaces; `classify_pairs` rebuilds well-swap parity eigenstates there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .hamiltonian import SparseHamiltonian

DENSE_CAP = 4000
# Splittings below this times the spectral scale cannot be claimed from
# numerics; they are deferred to the closed-form route.
RESOLUTION = 1e-13


class SolverError(RuntimeError):
    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class DenseCapError(ValueError):
    """Dimension too large for the dense path; use solve_lowest instead."""


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Sign convention: largest-|coefficient| entry of each column positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


@dataclass
class Spectrum:
    """Ascending eigenvalues with orthonormal, phase-fixed eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray          # column k is the k-th eigenvector
    meta: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.eigenvalues)

    def vector(self, k: int) -> np.ndarray:
        return self.eigenvectors[:, k]

    def with_vectors(self, vectors: np.ndarray) -> "Spectrum":
        return Spectrum(self.eigenvalues.copy(), vectors, dict(self.meta))


def _residuals(H: SparseHamiltonian, w: np.ndarray, v: np.ndarray) -> np.ndarray:
    A = H.to_csr()
    return np.linalg.norm(A @ v - v * w, axis=0)


def solve_dense(H: SparseHamiltonian, dense_cap: int = DENSE_CAP) -> Spectrum:
    """Full symmetric eigendecomposition (LAPACK)."""
    if H.dim > dense_cap:
        raise DenseCapError(
            f"dim {H.dim} exceeds the dense cap {dense_cap}; use solve_lowest")
    w, v = sla.eigh(H.to_dense())
    v = _fix_phases(v)
    res = _residuals(H, w, v)
    scale = max(H.norm_bound(), 1.0)
    if res.max() > 1e-10 * scale:
        raise SolverError(f"dense residual {res.max():g} exceeds 1e-10*|H|",
                          residual=float(res.max()))
    return Spectrum(w, v, {"solver": "dense", "dim": H.dim,
                           "residuals": res, "norm_bound": scale})


def solve_lowest(H: SparseHamiltonian, k: int, tol: float = 1e-10,
                 maxiter: int | None = None) -> Spectrum:
    """Lowest k eigenpairs via ARPACK with a fixed, seeded start vector."""
    if not 0 < k < H.dim:
        raise ValueError(f"need 0 < k < dim, got k={k}, dim={H.dim}")
    if H.dim < 50 or k > H.dim - 2:
        # ARPACK needs k < dim-1 and is pointless for tiny problems
        full = solve_dense(H, dense_cap=max(DENSE_CAP, H.dim))
        return Spectrum(full.eigenvalues[:k], full.eigenvectors[:, :k],
                        {**full.meta, "solver": "dense-fallback"})
    A = H.to_csr()
    rng = np.random.default_rng(20080521)
    v0 = rng.standard_normal(H.dim)
    try:
        w, v = spla.eigsh(A, k=k, which="SA", v0=v0, tol=tol,
                          maxiter=maxiter)
    except spla.ArpackNoConvergence as exc:
        got = len(exc.eigenvalues)
        raise SolverError(
            f"ARPACK converged only {got}/{k} eigenpairs", residual=None) from exc
    order = np.argsort(w, kind="stable")
    w, v = w[order], _fix_phases(v[:, order])
    res = _residuals(H, w, v)
    scale = max(H.norm_bound(), 1.0)
    if res.max() > max(tol, 1e-12) * scale:
        raise SolverError(
            f"iterative residual {res.max():g} exceeds tol*|H| = {tol * scale:g}",
            residual=float(res.max()))
    return Spectrum(w, v, {"solver": "lanczos", "dim": H.dim, "k": k,
                           "residuals": res, "norm_bound": scale})


def solve_auto(H: SparseHamiltonian, k: int | None = None,
               dense_cap: int = DENSE_CAP, tol: float = 1e-10) -> Spectrum:
    """Dense when it fits, otherwise lowest-k Lanczos (k required then)."""
    if H.dim <= dense_cap:
        spec = solve_dense(H, dense_cap)
        if k is not None and k < spec.k:
            return Spectrum(spec.eigenvalues[:k], spec.eigenvectors[:, :k],
                            spec.meta)
        return spec
    if k is None:
        raise DenseCapError(f"dim {H.dim} exceeds dense cap {dense_cap} and no "
                            "k was given for the iterative path")
    return solve_lowest(H, k, tol=tol)


@dataclass
class Pair:
    lower: int
    upper: int
    gap: float
    below_resolution: bool
    parity: tuple[int, int] | None = None   # (+1/-1) labels after rotation


@dataclass
class PairClassification:
    pairs: list[Pair]
    singletons: list[int]
    ambiguous: list[int]          # indices involved in 3-fold near-degeneracies
    adapted: Spectrum             # parity-rotated copy (same object if no swap)


def classify_pairs(spec: Spectrum, gap_tol: float = 0.2,
                   swap: np.ndarray | None = None) -> PairClassification:
    """Greedy adjacent pairing by gap contrast, with optional parity rotation.

    An adjacent gap is a pair gap when it is below gap_tol times the larger
    neighboring gap.  When `swap` (the well-swap permutation, valid at dV=0)
    is given, each paired 2D subspace is rotated into parity eigenstates and
    labeled; resolved pairs are already parity-pure so the rotation is the
    identity there.  Three consecutive small gaps are flagged ambiguous and
    left untouched.
    """
    w = spec.eigenvalues
    k = len(w)
    gaps = np.diff(w)
    scale = max(np.max(np.abs(w)) if k else 0.0, 1.0)

    def is_small(i: int) -> bool:
        neighbors = [gaps[j] for j in (i - 1, i + 1) if 0 <= j < len(gaps)]
        if not neighbors:
            return False
        return gaps[i] < gap_tol * max(neighbors)

    pairs: list[Pair] = []
    ambiguous: list[int] = []
    used = np.zeros(k, dtype=bool)
    i = 0
    while i < len(gaps):
        if used[i] or used[i + 1] or not is_small(i):
            i += 1
            continue
        # a neighboring gap comparable to the candidate gap means the
        # near-degeneracy extends past two states: flag, don't resolve
        cluster = {i, i + 1}
        if i - 1 >= 0 and gaps[i - 1] <= gaps[i] / gap_tol:
            cluster.add(i - 1)
        if i + 1 < len(gaps) and gaps[i + 1] <= gaps[i] / gap_tol:
            cluster.add(i + 2)
        if len(cluster) > 2:
            ambiguous.extend(sorted(cluster))
            used[sorted(cluster)] = True
            i = max(cluster)
            continue
        pairs.append(Pair(lower=i, upper=i + 1, gap=float(gaps[i]),
                          below_resolution=bool(gaps[i] < RESOLUTION * scale)))
        used[i] = used[i + 1] = True
        i += 2
    singletons = [i for i in range(k) if not used[i]]

    adapted = spec
    if swap is not None and pairs:
        vecs = spec.eigenvectors.copy()
        for pair in pairs:
            v1 = vecs[:, pair.lower]
            v2 = vecs[:, pair.upper]
            # well-swap operator restricted to the pair subspace
            p11 = v1 @ v1[swap]
            p12 = v1 @ v2[swap]
            p22 = v2 @ v2[swap]
            pw, pv = np.linalg.eigh(np.array([[p11, p12], [p12, p22]]))
            r1 = pv[0, 0] * v1 + pv[1, 0] * v2
            r2 = pv[0, 1] * v1 + pv[1, 1] * v2
            labels = [int(np.sign(x)) if abs(abs(x) - 1) < 1e-6 else 0
                      for x in pw]
            # keep each rotated vector in the slot it overlaps most, so a
            # resolved pair keeps its eigenvalue <-> vector correspondence
            if abs(pv[0, 0]) < abs(pv[0, 1]):
                r1, r2 = r2, r1
                labels = labels[::-1]
            vecs[:, pair.lower] = r1
            vecs[:, pair.upper] = r2
            pair.parity = (labels[0], labels[1])
        vecs = _fix_phases(vecs)
        adapted = spec.with_vectors(vecs)
    return PairClassification(pairs=pairs, singletons=singletons,
                              ambiguous=ambiguous, adapted=adapted)
