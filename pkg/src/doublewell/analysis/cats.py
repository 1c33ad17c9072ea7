"""Cat-state identification in computed eigenvectors.

An ideal (nu, p, +/-) cat lives on the two lowest-level Fock components
|nu, N-nu> and |N-nu-p, nu+p> (tensored with an empty excited level), with p=0
recovering the symmetric-trap pairs.  Two measures of "how cat" a vector is:

  * cat_fidelity  -- the bare squared overlap with the ideal two-component
    cat.  Exact, but it also penalizes benign tunneling dressing of the
    components themselves.
  * CatReport.fidelity -- the squared overlap after projecting onto the
    two-component plane and renormalizing.  1.0 for any balanced, sign-pure
    superposition, 0.5 for a fully localized state, insensitive to dressing.

best_cat searches (nu, p, sign) by the bare overlap (which is support
weighted, so the argmax is well defined) and reports the renormalized figure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..fock import Basis, FockState
from ..hamiltonian import ModelParams, number_operator
from ..spectrum import PairClassification, Spectrum
from .formulas import resonance_halfwidth_formula

FIDELITY_FLOOR = 0.75


@dataclass(frozen=True)
class CatReport:
    """Best cat interpretation of one eigenvector.

    localized=True marks states whose pair-plane content is one-sided (below
    the fidelity floor) or the balanced single-component state at nu = N/2;
    for those, nu/p/sign describe the best pair-plane candidate anyway and
    `component` holds the dominant |m, N-m> occupation m.
    """

    k: int
    nu: int
    p: int
    sign: int                 # +1, -1, or 0 for the balanced singleton
    fidelity: float           # renormalized pair-plane fidelity
    raw_overlap: float        # bare squared overlap with the ideal cat
    weight: float             # probability on the two pair components
    excited_occ: float
    localized: bool
    component: int | None = None


def _pair_indices(basis: Basis, nu: int, p: int) -> tuple[int, int]:
    N = basis.N
    a = basis.index_of(FockState(nu, N - nu, 0, 0))
    b = basis.index_of(FockState(N - nu - p, nu + p, 0, 0))
    return a, b


def cat_fidelity(vec: np.ndarray, basis: Basis, nu: int, p: int,
                 sign: int) -> float:
    """Bare squared overlap of vec with |Psi_sign; nu, p> x |0, 0>."""
    N = basis.N
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if not 0 <= p <= N - 1:
        raise ValueError(f"need 0 <= p <= N-1, got p={p}")
    if not 0 <= nu < (N - p) / 2:
        raise ValueError(f"need 0 <= nu < (N-p)/2, got nu={nu}, N={N}, p={p}")
    ia, ib = _pair_indices(basis, nu, p)
    amp = (vec[ia] + sign * vec[ib]) / np.sqrt(2.0)
    return float(min(amp * amp, 1.0))


def excited_occupation(vec: np.ndarray, basis: Basis) -> float:
    """<nL1 + nR1> of a normalized coefficient vector."""
    m = number_operator(basis, level=1)
    return float(np.dot(vec * vec, m))


def localized_component(vec: np.ndarray, basis: Basis) -> tuple[int, float]:
    """Dominant |m, N-m> x |0,0> component and its probability."""
    N = basis.N
    probs = [vec[basis.index_of(FockState(m, N - m, 0, 0))] ** 2
             for m in range(N + 1)]
    m = int(np.argmax(probs))
    return m, float(probs[m])


def best_cat(vec: np.ndarray, basis: Basis, k: int = -1,
             fidelity_floor: float = FIDELITY_FLOOR) -> CatReport:
    """Argmax of the bare cat overlap over (nu, p, sign), renormalized report."""
    N = basis.N
    if N == 0:
        return CatReport(k=k, nu=0, p=0, sign=0, fidelity=1.0,
                         raw_overlap=float(vec[0] ** 2),
                         weight=float(vec[0] ** 2), excited_occ=0.0,
                         localized=True, component=0)
    best = None   # (raw, weight, nu, p, sign)
    for p in range(N):
        nu_top = (N - p + 1) // 2   # nu < (N-p)/2
        for nu in range(nu_top):
            ia, ib = _pair_indices(basis, nu, p)
            ca, cb = vec[ia], vec[ib]
            w = ca * ca + cb * cb
            for sign in (+1, -1):
                raw = (ca + sign * cb) ** 2 / 2.0
                if best is None or raw > best[0]:
                    best = (raw, w, nu, p, sign)
    raw, weight, nu, p, sign = best
    fid = raw / weight if weight > 0 else 0.0
    m, mprob = localized_component(vec, basis)
    occ = excited_occupation(vec, basis)
    # balanced singleton: for even N the |N/2, N/2> component is not part of
    # any valid pair; it wins when it outweighs every two-component candidate
    if N % 2 == 0:
        ihalf = basis.index_of(FockState(N // 2, N // 2, 0, 0))
        chalf = vec[ihalf] ** 2
        if chalf > raw:
            return CatReport(k=k, nu=N // 2, p=0, sign=0, fidelity=1.0,
                             raw_overlap=float(chalf), weight=float(chalf),
                             excited_occ=occ, localized=True, component=N // 2)
    localized = fid < fidelity_floor
    return CatReport(k=k, nu=nu, p=p, sign=sign, fidelity=float(min(fid, 1.0)),
                     raw_overlap=float(min(raw, 1.0)), weight=float(weight),
                     excited_occ=occ, localized=localized,
                     component=m if localized else None)


def resonance_adapt(spec: Spectrum, cls: PairClassification, basis: Basis,
                    params: ModelParams) -> Spectrum:
    """Rebuild cat pairs inside numerically degenerate subspaces at finite tilt.

    Eigensolvers return arbitrary mixtures within a pair whose splitting is
    below machine resolution.  At dV=0 the well-swap rotation fixes this; at a
    tilt resonance there is no exact symmetry, so instead each sub-resolution
    pair is rotated to maximally localized states via the imbalance operator
    and recombined into +/- cats -- but only when the detuning from the
    matching resonance lies inside the closed-form nu=0 half width (a lower
    bound on the true width for any nu, so cats are never fabricated where
    theory says states localize).
    """
    sub = [pair for pair in cls.pairs if pair.below_resolution]
    if not sub or params.dV == 0:
        return spec
    N = basis.N
    imb = number_operator(basis, well="L") - number_operator(basis, well="R")
    vecs = spec.eigenvectors.copy()
    changed = False
    for pair in sub:
        v1 = vecs[:, pair.lower]
        v2 = vecs[:, pair.upper]
        q11 = v1 @ (imb * v1)
        q12 = v1 @ (imb * v2)
        q22 = v2 @ (imb * v2)
        qw, qv = np.linalg.eigh(np.array([[q11, q12], [q12, q22]]))
        if abs(qw[0] - qw[1]) < 1e-6:
            continue   # no imbalance contrast; nothing to localize
        wa = qv[0, 0] * v1 + qv[1, 0] * v2
        wb = qv[0, 1] * v1 + qv[1, 1] * v2
        ma, pa = localized_component(wa, basis)
        mb, pb = localized_component(wb, basis)
        if min(pa, pb) < 0.5 or ma == mb:
            continue   # not a localized lowest-level pair (e.g. excited band)
        nu, other = min(ma, mb), max(ma, mb)
        p = N - nu - other
        if not (1 <= p <= N - 1 and nu < (N - p) / 2):
            continue
        if params.U0 == 0 or params.J0 == 0:
            continue
        detune = abs(abs(params.dV) - 2.0 * p * abs(params.U0))
        half = resonance_halfwidth_formula(N, p, params.J0, params.U0)
        within = detune <= half.scaled(abs(params.U0)).linear or \
            detune <= 1e-9 * abs(params.U0)
        if not within:
            # theory says localized here; keep the localized rotation
            vecs[:, pair.lower] = wa if ma < mb else wb
            vecs[:, pair.upper] = wb if ma < mb else wa
            changed = True
            continue
        plus = (wa + wb) / np.sqrt(2.0)
        minus = (wa - wb) / np.sqrt(2.0)
        vecs[:, pair.lower] = plus
        vecs[:, pair.upper] = minus
        changed = True
    if not changed:
        return spec
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return spec.with_vectors(vecs * signs)
