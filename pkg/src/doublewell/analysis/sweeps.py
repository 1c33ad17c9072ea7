"""Parameter sweeps, avoided-crossing detection, and first-crossing location.

Sweep points are independent diagonalizations gathered in grid order, so
results are deterministic regardless of worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from ..fock import Basis, enumerate_basis, one_level_basis
from ..hamiltonian import ModelParams, build, number_operator, swap_permutation
from ..spectrum import classify_pairs, solve_auto
from .cats import CatReport, best_cat, resonance_adapt
from .formulas import LogEnergy, splitting_resonant


@dataclass
class SweepResult:
    param: Literal["dV", "U0"]
    grid: np.ndarray
    eigenvalues: np.ndarray                 # shape (len(grid), k)
    occupations: np.ndarray                 # excited-level occupancy, same shape
    reports: list[list[CatReport]] | None   # per point, per eigenstate
    context: dict                           # base params, basis N/mode, k, ...


def _params_at(base: ModelParams, param: str, value: float) -> ModelParams:
    if param == "dV":
        return replace(base, dV=value)
    if param == "U0":
        if base.U0 == 0:
            raise ValueError("interaction sweeps need base U0 != 0 to fix the "
                             "U1/U0 and U01/U0 ratios")
        scale = value / base.U0
        return replace(base, U0=value, U1=base.U1 * scale, U01=base.U01 * scale)
    raise ValueError(f"unknown sweep parameter {param!r}")


def _solve_point(base: ModelParams, basis: Basis, param: str, value: float,
                 k: int, gap_tol: float, with_reports: bool,
                 dense_cap: int, tol: float):
    params = _params_at(base, param, value)
    spec = solve_auto(build(params, basis), k=k, dense_cap=dense_cap, tol=tol)
    m1 = number_operator(basis, level=1)
    occ = (spec.eigenvectors[:, :k] ** 2).T @ m1
    if not with_reports:
        return spec.eigenvalues[:k], occ, None
    swap = swap_permutation(basis) if params.dV == 0 else None
    cls = classify_pairs(spec, gap_tol=gap_tol, swap=swap)
    adapted = cls.adapted if params.dV == 0 else \
        resonance_adapt(spec, cls, basis, params)
    reports = [best_cat(adapted.vector(j), basis, k=j) for j in range(k)]
    return spec.eigenvalues[:k], occ, reports


def _run_sweep(base: ModelParams, basis: Basis, param: str, grid, k: int,
               gap_tol: float, with_reports: bool, dense_cap: int, tol: float,
               workers: int) -> SweepResult:
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or len(grid) == 0:
        raise ValueError("sweep grid must be a nonempty 1D array")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("sweep grid must be strictly increasing")
    if not 0 < k <= basis.dim:
        raise ValueError(f"need 0 < k <= dim, got k={k}, dim={basis.dim}")

    def point(v):
        return _solve_point(base, basis, param, v, k, gap_tol, with_reports,
                            dense_cap, tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(point, grid))
    else:
        results = [point(v) for v in grid]
    eigenvalues = np.vstack([r[0] for r in results])
    occupations = np.vstack([r[1] for r in results])
    reports = [r[2] for r in results] if with_reports else None
    context = {"base": base, "N": basis.N, "one_level": basis.one_level,
               "k": k, "gap_tol": gap_tol, "dense_cap": dense_cap, "tol": tol}
    return SweepResult(param=param, grid=grid, eigenvalues=eigenvalues,
                       occupations=occupations, reports=reports,
                       context=context)


def sweep_tilt(base: ModelParams, basis: Basis, dv_grid, k: int,
               gap_tol: float = 0.2, with_reports: bool = True,
               dense_cap: int = 4000, tol: float = 1e-10,
               workers: int = 1) -> SweepResult:
    """Lowest-k eigenvalues and cat reports along a tilt grid."""
    return _run_sweep(base, basis, "dV", dv_grid, k, gap_tol, with_reports,
                      dense_cap, tol, workers)


def sweep_interaction(base: ModelParams, basis: Basis, u_grid, k: int,
                      gap_tol: float = 0.2, with_reports: bool = True,
                      dense_cap: int = 4000, tol: float = 1e-10,
                      workers: int = 1) -> SweepResult:
    """Sweep U0 with U1/U0 and U01/U0 held at the base params' ratios."""
    return _run_sweep(base, basis, "U0", u_grid, k, gap_tol, with_reports,
                      dense_cap, tol, workers)


@dataclass
class Crossing:
    series: int            # gap between eigenvalues (series, series+1)
    location: float        # interpolated position of the gap minimum
    min_gap: float         # interpolated minimum gap
    p: int | None          # nearest resonance index, if in range
    predicted: float | None
    residual: float | None
    resolved: bool         # dip width resolved by the grid step


def detect_avoided_crossings(sweep: SweepResult) -> list[Crossing]:
    """Local minima of all adjacent-gap series, matched to dV_p = 2 p U0.

    The minimum of each dip is refined by fitting a parabola to gap^2 (exact
    for an isolated two-level crossing).  A dip whose estimated half width
    g_min / slope falls below the grid step is flagged unresolved: its true
    location is not determined by this grid.
    """
    if sweep.param != "dV":
        raise ValueError("avoided-crossing detection runs on tilt sweeps")
    base: ModelParams = sweep.context["base"]
    N = sweep.context["N"]
    U0 = base.U0
    grid = sweep.grid
    out: list[Crossing] = []
    for s in range(sweep.eigenvalues.shape[1] - 1):
        g = sweep.eigenvalues[:, s + 1] - sweep.eigenvalues[:, s]
        g2 = g * g
        for i in range(1, len(grid) - 1):
            if not (g[i] < g[i - 1] and g[i] <= g[i + 1]):
                continue
            h1, h2 = grid[i] - grid[i - 1], grid[i + 1] - grid[i]
            step = max(h1, h2)
            y0, y1, y2 = g2[i - 1], g2[i], g2[i + 1]
            # parabola through the three bracketing points of g^2 (exact for
            # an isolated two-level crossing, where g^2 is quadratic)
            denom = h2 * (y0 - y1) + h1 * (y2 - y1)
            if denom <= 0:
                loc, gmin, width = float(grid[i]), float(g[i]), 0.0
            else:
                off = 0.5 * (h2 * h2 * (y0 - y1) - h1 * h1 * (y2 - y1)) / denom
                off = float(np.clip(off, -h1, h2))
                a = denom / (h1 * h2 * (h1 + h2))          # curvature of g^2
                vertex = y1 - a * off * off
                loc = float(grid[i] + off)
                gmin = float(np.sqrt(max(vertex, 0.0)))
                width = float(gmin / np.sqrt(a))
            resolved = bool(width >= step)
            p = pred = resid = None
            if U0 != 0:
                cand = round(loc / (2.0 * abs(U0)))
                if 1 <= cand <= N - 1:
                    p = int(cand)
                    pred = 2.0 * p * abs(U0)
                    resid = abs(loc - pred)
            out.append(Crossing(series=s, location=loc, min_gap=gmin, p=p,
                                predicted=pred, residual=resid,
                                resolved=resolved))
    return out


def first_crossing(sweep: SweepResult, rel_tol: float = 1e-4) -> float | None:
    """Smallest swept value where an excited-level state enters the lowest N+1.

    Before the first crossing the lowest N+1 eigenstates all live in the M=0
    block (excited occupancy ~ 0); past it an M>=1 intruder has crossed below
    the band top.  The total excited occupancy changes by integer jumps at
    these crossings (M-changing couplings move atoms in pairs, so an M=1
    intruder crosses exactly), making the occupancy of the lowest N+1 states
    a clean sign function.  The bracketing grid interval is bisected down to
    rel_tol relative width.  None when no crossing occurs in range.
    """
    N = sweep.context["N"]
    k = sweep.context["k"]
    if k < N + 2:
        raise ValueError(f"first_crossing needs k >= N+2 = {N + 2}, got {k}")
    if sweep.context["one_level"]:
        raise ValueError("first_crossing needs a two-level sweep")
    base: ModelParams = sweep.context["base"]
    basis = enumerate_basis(N)

    def intruded(occ_row: np.ndarray) -> bool:
        return bool(occ_row[: N + 1].max() > 0.5)

    def intruded_at(value: float) -> bool:
        params = _params_at(base, sweep.param, value)
        spec = solve_auto(build(params, basis), k=k,
                          dense_cap=sweep.context["dense_cap"],
                          tol=sweep.context["tol"])
        m1 = number_operator(basis, level=1)
        occ = (spec.eigenvectors[:, : N + 1] ** 2).T @ m1
        return bool(occ.max() > 0.5)

    flags = [intruded(row) for row in sweep.occupations]
    hits = [i for i, f in enumerate(flags) if f]
    if not hits:
        return None
    j = hits[0]
    if j == 0:
        return float(sweep.grid[0])
    lo, hi = float(sweep.grid[j - 1]), float(sweep.grid[j])
    while (hi - lo) > rel_tol * max(abs(hi), abs(lo), 1e-30):
        mid = 0.5 * (lo + hi)
        if intruded_at(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass
class ResonanceWidth:
    value: LogEnergy          # tolerated tilt deviation, units of U0
    method: Literal["formula", "measured"]
    min_gap: float | None = None   # measured pair gap at resonance (U0 units)


def _pair_ranks_at_resonance(N: int, nu: int, p: int) -> tuple[int, int]:
    """Sorted positions of the (nu, p) degenerate pair among diagonal energies."""
    dv = 2.0 * p
    diag = np.array([a * (a - 1) + (N - a) * (N - a - 1) + 0.5 * dv * (2 * a - N)
                     for a in range(N + 1)])
    order = np.argsort(diag, kind="stable")
    ranks = np.empty(N + 1, dtype=int)
    ranks[order] = np.arange(N + 1)
    r = sorted((int(ranks[nu]), int(ranks[N - nu - p])))
    if r[1] != r[0] + 1:
        raise RuntimeError(f"resonant pair (nu={nu}, p={p}) is not adjacent in "
                           f"the sorted spectrum at N={N}")
    return r[0], r[1]


def resonance_width(N: int, nu: int, p: int, J0: float, U0: float,
                    window: float = 0.6, points: int = 961) -> ResonanceWidth:
    """Tolerated tilt deviation 2 d_eps^p_nu / (N - 2nu - p), in units of U0.

    nu=0 uses the closed form.  For nu > 0 no closed form exists, so the pair
    splitting is measured as the minimum avoided-crossing gap of a one-level
    tilt sweep through dV_p, and the result is labeled accordingly.
    """
    if not 1 <= p <= N - 1:
        raise ValueError(f"need 1 <= p <= N-1, got p={p}")
    if not 0 <= nu < (N - p) / 2:
        raise ValueError(f"need 0 <= nu < (N-p)/2, got nu={nu}")
    if nu == 0:
        return ResonanceWidth(
            value=splitting_resonant(N, p, J0, U0).scaled(2.0 / (N - p)),
            method="formula")
    from ..fock import one_level_basis
    base = ModelParams.one_level(J0=J0 / abs(U0), U0=np.sign(U0) * 1.0)
    basis = one_level_basis(N)
    lo, hi = 2.0 * p - window, 2.0 * p + window
    grid = np.linspace(lo, hi, points)
    sweep = sweep_tilt(base, basis, grid, k=N + 1, with_reports=False)
    r0, _ = _pair_ranks_at_resonance(N, nu, p)
    g = sweep.eigenvalues[:, r0 + 1] - sweep.eigenvalues[:, r0]
    gap = float(g.min())
    value = LogEnergy.from_linear(gap).scaled(2.0 / (N - 2 * nu - p))
    return ResonanceWidth(value=value, method="measured", min_gap=gap)
