"""Independent oracles the tests check the library against.

Everything here is deliberately primitive: brute-force enumeration, exact
Fraction arithmetic, closed-form 3x3 eigenvalues.  None of it shares code
with the package paths it checks.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

import numpy as np


def brute_force_basis(N: int) -> set[tuple[int, int, int, int]]:
    return {occ for occ in product(range(N + 1), repeat=4) if sum(occ) == N}


def log10_fraction(fr: Fraction) -> float:
    """Exact-ish log10 of a positive rational with huge numerator/denominator."""
    return math.log10(fr.numerator) - math.log10(fr.denominator)


def eq_splitting_symmetric_fraction(N: int, nu: int, j_over_u: Fraction) -> Fraction:
    """Symmetric pair splitting in U0 units, by exact rational arithmetic."""
    m = N - 2 * nu
    return (4 * (j_over_u / 2) ** m * Fraction(math.factorial(N - nu),
            math.factorial(nu) * math.factorial(m - 1) ** 2))


def eq_splitting_resonant_log10(N: int, p: int, j_over_u: Fraction) -> float:
    """log10 of the nu=0 resonant splitting in U0 units (exact up to the sqrt)."""
    m = N - p
    rational = 4 * (j_over_u / 2) ** m * Fraction(m, math.factorial(m - 1))
    return log10_fraction(rational) + 0.5 * log10_fraction(
        Fraction(math.comb(N, p)))


def noninteracting_spectrum(N: int, J0: float, J1: float, dV: float,
                            hw: float) -> np.ndarray:
    """All eigenvalues of the noninteracting two-level model, sorted.

    Single-particle energies are +-sqrt((dV/2)^2 + J^2) per level (plus hw for
    the upper level); bosons fill the four modes in every way summing to N.
    """
    s0 = math.sqrt((dV / 2) ** 2 + J0 ** 2)
    s1 = math.sqrt((dV / 2) ** 2 + J1 ** 2)
    singles = (-s0, s0, hw - s1, hw + s1)
    out = []
    for n1 in range(N + 1):
        for n2 in range(N + 1 - n1):
            for n3 in range(N + 1 - n1 - n2):
                n4 = N - n1 - n2 - n3
                out.append(n1 * singles[0] + n2 * singles[1]
                           + n3 * singles[2] + n4 * singles[3])
    return np.sort(np.array(out))


def one_level_n2_spectrum(J0: float, U0: float) -> np.ndarray:
    """Analytic spectrum of the N=2 one-level model at zero tilt."""
    r = math.sqrt(U0 * U0 + 4 * J0 * J0)
    return np.sort(np.array([U0 - r, 2 * U0, U0 + r]))


def assert_close(actual, expected, rel=0.0, abs_=0.0, msg=""):
    actual = np.asarray(actual, dtype=float)
    expected = np.asarray(expected, dtype=float)
    tol = rel * np.maximum(np.abs(expected), 1e-300) + abs_
    err = np.abs(actual - expected)
    assert np.all(err <= tol), (
        f"{msg}: max deviation {err.max():.3g} exceeds tolerance "
        f"(rel={rel}, abs={abs_})")
