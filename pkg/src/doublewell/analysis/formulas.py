"""Closed-form pair splittings, critical couplings, and tilt thresholds.

Everything factorial goes through log-gamma: the physically interesting
splittings reach scales like 1e-287, far below floating-point range, so the
canonical representation here is sign + log10 magnitude (`LogEnergy`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

LN10 = math.log(10.0)


@dataclass(frozen=True)
class LogEnergy:
    """An energy as sign and log10 of magnitude, immune to underflow."""

    sign: int                 # -1, 0, +1
    log10_magnitude: float    # -inf when sign == 0

    @classmethod
    def from_linear(cls, x: float) -> "LogEnergy":
        if x == 0.0:
            return cls(0, float("-inf"))
        return cls(1 if x > 0 else -1, math.log10(abs(x)))

    @property
    def linear(self) -> float:
        """Float value; overflows to +-inf above ~1e308, underflows below ~1e-308."""
        if self.sign == 0:
            return 0.0
        return self.sign * 10.0 ** self.log10_magnitude

    def scaled(self, factor: float) -> "LogEnergy":
        """Multiply by a linear-range factor, staying in log space."""
        if factor == 0.0 or self.sign == 0:
            return LogEnergy(0, float("-inf"))
        s = self.sign * (1 if factor > 0 else -1)
        return LogEnergy(s, self.log10_magnitude + math.log10(abs(factor)))

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogEnergy(0)"
        pre = "-" if self.sign < 0 else ""
        return f"LogEnergy({pre}1e{self.log10_magnitude:+.4f})"


def log_binomial(n: int, k: int) -> float:
    """ln C(n, k) via log-gamma."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _ratio_log(J0: float, U0: float) -> tuple[int, float]:
    """sign and ln|J0/(2 U0)|."""
    if U0 == 0:
        raise ValueError("U0 must be nonzero")
    if J0 == 0:
        raise ValueError("J0 must be nonzero for a tunneling splitting")
    r = J0 / (2.0 * U0)
    return (1 if r > 0 else -1), math.log(abs(r))


def splitting_symmetric(N: int, nu: int, J0: float, U0: float) -> LogEnergy:
    """Symmetric-trap splitting of the (nu, +/-) pair, in units of U0.

        4 [J0/(2U0)]^(N-2nu) (N-nu)! / (nu! ((N-2nu-1)!)^2)
    """
    if not 0 <= nu < N / 2:
        raise ValueError(f"need 0 <= nu < N/2, got nu={nu}, N={N}")
    rsign, rlog = _ratio_log(J0, U0)
    m = N - 2 * nu
    ln = (math.log(4.0) + m * rlog + math.lgamma(N - nu + 1)
          - math.lgamma(nu + 1) - 2.0 * math.lgamma(m))
    sign = rsign ** m
    return LogEnergy(sign, ln / LN10)


def splitting_resonant(N: int, p: int, J0: float, U0: float) -> LogEnergy:
    """Splitting of the extreme (nu=0) pair at the p-th tilt resonance, in U0.

        4 [J0/(2U0)]^(N-p) (N-p) / (N-p-1)! * sqrt(C(N, p))
    """
    if not 1 <= p <= N - 1:
        raise ValueError(f"need 1 <= p <= N-1, got p={p}, N={N}")
    rsign, rlog = _ratio_log(J0, U0)
    m = N - p
    ln = (math.log(4.0) + m * rlog + math.log(m) - math.lgamma(m)
          + 0.5 * log_binomial(N, p))
    return LogEnergy(rsign ** m, ln / LN10)


def u_crit(N: int, hw: float) -> float:
    """Interaction above which the lowest N+1 states stop being single-level."""
    if N < 2:
        raise ValueError(f"need N >= 2, got {N}")
    return 2.0 * hw / (N * N - 1)


def u_max(N: int, hw: float) -> float:
    """Interaction where the tilt threshold changes branch."""
    return u_crit(N, hw) * (N + 1) / (4.0 * N)


class TiltThreshold(NamedTuple):
    value: float
    branch: str               # "u0_below_max" or "u0_above_max"
    already_crossed: bool     # value <= 0: crossings present at zero tilt


def dv_crit(N: int, U0: float, hw: float) -> TiltThreshold:
    """Critical tilt before excited-level states intrude, both branches.

    The strong-interaction branch goes negative for U0 > u_crit; the sign is
    reported rather than clamped, and sweep-based crossing detection remains
    the authoritative number in that regime.
    """
    if N < 2:
        raise ValueError(f"need N >= 2, got {N}")
    if U0 <= 0:
        raise ValueError(f"need U0 > 0, got {U0}")
    if U0 <= u_max(N, hw):
        v = hw / N
        return TiltThreshold(v, "u0_below_max", v <= 0)
    v = 2.0 * U0 * (math.sqrt(1.0 + 2.0 * hw / U0) - N)
    return TiltThreshold(v, "u0_above_max", v <= 0)


def one_level_max_n(J0: float, J1: float, hw: float) -> int:
    """Largest N satisfying the noninteracting one-level criterion.

    The bound N < 1/2 + (hw - J1)/(2 J0) is strict, so an exactly integer
    bound admits only bound - 1.
    """
    if J0 <= 0:
        raise ValueError(f"need J0 > 0, got {J0}")
    bound = 0.5 + (hw - J1) / (2.0 * J0)
    n = math.floor(bound)
    if n == bound:
        n -= 1
    return max(n, 0)


def decoherence_threshold(N: int, nu: int, J0: float, U0: float) -> LogEnergy:
    """Tilt scale destroying the (nu, +/-) cat pair: 2 d_eps_nu / (N - 2nu), in U0."""
    return splitting_symmetric(N, nu, J0, U0).scaled(2.0 / (N - 2 * nu))


def resonance_positions(N: int, U0: float) -> np.ndarray:
    """The N-1 tilt resonances dV_p = 2 p U0, p = 1..N-1."""
    if N < 2:
        raise ValueError(f"need N >= 2, got {N}")
    return 2.0 * U0 * np.arange(1, N, dtype=np.float64)


def resonance_halfwidth_formula(N: int, p: int, J0: float, U0: float) -> LogEnergy:
    """Tilt deviation tolerated by the extreme cat at resonance p (closed form).

        2 d_eps_0^p / (N - p), in units of U0.

    Only nu = 0 has a closed form; widths for nu > 0 are measured from tilt
    sweeps (see analysis.sweeps.resonance_width).
    """
    return splitting_resonant(N, p, J0, U0).scaled(2.0 / (N - p))
