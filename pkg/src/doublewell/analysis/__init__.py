"""Physics post-processing: closed forms, cat detection, sweeps, crossings."""

from __future__ import annotations

from ..fock import Basis
from ..hamiltonian import ModelParams, swap_permutation
from ..spectrum import PairClassification, Spectrum, classify_pairs
from .cats import (
    FIDELITY_FLOOR,
    CatReport,
    best_cat,
    cat_fidelity,
    excited_occupation,
    localized_component,
    resonance_adapt,
)
from .formulas import (
    LogEnergy,
    TiltThreshold,
    decoherence_threshold,
    dv_crit,
    log_binomial,
    one_level_max_n,
    resonance_halfwidth_formula,
    resonance_positions,
    splitting_resonant,
    splitting_symmetric,
    u_crit,
    u_max,
)
from .sweeps import (
    Crossing,
    ResonanceWidth,
    SweepResult,
    detect_avoided_crossings,
    first_crossing,
    resonance_width,
    sweep_interaction,
    sweep_tilt,
)


def adapt_spectrum(spec: Spectrum, basis: Basis, params: ModelParams,
                   gap_tol: float = 0.2) -> tuple[Spectrum, PairClassification]:
    """Classify near-degenerate pairs and fix their arbitrary solver mixtures.

    At dV=0, paired subspaces are rotated into well-swap parity eigenstates;
    at finite tilt, sub-resolution pairs at a resonance are recombined into
    cats when the closed-form width condition allows it (localized otherwise).
    """
    swap = swap_permutation(basis) if params.dV == 0 else None
    cls = classify_pairs(spec, gap_tol=gap_tol, swap=swap)
    if params.dV == 0:
        return cls.adapted, cls
    return resonance_adapt(spec, cls, basis, params), cls


__all__ = [
    "FIDELITY_FLOOR", "CatReport", "Crossing", "LogEnergy", "ResonanceWidth",
    "SweepResult", "TiltThreshold", "adapt_spectrum", "best_cat",
    "cat_fidelity", "decoherence_threshold", "detect_avoided_crossings",
    "dv_crit", "excited_occupation", "first_crossing", "localized_component",
    "log_binomial", "one_level_max_n", "resonance_adapt",
    "resonance_halfwidth_formula", "resonance_positions", "resonance_width",
    "splitting_resonant", "splitting_symmetric", "sweep_interaction",
    "sweep_tilt", "u_crit", "u_max",
]
