"""Spectra of the non-Hermitian Harper chain.

Builds the asymmetric-hopping Harper operator, sweeps its spectrum over flux
(butterfly and cocoon) and over the non-Hermiticity parameter (transition
fan), locates the double-pitchfork transitions to complex eigenvalues, and
machine-verifies the model's spectral symmetries.
"""

from .bifurcation import (
    BifurcationEvent,
    PitchforkTrace,
    QuartetGrouping,
    complex_count,
    find_critical_g,
    pitchfork_trace,
    quartet_grouping,
)
from .eigensolver import (
    EigenPair,
    Spectrum,
    canonical_order,
    charpoly_coefficients,
    charpoly_roots_oracle,
    complex_eigenvalues_via_real_embedding,
    eigenpair,
    eigenvalues,
    match_multisets,
)
from .errors import NonConvergenceError, NumericalError, PairingError
from .operator import (
    Constant,
    FluxRational,
    Harper,
    OperatorSpec,
    PotentialKind,
    RandomOnsite,
    build_2d_hofstadter_matrix,
    build_harper_matrix,
    onsite_potential,
)
from .sweep import GSweepDataset, SweepDataset, flux_sweep, g_sweep, spectrum_for, union_spectrum
from .symmetry import (
    SymmetryReport,
    conjugation_order_parameter,
    participation_ratio,
    run_verification_suite,
    verification_grid,
    verify_conjugation_closure,
    verify_energy_negation,
    verify_flux_periodicity,
    verify_flux_reflection,
    verify_g_reflection,
    verify_open_bc_reality,
)

__version__ = "0.1.0"
