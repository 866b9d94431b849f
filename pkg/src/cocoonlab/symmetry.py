"""Machine verification of the spectral symmetries and eigenvector diagnostics.

Each verify_* function evaluates both sides of one symmetry from scratch and
reports the worst multiset-matching distance.  All distances are expressed on
a common scale (eigenvector residuals are divided by ||H||_F), so a report
passes exactly when max_distance <= tolerance.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .eigensolver import DEFAULT_TOL, Spectrum, eigenpair, match_multisets
from .operator import Harper, OperatorSpec, PotentialKind, build_harper_matrix
from .sweep import spectrum_for

SPECTRUM_TOL = 1e-8     # multiset tolerance for all spectrum-level checks
REALITY_TOL = 1e-9      # |Im| bound for spectra that must be real
SIMPLE_GAP_FACTOR = 1e-6  # eigenvalue counts as simple if its gap exceeds this * ||H||_F


@dataclass(frozen=True)
class SymmetryReport:
    """Outcome of one symmetry check at one parameter point."""

    name: str
    params: dict
    max_distance: float
    tolerance: float
    passed: bool
    worst_pair: Optional[tuple] = None
    notes: dict = field(default_factory=dict)

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        pt = " ".join(f"{k}={v}" for k, v in self.params.items())
        return (f"{status} {self.name:<22} {pt}  max={self.max_distance:.3e} "
                f"tol={self.tolerance:.1e}")


def _report(name, params, max_distance, tolerance, worst_pair=None, notes=None):
    return SymmetryReport(name, params, float(max_distance), float(tolerance),
                          bool(max_distance <= tolerance), worst_pair, notes or {})


def verify_flux_periodicity(L: int, q: int, p: int, g: float, *,
                            boundary: str = "periodic",
                            potential: Optional[PotentialKind] = None) -> SymmetryReport:
    """Matrices at flux numerators q and q+L must be entry-identical (exactly)."""
    potential = potential if potential is not None else Harper()
    A = build_harper_matrix(OperatorSpec(L, q, p, g, boundary, potential))
    B = build_harper_matrix(OperatorSpec(L, q + L, p, g, boundary, potential))
    dist = float(np.max(np.abs(A - B)))
    return _report("flux_periodicity", dict(L=L, q=q, p=p, g=g), dist, 0.0)


def _simple_eigenvalue(spectrum: Spectrum) -> Optional[complex]:
    """The best-separated eigenvalue, or None if every gap is below the cutoff."""
    vals = spectrum.values
    if len(vals) < 2:
        return complex(vals[0]) if len(vals) else None
    dist = np.abs(vals[:, None] - vals[None, :])
    np.fill_diagonal(dist, np.inf)
    gaps = dist.min(axis=1)
    k = int(np.argmax(gaps))
    if gaps[k] <= SIMPLE_GAP_FACTOR * spectrum.matrix_norm:
        return None
    return complex(vals[k])


def verify_energy_negation(L: int, q: int, p: int, g: float, *,
                           boundary: str = "periodic",
                           potential: Optional[PotentialKind] = None,
                           tol: float = DEFAULT_TOL) -> SymmetryReport:
    """spectrum(q, p) must equal -spectrum(q, p + L/2); checked at multiset and
    eigenvector level.

    The eigenvector check maps one well-separated eigenpair (E, x) through
    x'_m = (-1)^m x_m and verifies ||H(p + L/2) x' + E x'|| <= tol * ||H||_F.
    Requires even L: the shifted wave vector k + pi lies on the momentum grid
    only when L/2 is an integer.
    """
    if L % 2 != 0:
        raise ValueError(
            f"energy negation needs even L (k + pi must be an allowed momentum), got L={L}"
        )
    potential = potential if potential is not None else Harper()
    p2 = (p + L // 2) % L
    sa = spectrum_for(OperatorSpec(L, q, p, g, boundary, potential), tol)
    sb = spectrum_for(OperatorSpec(L, q, p2, g, boundary, potential), tol)
    dist, worst = match_multisets(sa.values, -sb.values)

    notes = {}
    target = _simple_eigenvalue(sa)
    if target is not None:
        A = build_harper_matrix(OperatorSpec(L, q, p, g, boundary, potential))
        B = build_harper_matrix(OperatorSpec(L, q, p2, g, boundary, potential))
        pair = eigenpair(A, target)
        mapped = pair.vector * ((-1.0) ** np.arange(L))
        resid = float(np.linalg.norm(B @ mapped - (-pair.value) * mapped))
        notes["vector_residual"] = resid
        notes["vector_eigenvalue"] = pair.value
        dist = max(dist, resid / max(sa.matrix_norm, 1.0))
    else:
        notes["vector_check"] = "skipped: no eigenvalue separated beyond the cutoff"
    return _report("energy_negation", dict(L=L, q=q, p=p, g=g), dist,
                   SPECTRUM_TOL, worst, notes)


def verify_flux_reflection(L: int, q: int, p: int, g: float, *,
                           boundary: str = "periodic",
                           potential: Optional[PotentialKind] = None,
                           tol: float = DEFAULT_TOL) -> SymmetryReport:
    """spectrum(q, p) must equal spectrum(L - q, L - p): flux 1 - phi with k -> -k."""
    potential = potential if potential is not None else Harper()
    sa = spectrum_for(OperatorSpec(L, q, p, g, boundary, potential), tol)
    sb = spectrum_for(OperatorSpec(L, (L - q) % L, (L - p) % L, g, boundary, potential), tol)
    dist, worst = match_multisets(sa.values, sb.values)
    return _report("flux_reflection", dict(L=L, q=q, p=p, g=g), dist,
                   SPECTRUM_TOL, worst)


def verify_g_reflection(L: int, q: int, p: int, g: float, *,
                        boundary: str = "periodic",
                        potential: Optional[PotentialKind] = None,
                        tol: float = DEFAULT_TOL) -> SymmetryReport:
    """spectrum(g) must equal spectrum(-g): transposition swaps e^g and e^-g."""
    potential = potential if potential is not None else Harper()
    sa = spectrum_for(OperatorSpec(L, q, p, g, boundary, potential), tol)
    sb = spectrum_for(OperatorSpec(L, q, p, -g, boundary, potential), tol)
    dist, worst = match_multisets(sa.values, sb.values)
    return _report("g_reflection", dict(L=L, q=q, p=p, g=g), dist,
                   SPECTRUM_TOL, worst)


def verify_conjugation_closure(spectrum: Spectrum) -> SymmetryReport:
    """The multiset must equal its own conjugate; exact for the real-matrix solver."""
    dist, worst = match_multisets(spectrum.values, np.conj(spectrum.values))
    params = {}
    if spectrum.source_spec is not None:
        s = spectrum.source_spec
        params = dict(L=s.L, q=s.q, p=s.p, g=s.g)
    return _report("conjugation_closure", params, dist, SPECTRUM_TOL, worst)


def verify_open_bc_reality(L: int, q: int, p: int, g: float, *,
                           potential: Optional[PotentialKind] = None,
                           tol: float = DEFAULT_TOL) -> SymmetryReport:
    """Open-chain spectra must be real and independent of g (gauge similarity).

    The diagonal rescaling x_m -> e^{-g m} x_m removes g on an open chain, so
    spectrum(open, g) = spectrum(open, 0) exactly; the solver realizes the same
    similarity internally, which keeps the check meaningful at any |g| despite
    the e^{|g| L} conditioning of the unbalanced matrix.  For |g| > 1 with
    L > 100 a warning is raised and the tolerance is loosened tenfold
    (documented schedule; the similarity route has never needed it).
    """
    potential = potential if potential is not None else Harper()
    sa = spectrum_for(OperatorSpec(L, q, p, g, "open", potential), tol)
    sb = spectrum_for(OperatorSpec(L, q, p, 0.0, "open", potential), tol)
    dist, worst = match_multisets(sa.values, sb.values)
    max_im = float(np.max(np.abs(sa.values.imag)))
    tolerance = SPECTRUM_TOL
    notes = {"max_im": max_im}
    if abs(g) > 1.0 and L > 100:
        warnings.warn(
            f"open-chain reality check at |g|={abs(g):.3g} > 1, L={L} > 100: "
            f"e^(|g| L) conditioning; tolerance loosened to {10 * tolerance:g}",
            RuntimeWarning, stacklevel=2,
        )
        tolerance *= 10.0
    # fold the reality bound in on the common scale: |Im| <= tolerance / 10
    dist = max(dist, max_im * (SPECTRUM_TOL / REALITY_TOL))
    return _report("open_bc_reality", dict(L=L, q=q, p=p, g=g), dist,
                   tolerance, worst, notes)


# -- eigenvector diagnostics ---------------------------------------------------

def _check_unit_norm(vector: np.ndarray) -> np.ndarray:
    v = np.asarray(vector, dtype=complex)
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > 1e-12:
        raise ValueError(f"vector must be unit norm within 1e-12, got ||v|| = {nrm!r}")
    return v


def participation_ratio(vector) -> float:
    """PR = 1 / sum |x_m|^4: effective number of occupied sites, in [1, L]."""
    v = _check_unit_norm(vector)
    return float(1.0 / np.sum(np.abs(v) ** 4))


def conjugation_order_parameter(vector) -> float:
    """eta = 1 - |sum x_m^2|: zero iff the state is a global phase times a real vector.

    Equals the minimum over global phases of twice the squared norm of the
    imaginary part, so it measures how far the state is from conjugation
    symmetric; invariant under phase rotation by construction.
    """
    v = _check_unit_norm(vector)
    return float(max(0.0, 1.0 - abs(np.sum(v * v))))


# -- randomized regression grids -----------------------------------------------

def verification_grid(n_points: int = 100, seed: int = 20140529,
                      sizes=(4, 6, 10, 50)) -> list:
    """Reproducible random parameter points (L, q, p, g) with g in [-1, 1]."""
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(n_points):
        L = int(rng.choice(sizes))
        pts.append((L, int(rng.integers(0, 2 * L)), int(rng.integers(0, L)),
                    float(rng.uniform(-1.0, 1.0))))
    return pts


def run_verification_suite(points, *, tol: float = DEFAULT_TOL,
                           include_open_bc: bool = True) -> list:
    """All symmetry checks over the grid; returns one SymmetryReport per check."""
    reports = []
    for L, q, p, g in points:
        reports.append(verify_flux_periodicity(L, q, p, g))
        if L % 2 == 0:
            reports.append(verify_energy_negation(L, q, p, g, tol=tol))
        reports.append(verify_flux_reflection(L, q, p, g, tol=tol))
        reports.append(verify_g_reflection(L, q, p, g, tol=tol))
        reports.append(verify_conjugation_closure(
            spectrum_for(OperatorSpec(L, q % L, p, g), tol)))
        if include_open_bc:
            reports.append(verify_open_bc_reality(L, q, p, g, tol=tol))
    return reports
