"""Eigenvalue machinery for dense real matrices with exact conjugation bookkeeping.

Three things live here:

* ``eigenvalues`` - the production path.  It dispatches on structure: exactly
  symmetric input goes to the symmetric solver (imaginary parts exactly zero);
  a tridiagonal matrix whose paired off-diagonal products are all positive is
  first mapped by the exact diagonal similarity onto a symmetric tridiagonal
  matrix (this is the balancing step that rescues open asymmetric chains,
  where plain QR loses up to e^{|g| L} in accuracy while norm-based balancing
  is provably a no-op); everything else goes to the real-Schur QR backend,
  whose output for real input is exactly closed under conjugation.
* ``eigenpair`` - shifted inverse iteration for one eigenvector, with a
  deterministic phase convention.
* ``charpoly_roots_oracle`` - an independent brute-force path (dimension <= 10):
  characteristic polynomial by the Faddeev-LeVerrier recurrence, all roots by
  Aberth-Ehrlich simultaneous iteration.  Shares no code with ``eigenvalues``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import NonConvergenceError, PairingError
from .operator import OperatorSpec

DEFAULT_TOL = 1e-13
MAX_EMBEDDING_DIM = 144
MAX_ORACLE_DIM = 10

_ABERTH_SEED = 0xC0C007  # fixed; the perturbed-circle jitter must be reproducible
_ABERTH_MAX_ITER = 500
_ABERTH_RETRIES = 3


# -- spectrum container ------------------------------------------------------

def canonical_order(values) -> np.ndarray:
    """Sort complex values by real part ascending, then imaginary part ascending."""
    vals = np.asarray(values, dtype=complex)
    return vals[np.lexsort((vals.imag, vals.real))]


def conjugate_pairing(values: np.ndarray, tol: float) -> tuple:
    """Match each value with |Im| > tol to its conjugate partner.

    Returns index pairs (i, j), i < j.  Raises PairingError if any complex
    value has no partner within tol.
    """
    ups = [i for i, v in enumerate(values) if v.imag > tol]
    downs = [i for i, v in enumerate(values) if v.imag < -tol]
    if len(ups) != len(downs):
        raise PairingError(
            f"conjugation closure violated: {len(ups)} values above and "
            f"{len(downs)} below the real axis at tolerance {tol:g}"
        )
    pairs = []
    used = set()
    for i in ups:
        target = np.conj(values[i])
        best, best_d = -1, math.inf
        for j in downs:
            if j in used:
                continue
            d = abs(values[j] - target)
            if d < best_d:
                best, best_d = j, d
        if best < 0 or best_d > tol:
            raise PairingError(
                f"no conjugate partner for {values[i]} within tolerance {tol:g}"
            )
        used.add(best)
        pairs.append((min(i, best), max(i, best)))
    return tuple(sorted(pairs))


@dataclass(frozen=True)
class Spectrum:
    """Canonically ordered multiset of eigenvalues with conjugate-pair bookkeeping.

    ``matrix_dim`` is the dimension of the matrix (or matrices) the values came
    from; for a union over momentum sectors it is the per-sector dimension, so
    len(values) may exceed it.
    """

    values: np.ndarray
    pairing: tuple
    max_residual: float
    matrix_norm: float
    matrix_dim: int
    source_spec: Optional[OperatorSpec] = None

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def from_values(cls, values, *, pair_tol: float, max_residual: float,
                    matrix_norm: float, matrix_dim: int,
                    source_spec: Optional[OperatorSpec] = None) -> "Spectrum":
        vals = canonical_order(values)
        vals.setflags(write=False)
        pairs = conjugate_pairing(vals, pair_tol)
        return cls(vals, pairs, float(max_residual), float(matrix_norm),
                   int(matrix_dim), source_spec)


@dataclass(frozen=True)
class EigenPair:
    """One eigenvalue with its unit-norm eigenvector and residual ||Hx - Ex||_2."""

    value: complex
    vector: np.ndarray
    residual: float


# -- production eigenvalue path ----------------------------------------------

def _check_square_finite(A: np.ndarray) -> None:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] < 1:
        raise ValueError("matrix dimension must be >= 1")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")


def _symmetrized_tridiagonal(A: np.ndarray) -> Optional[np.ndarray]:
    """Exact diagonal-similarity image of a tridiagonal A, if one is symmetric.

    Requires every entry outside the three central diagonals to be exactly
    zero and every super/sub pair to have positive product (or both zero).
    The similar matrix has off-diagonals sign(b)*sqrt(b*c); its spectrum is
    identical and the symmetric solver then delivers it at full accuracy
    regardless of how lopsided the original hoppings were.
    """
    n = A.shape[0]
    if n < 2:
        return None
    if np.count_nonzero(A) != np.count_nonzero(np.tril(np.triu(A, -1), 1)):
        return None
    b = np.diag(A, 1)
    c = np.diag(A, -1)
    prod = b * c
    both_zero = (b == 0.0) & (c == 0.0)
    if not np.all((prod > 0.0) | both_zero):
        return None
    s = np.sign(b) * np.sqrt(prod)
    return np.diag(np.diag(A)) + np.diag(s, 1) + np.diag(s, -1)


def eigenvalues(A, tol: float = DEFAULT_TOL, *, compute_residual: bool = True,
                source_spec: Optional[OperatorSpec] = None) -> Spectrum:
    """All eigenvalues of a dense real matrix as a Spectrum.

    The returned multiset is exactly closed under conjugation: symmetric and
    symmetrizable-tridiagonal inputs produce exactly real values, and the
    real-Schur backend emits complex values in exact conjugate pairs (1x1 and
    2x2 diagonal blocks).  ``tol`` (relative) sets the conjugate-pairing
    tolerance; the backends themselves run at machine precision with LAPACK's
    internal iteration cap, and non-convergence surfaces as
    NonConvergenceError.
    """
    A = np.asarray(A)
    if np.iscomplexobj(A):
        raise TypeError("eigenvalues() takes a real matrix; "
                        "use complex_eigenvalues_via_real_embedding for complex input")
    A = A.astype(float, copy=False)
    _check_square_finite(A)
    if not 1e-15 <= tol <= 1e-6:
        raise ValueError(f"tol must lie in [1e-15, 1e-6], got {tol:g}")

    norm = float(np.linalg.norm(A))
    n = A.shape[0]
    sym = A if np.array_equal(A, A.T) else _symmetrized_tridiagonal(A)
    try:
        if sym is not None:
            if compute_residual:
                w, V = np.linalg.eigh(sym)
                resid = _max_column_residual(sym, V, w)
            else:
                w = np.linalg.eigvalsh(sym)
                resid = 0.0
            vals = w.astype(complex)
        else:
            if compute_residual:
                w, V = np.linalg.eig(A)
                resid = _max_column_residual(A, V, w)
            else:
                w = np.linalg.eigvals(A)
                resid = 0.0
            vals = w
    except np.linalg.LinAlgError as exc:
        raise NonConvergenceError(f"eigenvalue iteration did not converge: {exc}") from exc

    pair_tol = tol * max(norm, 1.0)
    return Spectrum.from_values(vals, pair_tol=pair_tol, max_residual=resid,
                                matrix_norm=norm, matrix_dim=n, source_spec=source_spec)


def _max_column_residual(A, V, w) -> float:
    R = A @ V - V * w[np.newaxis, :]
    return float(np.max(np.linalg.norm(R, axis=0)))


def complex_eigenvalues_via_real_embedding(H, tol: float = DEFAULT_TOL) -> Spectrum:
    """Spectrum of the real 2n x 2n embedding [[A, -B], [B, A]] of H = A + iB.

    The returned multiset equals spec(H) united with conj(spec(H)); callers
    that want spec(H) alone must deduplicate against that contract.
    """
    H = np.asarray(H, dtype=complex)
    _check_square_finite(H)
    if H.shape[0] > MAX_EMBEDDING_DIM:
        raise ValueError(f"embedding path limited to dimension {MAX_EMBEDDING_DIM}")
    M = np.block([[H.real, -H.imag], [H.imag, H.real]])
    return eigenvalues(M, tol)


# -- eigenvectors by shifted inverse iteration --------------------------------

def eigenpair(A, approx: complex, *, residual_tol: float = 1e-10,
              max_iter: int = 60) -> EigenPair:
    """Unit-norm eigenvector for the eigenvalue nearest ``approx``.

    Plain inverse iteration with a fixed complex shift; the shift is nudged by
    1e-12 * max(||A||_F, 1) * (1 + i) whenever the shifted solve is singular to
    working precision.  The phase is fixed by making the largest-magnitude
    component real positive (ties broken by lowest index), so output is
    deterministic.  Raises NonConvergenceError after ``max_iter`` sweeps,
    which typically means the shift is equidistant from two eigenvalues; the
    caller should perturb it.
    """
    A = np.asarray(A, dtype=float)
    _check_square_finite(A)
    n = A.shape[0]
    norm = float(np.linalg.norm(A))
    scale = max(norm, 1.0)
    sigma = complex(approx)
    x = np.ones(n, dtype=complex) / math.sqrt(n)

    lu = None
    with warnings.catch_warnings():
        # a (near-)singular shifted system is the point of inverse iteration
        warnings.simplefilter("ignore", LinAlgWarning)
        for nudge in range(4):
            try:
                lu = lu_factor(A - sigma * np.eye(n))
                probe = lu_solve(lu, x)
                if np.all(np.isfinite(probe)):
                    break
            except np.linalg.LinAlgError:
                pass
            sigma += 1e-12 * scale * (1.0 + 1.0j)
            lu = None
    if lu is None:
        raise NonConvergenceError("shifted solve stayed singular after regularization")

    lam = sigma
    for _ in range(max_iter):
        y = lu_solve(lu, x)
        if not np.all(np.isfinite(y)):
            raise NonConvergenceError("inverse iteration produced non-finite iterate")
        x = y / np.linalg.norm(y)
        lam = complex(np.vdot(x, A @ x))
        resid = float(np.linalg.norm(A @ x - lam * x))
        if resid <= residual_tol * scale:
            k = int(np.argmax(np.abs(x)))
            phase = np.conj(x[k]) / abs(x[k])
            x = x * phase
            x.setflags(write=False)
            return EigenPair(lam, x, resid)
    raise NonConvergenceError(
        f"inverse iteration did not reach residual {residual_tol:g}*||A||_F in "
        f"{max_iter} sweeps (shift {sigma}); perturb the shift and retry"
    )


# -- independent characteristic-polynomial oracle ------------------------------

def charpoly_coefficients(A) -> np.ndarray:
    """Monic characteristic polynomial coefficients c, p(z) = sum c[k] z^k.

    Faddeev-LeVerrier recurrence: M_k = A (M_{k-1} + c_{n-k+1} I),
    c_{n-k} = -tr(M_k)/k.  Exact in exact arithmetic; at dimension <= 10 the
    floating-point error stays near machine precision.
    """
    A = np.asarray(A, dtype=float)
    _check_square_finite(A)
    n = A.shape[0]
    c = np.zeros(n + 1)
    c[n] = 1.0
    M = np.zeros_like(A)
    eye = np.eye(n)
    for k in range(1, n + 1):
        M = A @ (M + c[n - k + 1] * eye)
        c[n - k] = -np.trace(M) / k
    return c


def _polyval_with_derivative(c: np.ndarray, z: np.ndarray):
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for coeff in c[::-1]:
        dp = dp * z + p
        p = p * z + coeff
    return p, dp


def _aberth_roots(c: np.ndarray, seed: int) -> Optional[np.ndarray]:
    n = len(c) - 1
    radius = 1.0 + float(np.max(np.abs(c[:-1])))  # Cauchy bound for a monic polynomial
    rng = np.random.default_rng(seed)
    theta = 2.0 * np.pi * (np.arange(n) + 0.25) / n + rng.uniform(-0.1, 0.1, n)
    z = radius * (1.0 + rng.uniform(-0.05, 0.05, n)) * np.exp(1j * theta)
    for _ in range(_ABERTH_MAX_ITER):
        p, dp = _polyval_with_derivative(c.astype(complex), z)
        dp = np.where(dp == 0, 1e-300, dp)
        w = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - w * s
        denom = np.where(denom == 0, 1e-300, denom)
        offset = w / denom
        z = z - offset
        if np.max(np.abs(offset) / (1.0 + np.abs(z))) < 1e-13:
            return z
    return None


def _derivative_coefficients(c: np.ndarray, order: int) -> np.ndarray:
    d = c.astype(float)
    for _ in range(order):
        d = d[1:] * np.arange(1, len(d))
    return d


def _polish_clusters(roots: np.ndarray, c: np.ndarray, radius: float) -> np.ndarray:
    """Collapse rounding-split multiple roots and re-polish their common value.

    A k-fold root of the exactly computed polynomial splits into a k-cluster of
    radius ~eps^(1/k) under coefficient rounding; the cluster centroid is a
    simple root of the (k-1)-th derivative, which Newton recovers to full
    precision.  True distinct eigenvalues of the operators this oracle serves
    are separated far beyond the cluster radius.
    """
    out = roots.copy()
    unused = list(range(len(roots)))
    while unused:
        i = unused.pop(0)
        cluster = [i]
        for j in list(unused):
            if abs(roots[j] - roots[i]) <= radius:
                cluster.append(j)
                unused.remove(j)
        if len(cluster) == 1:
            continue
        z0 = np.mean(roots[cluster])
        d = _derivative_coefficients(c, len(cluster) - 1)
        for _ in range(50):
            p, dp = _polyval_with_derivative(d.astype(complex), np.array([z0]))
            if dp[0] == 0:
                break
            step = p[0] / dp[0]
            z0 = z0 - step
            if abs(step) < 1e-15 * (1.0 + abs(z0)):
                break
        out[cluster] = z0
    return out


def charpoly_roots_oracle(A, *, pair_tol: float = 1e-8) -> Spectrum:
    """Brute-force spectrum via Faddeev-LeVerrier + Aberth-Ehrlich (dim <= 10).

    A completely independent code path from eigenvalues(), used as its oracle.
    max_residual holds the largest |p(root)| as polynomial-residual metadata.
    """
    A = np.asarray(A, dtype=float)
    _check_square_finite(A)
    n = A.shape[0]
    if n > MAX_ORACLE_DIM:
        raise ValueError(f"oracle path limited to dimension {MAX_ORACLE_DIM}")
    c = charpoly_coefficients(A)
    if n == 1:
        roots = np.array([-c[0]], dtype=complex)
    else:
        roots = None
        for attempt in range(_ABERTH_RETRIES):
            roots = _aberth_roots(c, _ABERTH_SEED + attempt)
            if roots is not None:
                break
        if roots is None:
            raise NonConvergenceError(
                f"Aberth-Ehrlich iteration failed {_ABERTH_RETRIES} times "
                f"(cap {_ABERTH_MAX_ITER} sweeps each)"
            )
        scale = max(1.0, float(np.max(np.abs(roots))))
        roots = _polish_clusters(roots, c, 4e-7 * scale)
    p, _ = _polyval_with_derivative(c.astype(complex), roots)
    norm = float(np.linalg.norm(A))
    return Spectrum.from_values(
        roots, pair_tol=pair_tol * max(norm, 1.0), max_residual=float(np.max(np.abs(p))),
        matrix_norm=norm, matrix_dim=n)


# -- multiset comparison -------------------------------------------------------

def match_multisets(a, b) -> tuple:
    """Greedy nearest matching of two equal-size complex multisets.

    Walks the first multiset in canonical order, pairing each value with the
    nearest unused value of the second.  Returns (max_distance, worst_pair).
    Adequate when degeneracies are exact and distinct values are well
    separated relative to the tolerance in use.
    """
    va = canonical_order(a)
    vb = canonical_order(b)
    if len(va) != len(vb):
        raise ValueError(f"multiset sizes differ: {len(va)} vs {len(vb)}")
    if len(va) == 0:
        return 0.0, None
    used = np.zeros(len(vb), dtype=bool)
    worst = -1.0
    worst_pair = None
    for x in va:
        d = np.abs(vb - x)
        d[used] = np.inf
        j = int(np.argmin(d))
        used[j] = True
        if d[j] > worst:
            worst = float(d[j])
            worst_pair = (complex(x), complex(vb[j]))
    return worst, worst_pair
