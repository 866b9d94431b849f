"""Flux and non-Hermiticity sweeps producing the butterfly/cocoon/fan datasets.

Sweep cells are independent (q, p) or (g, p) tasks; they may run on any number
of worker threads, but every result is written into a pre-assigned slot keyed
by its cell, so the assembled dataset is byte-for-byte independent of worker
count and scheduling order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .eigensolver import DEFAULT_TOL, Spectrum, canonical_order, conjugate_pairing, eigenvalues
from .errors import NumericalError
from .operator import Harper, OperatorSpec, PotentialKind, build_harper_matrix


class SweepPoint(NamedTuple):
    q: int
    p: int
    eigen_index: int
    re: float
    im: float


class GSweepPoint(NamedTuple):
    g: float
    q: int
    p: int
    eigen_index: int
    re: float
    im: float


def spectrum_for(spec: OperatorSpec, tol: float = DEFAULT_TOL, *,
                 compute_residual: bool = True) -> Spectrum:
    """Spectrum of the chain at a single parameter point, tagged with its spec."""
    return eigenvalues(build_harper_matrix(spec), tol,
                       compute_residual=compute_residual, source_spec=spec)


def union_spectrum(L: int, q: int, ps: Sequence[int], g: float, *,
                   boundary: str = "periodic",
                   potential: Optional[PotentialKind] = None,
                   tol: float = DEFAULT_TOL,
                   compute_residual: bool = False) -> Spectrum:
    """Merged spectrum over the given momentum sectors at fixed (L, q, g).

    matrix_dim stays the per-sector dimension L, so tolerance scales derived
    from ||H||_F / sqrt(dim) keep their single-matrix meaning.
    """
    if len(ps) == 0:
        raise ValueError("momentum subset must be non-empty")
    potential = potential if potential is not None else Harper()
    values = []
    max_resid = 0.0
    max_norm = 0.0
    for p in ps:
        s = spectrum_for(OperatorSpec(L, q, p, g, boundary, potential), tol,
                         compute_residual=compute_residual)
        values.append(s.values)
        max_resid = max(max_resid, s.max_residual)
        max_norm = max(max_norm, s.matrix_norm)
    vals = canonical_order(np.concatenate(values))
    vals.setflags(write=False)
    pairs = conjugate_pairing(vals, tol * max(max_norm, 1.0))
    return Spectrum(vals, pairs, max_resid, max_norm, L, None)


@dataclass
class SweepDataset:
    """All eigenvalues over a grid of (q, p) cells at fixed (L, g)."""

    L: int
    g: float
    boundary: str
    potential: PotentialKind
    qs: tuple
    ps: tuple
    points: list = field(default_factory=list)           # lexicographic (q, p, eigen_index)
    residuals: dict = field(default_factory=dict)        # (q, p) -> max residual
    failures: dict = field(default_factory=dict)         # (q, p) -> message

    @property
    def complete(self) -> bool:
        return not self.failures


@dataclass
class GSweepDataset:
    """Union-over-momentum spectra on an ascending grid of g values."""

    L: int
    q: int
    boundary: str
    potential: PotentialKind
    g_grid: tuple
    ps: tuple
    points: list = field(default_factory=list)           # lexicographic (g_index, p, eigen_index)
    complex_counts: list = field(default_factory=list)   # per g, |Im| > tol_im
    tol_im: float = 0.0
    residuals: dict = field(default_factory=dict)        # (g_index, p) -> max residual
    failures: dict = field(default_factory=dict)


def _run_cells(cells: Sequence, fn: Callable, workers: int) -> dict:
    """Evaluate fn on every cell, catching per-cell numerical failures.

    Returns {cell: ("ok", payload) | ("err", message)}; scheduling never
    affects the mapping.
    """
    def guarded(cell):
        try:
            return "ok", fn(cell)
        except NumericalError as exc:
            return "err", str(exc)

    if workers <= 1:
        return {cell: guarded(cell) for cell in cells}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {cell: pool.submit(guarded, cell) for cell in cells}
        return {cell: fut.result() for cell, fut in futures.items()}


def flux_sweep(L: int, g: float, *, boundary: str = "periodic",
               potential: Optional[PotentialKind] = None,
               qs: Optional[Sequence[int]] = None,
               ps: Optional[Sequence[int]] = None,
               workers: int = 1, tol: float = DEFAULT_TOL) -> SweepDataset:
    """Spectra for every (q, p) cell; the data behind butterfly and cocoon plots."""
    potential = potential if potential is not None else Harper()
    qs = tuple(sorted(set(qs))) if qs is not None else tuple(range(L))
    ps = tuple(sorted(set(ps))) if ps is not None else tuple(range(L))
    if not qs or not ps:
        raise ValueError("flux and momentum subsets must be non-empty")
    if workers < 1:
        raise ValueError("worker count must be >= 1")

    def solve(cell):
        q, p = cell
        s = spectrum_for(OperatorSpec(L, q, p, g, boundary, potential), tol)
        return s.values, s.max_residual

    cells = [(q, p) for q in qs for p in ps]
    results = _run_cells(cells, solve, workers)

    ds = SweepDataset(L, g, boundary, potential, qs, ps)
    for q, p in cells:
        status, payload = results[(q, p)]
        if status == "err":
            ds.failures[(q, p)] = payload
            continue
        values, resid = payload
        ds.residuals[(q, p)] = resid
        for idx, v in enumerate(values):
            ds.points.append(SweepPoint(q, p, idx, float(v.real), float(v.imag)))
    return ds


def g_sweep(L: int, q: int, g_grid: Sequence[float], *,
            boundary: str = "periodic",
            potential: Optional[PotentialKind] = None,
            ps: Optional[Sequence[int]] = None,
            workers: int = 1, tol: float = DEFAULT_TOL,
            tol_im: Optional[float] = None) -> GSweepDataset:
    """Union-over-momentum spectra along a g grid; the data behind the fan plot."""
    potential = potential if potential is not None else Harper()
    g_grid = tuple(float(g) for g in g_grid)
    if len(g_grid) < 2:
        raise ValueError("g grid must have at least 2 points")
    if any(b <= a for a, b in zip(g_grid, g_grid[1:])):
        raise ValueError("g grid must be strictly ascending")
    ps = tuple(sorted(set(ps))) if ps is not None else tuple(range(L))
    if not ps:
        raise ValueError("momentum subset must be non-empty")
    if workers < 1:
        raise ValueError("worker count must be >= 1")

    def solve(cell):
        gi, p = cell
        s = spectrum_for(OperatorSpec(L, q, p, g_grid[gi], boundary, potential), tol)
        return s.values, s.max_residual, s.matrix_norm

    cells = [(gi, p) for gi in range(len(g_grid)) for p in ps]
    results = _run_cells(cells, solve, workers)

    norm_scale = max((payload[2] for status, payload in results.values()
                      if status == "ok"), default=1.0)
    eff_tol_im = tol_im if tol_im is not None else 1e-7 * norm_scale / np.sqrt(L)

    ds = GSweepDataset(L, q, boundary, potential, g_grid, ps, tol_im=float(eff_tol_im))
    for gi, g in enumerate(g_grid):
        count = 0
        for p in ps:
            status, payload = results[(gi, p)]
            if status == "err":
                ds.failures[(gi, p)] = payload
                continue
            values, resid, _ = payload
            ds.residuals[(gi, p)] = resid
            count += int(np.sum(np.abs(values.imag) > eff_tol_im))
            for idx, v in enumerate(values):
                ds.points.append(GSweepPoint(g, q, p, idx, float(v.real), float(v.imag)))
        ds.complex_counts.append(count)
    return ds
