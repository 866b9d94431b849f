"""Location and anatomy of the transitions where real eigenvalues go complex.

The critical-g search bisects on the integer count of complex eigenvalues
rather than root-finding on an eigenvalue gap: the count is a step function,
immune to the square-root sensitivity of eigenvalues at an exceptional point,
and its tolerance semantics are exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .eigensolver import DEFAULT_TOL, Spectrum, canonical_order
from .errors import NumericalError
from .operator import Harper, PotentialKind
from .sweep import union_spectrum

MIN_REFINE_TOL = 1e-10


def default_tol_im(spectrum: Spectrum) -> float:
    """Threshold separating 'complex' from solver noise: 1e-7 * ||H||_F / sqrt(dim).

    Eigenvalue perturbation near an exceptional point scales as sqrt(eps), so
    the threshold must sit well above machine noise; this scale does.
    """
    return 1e-7 * spectrum.matrix_norm / math.sqrt(max(spectrum.matrix_dim, 1))


def complex_count(spectrum: Spectrum, tol_im: Optional[float] = None) -> int:
    """Number of eigenvalues with |Im| above the threshold (always even)."""
    tol = default_tol_im(spectrum) if tol_im is None else float(tol_im)
    if tol <= 0 and spectrum.matrix_norm > 0:
        raise ValueError(f"tol_im must be positive, got {tol:g}")
    return int(np.sum(np.abs(spectrum.values.imag) > tol))


@dataclass(frozen=True)
class BifurcationEvent:
    """One change of the complex count, bracketed to within the refine tolerance.

    count_before/count_after are both even; the count may decrease (re-entrant
    reality is representable even though it has not been observed here).
    ``resolved`` is False when finer structure inside the bracket could not be
    separated at the configured scan resolution.
    """

    g_lo: float
    g_hi: float
    g_critical: float
    count_before: int
    count_after: int
    seed_eigenvalue: complex
    resolved: bool = True

    @property
    def increasing(self) -> bool:
        return self.count_after > self.count_before


def _seed_eigenvalue(spectrum: Spectrum, tol_im: float) -> complex:
    """The complex eigenvalue nearest the real axis: the one that just transitioned."""
    vals = spectrum.values
    mask = np.abs(vals.imag) > tol_im
    if not np.any(mask):
        return complex(0.0)
    cand = vals[mask]
    order = np.lexsort((cand.imag, cand.real, np.abs(cand.imag)))
    return complex(cand[order[0]])


def find_critical_g(L: int, q: int, *, ps: Optional[Sequence[int]] = None,
                    g_min: float = 0.0, g_max: float = 0.5,
                    scan_step: float = 0.01, refine_tol: float = 1e-8,
                    tol_im: Optional[float] = None,
                    boundary: str = "periodic",
                    potential: Optional[PotentialKind] = None,
                    tol: float = DEFAULT_TOL,
                    max_events: Optional[int] = None) -> list:
    """Locate every change of the complex count on [g_min, g_max], in ascending order.

    The grid scan brackets count changes; each bracket is refined by bisection
    that always converges to the leftmost change inside it, then the remainder
    of the bracket is processed again, so brackets holding several events
    yield them one by one.  When the bisection sees evidence of non-monotone
    structure, the bracket is re-scanned once at scan_step/10; structure still
    unresolved after that is reported with resolved=False.  ``max_events``
    caps the enumeration (the first events are always the cheapest to trust).
    """
    if not g_min < g_max:
        raise ValueError(f"need g_min < g_max, got [{g_min}, {g_max}]")
    if scan_step <= 0:
        raise ValueError(f"scan_step must be positive, got {scan_step}")
    if refine_tol < MIN_REFINE_TOL:
        raise ValueError(f"refine_tol must be >= {MIN_REFINE_TOL:g}, got {refine_tol}")
    ps = tuple(ps) if ps is not None else tuple(range(L))
    potential = potential if potential is not None else Harper()

    cache: dict = {}

    def spectrum_at(g: float) -> Spectrum:
        if g not in cache:
            cache[g] = union_spectrum(L, q, ps, g, boundary=boundary,
                                      potential=potential, tol=tol)
        return cache[g]

    def count_at(g: float) -> int:
        return complex_count(spectrum_at(g), tol_im)

    events: list = []

    def budget_left() -> bool:
        return max_events is None or len(events) < max_events

    def emit(lo, hi, c_lo, c_hi, resolved):
        s_hi = spectrum_at(hi)
        eff = default_tol_im(s_hi) if tol_im is None else float(tol_im)
        seed = _seed_eigenvalue(s_hi if c_hi > 0 else spectrum_at(lo), eff)
        events.append(BifurcationEvent(lo, hi, 0.5 * (lo + hi), c_lo, c_hi,
                                       seed, resolved))

    def leftmost(lo, hi, c_lo, c_hi):
        """Bisect to the leftmost count change in (lo, hi); flag extra structure."""
        saw_multi = False
        while hi - lo > refine_tol:
            mid = 0.5 * (lo + hi)
            cm = count_at(mid)
            if cm == c_lo:
                lo = mid
            else:
                if cm != c_hi:
                    saw_multi = True
                hi = mid
                c_hi = cm
        return lo, hi, c_hi, saw_multi

    def enumerate_bracket(lo, hi, c_lo, c_hi, step, depth):
        cur_lo, cur_c = lo, c_lo
        while cur_c != c_hi and budget_left():
            l, h, ch, multi = leftmost(cur_lo, hi, cur_c, c_hi)
            if multi and depth == 0:
                scan_region(l, hi, step / 10.0, depth + 1)
                return
            emit(l, h, cur_c, ch, resolved=not multi)
            cur_lo, cur_c = h, ch

    def scan_region(lo, hi, step, depth):
        grid = list(np.arange(lo, hi, step)) + [hi]
        counts = [count_at(g) for g in grid]
        for (ga, gb), (ca, cb) in zip(zip(grid, grid[1:]), zip(counts, counts[1:])):
            if ca != cb and budget_left():
                enumerate_bracket(ga, gb, ca, cb, step, depth)

    scan_region(float(g_min), float(g_max), float(scan_step), 0)
    events.sort(key=lambda e: e.g_critical)
    return events


# -- quartet structure ---------------------------------------------------------

@dataclass(frozen=True)
class QuartetGrouping:
    """Partition of the complex eigenvalues into negation/conjugation orbits.

    quartets hold {E, E*, -E, -E*} with four distinct members; pairs hold the
    purely-imaginary-axis case Re E ~ 0 where the quartet degenerates to
    {E, E*}; defects are complex values whose partners were missing at the
    tolerance (data, not failures).
    """

    quartets: tuple
    pairs: tuple
    defects: tuple
    tol: float


def quartet_grouping(spectrum: Spectrum, tol: float = 1e-6) -> QuartetGrouping:
    """Group complex eigenvalues into orbits closed under conjugation and negation."""
    if spectrum.matrix_dim % 2 != 0:
        raise ValueError(
            f"quartet analysis needs an even lattice (momenta k and k+pi must both "
            f"lie on the grid); got dimension {spectrum.matrix_dim}"
        )
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    vals = canonical_order(spectrum.values[np.abs(spectrum.values.imag) > tol])
    unused = list(range(len(vals)))

    def take_nearest(target):
        best, best_d = -1, math.inf
        for j in unused:
            d = abs(vals[j] - target)
            if d < best_d:
                best, best_d = j, d
        if best >= 0 and best_d <= tol:
            unused.remove(best)
            return best
        return None

    quartets, pairs, defects = [], [], []
    while unused:
        i = unused.pop(0)
        x = complex(vals[i])
        if abs(x.real) <= tol:
            # -conj(x) ~ x: the orbit is the conjugate pair alone
            j = take_nearest(np.conj(x))
            if j is None:
                defects.append(x)
            else:
                pairs.append((x, complex(vals[j])))
            continue
        picked = []
        for target in (np.conj(x), -x, -np.conj(x)):
            j = take_nearest(target)
            if j is None:
                break
            picked.append(j)
        if len(picked) == 3:
            quartets.append((x,) + tuple(complex(vals[j]) for j in picked))
        else:
            unused.extend(picked)  # failed orbit: return partners to the pool
            unused.sort()
            defects.append(x)
    return QuartetGrouping(tuple(quartets), tuple(pairs), tuple(defects), tol)


# -- pitchfork traces ----------------------------------------------------------

@dataclass(frozen=True)
class PitchforkTrace:
    """Four eigenvalue tracks continuity-matched across a g grid.

    Track order is fixed at the anchor point as (E, E*, -E, -E*).  Below
    g_critical all four are real in +- pairs; above it they form two conjugate
    pairs related by a sign flip.
    """

    g_grid: np.ndarray
    tracks: np.ndarray      # shape (4, len(g_grid))
    g_critical: float


def _best_two_assignments(track_vals, candidates):
    """Cheapest and second-cheapest injective assignments of 4 tracks to candidates."""
    if len(candidates) < 4:
        raise NumericalError(
            f"need at least 4 candidate eigenvalues to continue the quartet, "
            f"got {len(candidates)}"
        )
    pools = []
    for t in track_vals:
        order = np.argsort(np.abs(candidates - t))
        pools.append(order[: min(4, len(order))])
    pool = sorted({int(j) for p in pools for j in p})
    best, second = None, None
    for combo in itertools.permutations(pool, 4):
        cost = sum(abs(candidates[j] - t) for j, t in zip(combo, track_vals))
        if best is None or cost < best[0]:
            second = best
            best = (cost, combo)
        elif second is None or cost < second[0]:
            second = (cost, combo)
    return best, second


def _match_step(track_vals, candidates):
    """Assign each track its successor; None signals a genuine ambiguity.

    Equal-cost assignments that select the same four candidates (label swaps,
    which always happen when a conjugate pair meets the two real branches at
    the exceptional point) are benign and resolved by enumeration order; only
    an equal-cost continuation onto a different value set is ambiguous.
    """
    best, second = _best_two_assignments(track_vals, candidates)
    chosen = np.array([candidates[j] for j in best[1]])
    if second is not None and second[0] - best[0] < 1e-12:
        alt = np.array([candidates[j] for j in second[1]])
        if np.max(np.abs(canonical_order(alt) - canonical_order(chosen))) > 1e-12:
            return None  # two genuinely different continuations at equal cost
    return chosen


def pitchfork_trace(L: int, q: int, ps: Sequence[int], g_grid: Sequence[float],
                    seed: complex, g_critical: float, *,
                    boundary: str = "periodic",
                    potential: Optional[PotentialKind] = None,
                    tol: float = DEFAULT_TOL,
                    quartet_tol: float = 1e-6,
                    max_refinements: int = 3) -> PitchforkTrace:
    """Track the quartet seeded by ``seed`` across g_grid by continuity matching.

    The quartet is identified at the first grid point above g_critical (where
    it must exist at quartet_tol) and matched outward in both directions by
    globally minimal total complex distance (exact assignment on 4 tracks).
    Ambiguous steps insert grid midpoints, up to ``max_refinements`` times.
    """
    potential = potential if potential is not None else Harper()
    grid = sorted(float(g) for g in g_grid)
    if len(grid) < 2:
        raise ValueError("g grid must have at least 2 points")

    def spectrum_at(g):
        return union_spectrum(L, q, tuple(ps), g, boundary=boundary,
                              potential=potential, tol=tol)

    def values_at(g):
        return spectrum_at(g).values

    anchor_g = next((g for g in grid if g > g_critical), None)
    if anchor_g is None:
        raise ValueError("g grid must contain at least one point above g_critical")

    anchor_spectrum = spectrum_at(anchor_g)
    vals = anchor_spectrum.values
    # the seed marks which eigenvalue to track (its position at the event
    # bracket); at the anchor the quartet has moved, so take the nearest value
    # and demand that it is genuinely complex there
    x = complex(vals[np.argmin(np.abs(vals - seed))])
    if abs(x.imag) <= default_tol_im(anchor_spectrum):
        raise NumericalError(
            f"no complex eigenvalue near seed {seed} at g={anchor_g}; the anchor "
            f"point may sit below the transition"
        )
    anchor = [x]
    pool = vals.tolist()
    pool.remove(x)
    for target in (np.conj(x), -x, -np.conj(x)):
        arr = np.array(pool)
        j = int(np.argmin(np.abs(arr - target)))
        if abs(arr[j] - target) > quartet_tol:
            raise NumericalError(
                f"quartet member {target} missing at g={anchor_g}; "
                f"is the momentum subset closed under negation?"
            )
        anchor.append(complex(arr[j]))
        pool.pop(j)

    for _ in range(max_refinements + 1):
        anchor_idx = grid.index(anchor_g)
        tracks = {anchor_g: np.array(anchor)}
        ambiguous_gap = None
        for direction in (1, -1):
            idx = anchor_idx
            cur = np.array(anchor)
            while 0 <= idx + direction < len(grid):
                nxt = idx + direction
                chosen = _match_step(cur, values_at(grid[nxt]))
                if chosen is None:
                    ambiguous_gap = (min(idx, nxt), max(idx, nxt))
                    break
                tracks[grid[nxt]] = chosen
                cur = chosen
                idx = nxt
            if ambiguous_gap:
                break
        if ambiguous_gap is None:
            gs = np.array(grid)
            return PitchforkTrace(gs, np.array([tracks[g] for g in grid]).T,
                                  float(g_critical))
        lo_idx, hi_idx = ambiguous_gap
        grid.insert(hi_idx, 0.5 * (grid[lo_idx] + grid[hi_idx]))
    raise NumericalError(
        f"track matching stayed ambiguous after {max_refinements} grid refinements"
    )
