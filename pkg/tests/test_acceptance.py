"""Acceptance suite: every criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per criterion.
"""

import math
import time

import numpy as np

from cocoonlab.bifurcation import complex_count, find_critical_g, quartet_grouping
from cocoonlab.cli import run_cli
from cocoonlab.eigensolver import (
    charpoly_roots_oracle,
    complex_eigenvalues_via_real_embedding,
    eigenpair,
    eigenvalues,
    match_multisets,
)
from cocoonlab.operator import (
    Constant,
    Harper,
    OperatorSpec,
    RandomOnsite,
    build_2d_hofstadter_matrix,
    build_harper_matrix,
)
from cocoonlab.sweep import flux_sweep, spectrum_for, union_spectrum
from cocoonlab.symmetry import (
    conjugation_order_parameter,
    run_verification_suite,
    verification_grid,
)

# First transition of the L=50 chain at flux 1/50 (single momentum sector; at
# gcd(q, L) = 1 every sector is a translation image of every other, so the
# same quartet transitions in each).  Artifact-derived golden value.
GOLDEN_FIRST_G = 0.0235913749


def report(n, ok, text):
    print(f"ACCEPTANCE {n:02d} {'PASS' if ok else 'FAIL'}: {text}")
    assert ok, text


def test_criterion_01_hermitian_limit_sweep():
    t0 = time.perf_counter()
    ds = flux_sweep(50, 0.0, workers=1)
    elapsed = time.perf_counter() - t0
    n_points = len(ds.points)
    max_im = max(abs(pt.im) for pt in ds.points)
    lo = min(pt.re for pt in ds.points)
    hi = max(pt.re for pt in ds.points)
    ok = (n_points == 125000 and elapsed <= 300.0 and max_im < 1e-9
          and lo >= -4 - 1e-9 and hi <= 4 + 1e-9 and ds.complete)
    report(1, ok, f"hermitian sweep: {n_points} eigenvalues in {elapsed:.1f}s, "
                  f"max|Im|={max_im:.2e}, range [{lo:.6f}, {hi:.6f}]")


def _random_spec(rng):
    L = int(rng.integers(3, 9))
    kind = rng.random()
    if kind < 0.6:
        potential = Harper()
    elif kind < 0.8:
        potential = Constant(float(rng.uniform(-2, 2)))
    else:
        potential = RandomOnsite(int(rng.integers(0, 2 ** 31)), float(rng.uniform(0.1, 1.5)))
    return OperatorSpec(L, int(rng.integers(0, L)), int(rng.integers(0, L)),
                        float(rng.uniform(-1.5, 1.5)),
                        "periodic" if rng.random() < 0.7 else "open",
                        potential)


def test_criterion_02_oracle_equivalence():
    rng = np.random.default_rng(20140323)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        spec = _random_spec(rng)
        A = build_harper_matrix(spec)
        dist, _ = match_multisets(eigenvalues(A).values,
                                  charpoly_roots_oracle(A).values)
        worst = max(worst, dist)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-8 and elapsed <= 30.0
    report(2, ok, f"oracle equivalence over 200 specs: worst match "
                  f"{worst:.2e} in {elapsed:.1f}s")


def test_criterion_03_circulant_analytics():
    worst = 0.0
    for L in range(3, 51):
        for g in (-1.0, -0.5, 0.0, 0.5, 1.0):
            for p in (0, 1, L // 2):
                s = spectrum_for(OperatorSpec(L, 0, p, g))
                j = np.arange(L)
                theta = 2 * np.pi * j / L
                analytic = (-2 * math.cosh(g) * np.cos(theta)
                            - 2 * math.cos(2 * np.pi * p / L)
                            - 2j * math.sinh(g) * np.sin(theta))
                dist, _ = match_multisets(s.values, analytic)
                worst = max(worst, dist)
    ok = worst < 1e-10
    report(3, ok, f"circulant analytics L=3..50: worst deviation {worst:.2e}")


def test_criterion_04_symmetry_suite():
    t0 = time.perf_counter()
    points = verification_grid(n_points=100, seed=20140529, sizes=(4, 6, 10, 50))
    reports = run_verification_suite(points, include_open_bc=False)
    elapsed = time.perf_counter() - t0
    bad = [r for r in reports if not r.passed]
    ok = not bad and elapsed <= 120.0
    report(4, ok, f"{len(reports)} symmetry checks over 100 points in "
                  f"{elapsed:.1f}s, {len(bad)} failures")


def test_criterion_05_open_chain_reality():
    rng = np.random.default_rng(19980401)
    worst_im = 0.0
    worst_match = 0.0
    for _ in range(50):
        L = int(rng.integers(3, 51))
        q = int(rng.integers(0, L))
        p = int(rng.integers(0, L))
        g = float(rng.uniform(-1.0, 1.0))
        s = spectrum_for(OperatorSpec(L, q, p, g, "open"))
        s0 = spectrum_for(OperatorSpec(L, q, p, 0.0, "open"))
        worst_im = max(worst_im, float(np.max(np.abs(s.values.imag))))
        dist, _ = match_multisets(s.values, s0.values)
        worst_match = max(worst_match, dist)
    ok = worst_im < 1e-9 and worst_match < 1e-8
    report(5, ok, f"open-chain reality over 50 specs: max|Im|={worst_im:.2e}, "
                  f"worst g-independence {worst_match:.2e}")


def test_criterion_06_double_pitchfork():
    events = find_critical_g(50, 1, ps=(0,), g_min=0.0, g_max=0.5,
                             scan_step=0.002, refine_tol=1e-9, max_events=2)
    e = events[0]
    events_halved = find_critical_g(50, 1, ps=(0,), g_min=0.0, g_max=0.5,
                                    scan_step=0.001, refine_tol=1e-9, max_events=2)
    delta = abs(events_halved[0].g_critical - e.g_critical)
    u = union_spectrum(50, 1, (0,), e.g_hi)
    grp = quartet_grouping(u, tol=1e-6)
    count = complex_count(u)
    ok = (e.g_critical > 0 and delta < 1e-6
          and abs(e.g_critical - GOLDEN_FIRST_G) < 1e-6
          and len(grp.quartets) == 1 and not grp.pairs and not grp.defects
          and count == 4)
    report(6, ok, f"first transition at g={e.g_critical:.10f} "
                  f"(step-halving delta {delta:.1e}); just above: "
                  f"{len(grp.quartets)} quartet, complex count {count}")


def test_criterion_07_immediate_transition_at_zero_flux():
    refine_tol = 1e-6
    events = find_critical_g(50, 0, g_min=0.0, g_max=0.1, scan_step=0.02,
                             refine_tol=refine_tol, max_events=1)
    e = events[0]
    ok = bool(events) and e.g_critical < refine_tol and e.count_before == 0
    report(7, ok, f"zero-flux transition detected at g={e.g_critical:.2e} "
                  f"< refine_tol={refine_tol:g}")


def test_criterion_08_2d_separability():
    worst = 0.0
    for L in (4, 6):
        for q in (0, 1):
            for g in (0.0, 0.25):
                H2 = build_2d_hofstadter_matrix(L, q, g)
                emb = complex_eigenvalues_via_real_embedding(H2)
                union = np.concatenate(
                    [spectrum_for(OperatorSpec(L, q, p, g)).values for p in range(L)])
                both = np.concatenate([union, np.conj(union)])
                dist, _ = match_multisets(emb.values, both)
                worst = max(worst, dist)
    ok = worst < 1e-8
    report(8, ok, f"2D spectra equal momentum-sector unions: worst {worst:.2e}")


def test_criterion_09_symmetry_breaking_order_parameter():
    g_lo = GOLDEN_FIRST_G - 5e-4
    g_hi = GOLDEN_FIRST_G + 5e-4
    A = build_harper_matrix(OperatorSpec(50, 1, 0, g_lo))
    s = eigenvalues(A)
    gaps = np.abs(s.values[:, None] - s.values[None, :])
    np.fill_diagonal(gaps, np.inf)
    min_gaps = gaps.min(axis=1)
    eta_below = []
    for v, gap in zip(s.values, min_gaps):
        if gap > 1e-6 * s.matrix_norm:
            eta_below.append(conjugation_order_parameter(eigenpair(A, v).vector))
    B = build_harper_matrix(OperatorSpec(50, 1, 0, g_hi))
    sb = eigenvalues(B)
    new_pair = [v for v in sb.values if abs(v.imag) > 1e-5]
    eta_above = [conjugation_order_parameter(eigenpair(B, v).vector)
                 for v in new_pair]
    ok = (len(eta_below) >= 40 and max(eta_below) <= 1e-8
          and len(new_pair) == 4 and min(eta_above) > 1e-3)
    report(9, ok, f"eta below <= {max(eta_below):.1e} over {len(eta_below)} "
                  f"simple eigenvectors; eta above >= {min(eta_above):.2e} "
                  f"on the new conjugate pairs")


def test_criterion_10_determinism_and_parallel_safety(tmp_path):
    outputs = {}
    for workers in (1, 8):
        out = tmp_path / f"w{workers}.csv"
        svg = tmp_path / f"w{workers}.svg"
        code = run_cli(["butterfly", "--L", "20", "--g", "0.3",
                        "--workers", str(workers),
                        "--out", str(out), "--svg", str(svg)])
        assert code == 0
        outputs[workers] = (out.read_bytes(), svg.read_bytes())
    ok = outputs[1] == outputs[8]
    rows = len(outputs[1][0].split(b"\n")) - 2  # header + trailing newline
    report(10, ok, f"butterfly L=20 with 1 and 8 workers: byte-identical "
                   f"CSV ({rows} rows) and SVG")
