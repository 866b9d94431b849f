#!/usr/bin/env python3
"""Produce the standard figure set: butterfly, cocoon, transition fan, pitchfork.

Desk scale (L=50) runs in well under a minute; pass --L 200 for full-resolution
flux sweeps (slower; use --workers).

Usage:
  python scripts/make_figures.py --outdir figures
  python scripts/make_figures.py --outdir figures --L 200 --workers 8
"""

import argparse
import pathlib
import time

from cocoonlab.bifurcation import find_critical_g, pitchfork_trace
from cocoonlab.dataio import (
    FLUX_COLUMNS,
    GSWEEP_COLUMNS,
    TRACE_COLUMNS,
    flux_dataset_rows,
    gsweep_dataset_rows,
    serialize_rows_csv,
    trace_rows,
)
from cocoonlab.svgplot import ScatterStyle, emit_scatter_svg
from cocoonlab.sweep import flux_sweep, g_sweep


def save(outdir, stem, data):
    path = outdir / stem
    path.write_bytes(data)
    print(f"  wrote {path}")


def butterfly_and_cocoon(outdir, L, g, workers):
    t0 = time.perf_counter()
    ds = flux_sweep(L, g, workers=workers)
    print(f"flux sweep L={L} g={g}: {len(ds.points)} eigenvalues "
          f"in {time.perf_counter() - t0:.1f}s")
    tag = f"L{L}_g{g:+.2f}".replace("+", "").replace(".", "p")
    save(outdir, f"butterfly_{tag}.csv",
         serialize_rows_csv(FLUX_COLUMNS, flux_dataset_rows(ds)))
    save(outdir, f"butterfly_{tag}.svg", emit_scatter_svg(
        [(pt.q / L, pt.re) for pt in ds.points],
        ScatterStyle(title=f"butterfly  L={L}  g={g}", xlabel="flux", ylabel="Re E")))
    if g != 0.0:
        save(outdir, f"cocoon_{tag}.svg", emit_scatter_svg(
            [(pt.q / L, pt.im) for pt in ds.points],
            ScatterStyle(title=f"cocoon  L={L}  g={g}", xlabel="flux", ylabel="Im E")))


def transition_fan(outdir, L, q, workers):
    grid = [round(0.01 * k, 10) for k in range(51)]
    t0 = time.perf_counter()
    ds = g_sweep(L, q, grid, workers=workers)
    print(f"g sweep L={L} q={q}: {len(ds.points)} eigenvalues "
          f"in {time.perf_counter() - t0:.1f}s")
    save(outdir, f"fan_L{L}_q{q}.csv",
         serialize_rows_csv(GSWEEP_COLUMNS, gsweep_dataset_rows(ds)))
    save(outdir, f"fan_L{L}_q{q}.svg", emit_scatter_svg(
        [(pt.g, pt.im) for pt in ds.points],
        ScatterStyle(title=f"transition fan  L={L}  flux={q}/{L}",
                     xlabel="g", ylabel="Im E")))


def pitchfork(outdir, L, q):
    events = find_critical_g(L, q, ps=(0,), g_min=0.0, g_max=0.5,
                             scan_step=0.002, refine_tol=1e-9, max_events=1)
    if not events:
        print(f"no transition found for L={L} q={q}; skipping pitchfork")
        return
    e = events[0]
    print(f"first transition of L={L} q={q} sector p=0: g_critical={e.g_critical:.8f}")
    span = 0.15 * e.g_critical + 1e-3
    grid = [e.g_critical + span * (k / 12 - 1.0) for k in range(25)]
    grid = [g for g in grid if g >= 0]
    tr = pitchfork_trace(L, q, (0,), grid, e.seed_eigenvalue, e.g_critical)
    save(outdir, f"pitchfork_L{L}_q{q}.csv",
         serialize_rows_csv(TRACE_COLUMNS, trace_rows(tr)))
    re_pts = [(float(g), float(tr.tracks[t, gi].real))
              for gi, g in enumerate(tr.g_grid) for t in range(4)]
    im_pts = [(float(g), float(tr.tracks[t, gi].imag))
              for gi, g in enumerate(tr.g_grid) for t in range(4)]
    save(outdir, f"pitchfork_re_L{L}_q{q}.svg", emit_scatter_svg(
        re_pts, ScatterStyle(title=f"pitchfork (real parts)  L={L}  flux={q}/{L}",
                             xlabel="g", ylabel="Re E", radius=2.5)))
    save(outdir, f"pitchfork_im_L{L}_q{q}.svg", emit_scatter_svg(
        im_pts, ScatterStyle(title=f"pitchfork (imaginary parts)  L={L}  flux={q}/{L}",
                             xlabel="g", ylabel="Im E", radius=2.5)))


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--outdir", default="figures")
    ap.add_argument("--L", type=int, default=50)
    ap.add_argument("--q", type=int, default=1, help="flux numerator for fan/pitchfork")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    butterfly_and_cocoon(outdir, args.L, 0.0, args.workers)
    butterfly_and_cocoon(outdir, args.L, -0.25, args.workers)
    transition_fan(outdir, 50, args.q, args.workers)
    pitchfork(outdir, 50, args.q)


if __name__ == "__main__":
    main()
