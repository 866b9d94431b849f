"""cocoonlab command-line interface.

Subcommands: butterfly, cocoon, fan, pitchfork, critical-g, spectrum, verify.
Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
failure.  Flags override values from an optional flat key=value config file.
Worker count defaults to the COCOONLAB_WORKERS environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import dataio, svgplot
from .bifurcation import find_critical_g, pitchfork_trace
from .errors import NumericalError
from .operator import Constant, Harper, OperatorSpec, PotentialKind, RandomOnsite
from .svgplot import ScatterStyle
from .sweep import flux_sweep, g_sweep, spectrum_for
from .symmetry import run_verification_suite, verification_grid


class UsageError(Exception):
    """Bad flags, unreadable config, or unwritable output (exit 2)."""


def parse_potential(text: str) -> PotentialKind:
    """Parse 'harper' | 'constant:c' | 'random:seed:W'."""
    parts = text.split(":")
    kind = parts[0].lower()
    try:
        if kind == "harper" and len(parts) == 1:
            return Harper()
        if kind == "constant" and len(parts) == 2:
            return Constant(float(parts[1]))
        if kind == "random" and len(parts) == 3:
            return RandomOnsite(int(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise UsageError(f"bad potential spec {text!r}: {exc}") from exc
    raise UsageError(
        f"bad potential spec {text!r}; expected harper, constant:c or random:seed:W"
    )


def potential_to_text(potential: PotentialKind) -> str:
    if isinstance(potential, Harper):
        return "harper"
    if isinstance(potential, Constant):
        return f"constant:{dataio.format_number(potential.c)}"
    return f"random:{potential.seed}:{dataio.format_number(potential.width)}"


def _read_config_file(path: str) -> dict:
    """Flat key=value lines; blank lines and #-comments ignored."""
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, value = line.partition("=")
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    return values


_DEFAULTS = {
    "L": 50, "q": None, "p": None, "g": 0.0,
    "g_min": 0.0, "g_max": 0.5, "g_step": 0.01,
    "boundary": "periodic", "potential": "harper",
    "tol_im": None, "workers": None, "out": None, "svg": None,
    "format": "csv", "grid": "small", "seed": 20140529,
    "scan_step": 0.01, "refine_tol": 1e-8, "max_events": None,
}

_CASTS = {
    "L": int, "q": int, "p": int, "g": float,
    "g_min": float, "g_max": float, "g_step": float,
    "tol_im": float, "workers": int, "seed": int,
    "scan_step": float, "refine_tol": float, "max_events": int,
}


class RunConfig:
    """Effective option values: flags over config file over defaults."""

    def __init__(self, subcommand: str, args: argparse.Namespace):
        self.subcommand = subcommand
        file_values = {}
        if getattr(args, "config", None):
            file_values = _read_config_file(args.config)
        merged = dict(_DEFAULTS)
        provided = set()
        for key, raw in file_values.items():
            if key not in merged:
                raise UsageError(f"unknown config key {key!r}")
            cast = _CASTS.get(key, str)
            try:
                merged[key] = cast(raw)
            except ValueError as exc:
                raise UsageError(f"bad config value {key}={raw!r}: {exc}") from exc
            provided.add(key)
        for key, value in vars(args).items():
            if key in ("subcommand", "config") or value is None:
                continue
            merged[key] = value
            provided.add(key)
        self.provided = provided
        if merged["workers"] is None:
            env = os.environ.get("COCOONLAB_WORKERS", "")
            merged["workers"] = int(env) if env.isdigit() and int(env) >= 1 else 1
        self.values = merged

    def __getattr__(self, key):
        values = self.__dict__.get("values")
        if values is not None and key in values:
            return values[key]
        raise AttributeError(key)

    @property
    def potential_obj(self) -> PotentialKind:
        return parse_potential(self.values["potential"])

    def echo(self) -> dict:
        """JSON-serializable snapshot of the effective configuration."""
        out = {"subcommand": self.subcommand}
        for k, v in self.values.items():
            out[k] = v
        return out


def _write_bytes(path: str, data: bytes) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _emit_dataset(cfg: RunConfig, columns, rows) -> None:
    if cfg.format not in ("csv", "json"):
        raise UsageError(f"unknown format {cfg.format!r}; expected csv or json")
    if cfg.format == "csv":
        payload = dataio.serialize_rows_csv(columns, rows)
    else:
        payload = dataio.serialize_dataset_json(columns, rows, cfg.echo())
    if cfg.out:
        _write_bytes(cfg.out, payload)
    elif not cfg.svg:
        sys.stdout.write(payload.decode("ascii"))


def _emit_svg(cfg: RunConfig, points, style: ScatterStyle) -> None:
    if cfg.svg:
        _write_bytes(cfg.svg, svgplot.emit_scatter_svg(points, style))


# -- subcommands -----------------------------------------------------------------

def _sweep_dataset(cfg: RunConfig):
    qs = (cfg.q % cfg.L,) if cfg.q is not None else None
    ps = (cfg.p,) if cfg.p is not None else None
    ds = flux_sweep(cfg.L, cfg.g, boundary=cfg.boundary, potential=cfg.potential_obj,
                    qs=qs, ps=ps, workers=cfg.workers)
    if ds.failures:
        cells = ", ".join(str(c) for c in sorted(ds.failures))
        print(f"warning: {len(ds.failures)} sweep cells failed: {cells}",
              file=sys.stderr)
    return ds


def cmd_butterfly(cfg: RunConfig) -> int:
    ds = _sweep_dataset(cfg)
    _emit_dataset(cfg, dataio.FLUX_COLUMNS, dataio.flux_dataset_rows(ds))
    _emit_svg(cfg, [(pt.q / cfg.L, pt.re) for pt in ds.points],
              ScatterStyle(title=f"butterfly L={cfg.L} g={cfg.g}",
                           xlabel="flux", ylabel="Re E"))
    return 0


def cmd_cocoon(cfg: RunConfig) -> int:
    ds = _sweep_dataset(cfg)
    _emit_dataset(cfg, dataio.FLUX_COLUMNS, dataio.flux_dataset_rows(ds))
    _emit_svg(cfg, [(pt.q / cfg.L, pt.im) for pt in ds.points],
              ScatterStyle(title=f"cocoon L={cfg.L} g={cfg.g}",
                           xlabel="flux", ylabel="Im E"))
    return 0


def _g_grid(cfg: RunConfig) -> list:
    if cfg.g_step <= 0:
        raise UsageError(f"--g-step must be positive, got {cfg.g_step}")
    grid = list(np.arange(cfg.g_min, cfg.g_max, cfg.g_step)) + [cfg.g_max]
    return [float(g) for g in grid]


def cmd_fan(cfg: RunConfig) -> int:
    q = cfg.q if cfg.q is not None else 1
    ps = (cfg.p,) if cfg.p is not None else None
    ds = g_sweep(cfg.L, q, _g_grid(cfg), boundary=cfg.boundary,
                 potential=cfg.potential_obj, ps=ps, workers=cfg.workers,
                 tol_im=cfg.tol_im)
    if ds.failures:
        print(f"warning: {len(ds.failures)} sweep cells failed", file=sys.stderr)
    _emit_dataset(cfg, dataio.GSWEEP_COLUMNS, dataio.gsweep_dataset_rows(ds))
    _emit_svg(cfg, [(pt.g, pt.im) for pt in ds.points],
              ScatterStyle(title=f"transition fan L={cfg.L} q={q}",
                           xlabel="g", ylabel="Im E"))
    return 0


def cmd_critical_g(cfg: RunConfig) -> int:
    q = cfg.q if cfg.q is not None else 1
    ps = (cfg.p,) if cfg.p is not None else None
    events = find_critical_g(
        cfg.L, q, ps=ps, g_min=cfg.g_min, g_max=cfg.g_max,
        scan_step=cfg.scan_step, refine_tol=cfg.refine_tol, tol_im=cfg.tol_im,
        boundary=cfg.boundary, potential=cfg.potential_obj,
        max_events=cfg.max_events)
    _emit_dataset(cfg, dataio.EVENT_COLUMNS, dataio.event_rows(events))
    if cfg.out or cfg.svg:
        for e in events:
            print(f"g_critical={e.g_critical:.10g} count {e.count_before}->"
                  f"{e.count_after} resolved={e.resolved}")
    return 0


def _negation_closed(values, tol: float = 1e-6) -> bool:
    from .eigensolver import match_multisets

    dist, _ = match_multisets(values, -np.asarray(values))
    return dist <= tol


def _locate_sector(cfg: RunConfig, q: int, g: float, seed: complex) -> int:
    """Momentum sector whose spectrum contains the seed eigenvalue."""
    best_p, best_d = 0, float("inf")
    for p in range(cfg.L):
        s = spectrum_for(OperatorSpec(cfg.L, q, p, g, cfg.boundary, cfg.potential_obj),
                         compute_residual=False)
        d = float(np.min(np.abs(s.values - seed)))
        if d < best_d:
            best_p, best_d = p, d
    return best_p


def cmd_pitchfork(cfg: RunConfig) -> int:
    q = cfg.q if cfg.q is not None else 1
    search_ps = (cfg.p,) if cfg.p is not None else None
    events = find_critical_g(
        cfg.L, q, ps=search_ps, g_min=cfg.g_min, g_max=cfg.g_max,
        scan_step=cfg.scan_step, refine_tol=cfg.refine_tol, tol_im=cfg.tol_im,
        boundary=cfg.boundary, potential=cfg.potential_obj, max_events=1)
    if not events:
        raise NumericalError(
            f"no transition found on [{cfg.g_min}, {cfg.g_max}] for L={cfg.L} q={q}"
        )
    event = events[0]
    p_star = cfg.p if cfg.p is not None else _locate_sector(
        cfg, q, event.g_hi, event.seed_eigenvalue)
    sector = spectrum_for(
        OperatorSpec(cfg.L, q, p_star, event.g_hi, cfg.boundary, cfg.potential_obj),
        compute_residual=False)
    if _negation_closed(sector.values):
        trace_ps = (p_star,)
    else:
        if cfg.L % 2 != 0:
            raise NumericalError(
                "quartet spans two momentum sectors but L is odd; k + pi is not "
                "an allowed momentum"
            )
        trace_ps = (p_star, (p_star + cfg.L // 2) % cfg.L)
    trace = pitchfork_trace(cfg.L, q, trace_ps, _g_grid(cfg),
                            event.seed_eigenvalue, event.g_critical,
                            boundary=cfg.boundary, potential=cfg.potential_obj)
    _emit_dataset(cfg, dataio.TRACE_COLUMNS, dataio.trace_rows(trace))
    pts = [(float(g), float(trace.tracks[t, gi].imag))
           for gi, g in enumerate(trace.g_grid) for t in range(4)]
    _emit_svg(cfg, pts, ScatterStyle(title=f"double pitchfork L={cfg.L} q={q} "
                                           f"p={','.join(map(str, trace_ps))}",
                                     xlabel="g", ylabel="Im E", radius=2.0))
    return 0


def cmd_spectrum(cfg: RunConfig) -> int:
    q = cfg.q if cfg.q is not None else 0
    p = cfg.p if cfg.p is not None else 0
    spec = OperatorSpec(cfg.L, q, p, cfg.g, cfg.boundary, cfg.potential_obj)
    s = spectrum_for(spec)
    rows = [(q % cfg.L, p, i, float(v.real), float(v.imag))
            for i, v in enumerate(s.values)]
    if cfg.out:
        _emit_dataset(cfg, dataio.FLUX_COLUMNS, rows)
    else:
        sys.stdout.write(
            dataio.serialize_rows_csv(dataio.FLUX_COLUMNS, rows).decode("ascii"))
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.grid == "small":
        n_points, sizes = 12, (4, 6, 10)
    elif cfg.grid == "full":
        n_points, sizes = 100, (4, 6, 10, 50)
    else:
        raise UsageError(f"unknown grid {cfg.grid!r}; expected small or full")
    if "L" in cfg.provided:
        sizes = (cfg.L,)
    points = verification_grid(n_points, seed=cfg.seed, sizes=sizes)
    reports = run_verification_suite(points)
    failed = 0
    for rep in reports:
        print(str(rep))
        failed += 0 if rep.passed else 1
    print(f"{len(reports) - failed}/{len(reports)} symmetry checks passed")
    return 1 if failed else 0


_DISPATCH = {
    "butterfly": cmd_butterfly,
    "cocoon": cmd_cocoon,
    "fan": cmd_fan,
    "pitchfork": cmd_pitchfork,
    "critical-g": cmd_critical_g,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--L", type=int, default=None, help="lattice size (sites)")
    sub.add_argument("--q", type=int, default=None, help="flux numerator")
    sub.add_argument("--p", type=int, default=None, help="momentum index")
    sub.add_argument("--g", type=float, default=None, help="non-Hermiticity")
    sub.add_argument("--g-min", dest="g_min", type=float, default=None)
    sub.add_argument("--g-max", dest="g_max", type=float, default=None)
    sub.add_argument("--g-step", dest="g_step", type=float, default=None)
    sub.add_argument("--boundary", choices=("periodic", "open"), default=None)
    sub.add_argument("--potential", default=None,
                     help="harper | constant:c | random:seed:W")
    sub.add_argument("--tol-im", dest="tol_im", type=float, default=None,
                     help="threshold for counting an eigenvalue as complex")
    sub.add_argument("--workers", type=int, default=None)
    sub.add_argument("--out", default=None, help="dataset output path")
    sub.add_argument("--svg", default=None, help="SVG plot output path")
    sub.add_argument("--format", choices=("csv", "json"), default=None)
    sub.add_argument("--config", default=None, help="flat key=value config file")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cocoonlab",
        description="Spectra of the non-Hermitian Harper chain: flux sweeps, "
                    "transition location, symmetry verification.")
    subs = parser.add_subparsers(dest="subcommand")
    for name, help_text in [
        ("butterfly", "flux sweep; scatter of Re E against flux"),
        ("cocoon", "flux sweep; scatter of Im E against flux"),
        ("fan", "g sweep at fixed flux; scatter of Im E against g"),
        ("pitchfork", "trace one quartet through its transition"),
        ("critical-g", "locate transitions to complex eigenvalues"),
        ("spectrum", "eigenvalues at a single parameter point"),
        ("verify", "run all symmetry checks on a parameter grid"),
    ]:
        sub = subs.add_parser(name, help=help_text)
        _add_common(sub)
        if name == "critical-g":
            sub.add_argument("--scan-step", dest="scan_step", type=float, default=None)
            sub.add_argument("--refine-tol", dest="refine_tol", type=float, default=None)
            sub.add_argument("--max-events", dest="max_events", type=int, default=None)
        if name == "pitchfork":
            sub.add_argument("--scan-step", dest="scan_step", type=float, default=None)
            sub.add_argument("--refine-tol", dest="refine_tol", type=float, default=None)
        if name == "verify":
            sub.add_argument("--grid", choices=("small", "full"), default=None)
            sub.add_argument("--seed", type=int, default=None)
    return parser


def run_cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = RunConfig(args.subcommand, args)
        return _DISPATCH[args.subcommand](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
