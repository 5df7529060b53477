"""Command-line interface.

Exit codes: 0 success (all checks pass), 1 failed check or I/O error,
2 usage error (bad flags, unknown family or suite, invalid particle count).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import limits as lim
from . import plasma as pl
from .dpp import KernelContext, intensity
from .roots import FAMILIES, DomainGeometry, FamilyError, RootSystemSpec, normalize_family
from .sampler import SamplerOptions, sample_configurations
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --- serialization -----------------------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj) -> str:
    """JSON text with floats written to 17 significant digits (exact round-trip)."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def grid_csv(xs, ys, values) -> str:
    """CSV with header ``x,y,value``; rows run over x fastest, then y."""
    lines = ["x,y,value"]
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            lines.append(f"{_fmt_float(float(x))},{_fmt_float(float(y))},{_fmt_float(float(values[j][i]))}")
    return "\n".join(lines) + "\n"


def table_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt_float(float(v)) if not isinstance(v, str) else v for v in row))
    return "\n".join(lines) + "\n"


def _figure_path(out, plot):
    """``--plot`` with no value puts a PNG next to ``--out``."""
    if plot is None:
        return None
    if plot == "auto":
        if out is None:
            raise UsageError("--plot without a path needs --out")
        return Path(out).with_suffix(".png")
    return Path(plot)


# --- commands ------------------------------------------------------------------


def _spec_geom(args):
    try:
        spec = RootSystemSpec(args.family, args.n)
    except FamilyError as err:
        raise UsageError(str(err)) from err
    if not (args.length > 0 and args.width > 0):
        raise UsageError("length and width must be positive")
    return spec, DomainGeometry(args.length, args.width)


def cmd_verify(args) -> int:
    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; expected one of {sorted(SUITES)} or all")
    report = run_suite(args.suite, args.seed, args.tol)
    for case in report.cases:
        mark = "PASS" if case.passed else "FAIL"
        print(f"{mark} {case.name}: residual {case.residual:.3e} (tol {case.tolerance:.1e})")
    print(f"{args.suite}: {'PASS' if report.passed else 'FAIL'} "
          f"({len(report.cases) - len(report.failures())}/{len(report.cases)}) in {report.wall_time:.1f} s",
          file=sys.stderr)
    if args.out:
        write_text(args.out, dumps(report.to_dict()) + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def sample_document(spec, geom, seed: int, count: int) -> dict:
    ctx = KernelContext(spec, geom)
    configs = sample_configurations(ctx, count, SamplerOptions(seed=seed))
    return {
        "family": spec.family,
        "n": spec.n,
        "length": geom.L,
        "width": geom.W,
        "seed": seed,
        "configurations": [[[p.real, p.imag] for p in c.points] for c in configs],
    }


def read_samples(path) -> dict:
    return json.loads(Path(path).read_text())


def cmd_sample(args) -> int:
    spec, geom = _spec_geom(args)
    if args.count < 1:
        raise UsageError("count must be positive")
    doc = sample_document(spec, geom, args.seed, args.count)
    text = dumps(doc) + "\n"
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)
    fig = _figure_path(args.out, args.plot)
    if fig:
        from .plotting import plot_samples

        plot_samples(doc["configurations"], geom.L, geom.W, fig, f"{spec}: {args.count} samples")
    return EXIT_OK


def intensity_grid(spec, geom, grid: int):
    """``K(z, z)`` on a ``grid x grid`` lattice including both cell edges."""
    xs = np.linspace(0.0, geom.L, grid)
    ys = np.linspace(0.0, geom.W, grid)
    vals = intensity(KernelContext(spec, geom), xs[None, :] + 1j * ys[:, None])
    return xs, ys, vals


def cmd_kernel(args) -> int:
    spec, geom = _spec_geom(args)
    if args.grid < 2:
        raise UsageError("grid must be at least 2")
    xs, ys, vals = intensity_grid(spec, geom, args.grid)
    text = grid_csv(xs, ys, vals)
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)
    fig = _figure_path(args.out, args.plot)
    if fig:
        from .plotting import plot_grid

        plot_grid(xs, ys, vals, fig, f"K(z,z) for {spec}", "intensity")
    return EXIT_OK


def plasma_report(family: str, n: int, geom: DomainGeometry, convention: str = "definition") -> dict:
    fe = pl.free_energy_expansion(family, geom, n, convention)
    gff = pl.gff_comparison(geom, max(n, 2), convention)
    log_z = pl.log_plasma_partition(family, geom, n, convention)
    return {
        "family": family,
        "n": n,
        "length": geom.L,
        "width": geom.W,
        "tau_imag": geom.tau.imag,
        "rho": n / geom.area,
        "convention": convention,
        "log_Z_plasma": log_z,
        "Z_plasma": math.exp(log_z) if log_z < 700 else math.inf,
        "Z_identity_residual": pl.plasma_partition_residual(family, geom, n, convention),
        "F_exact": fe.f_exact,
        "F0": fe.f0,
        "F1": fe.f1,
        "log_N_term": 0.0 if family == "A" else -math.log(n) / (2 * n),
        "expansion_residual": fe.residual,
        "gff": {
            "F_gff_nonzero_modes": gff.f_gff_nonzero,
            "F_gff": gff.f_gff,
            "F1_A_plus_F_gff_nonzero_modes": gff.f1_a_plus_nonzero,
            "modular_invariance_residual": gff.invariance_residual,
            "F1_C_minus_F_gff": gff.f1_c_minus_gff,
            "F1_D_minus_F_gff": gff.f1_d_minus_gff,
        },
    }


def cmd_plasma(args) -> int:
    fam = args.family
    if fam not in pl.SOLVABLE:
        raise UsageError(f"plasma family must be one of A, C, D, got {fam!r}")
    if args.n < (2 if fam == "D" else 1):
        raise UsageError(f"family {fam} needs N >= {2 if fam == 'D' else 1}")
    if not (args.length > 0 and args.width > 0):
        raise UsageError("length and width must be positive")
    geom = DomainGeometry(args.length, args.width)
    doc = plasma_report(fam, args.n, geom, args.convention)
    text = dumps(doc) + "\n"
    if args.out:
        write_text(args.out, text)
    sys.stdout.write(text)
    fig = _figure_path(args.out, args.plot)
    if fig:
        from .plotting import plot_series

        rho = args.n / geom.area
        rows = pl.free_energy_scan(fam, rho, geom.tau.imag, (4, 8, 16, 32, 64), args.convention)
        plot_series([r["N"] for r in rows], {"|F - expansion|": [r["residual"] for r in rows]},
                    fig, "N", "residual", f"{fam} free energy at rho={rho:.3g}")
    return EXIT_OK


SCAN_NS = (8, 16, 32, 64)
SCAN_WS = (1.0, 2.0, 3.0, 4.0, 5.0)
FAMILIES_OF_CLASS = {c: [f for f in FAMILIES if lim.limit_class(f) == c] for c in lim.LIMIT_CLASSES}


def limits_table(cls: str, rho: float, width: float, mode: str, grid: int = 41):
    """Return ``(kind, payload)`` for the three limit modes."""
    p = lim.StripParams(rho, width)
    if mode == "kernel":
        half = width / 2
        xs = np.linspace(-half, half, grid)
        ys = np.linspace(-half, half, grid)
        z = xs[None, :] + 1j * ys[:, None]
        vals = np.real(lim.strip_kernel(cls, p, z, z))
        return "grid", (xs, ys, vals)
    if mode == "scan_n":
        fams = FAMILIES_OF_CLASS[cls]
        cols = {f: lim.finite_to_strip_scan(f, SCAN_NS, p) for f in fams}
        rows = [[n] + [cols[f][k] for f in fams] for k, n in enumerate(SCAN_NS)]
        return "table", (["N"] + [f"error_{f}" for f in fams], rows)
    if mode == "scan_w":
        pts = lim.ginibre_test_pairs(rho)
        errs = lim.strip_to_ginibre_scan(cls, rho, SCAN_WS, pts)
        header = ["W", f"error_vs_ginibre_{lim.GINIBRE_OF[cls]}"]
        rows = [[w, e] for w, e in zip(SCAN_WS, errs)]
        if cls in ("B", "C"):
            z, zp = pts
            header.append("B_vs_C")
            for row, w in zip(rows, SCAN_WS):
                q = lim.StripParams(rho, w)
                gap = np.abs(np.abs(lim.strip_kernel("B", q, z, zp)) - np.abs(lim.strip_kernel("C", q, z, zp)))
                row.append(float(np.max(gap)))
        return "table", (header, rows)
    raise UsageError(f"unknown mode {mode!r}")


def cmd_limits(args) -> int:
    cls = args.cls
    if cls not in lim.LIMIT_CLASSES:
        raise UsageError(f"class must be one of {lim.LIMIT_CLASSES}, got {cls!r}")
    if not (args.rho > 0 and args.width > 0):
        raise UsageError("rho and width must be positive")
    kind, payload = limits_table(cls, args.rho, args.width, args.mode, args.grid)
    text = grid_csv(*payload) if kind == "grid" else table_csv(*payload)
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)
    fig = _figure_path(args.out, args.plot)
    if fig:
        from .plotting import plot_grid, plot_series

        if kind == "grid":
            plot_grid(*payload, fig, f"strip {cls} intensity, rho={args.rho:g}, W={args.width:g}", "intensity")
        else:
            header, rows = payload
            xs = [r[0] for r in rows]
            series = {h: [r[k + 1] for r in rows] for k, h in enumerate(header[1:])}
            plot_series(xs, series, fig, header[0], "sup | |K| - |K_limit| |", f"class {cls}")
    return EXIT_OK


def cmd_report(args) -> int:
    """Write CSV/JSON outputs and a PNG figure next to each into one directory."""
    from .plotting import plot_grid, plot_samples, plot_series

    spec, geom = _spec_geom(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    xs, ys, vals = intensity_grid(spec, geom, args.grid)
    write_text(out / "intensity.csv", grid_csv(xs, ys, vals))
    plot_grid(xs, ys, vals, out / "intensity.png", f"K(z,z) for {spec}", "intensity")
    written += ["intensity.csv", "intensity.png"]

    doc = sample_document(spec, geom, args.seed, args.count)
    write_text(out / "samples.json", dumps(doc) + "\n")
    plot_samples(doc["configurations"], geom.L, geom.W, out / "samples.png", f"{spec}: {args.count} samples")
    written += ["samples.json", "samples.png"]

    cls = lim.limit_class(spec.family)
    rho = spec.n / geom.area
    header, rows = limits_table(cls, rho, geom.W, "scan_n")[1]
    write_text(out / "limits_scan_n.csv", table_csv(header, rows))
    plot_series([r[0] for r in rows], {h: [r[k + 1] for r in rows] for k, h in enumerate(header[1:])},
                out / "limits_scan_n.png", "N", "sup | |K_N| - |K_strip| |", f"finite -> strip, class {cls}")
    written += ["limits_scan_n.csv", "limits_scan_n.png"]

    if spec.family in pl.SOLVABLE:
        rep = plasma_report(spec.family, spec.n, geom)
        write_text(out / "plasma.json", dumps(rep) + "\n")
        rows = pl.free_energy_scan(spec.family, rho, geom.tau.imag, (4, 8, 16, 32, 64))
        write_text(out / "free_energy.csv", table_csv(list(rows[0]), [list(r.values()) for r in rows]))
        plot_series([r["N"] for r in rows], {"N^2 residual": [r["N2_residual"] for r in rows]},
                    out / "free_energy.png", "N", "N^2 (F - F0 - F1/N)", f"{spec.family} plasma", logy=False)
        written += ["plasma.json", "free_energy.csv", "free_energy.png"]

    write_text(out / "index.json", dumps({"family": spec.family, "n": spec.n, "files": written}) + "\n")
    print("\n".join(str(out / w) for w in written))
    return EXIT_OK


# --- parser --------------------------------------------------------------------


def _family(text: str) -> str:
    try:
        return normalize_family(text)
    except FamilyError as err:
        raise argparse.ArgumentTypeError(str(err)) from err


def _add_domain(p, default_family="A"):
    p.add_argument("--family", type=_family, default=default_family, help="A, B, Bv, C, Cv, BC or D")
    p.add_argument("--n", type=int, default=4, help="number of particles")
    p.add_argument("--length", type=float, default=1.0, help="L, horizontal period")
    p.add_argument("--width", type=float, default=1.0, help="W, vertical period")


def _add_plot(p):
    p.add_argument("--plot", nargs="?", const="auto", default=None,
                   help="write a figure (SVG or PNG by suffix); without a path, a PNG next to --out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ellipdpp", description="Elliptic determinantal point processes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)} or all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None, help="override every case tolerance")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="exact samples of a finite DPP as JSON")
    _add_domain(p)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    _add_plot(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("kernel", help="grid of K(z,z) as CSV")
    _add_domain(p)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--out")
    _add_plot(p)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("plasma", help="solvable plasma partition function and free energy")
    p.add_argument("--family", default="A", help="A, C or D")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--length", type=float, default=1.0)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--convention", choices=pl.CONVENTIONS, default="definition")
    p.add_argument("--out")
    _add_plot(p)
    p.set_defaults(func=cmd_plasma)

    p = sub.add_parser("limits", help="strip kernels and convergence scans as CSV")
    p.add_argument("--class", dest="cls", default="A", help="A, B, C or D")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--mode", choices=("kernel", "scan_n", "scan_w"), default="kernel")
    p.add_argument("--grid", type=int, default=41)
    p.add_argument("--out")
    _add_plot(p)
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("report", help="CSV/JSON outputs with PNG figures in one directory")
    _add_domain(p)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
