"""Command-line front end: ``ionheat {fig1,fig2,modes,thermal,validate}``.

Curves are written as CSV, reports as JSON.  Whenever ``--out`` names a
file, a ``<out>.manifest.json`` is written next to it holding the argument
list and resolved configuration needed to regenerate it byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import thermal_tau1, thermal_theta
from .chain import build_chain
from .figures import FIG1_GRID, FIG1_PARAMS, CURVE_LABELS, fig1_curves, fig2_table, finite_or_inf, modes_report
from .montecarlo import Ensemble, estimate_from_amplitudes, fine_grid, sample_amplitudes
from .noise import DEFAULT_DT, SeedSpec, correlated_samples, psd_factor
from .trap import TrapConfig, load_config, mercury_trap, trap_to_dict
from .validation import MC_OMEGA0T, SUITES, THERMAL_NOTE, run_suite

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(header, columns, out) -> str:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(fmt(x) for x in row))
    text = "\n".join(lines) + "\n"
    _emit(text, out)
    return text


def dumps(obj) -> str:
    return json.dumps(finite_or_inf(obj), indent=2) + "\n"


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def write_manifest(args, argv, config: dict, outputs: list[str]):
    if args.out is None:
        return
    manifest = {
        "tool": "ionheat",
        "version": __version__,
        "subcommand": args.command,
        "argv": list(argv),
        "seed": getattr(args, "seed", None),
        "config": config,
        "outputs": outputs,
    }
    Path(str(args.out) + ".manifest.json").write_text(dumps(manifest), encoding="utf-8")


def parse_grid(spec: str) -> np.ndarray:
    try:
        start, stop, count = spec.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError as exc:
        raise UsageError(f"bad grid {spec!r}; expected start:stop:count") from exc
    if count < 2 or stop <= start or start < 0:
        raise UsageError(f"bad grid {spec!r}; need 0 <= start < stop and count >= 2")
    return np.linspace(start, stop, count)


def parse_params(spec: str) -> list[tuple[float, float]]:
    pairs = []
    try:
        for item in spec.split(","):
            a, tau = item.split(":")
            pairs.append((float(a), float(tau)))
    except ValueError as exc:
        raise UsageError(f"bad --params {spec!r}; expected omega0T:omega0tau1[,...]") from exc
    if not pairs or any(a <= 0 or tau <= 0 for a, tau in pairs):
        raise UsageError("--params values must be positive")
    if len(pairs) > len(CURVE_LABELS):
        raise UsageError("too many curves")
    return pairs


def dump_paths(path, omega0T, times, seed, n_ions=1, gamma=None):
    """Write realization 0 of the noise ensemble as CSV: t, E_1..E_N."""
    dt, K, _ = fine_grid(times, DEFAULT_DT)
    gamma = np.ones((n_ions, n_ions)) if gamma is None else gamma
    factor = psd_factor(gamma)
    xi = SeedSpec(seed, 0).generator().standard_normal((n_ions, K))
    E = correlated_samples(xi, factor, omega0T, dt)
    t = dt * np.arange(K)
    write_csv(["t"] + [f"E_{n + 1}" for n in range(n_ions)], [t, *E], path)


# -- subcommands -------------------------------------------------------------

def cmd_fig1(args, argv):
    params = parse_params(args.params) if args.params else list(FIG1_PARAMS)
    times = parse_grid(args.grid)
    times, F = fig1_curves(params, times)
    labels = CURVE_LABELS[: len(params)]
    header = ["omega0_t"] + [f"F_{c}" for c in labels]
    columns = [times, *F]
    if args.mc:
        for c, (a, tau) in zip(labels, params):
            v = sample_amplitudes(Ensemble(a, tau), times, args.mc, args.seed, args.workers)
            est = estimate_from_amplitudes(v, times, args.seed)
            header += [f"F_{c}_mc", f"F_{c}_se"]
            columns += [est.mean["fidelity"], est.stderr["fidelity"]]
    write_csv(header, columns, args.out)
    outputs = [str(args.out)] if args.out else []
    if args.dump_paths:
        dump_paths(args.dump_paths, params[0][0], times, args.seed)
        outputs.append(str(args.dump_paths))
    write_manifest(args, argv, {
        "params": [list(p) for p in params], "grid": args.grid, "mc": args.mc, "dt": DEFAULT_DT,
    }, outputs)
    return EXIT_OK


def cmd_fig2(args, argv):
    rows = fig2_table(args.N if args.N is not None else 10)
    cols = list(zip(*rows))
    write_csv(["N", "tau_coherent_over_tau1", "tau_incoherent_over_tau1"], cols, args.out)
    write_manifest(args, argv, {"n_max": len(rows)}, [str(args.out)] if args.out else [])
    return EXIT_OK


def _trap_from_args(args) -> TrapConfig:
    cfg = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = json.load(fh)
    for key, attr in (("mass_kg", "mass_kg"), ("freq_Hz", "freq_hz"), ("charge_e", "charge_e")):
        val = getattr(args, attr, None)
        if val is not None:
            cfg[key] = val
    trap, _ = load_config(cfg) if cfg else (mercury_trap(), None)
    return trap


def cmd_modes(args, argv):
    n = args.N if args.N is not None else 2
    trap = _trap_from_args(args)
    report = modes_report(n, trap, args.coherence_length)
    _emit(dumps(report), args.out)
    write_manifest(args, argv, {"N": n, "trap": trap_to_dict(trap),
                                "coherence_length_m": args.coherence_length}, [str(args.out)] if args.out else [])
    return EXIT_OK


def cmd_thermal(args, argv):
    if (args.theta is None) == (args.tau1 is None):
        raise UsageError("give exactly one of --theta or --tau1")
    trap = _trap_from_args(args)
    if args.theta is not None:
        theta, tau1 = args.theta, thermal_tau1(trap, args.theta)
    else:
        theta, tau1 = thermal_theta(trap, args.tau1), args.tau1
    _emit(dumps({"theta_K": theta, "tau1_s": tau1, "trap": trap_to_dict(trap), "note": THERMAL_NOTE}), args.out)
    write_manifest(args, argv, {"trap": trap_to_dict(trap)}, [str(args.out)] if args.out else [])
    return EXIT_OK


def cmd_validate(args, argv):
    try:
        summary = run_suite(args.suite, R=args.R, seed=args.seed, workers=args.workers,
                            N=args.N if args.N is not None else 3)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc
    text = dumps(summary)
    if args.out is not None:
        _emit(text, args.out)
    sys.stdout.write(text)
    outputs = [str(args.out)] if args.out else []
    if args.dump_paths:
        n = args.N if args.N is not None else 1
        dump_paths(args.dump_paths, MC_OMEGA0T, [0.0, 20.0], args.seed, n_ions=n)
        outputs.append(str(args.dump_paths))
    write_manifest(args, argv, {"suite": args.suite, "R": args.R, "N": args.N}, outputs)
    return EXIT_OK if summary["passed"] else EXIT_FAILED


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ionheat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=False):
        p.add_argument("--out", help="output file (default: stdout)")
        if seed:
            p.add_argument("--seed", type=int, default=42, help="master seed (default 42)")
            p.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo")
            p.add_argument("--dump-paths", metavar="CSV", help="write noise realization 0 as CSV")

    def trap_opts(p):
        p.add_argument("--config", help="JSON trap/noise configuration file")
        p.add_argument("--mass-kg", type=float)
        p.add_argument("--freq-hz", type=float)
        p.add_argument("--charge-e", type=float)

    p = sub.add_parser("fig1", help="ground-state fidelity curves (CSV)")
    common(p, seed=True)
    p.add_argument("--params", help="omega0T:omega0tau1 pairs, comma separated "
                                    "(default 1:1,1:8.5,1:41,1:128.5)")
    p.add_argument("--grid", default="{}:{}:{}".format(*FIG1_GRID), help="start:stop:count in omega0 t")
    p.add_argument("--mc", type=int, metavar="R", help="add Monte Carlo columns with R realizations")
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("fig2", help="chain heating times vs N (CSV)")
    common(p)
    p.add_argument("--N", type=int, help="largest chain size (1..20, default 10)")
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("modes", help="normal modes and per-mode heating times (JSON)")
    common(p)
    trap_opts(p)
    p.add_argument("--N", type=int, help="number of ions (default 2)")
    p.add_argument("--coherence-length", type=float,
                   help="length (m) for the exponential-distance model "
                        "(default: thermal coherence length at 4.6 K)")
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("thermal", help="thermal-field heating estimate (JSON)")
    common(p)
    trap_opts(p)
    p.add_argument("--theta", type=float, help="temperature in K")
    p.add_argument("--tau1", type=float, help="heating time in s")
    p.set_defaults(func=cmd_thermal)

    p = sub.add_parser("validate", help="run a validation suite (JSON summary)")
    common(p, seed=True)
    p.add_argument("suite", help="one of: all, " + ", ".join(SUITES))
    p.add_argument("--R", type=int, default=10_000, help="Monte Carlo realizations")
    p.add_argument("--N", type=int, help="ions for mode-selectivity (default 3)")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args, argv)
    except (UsageError, ValueError) as exc:
        print(f"ionheat {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
