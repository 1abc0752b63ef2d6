"""Command-line runner: ``rigidlax validate | simulate | catalog``.

Exit codes: 0 ok, 1 case-condition violation, 2 runtime or integrator
failure, 3 config parse failure. With several configs the largest code wins.

``simulate`` writes a CSV trajectory (``t``, coordinates, then monitored
channels, 17 significant digits) and a JSON report mapping each channel
name to ``{initial, max_drift, t_at_max}``. Channel names:

* integrals by their own name (``H``, ``F1``, ...);
* ``relation:<name>`` for invariant relations;
* ``spectral:<coef>`` for spectral-polynomial coefficients;
* ``reduction:<kind>.<channel>`` for reduction residuals (``initial`` is 0
  and ``max_drift`` is the largest residual);
* ``rmatrix`` and ``divergence``, also residuals.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import load_config
from .errors import ConfigError, InvalidArgument, RigidLaxError
from .integrate import ConservationReport, Drift, monitor, simulate
from .systems.base import LOOSE_TOL, STRICT_TOL

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME, EXIT_PARSE = 0, 1, 2, 3

RMATRIX_PAIRS = ((0.7, -1.3), (1.9, 0.4), (-0.6, 2.2), (0.35 + 0.8j, -1.1 + 0.2j), (3.0, 1.5))
RMATRIX_MAX_SAMPLES = 50


class _Exit(Exception):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


def _prepare(cfg, loose):
    """Build, check and validate; returns ``(system, validation report)``."""
    from .systems.catalog import supported_checks

    try:
        system = cfg.build_system()
    except ConfigError:
        raise
    except InvalidArgument as exc:
        raise _Exit(EXIT_INVALID, f"invalid parameters: {exc}") from None
    ok = supported_checks(system)
    for i, c in enumerate(cfg.checks):
        if c not in ok:
            raise ConfigError(f"check {c!r} does not apply to case {cfg.case!r}; supported: {ok}", f"checks[{i}]")
    try:
        cfg.stepper_config()
    except InvalidArgument as exc:
        raise ConfigError(str(exc), "stepper") from None
    return system, system.validate(LOOSE_TOL if loose else STRICT_TOL)


def run_validate(path, loose=False):
    """Parse and validate one config; returns ``(exit code, text)``."""
    try:
        cfg = load_config(path)
        system, report = _prepare(cfg, loose)
    except ConfigError as exc:
        return EXIT_PARSE, f"{path}: parse error: {exc}"
    except _Exit as exc:
        return exc.code, f"{path}: {exc}"
    return (EXIT_OK if report.ok else EXIT_INVALID), f"{path}: {report}"


def _residual(name, values, times, initial=0.0):
    v = np.abs(np.asarray(values, dtype=float))
    j = int(np.argmax(v)) if v.size else 0
    return Drift(name, initial, float(v[j]) if v.size else 0.0, float(times[j]) if v.size else 0.0)


def run_checks(system, traj, checks):
    """Run the requested checks; returns a :class:`ConservationReport` and
    records monitored integral / relation values on ``traj``."""
    from .lax import rmatrix_residual, spectral_drift
    from .poisson import divergence
    from .reduction import reduction_checks

    report = ConservationReport()
    times = traj.times
    if "integrals" in checks:
        fns = system.integrals()
        report.merge(monitor(traj, fns))
        for f in fns:
            traj.add_monitor(f, f.name)
    if "relations" in checks:
        fns = system.invariant_relations()
        report.merge(monitor(traj, fns), prefix="relation:")
        for f in fns:
            traj.add_monitor(f, f"relation:{f.name}")
    if "spectral" in checks:
        report.merge(spectral_drift(system, traj), prefix="spectral:")
    if "reduction" in checks:
        for res in reduction_checks(system, traj):
            for ch, value in res.channels.items():
                name = f"reduction:{res.kind}.{ch}"
                report.entries[name] = Drift(name, 0.0, float(value), float(res.t_at_max.get(ch, 0.0)))
    if "rmatrix" in checks:
        idx = np.unique(np.linspace(0, len(times) - 1, min(len(times), RMATRIX_MAX_SAMPLES)).astype(int))
        vals = [max(rmatrix_residual(system, traj.states[j], lam, mu) for lam, mu in RMATRIX_PAIRS) for j in idx]
        report.entries["rmatrix"] = _residual("rmatrix", vals, times[idx])
    if "divergence" in checks:
        vals = [divergence(system.rhs, x) for x in traj.states]
        report.entries["divergence"] = _residual("divergence", vals, times, float(vals[0]))
    return report


def _output_paths(cfg, out_dir):
    base = Path(out_dir) if out_dir is not None else Path(".")
    return base / cfg.output["csv"], base / cfg.output["report"]


def run_simulate(path, out_dir=None, loose=False):
    """Run one config end to end; returns ``(exit code, text)``."""
    try:
        cfg = load_config(path)
        system, vreport = _prepare(cfg, loose)
    except ConfigError as exc:
        return EXIT_PARSE, f"{path}: parse error: {exc}"
    except _Exit as exc:
        return exc.code, f"{path}: {exc}"
    if not vreport.ok:
        return EXIT_INVALID, f"{path}: {vreport}"
    try:
        x0 = cfg.initial_state(system)
    except ConfigError as exc:
        return EXIT_PARSE, f"{path}: parse error: {exc}"
    try:
        traj = simulate(system, x0, cfg.stepper_config())
        report = run_checks(system, traj, cfg.checks)
    except RigidLaxError as exc:
        return EXIT_RUNTIME, f"{path}: {type(exc).__name__}: {exc}"
    csv_path, rep_path = _output_paths(cfg, out_dir)
    try:
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        rep_path.parent.mkdir(parents=True, exist_ok=True)
        traj.to_csv(csv_path)
        rep_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    except OSError as exc:
        return EXIT_RUNTIME, f"{path}: cannot write output: {exc}"
    lines = [f"{path}: {cfg.case}, {len(traj)} samples, {traj.steps} steps -> {csv_path}, {rep_path}"]
    for d in report:
        flag = " (conditional)" if d.conditional else ""
        lines.append(f"  {d.name}: max_drift={d.max_drift:.3e} at t={d.t_at_max:.6g}{flag}")
    return EXIT_OK, "\n".join(lines)


def _run_many(fn, configs, jobs, per_run_out, out_dir, loose):
    """Run ``fn`` over configs, in parallel when ``jobs > 1``; output order
    always follows the config order."""
    def out_for(path):
        if fn is run_validate:
            return None
        if out_dir is None or not per_run_out:
            return out_dir
        return str(Path(out_dir) / Path(path).stem)

    args = [(p, out_for(p), loose) if fn is run_simulate else (p, loose) for p in configs]
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(fn, *zip(*args)))
    else:
        results = [fn(*a) for a in args]
    code = 0
    for c, text in results:
        print(text)
        code = max(code, c)
    return code


def cmd_catalog(emit_template=None, out_dir=None):
    from .systems.catalog import CATALOG, listing, template

    if emit_template is None:
        print(listing())
        print(f"{len(CATALOG)} cases")
        return EXIT_OK
    if emit_template not in CATALOG:
        print(f"unknown case {emit_template!r}; known: {', '.join(CATALOG)}", file=sys.stderr)
        return EXIT_PARSE
    text = template(emit_template)
    if out_dir is None:
        sys.stdout.write(text)
    else:
        os.makedirs(out_dir, exist_ok=True)
        path = Path(out_dir) / f"{emit_template}.yaml"
        path.write_text(text)
        print(path)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="rigidlax", description="Simulate and verify integrable rigid-body systems.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", action="append", required=True, metavar="PATH",
                        help="run config (YAML); repeat for a batch")
        sp.add_argument("--loose", action="store_true", help=f"case-condition tolerance {LOOSE_TOL:g} instead of {STRICT_TOL:g}")
        sp.add_argument("--jobs", type=int, default=1, metavar="N", help="parallel runs for a batch")

    v = sub.add_parser("validate", help="check a config and its case conditions")
    common(v)
    s = sub.add_parser("simulate", help="integrate and write CSV + JSON report")
    common(s)
    s.add_argument("--out", metavar="DIR", help="output directory (per-config subdirectories for a batch)")
    c = sub.add_parser("catalog", help="list cases or emit a config template")
    c.add_argument("--emit-template", metavar="CASE")
    c.add_argument("--out", metavar="DIR", help="write the template to DIR/CASE.yaml")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "catalog":
        return cmd_catalog(args.emit_template, args.out)
    if args.jobs < 1:
        print("--jobs must be >= 1", file=sys.stderr)
        return EXIT_PARSE
    if args.command == "validate":
        return _run_many(run_validate, args.config, args.jobs, False, None, args.loose)
    return _run_many(run_simulate, args.config, args.jobs, len(args.config) > 1, args.out, args.loose)


if __name__ == "__main__":
    sys.exit(main())
