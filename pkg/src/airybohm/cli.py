"""Scenario-driven command line front end.

``airybohm run <file>`` executes a scenario file (INI key-value format,
schema in the README), writes deterministic CSV artifacts plus a check
report, and optionally renders an SVG of the trajectory fan over the
density heat map.  ``validate`` diagnoses a scenario without executing
it and ``list`` names the bundled ones.

Exit codes: 0 success, 2 configuration error, 3 numeric failure
(caustic inside the window, tolerance failure, failed report check).
"""

from __future__ import annotations

import argparse
import configparser
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .aux_odes import PhysicalParams, PotentialSpec, solve_delta, solve_X
from .errors import (
    AiryBohmError,
    CausticDomainError,
    ScenarioError,
    StabilityError,
    TabulatedWindowError,
    ToleranceError,
)
from .trajectories import (
    TrajectoryMethod,
    build_ensemble,
    default_initial_positions,
    sample_initial_positions,
)
from .wavefunction import airy_argument, density, velocity_field

ARTIFACTS = ("trajectories_csv", "density_heatmap", "velocity_field_csv",
             "comparison_report", "plot")
DEFAULT_ARTIFACTS = ("trajectories_csv", "density_heatmap",
                     "velocity_field_csv", "comparison_report")
BUNDLED = ("free", "constant_force", "harmonic_focus", "mathieu_stable",
           "mathieu_unstable")

ARG_INVARIANCE_TOL = 1e-8
TRANSPORT_TOL = 1e-8

_NAME_RE = re.compile(r"^[A-Za-z0-9_\-]+$")


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str = "default"          # default | linspace | sampled
    count: int = 11
    lo: float = 0.0                # linspace bounds (positions)
    hi: float = 0.0
    seed: int = 0

    def positions(self, params, seed_override=None):
        if self.kind == "default":
            return default_initial_positions(params, self.count)
        if self.kind == "linspace":
            return np.linspace(self.lo, self.hi, self.count)
        seed = self.seed if seed_override is None else seed_override
        return sample_initial_positions(self.count, params, seed=seed)


@dataclass(frozen=True)
class Scenario:
    """Everything one run needs, parsed from a scenario file."""

    name: str
    params: PhysicalParams
    potential: PotentialSpec
    ensemble: EnsembleSpec
    window: tuple[float, float]
    outputs: tuple[str, ...]


# ----------------------------------------------------------------------
# scenario file parsing
# ----------------------------------------------------------------------

_SCHEMA = {
    "scenario": {"name", "window"},
    "params": {"hbar", "m", "B"},
    "potential": {"kind", "f0", "omega0_sq", "a", "q", "scale"},
    "ensemble": {"kind", "count", "lo", "hi", "seed"},
    "outputs": {"artifacts"},
}


def _line_of(lines, section, key=None):
    """Best-effort line number of a section header or of a key inside it."""
    in_section = False
    for i, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if stripped.startswith("["):
            if in_section and key is not None:
                return None
            in_section = stripped == f"[{section}]"
            if in_section and key is None:
                return i
        elif in_section and key is not None:
            if re.match(rf"{re.escape(key)}\s*[=:]", stripped):
                return i
    return None


class _Parser:
    def __init__(self, path):
        self.path = str(path)
        with open(path, "r", encoding="utf-8") as fh:
            self.lines = fh.read().splitlines()
        cp = configparser.ConfigParser(interpolation=None)
        try:
            cp.read_string("\n".join(self.lines), source=self.path)
        except configparser.MissingSectionHeaderError as exc:
            raise ScenarioError("every entry must sit under a [section] header",
                                path=self.path, line=exc.lineno) from exc
        except configparser.ParsingError as exc:
            line = exc.errors[0][0] if exc.errors else None
            raise ScenarioError("malformed scenario file", path=self.path,
                                line=line) from exc
        self.cp = cp

    def fail(self, message, section, key=None):
        raise ScenarioError(message, path=self.path,
                            line=_line_of(self.lines, section, key))

    def require(self, section):
        if not self.cp.has_section(section):
            raise ScenarioError(f"missing required section [{section}]",
                                path=self.path)
        return self.cp[section]

    def check_known_keys(self):
        for section in self.cp.sections():
            if section not in _SCHEMA:
                self.fail(f"unknown section [{section}]", section)
            for key in self.cp[section]:
                if key not in {k.lower() for k in _SCHEMA[section]}:
                    self.fail(f"unknown key '{key}' in [{section}]",
                              section, key)

    def get_float(self, section, key, default=None):
        if not self.cp.has_option(section, key):
            if default is None:
                self.fail(f"[{section}] needs '{key}'", section)
            return default
        try:
            return float(self.cp[section][key])
        except ValueError:
            self.fail(f"'{key}' must be a number, got "
                      f"{self.cp[section][key]!r}", section, key)

    def get_int(self, section, key, default):
        if not self.cp.has_option(section, key):
            return default
        try:
            return int(self.cp[section][key])
        except ValueError:
            self.fail(f"'{key}' must be an integer, got "
                      f"{self.cp[section][key]!r}", section, key)


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file; raises ScenarioError on defects."""
    p = _Parser(path)
    p.check_known_keys()

    sc = p.require("scenario")
    name = sc.get("name", "").strip()
    if not _NAME_RE.match(name):
        p.fail("scenario name must be non-empty [A-Za-z0-9_-]",
               "scenario", "name" if "name" in sc else None)
    t_max = p.get_float("scenario", "window")
    if not t_max > 0:
        p.fail("window must be a positive duration", "scenario", "window")

    try:
        params = PhysicalParams(hbar=p.get_float("params", "hbar", 1.0),
                                m=p.get_float("params", "m", 1.0),
                                B=p.get_float("params", "B", 1.0))
    except ValueError as exc:
        raise ScenarioError(str(exc), path=p.path,
                            line=_line_of(p.lines, "params")) from exc

    pot_section = p.require("potential")
    kind = pot_section.get("kind", "").strip()
    if kind == "free":
        potential = PotentialSpec.free()
    elif kind == "constant_force":
        potential = PotentialSpec.constant_force(p.get_float("potential", "f0"))
    elif kind == "harmonic":
        potential = PotentialSpec.harmonic(
            p.get_float("potential", "omega0_sq"),
            p.get_float("potential", "f0", 0.0))
    elif kind == "mathieu":
        potential = PotentialSpec.mathieu(p.get_float("potential", "a"),
                                          p.get_float("potential", "q"),
                                          p.get_float("potential", "scale", 1.0))
    else:
        p.fail(f"potential kind must be free, constant_force, harmonic or "
               f"mathieu, got {kind!r}", "potential",
               "kind" if "kind" in pot_section else None)

    ens_kind = "default"
    if p.cp.has_section("ensemble"):
        ens_kind = p.cp["ensemble"].get("kind", "default").strip()
        if ens_kind not in ("default", "linspace", "sampled"):
            p.fail(f"ensemble kind must be default, linspace or sampled, "
                   f"got {ens_kind!r}", "ensemble", "kind")
    count = p.get_int("ensemble", "count", 11)
    if count < 1:
        p.fail("ensemble count must be >= 1", "ensemble", "count")
    lo = p.get_float("ensemble", "lo", 0.0) if p.cp.has_section("ensemble") else 0.0
    hi = p.get_float("ensemble", "hi", 0.0) if p.cp.has_section("ensemble") else 0.0
    if ens_kind == "linspace" and not hi > lo:
        p.fail("linspace ensemble needs hi > lo", "ensemble")
    ensemble = EnsembleSpec(kind=ens_kind, count=count, lo=lo, hi=hi,
                            seed=p.get_int("ensemble", "seed", 0))

    artifacts = DEFAULT_ARTIFACTS
    if p.cp.has_option("outputs", "artifacts"):
        tokens = tuple(tok.strip() for tok in
                       p.cp["outputs"]["artifacts"].split(",") if tok.strip())
        for tok in tokens:
            if tok not in ARTIFACTS:
                p.fail(f"unknown artifact {tok!r} (choose from "
                       f"{', '.join(ARTIFACTS)})", "outputs", "artifacts")
        artifacts = tuple(a for a in ARTIFACTS if a in tokens)

    return Scenario(name=name, params=params, potential=potential,
                    ensemble=ensemble, window=(0.0, t_max), outputs=artifacts)


# ----------------------------------------------------------------------
# artifact writing
# ----------------------------------------------------------------------

def _fmt(v) -> str:
    return format(float(v), ".17g")


def _disp(v) -> str:
    """Shortest round-trip form, for report lines meant for humans."""
    return repr(float(v))


def _write_rows(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _time_grid(t_max):
    n = max(201, int(40.0 * t_max) + 1)
    return np.linspace(0.0, t_max, n)


def _field_grid(sc, aux, paths, t_grid):
    scale = sc.params.hbar ** (2.0 / 3.0) / sc.params.B
    d_max = float(np.max(np.abs(aux.delta_at(t_grid))))
    lo = paths.min() - 4.0 * scale * d_max
    hi = paths.max() + 2.0 * scale * d_max
    return np.linspace(lo, hi, 241)


def _run_checks(sc, aux, t_grid, closed, guided, tolerance):
    """The three report checks; returns [(name, max_dev, tol, passed)]."""
    agreement = float(np.max(np.abs(closed.paths - guided.paths)))

    arg0 = airy_argument(closed.paths[:, 0], 0.0, sc.params, aux)
    dens0 = density(closed.paths[:, 0], 0.0, sc.params, aux)
    arg_dev = 0.0
    transport_dev = 0.0
    for j, t in enumerate(t_grid[1:], start=1):
        arg_t = airy_argument(closed.paths[:, j], t, sc.params, aux)
        arg_dev = max(arg_dev, float(np.max(np.abs(arg_t - arg0))))
        dens_t = density(closed.paths[:, j], t, sc.params, aux)
        ratio = float(aux.delta_at(t)) / aux.delta0
        transport_dev = max(transport_dev,
                            float(np.max(np.abs(dens_t * ratio - dens0))))
    return [
        ("method_agreement", agreement, tolerance, agreement <= tolerance),
        ("argument_invariance", arg_dev, ARG_INVARIANCE_TOL,
         arg_dev <= ARG_INVARIANCE_TOL),
        ("probability_transport", transport_dev, TRANSPORT_TOL,
         transport_dev <= TRANSPORT_TOL),
    ]


def _write_report(path, sc, aux, checks):
    lines = [
        f"scenario: {sc.name}",
        f"window: [0, {_disp(sc.window[1])}]",
        f"particles: {sc.ensemble.count}",
        f"params: hbar={_disp(sc.params.hbar)} m={_disp(sc.params.m)} "
        f"B={_disp(sc.params.B)}",
        "caustic_time: " + (_disp(aux.caustic_time)
                            if aux.caustic_time is not None
                            else "none within window"),
    ]
    all_pass = True
    for name, dev, tol, ok in checks:
        all_pass &= ok
        lines.append(f"check {name:<22s} max {dev:.3e}  tol {tol:.1e}  "
                     + ("PASS" if ok else "FAIL"))
    lines.append("result: " + ("PASS" if all_pass else "FAIL"))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return all_pass


def _render_plot(out_dir):
    """Trajectory fan over the density heat map, re-read from the CSVs."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    traj = np.loadtxt(os.path.join(out_dir, "trajectories.csv"),
                      delimiter=",", skiprows=1)
    dens = np.loadtxt(os.path.join(out_dir, "density.csv"),
                      delimiter=",", skiprows=1)
    t = np.unique(dens[:, 0])
    x = np.unique(dens[:, 1])
    grid = dens[:, 2].reshape(t.size, x.size)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    mesh = ax.pcolormesh(t, x, grid.T, cmap="magma", shading="auto",
                         rasterized=True)
    for col in range(1, traj.shape[1]):
        ax.plot(traj[:, 0], traj[:, col], color="w", lw=0.8, alpha=0.85)
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    fig.colorbar(mesh, ax=ax, label=r"$|\psi|^2$")
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "trajectories.svg"))
    plt.close(fig)


def run_scenario(path, output_dir, tolerance=1e-6, seed=None) -> int:
    """Execute one scenario file; returns the process exit code."""
    try:
        sc = load_scenario(path)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    t_max = sc.window[1]
    try:
        sc.potential.check_window(0.0, t_max)
        aux = solve_X(sc.potential, t_max, params=sc.params)
    except (ScenarioError, TabulatedWindowError, ValueError) as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return 2
    except (ToleranceError, StabilityError) as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return 3
    if aux.caustic_time is not None and aux.caustic_time <= t_max:
        print(f"error: {path}: caustic at t = {_disp(aux.caustic_time)} lies "
              f"inside the window [0, {_disp(t_max)}]; shorten the window",
              file=sys.stderr)
        return 3

    out_dir = os.path.join(output_dir, sc.name)
    os.makedirs(out_dir, exist_ok=True)
    t_grid = _time_grid(t_max)
    x0 = sc.ensemble.positions(sc.params, seed_override=seed)

    try:
        closed = build_ensemble(x0, t_grid, TrajectoryMethod.CLOSED_FORM,
                                sc.params, aux)
        guided = build_ensemble(x0, t_grid,
                                TrajectoryMethod.INTEGRATED_GUIDANCE,
                                sc.params, aux, tol=1e-9)
    except (CausticDomainError, ToleranceError) as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return 3

    if "trajectories_csv" in sc.outputs:
        header = "t, " + ", ".join(f"x_{i + 1}" for i in range(x0.size))
        rows = (np.concatenate(([t_grid[j]], closed.paths[:, j]))
                for j in range(t_grid.size))
        _write_rows(os.path.join(out_dir, "trajectories.csv"), header, rows)

    needs_grid = {"density_heatmap", "velocity_field_csv"} & set(sc.outputs)
    if needs_grid:
        x_grid = _field_grid(sc, aux, closed.paths, t_grid)
        if "density_heatmap" in sc.outputs:
            rows = ((t, x, d) for t in t_grid
                    for x, d in zip(x_grid, density(x_grid, t, sc.params, aux)))
            _write_rows(os.path.join(out_dir, "density.csv"),
                        "t, x, density", rows)
        if "velocity_field_csv" in sc.outputs:
            rows = ((t, x, v) for t in t_grid
                    for x, v in zip(x_grid,
                                    velocity_field(x_grid, t, sc.params, aux)))
            _write_rows(os.path.join(out_dir, "velocity_field.csv"),
                        "t, x, velocity", rows)

    all_pass = True
    if "comparison_report" in sc.outputs:
        checks = _run_checks(sc, aux, t_grid, closed, guided, tolerance)
        all_pass = _write_report(os.path.join(out_dir, "report.txt"),
                                 sc, aux, checks)
    if "plot" in sc.outputs:
        _render_plot(out_dir)

    if not all_pass:
        print(f"error: {path}: report checks failed (see "
              f"{os.path.join(out_dir, 'report.txt')})", file=sys.stderr)
        return 3
    print(f"{sc.name}: PASS ({out_dir})")
    return 0


# ----------------------------------------------------------------------
# validate / list
# ----------------------------------------------------------------------

def validate(path) -> int:
    """Diagnose a scenario without producing artifacts."""
    try:
        sc = load_scenario(path)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    t_max = sc.window[1]
    # probe past the window so an imminent caustic is reported too
    probe_end = max(2.0 * t_max, t_max + 5.0)
    probe = solve_delta(sc.potential, probe_end)
    print(f"scenario: {sc.name}")
    print(f"window: [0, {_disp(t_max)}]")
    print(f"particles: {sc.ensemble.count} ({sc.ensemble.kind})")
    if probe.caustic_time is not None:
        print(f"caustic_time: {_disp(probe.caustic_time)}")
        if probe.caustic_time <= t_max:
            print("warning: caustic inside the window; run would exit 3")
        else:
            print(f"margin to caustic: {_disp(probe.caustic_time - t_max)}")
    else:
        print(f"caustic_time: none (delta > 0 up to t = {_disp(probe.t_end)})")
    n_t = _time_grid(t_max).size
    print(f"recommended time samples: {n_t}")
    est = 0.1 + 0.03 * sc.ensemble.count / 11.0 * (1.0 + t_max / 5.0)
    print(f"estimated runtime: ~{est:.1f} s")
    return 0


def bundled_scenario_path(name):
    return resources.files("airybohm") / "scenarios" / f"{name}.scenario"


def list_scenarios() -> list[str]:
    return list(BUNDLED)


def _resolve(path_or_name):
    if os.path.exists(path_or_name):
        return path_or_name
    if path_or_name in BUNDLED:
        return str(bundled_scenario_path(path_or_name))
    return path_or_name   # let the open() failure produce the message


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="airybohm",
        description="Bohmian trajectories of accelerating Airy packets in "
                    "time-dependent quadratic potentials.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute scenario files")
    p_run.add_argument("files", nargs="+",
                       help="scenario file path or bundled scenario name")
    p_run.add_argument("-o", "--output-dir", default=None,
                       help="artifact directory (default: $AIRYBOHM_OUTDIR "
                            "or ./airybohm_out)")
    p_run.add_argument("--tolerance", type=float, default=1e-6,
                       help="method-agreement tolerance for the report")
    p_run.add_argument("--jobs", type=int, default=1,
                       help="run multiple scenarios concurrently")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the sampled-ensemble seed")

    p_val = sub.add_parser("validate", help="check a scenario without running")
    p_val.add_argument("file")

    sub.add_parser("list", help="name the bundled scenarios")

    args = parser.parse_args(argv)

    if args.command == "list":
        for name in list_scenarios():
            print(name)
        return 0
    if args.command == "validate":
        return validate(_resolve(args.file))

    out_root = args.output_dir or os.environ.get("AIRYBOHM_OUTDIR",
                                                 "airybohm_out")
    files = [_resolve(f) for f in args.files]
    for f in files:
        if not os.path.exists(f):
            print(f"error: no such scenario file: {f}", file=sys.stderr)
            return 2

    if args.jobs > 1 and len(files) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(
                lambda f: run_scenario(f, out_root, tolerance=args.tolerance,
                                       seed=args.seed), files))
    else:
        codes = [run_scenario(f, out_root, tolerance=args.tolerance,
                              seed=args.seed) for f in files]
    return max(codes)


if __name__ == "__main__":
    raise SystemExit(main())
