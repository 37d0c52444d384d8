"""Command-line front end.

    monopole-lab spectrum      --n -1 --e-max 8 --grid 4000
    monopole-lab semiclassical --N 1 --j-max 3
    monopole-lab wkb           --potential quartic --n-max 3
    monopole-lab dynamics      --lambda 1 --step 1e-3 --duration 10
    monopole-lab report

Every subcommand accepts ``--config FILE`` with ``key = value`` lines using
the long flag names (dashes or underscores); flags given on the command line
win.  Exit codes: 0 success, 2 invalid input, 3 solver failure or failed check.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dynamics as dyn
from . import geometry as geo
from . import io
from . import semiclassics as sc
from . import spectral as sp

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3


class ConfigError(ValueError):
    pass


def _vector(text: str) -> tuple[float, float, float]:
    parts = [float(x) for x in str(text).replace(" ", "").split(",") if x]
    if len(parts) != 3:
        raise ValueError(f"expected three comma-separated numbers, got {text!r}")
    return tuple(parts)


# name -> (type, default); the defaults are applied after config merging
PARAMETERS = {
    "spectrum": {
        "n": (int, None), "e_max": (float, 8.0), "grid_size": (int, sp.DEFAULT_GRID),
        "cluster_tol": (float, sp.DEFAULT_CLUSTER_TOL), "rel_tol": (float, 1e-3),
    },
    "semiclassical": {"N": (int, None), "j_max": (int, 3)},
    "wkb": {
        "potential": (str, "harmonic"), "hbar": (float, 1.0), "mass": (float, 1.0),
        "n_max": (int, 5), "x_min": (float, -6.0), "x_max": (float, 6.0),
        "oracle_nodes": (int, 4000),
    },
    "dynamics": {
        "lambda": (float, 1.0), "step": (float, 1e-3), "duration": (float, 10.0),
        "r0": (_vector, (1.0, 0.0, 0.0)), "v0": (_vector, (0.0, 1.0, 0.0)),
    },
    "report": {"alpha": (float, 1.0 / 137.0), "j_max": (int, 3)},
}
COMMON = {"output_path": (str, "."), "format": (str, "csv")}
FLAG_ALIASES = {"grid_size": ["--grid", "--grid-size"], "lambda": ["--lambda", "--lam"]}


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.parameters[key]

    @property
    def output_dir(self) -> Path:
        return Path(self.parameters["output_path"])


def _parameters_for(command: str) -> dict:
    return {**PARAMETERS[command], **COMMON}


def read_config_file(path: str | Path, command: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment.  Unknown keys are errors."""
    known = _parameters_for(command)
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "grid":
            key = "grid_size"
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r} for {command}")
        try:
            out[key] = known[key][0](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monopole-lab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for command in PARAMETERS:
        p = sub.add_parser(command)
        p.add_argument("--config", help="key = value parameter file")
        for name, (typ, _) in _parameters_for(command).items():
            flags = FLAG_ALIASES.get(name, ["--" + name.replace("_", "-")])
            p.add_argument(*flags, dest=name, type=typ, default=None)
    return parser


def make_config(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    command = args.command
    params = read_config_file(args.config, command) if args.config else {}
    for name, (_, default) in _parameters_for(command).items():
        given = getattr(args, name)
        if given is not None:
            params[name] = given
        params.setdefault(name, default)
    cfg = RunConfig(command, params)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    p = cfg.parameters
    if p["format"] not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    if cfg.command == "spectrum":
        if p["n"] is None:
            raise ConfigError("spectrum needs --n")
        if p["e_max"] <= 0:
            raise ConfigError("e_max must be positive")
        if p["grid_size"] < sp.MIN_GRID:
            raise ConfigError(f"grid must be >= {sp.MIN_GRID}")
        if p["cluster_tol"] <= 0 or p["rel_tol"] <= 0:
            raise ConfigError("tolerances must be positive")
    elif cfg.command == "semiclassical":
        if p["N"] is None or p["N"] < 0:
            raise ConfigError("semiclassical needs --N >= 0")
        if p["j_max"] < 0:
            raise ConfigError("j_max must be >= 0")
    elif cfg.command == "wkb":
        if p["potential"] not in POTENTIALS:
            raise ConfigError(f"potential must be one of {sorted(POTENTIALS)}")
        if p["hbar"] <= 0 or p["mass"] <= 0:
            raise ConfigError("hbar and mass must be positive")
        if p["n_max"] < 0 or p["x_min"] >= p["x_max"] or p["oracle_nodes"] < 16:
            raise ConfigError("invalid wkb parameters")
    elif cfg.command == "dynamics":
        if p["step"] <= 0 or p["duration"] < p["step"]:
            raise ConfigError("need step > 0 and duration >= step")
        if np.linalg.norm(p["r0"]) <= dyn.SINGULAR_RADIUS:
            raise ConfigError("r0 must be away from the origin")
    elif cfg.command == "report":
        if p["alpha"] <= 0:
            raise ConfigError("alpha must be positive")


def _ext(cfg):
    return cfg["format"]


def run_spectrum(cfg: RunConfig) -> int:
    n, e_max = cfg["n"], cfg["e_max"]
    try:
        numeric = sp.numeric_spectrum(n, e_max, cfg["grid_size"], cfg["cluster_tol"])
    except (sp.ConvergenceFailure, sp.ClusterAmbiguity) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    N = abs(n)
    j_max = 0
    while sp.exact_level(N, j_max + 1) <= e_max:
        j_max += 1
    exact = [lv for lv in sp.exact_spectrum(N, j_max) if lv.value <= e_max]
    k = min(len(numeric), len(exact))
    comparison = sp.compare_spectra(numeric, exact, k)
    ok = len(numeric) == len(exact) and comparison.passes(cfg["rel_tol"])

    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    io.write_levels(numeric, out / f"spectrum_numeric.{_ext(cfg)}", _ext(cfg))
    io.write_levels(exact, out / f"spectrum_exact.{_ext(cfg)}", _ext(cfg))
    io.write_json({
        "n": n, "e_max": e_max, "grid_size": cfg["grid_size"], "rel_tol": cfg["rel_tol"],
        "levels_numeric": len(numeric), "levels_exact": len(exact),
        "max_abs_error": comparison.max_abs_error, "max_rel_error": comparison.max_rel_error,
        "multiplicity_mismatches": comparison.multiplicity_mismatches,
        "rows": comparison.rows, "passed": ok,
    }, out / "spectrum_comparison.json")

    print("value,multiplicity")
    for lv in numeric:
        print(f"{lv.value!r},{lv.multiplicity}")
    return EXIT_OK if ok else EXIT_SOLVER


def run_semiclassical(cfg: RunConfig) -> int:
    N, j_max = cfg["N"], cfg["j_max"]
    exact = sp.exact_spectrum(N, j_max)
    almost = sc.almost_spectrum(N, j_max)
    e_max = 0.5 * (sc.almost_level(N, j_max) + sc.almost_level(N, j_max + 1))
    tori = sc.enumerate_quantized_tori(N, -N, e_max)

    rows, agree = [], len(tori) == len(almost)
    for j, (ex, al) in enumerate(zip(exact, almost)):
        t = tori[j] if j < len(tori) else None
        if t is None or abs(t.E - al.value) > 1e-6 or t.multiplicity != al.multiplicity:
            agree = False
        rows.append({
            "j": j, "E_exact": ex.value, "E_semiclassical": al.value,
            "difference": al.value - ex.value, "multiplicity": al.multiplicity,
            "E_tori": None if t is None else t.E,
            "tori_count": None if t is None else t.multiplicity,
        })

    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    header = ["j", "E_exact", "E_semiclassical", "difference", "multiplicity", "E_tori", "tori_count"]
    path = out / f"semiclassical.{_ext(cfg)}"
    if _ext(cfg) == "csv":
        io.write_rows_csv(path, header, [[r[h] if r[h] is not None else "" for h in header] for r in rows])
    else:
        io.write_json(rows, path)
    io.write_levels(almost, out / f"spectrum_semiclassical.{_ext(cfg)}", _ext(cfg))

    print("E_exact,E_semiclassical,difference,multiplicity")
    for r in rows:
        print(f"{r['E_exact']!r},{r['E_semiclassical']!r},{r['difference']!r},{r['multiplicity']}")
    if not agree:
        print("torus enumeration disagrees with the closed form", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


POTENTIALS = {
    "harmonic": lambda x: 0.5 * x * x,
    "quartic": lambda x: x**4,
}


def run_wkb(cfg: RunConfig) -> int:
    well = sc.WellProblem(POTENTIALS[cfg["potential"]], cfg["mass"], cfg["hbar"],
                          (cfg["x_min"], cfg["x_max"]))
    try:
        levels = sc.bohr_sommerfeld_levels(well, cfg["n_max"])
    except (sc.NoBracket, sc.MultiWell) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    oracle = sc.fd_schrodinger_levels(well, cfg["n_max"] + 1, cfg["oracle_nodes"])
    rows = [[q, float(e), float(o), float((e - o) / o)] for q, (e, o) in enumerate(zip(levels, oracle))]
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    header = ["q", "E_bohr_sommerfeld", "E_finite_difference", "relative_difference"]
    path = out / f"wkb.{_ext(cfg)}"
    if _ext(cfg) == "csv":
        io.write_rows_csv(path, header, rows)
    else:
        io.write_json([dict(zip(header, r)) for r in rows], path)
    print(",".join(header))
    for r in rows:
        print(",".join(repr(x) if isinstance(x, float) else str(x) for x in r))
    return EXIT_OK


def run_dynamics(cfg: RunConfig) -> int:
    lam = cfg["lambda"]
    s0 = dyn.TrajectoryState(np.array(cfg["r0"]), np.array(cfg["v0"]))
    try:
        tr = dyn.integrate(s0, lam, cfg["step"], cfg["duration"])
    except dyn.SingularOrigin as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    try:
        report = dyn.invariants_report(tr)
        curve = dyn.unroll_cone(tr)
    except dyn.DegenerateCone as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    io.write_trajectory_csv(tr, out / "trajectory.csv")
    io.write_unrolled_csv(curve, out / "unrolled.csv")
    r0, v0 = s0.r, s0.v
    expected = {"C": float(v0 @ v0), "B": float(r0 @ v0), "A": float(r0 @ r0)}
    fit = report.fit
    fit_error = max(abs(fit.C - expected["C"]), abs(fit.B - expected["B"]), abs(fit.A - expected["A"]))
    doc = {
        "lambda": lam, "step": cfg["step"], "duration": cfg["duration"],
        "r0": list(r0), "v0": list(v0), "samples": len(tr),
        "metrics": report.metrics(), "thresholds": report.thresholds, "passed": report.passed(),
        "quadratic_fit": {"C": fit.C, "B": fit.B, "A": fit.A, "expected": expected,
                          "max_coefficient_error": fit_error},
        "cone_half_angle": dyn.cone_half_angle(tr),
        "unrolled_length": dyn.polyline_length(curve), "path_length": dyn.path_length(tr),
    }
    io.write_json(doc, out / "invariants.json")
    for k, v in report.metrics().items():
        print(f"{k},{v!r},{'pass' if report.passed()[k] else 'FAIL'}")
    return EXIT_OK


def build_report(alpha: float = 1.0 / 137.0, j_max: int = 3) -> dict:
    tamm = sp.tamm_spectrum(0)[0]
    tables = {}
    for N in range(4):
        rows = []
        for ex, al in zip(sp.exact_spectrum(N, j_max), sc.almost_spectrum(N, j_max)):
            rows.append({"j": len(rows), "E": ex.value, "E_hat": al.value,
                         "shift": al.value - ex.value, "multiplicity": ex.multiplicity})
        tables[str(N)] = rows
    chern = {str(n): geo.chern_number(geo.monopole_field(n)).value for n in (-1, 0, 1, 2)}
    samples = []
    for e, g in [(1.0, 0.5), (1.0, 0.0), (1.0, 0.4), (1.0, 1.0)]:
        k, res = geo.dirac_condition(e, g)
        samples.append({"e": e, "g": g, "n": k, "residual": res})
    return {
        "tamm_lowest_level": {"value": tamm.value, "multiplicity": tamm.multiplicity},
        "spectrum_tables": tables,
        "chern": chern,
        "dirac_condition": samples,
        "alpha": alpha,
        "g_D_over_e": 1.0 / (2.0 * alpha),
        "mass_ratio": geo.monopole_mass_estimate(alpha),
    }


def run_report(cfg: RunConfig) -> int:
    doc = build_report(cfg["alpha"], cfg["j_max"])
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    io.write_json(doc, out / "report.json")
    print(f"mass_ratio,{doc['mass_ratio']!r}")
    print(f"g_D_over_e,{doc['g_D_over_e']!r}")
    return EXIT_OK


COMMANDS = {
    "spectrum": run_spectrum,
    "semiclassical": run_semiclassical,
    "wkb": run_wkb,
    "dynamics": run_dynamics,
    "report": run_report,
}


def main(argv=None) -> int:
    try:
        cfg = make_config(argv)
    except SystemExit as exc:  # argparse usage errors (2) and --help (0)
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    except (ValueError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return COMMANDS[cfg.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
