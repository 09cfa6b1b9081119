"""Command-line entry point: ``ibnls <subcommand> [--config FILE] [--out DIR] [--seed N]``.

Every run writes ``manifest.txt`` (resolved configuration, version, seed),
``summary.txt`` and one or more CSV files into the output directory, and
prints a ``PASS``/``FAIL``/``INFO`` line. Exit status is 0 for PASS or INFO,
1 for FAIL and 2 for usage or configuration errors.

Configuration files hold ``key = value`` lines, ``#`` comments and
``[section]`` headers; a key under ``[grid]`` may also be written
``grid.key`` at top level. Every key can be given on the command line as
``--key`` (the last component, dashes for underscores), which overrides the
file. Keys of the Gaussian profile sections ``data``, ``forcing`` and
``gap``, and any short name that would be ambiguous, keep the section:
``--data-amplitude``, ``--gap-center``.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .data import Gaussian
from .norms import FamilyKind, NormSpec, StrichartzFamily, mixed_norm, strichartz_norm
from .pairs import ExponentPair, ParameterRangeError, PreconditionError, lemma_report
from .probes import (
    FAIL,
    INFO,
    PASS,
    PerturbationConfig,
    ScalingCheckConfig,
    conservation_probe,
    dynamic_scaling_check,
    gn_probe,
    gradient_estimate_probe,
    hl_probe,
    perturbation_experiment,
    pointwise_estimate_probe,
    static_scaling_check,
    strichartz_probe,
)
from .rationals import fmt, parse_rational
from .regime import ProblemParams, check_all, check_theorem, critical_index
from .solver import SolverConfig, Trajectory, evolve, h2_norm, picard_iterate
from .spectral import ComplexField, Grid, read_field, write_field

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    """Bad configuration: unknown or duplicate key, malformed value, missing key."""


# ---------------------------------------------------------------------------
# value types


def _rational(text: str):
    return parse_rational(text)


def _rational_or_inf(text: str):
    return parse_rational(text, allow_inf=True)


def _positive_float(text: str) -> float:
    v = float(text)
    if not (math.isfinite(v) and v > 0):
        raise ValueError(f"expected a positive number, got {text!r}")
    return v


def _nonneg_float(text: str) -> float:
    v = float(text)
    if not (math.isfinite(v) and v >= 0):
        raise ValueError(f"expected a nonnegative number, got {text!r}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise ValueError(f"expected a positive integer, got {text!r}")
    return v


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _sign(text: str) -> int:
    v = int(text)
    if v not in (1, -1):
        raise ValueError(f"lambda must be 1 or -1, got {text!r}")
    return v


def _floats(text: str) -> Tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


def _rationals(text: str) -> Tuple[Fraction, ...]:
    return tuple(parse_rational(t) for t in text.split(",") if t.strip())


def _choice(*options: str) -> Callable[[str], str]:
    def conv(text: str) -> str:
        t = text.strip()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return t

    return conv


@dataclass(frozen=True)
class Key:
    name: str  # fully qualified, e.g. "grid.points"
    conv: Callable[[str], Any]
    default: Optional[str] = None
    required: bool = False
    help: str = ""

    @property
    def short(self) -> str:
        return self.name.rsplit(".", 1)[-1]

    @property
    def dest(self) -> str:
        return "k_" + self.name.replace(".", "__")


# ---------------------------------------------------------------------------
# key groups

PARAMS = [
    Key("dim", _positive_int, required=True, help="spatial dimension N"),
    Key("b", _rational, required=True, help="weight exponent b (P/Q)"),
    Key("alpha", _rational, required=True, help="nonlinearity power alpha (P/Q)"),
    Key("lambda", _sign, "1", help="+1 defocusing, -1 focusing"),
]
GRID = [
    Key("grid.points", _positive_int, "512", help="points per axis (power of two)"),
    Key("grid.length", _positive_float, "40", help="box length L"),
]
SOLVER = [
    Key("solver.dt", _positive_float, "1e-3", help="time step"),
    Key("solver.t_end", _positive_float, "1", help="final time"),
    Key("solver.delta_reg", _nonneg_float, "0", help="weight regularization delta"),
    Key("solver.sample_stride", _positive_int, "10", help="steps between samples"),
    Key("solver.dealias", _bool, "false", help="2/3-rule truncation after the nonlinear substep"),
    Key("solver.boundary_mass_tol", _positive_float, "1e-6", help="boundary-mass warning level"),
]
DATA = [
    Key("data.amplitude", float, "1", help="Gaussian amplitude A"),
    Key("data.sigma", _positive_float, "1", help="Gaussian width"),
    Key("data.center", _floats, "", help="comma-separated center (default origin)"),
    Key("data.wavevector", _floats, "", help="comma-separated modulation wavevector"),
    Key("data.h2_norm", _nonneg_float, "0", help="if > 0, rescale data to this H^2 norm"),
    Key("data.file", str, "", help="read initial data from a binary field file instead"),
]
SEED = [Key("seed", int, "0", help="random seed")]

SCHEMAS: Dict[str, List[Key]] = {
    "classify": PARAMS + [Key("theorem", str, "", help="theorem id (default: all)")],
    "pairs": [
        Key("lemma", _choice("3.2", "3.3", "4.1"), required=True, help="3.2, 3.3 or 4.1"),
        Key("dim", _positive_int, required=True, help="spatial dimension N"),
        Key("b", _rational, required=True, help="weight exponent b"),
        Key("alpha", _rational, "", help="nonlinearity power (not used by 4.1)"),
        Key("theta", _rational, "", help="small parameter theta (default: half its window)"),
        Key("eps", _rational, "", help="small parameter epsilon (default: half its window)"),
    ],
    "simulate": PARAMS + GRID + SOLVER + DATA + [
        Key("snapshots", _bool, "true", help="write every sample as a binary field"),
    ],
    "picard": PARAMS + GRID + SOLVER + DATA + [
        Key("picard.n_iters", _positive_int, "6", help="number of iterates (>= 2)"),
        Key("picard.ratio_bound", _positive_float, "0.5", help="PASS if every contraction ratio is below this"),
        Key("picard.compare_strang", _bool, "true", help="also report the gap to a Strang run"),
    ],
    "norm": [
        Key("traj", str, required=True, help="trajectory directory"),
        Key("q", _rational_or_inf, required=True, help="time exponent (P/Q or inf)"),
        Key("r", _rational_or_inf, required=True, help="space exponent (P/Q or inf)"),
        Key("t0", float, "", help="window start"),
        Key("t1", float, "", help="window end"),
    ],
    "strichartz": [
        Key("traj", str, required=True, help="trajectory directory"),
        Key("s", _rational, required=True, help="Sobolev level s"),
        Key("pairs", str, "", help="CSV of q,r rows (default: 5-pair family)"),
        Key("kind", _choice("Sup", "InfDual"), "Sup", help="Sup (B) or InfDual (B')"),
    ],
    "scaling-test": PARAMS + GRID + SOLVER + DATA + [
        Key("scaling.mode", _choice("static", "dynamic", "both"), "both", help="which identity"),
        Key("scaling.mu", _positive_float, "2", help="scaling parameter mu"),
        Key("scaling.levels", str, "0,2", help="Sobolev levels (P/Q list; 'sc' for s_c)"),
        Key("scaling.t_probe", _positive_float, "1e-3", help="dynamic comparison time"),
        Key("scaling.static_tol", _positive_float, "1e-6", help="static error bound"),
        Key("scaling.dynamic_tol", _positive_float, "1e-3", help="dynamic mismatch bound"),
        Key("scaling.halvings", _positive_int, "2", help="number of dt halvings in the dynamic check"),
        Key("scaling.floor", _positive_float, "1e-13", help="errors below this count as converged"),
    ],
    "conserve-test": PARAMS + GRID + SOLVER + DATA + [
        Key("conserve.mass_tol", _positive_float, "1e-10", help="mass drift bound"),
        Key("conserve.energy_ratio", _positive_float, "3.5", help="required drift(dt)/drift(dt/2)"),
    ],
    "estimate-probe": SEED + [
        Key("probe.kind", _choice("pointwise", "gradient", "hl", "gn"), "pointwise", help="which estimate"),
        Key("probe.alpha", str, "1/2,1,2,3", help="alpha values (pointwise) or single alpha"),
        Key("probe.samples", _positive_int, "100000", help="pointwise sample count"),
        Key("probe.b", _rational, "1/2", help="weight exponent (gradient)"),
        Key("probe.bound", _positive_float, "10", help="gradient ratio bound"),
        Key("probe.dim", _positive_int, "1", help="grid dimension (gradient, hl, gn)"),
        Key("probe.points", _positive_int, "1024", help="points per axis"),
        Key("probe.length", _positive_float, "40", help="box length"),
        Key("probe.exponents", str, "", help="HL: p,q,s,rho  GN: p,p0,p1,s,s1,theta"),
        Key("probe.flatness", _positive_float, "0.05", help="HL/GN dilation flatness bound"),
    ],
    "strichartz-probe": SEED + GRID + [
        Key("dim", _positive_int, "1", help="grid dimension"),
        Key("s", _rational, "0", help="Sobolev level"),
        Key("trials", _positive_int, "20", help="number of random data"),
        Key("t_end", _positive_float, "1", help="time window [0, t_end]"),
        Key("max_mode", _positive_int, "8", help="band limit (mode index)"),
        Key("threshold", _positive_float, "50", help="max/min spread bound"),
    ],
    "perturb": PARAMS + GRID + SOLVER + DATA + [
        Key("forcing.amplitude", float, "1", help="forcing Gaussian amplitude"),
        Key("forcing.sigma", _positive_float, "1.5", help="forcing width"),
        Key("forcing.center", _floats, "1", help="forcing center"),
        Key("forcing.omega", float, "1", help="forcing time profile cos(omega t)"),
        Key("gap.amplitude", float, "1", help="initial-gap Gaussian amplitude (0 for none)"),
        Key("gap.sigma", _positive_float, "1", help="initial-gap width"),
        Key("gap.center", _floats, "-0.5", help="initial-gap center"),
        Key("gap.wavevector", _floats, "1", help="initial-gap modulation"),
        Key("perturb.ladder", _floats, "1e-1,1e-2,1e-3,1e-4", help="epsilon ladder"),
        Key("perturb.slope_tol", _positive_float, "0.2", help="allowed |slope - 1|"),
    ],
}

COMMANDS = tuple(SCHEMAS)

# Gaussian profile groups always keep their section in the flag name.
_PROFILE_SECTIONS = ("data", "forcing", "gap")


@dataclass
class ExperimentConfig:
    command: str
    values: Dict[str, Any]
    sources: Dict[str, str]
    raw: Dict[str, str]
    seed: int = 0
    out_dir: Path = Path("out")

    def __getitem__(self, key: str):
        return self.values[key]

    def get(self, key: str, default=None):
        v = self.values.get(key)
        return default if v is None or v == "" else v

    @property
    def params(self) -> ProblemParams:
        return ProblemParams(self["dim"], self["b"], self["alpha"], self["lambda"])


# ---------------------------------------------------------------------------
# parsing


def _read_lines(text: str) -> List[Tuple[int, str, str]]:
    """``(line number, qualified key, raw value)`` triples, checking duplicates."""
    out: List[Tuple[int, str, str]] = []
    seen: Dict[str, int] = {}
    section = ""
    for n, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if not section:
                raise ConfigError(f"line {n}: empty section header")
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {n}: expected 'key = value', got {line.strip()!r}")
        key, value = (s.strip() for s in stripped.split("=", 1))
        if not key:
            raise ConfigError(f"line {n}: missing key")
        qual = f"{section}.{key}" if section and "." not in key else key
        if qual in seen:
            raise ConfigError(f"line {n}: duplicate key {qual!r} (first set on line {seen[qual]})")
        seen[qual] = n
        out.append((n, qual, value))
    return out


def parse_config(
    text: str,
    command: str,
    overrides: Optional[Dict[str, str]] = None,
    seed: Optional[int] = None,
    out_dir: Optional[Path] = None,
) -> ExperimentConfig:
    """Validate ``text`` against the schema of ``command``.

    ``overrides`` (from command-line flags) win over file values. Raises
    :class:`ConfigError` naming the offending line.
    """
    if command not in SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    schema = {k.name: k for k in SCHEMAS[command]}
    raw: Dict[str, str] = {}
    sources: Dict[str, str] = {}
    for n, key, value in _read_lines(text):
        if key not in schema:
            raise ConfigError(f"line {n}: unknown key {key!r} for command {command!r}")
        raw[key], sources[key] = value, f"line {n}"
    for key, value in (overrides or {}).items():
        raw[key], sources[key] = value, "command line"
    values: Dict[str, Any] = {}
    for name, k in schema.items():
        if name in raw:
            text_value = raw[name]
        elif k.required:
            raise ConfigError(f"missing required key {name!r} for command {command!r}")
        else:
            text_value, sources[name] = k.default or "", "default"
        if text_value == "" and not k.required:
            values[name] = None if k.default in (None, "") else k.conv(k.default)
            raw.setdefault(name, "")
            continue
        try:
            values[name] = k.conv(text_value)
        except (ValueError, ZeroDivisionError) as exc:
            where = sources.get(name, "default")
            raise ConfigError(f"{where}: bad value for {name!r}: {exc}") from None
        raw.setdefault(name, text_value)
    if "seed" in values and values["seed"] is not None:
        file_seed = values["seed"]
    else:
        file_seed = 0
    final_seed = file_seed if seed is None else seed
    if not 0 <= final_seed < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {final_seed}")
    return ExperimentConfig(command, values, sources, raw, final_seed, out_dir or Path("out"))


# ---------------------------------------------------------------------------
# output helpers


def num(x) -> str:
    """17 significant digits for floats, ``P/Q`` for exact values."""
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return fmt(x)
    if isinstance(x, bool):
        return fmt(x)
    if x is None:
        return ""
    xf = float(x)
    if math.isnan(xf):
        return "nan"
    if math.isinf(xf):
        return "inf" if xf > 0 else "-inf"
    return format(xf, ".17g")


class Output:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.dir = Path(cfg.out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.summary: List[str] = []

    def csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else num(c) for c in row])
        (self.dir / name).write_text(buf.getvalue(), encoding="utf-8")

    def note(self, line: str):
        self.summary.append(line)

    def finish(self, status: str, headline: str) -> int:
        line = f"{status} {self.cfg.command}: {headline}"
        self.summary.append(line)
        (self.dir / "summary.txt").write_text("\n".join(self.summary) + "\n", encoding="utf-8")
        _write_manifest(self.cfg, self.dir)
        print(line)
        return EXIT_FAIL if status == FAIL else EXIT_OK


def _write_manifest(cfg: ExperimentConfig, out: Path):
    lines = [
        f"ibnls {__version__}",
        f"command = {cfg.command}",
        f"seed = {cfg.seed}",
        "",
    ]
    for name in sorted(cfg.raw):
        if name == "seed":
            continue
        lines.append(f"{name} = {cfg.raw[name]}  # {cfg.sources.get(name, 'default')}")
    (out / "manifest.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# builders


def _grid(cfg: ExperimentConfig, dim: Optional[int] = None) -> Grid:
    return Grid(dim or cfg["dim"], cfg["grid.points"], cfg["grid.length"])


def _solver(cfg: ExperimentConfig, grid: Grid) -> SolverConfig:
    return SolverConfig(
        params=cfg.params,
        grid=grid,
        dt=cfg["solver.dt"],
        t_end=cfg["solver.t_end"],
        delta_reg=cfg["solver.delta_reg"],
        sample_stride=cfg["solver.sample_stride"],
        dealias=cfg["solver.dealias"],
        boundary_mass_tol=cfg["solver.boundary_mass_tol"],
    )


def _vector(values, dim: int, what: str) -> Tuple[float, ...]:
    if not values:
        return ()
    if len(values) == 1:
        return tuple(values) * dim
    if len(values) != dim:
        raise ConfigError(f"{what} needs 1 or {dim} components, got {len(values)}")
    return tuple(values)


def _datum(cfg: ExperimentConfig, dim: int, prefix: str = "data") -> Gaussian:
    return Gaussian(
        cfg[f"{prefix}.amplitude"],
        cfg[f"{prefix}.sigma"],
        _vector(cfg.get(f"{prefix}.center", ()), dim, f"{prefix}.center"),
        _vector(cfg.get(f"{prefix}.wavevector", ()), dim, f"{prefix}.wavevector"),
    )


def _initial(cfg: ExperimentConfig, grid: Grid) -> ComplexField:
    path = cfg.get("data.file")
    if path:
        u0 = read_field(path)
        if u0.grid != grid:
            raise ConfigError(f"field file {path} does not match the configured grid")
    else:
        u0 = _datum(cfg, grid.dim).sample(grid)
    target = cfg.get("data.h2_norm", 0.0)
    if target:
        norm = h2_norm(u0)
        if norm == 0:
            raise ConfigError("cannot rescale zero data to a positive H^2 norm")
        u0 = u0.scaled(target / norm)
    return u0


def _read_traj(path: str) -> Trajectory:
    d = Path(path)
    if (d / "fields").is_dir():
        d = d / "fields"
    files = sorted(d.glob("*.ibnl"))
    if not files:
        raise ConfigError(f"no .ibnl field files in {path}")
    return Trajectory([read_field(f) for f in files])


# ---------------------------------------------------------------------------
# subcommands


def run_classify(cfg: ExperimentConfig, out: Output) -> int:
    p = cfg.params
    rep = critical_index(p)
    out.csv(
        "classify.csv",
        ["dim", "b", "alpha", "lambda", "s_c", "four_star", "class"],
        [[p.dim, p.b, p.alpha, p.lam, rep.s_c, fmt(rep.four_star), rep.klass.value]],
    )
    tid = cfg.get("theorem")
    verdicts = [check_theorem(p, tid)] if tid else check_all(p)
    out.csv(
        "verdicts.csv",
        ["theorem", "satisfied", "failed_conditions"],
        [[v.theorem_id.value, fmt(v.satisfied), ";".join(v.failed_conditions)] for v in verdicts],
    )
    for v in verdicts:
        print(v.csv_line())
        out.note(v.csv_line())
    return out.finish(INFO, f"s_c = {fmt(rep.s_c)}, class {rep.klass.value}")


def run_pairs(cfg: ExperimentConfig, out: Output) -> int:
    rep = lemma_report(cfg["lemma"], cfg["dim"], cfg["b"], cfg.get("alpha"), cfg.get("theta"), cfg.get("eps"))
    pair_header = ["name", "q", "r", "s", "admissible"]
    pair_rows = [list(row) for row in rep.pair_rows()]
    id_header = ["identity", "lhs", "rhs", "holds"]
    id_rows = [list(row) for row in rep.identity_rows()]
    out.csv("pairs.csv", pair_header, pair_rows)
    out.csv("identities.csv", id_header, id_rows)
    out.csv("auxiliaries.csv", ["name", "value"], [[k, fmt(v)] for k, v in rep.auxiliaries.items()])
    for header, rows in ((pair_header, pair_rows), (id_header, id_rows)):
        print(",".join(header))
        for row in rows:
            print(",".join(c if isinstance(c, str) else num(c) for c in row))
    for i in rep.identities:
        out.note(f"{i.name}: {fmt(i.lhs)} {i.relation} {fmt(i.rhs)}")
    out.note(f"theta = {fmt(rep.theta)}, theta_max = {fmt(rep.theta_max)}")
    out.note(f"eps = {fmt(rep.eps)}, eps_max = {fmt(rep.eps_max)}")
    out.note(f"formal_limit = {fmt(rep.formal_limit)}")
    for n in rep.notes:
        out.note(n)
    failed = [i.name for i in rep.failed()]
    if failed:
        return out.finish(FAIL, "identities failing: " + ", ".join(failed))
    return out.finish(PASS, f"{len(rep.identities)} identities hold exactly")


def _trajectory_rows(traj: Trajectory):
    return [
        [s.time, m, e, h2_norm(s), float(np.max(np.abs(s.values))), bm]
        for s, m, e, bm in zip(traj.samples, traj.mass, traj.energy, traj.boundary_mass)
    ]


def run_simulate(cfg: ExperimentConfig, out: Output) -> int:
    grid = _grid(cfg)
    scfg = _solver(cfg, grid)
    traj = evolve(_initial(cfg, grid), scfg)
    out.csv("trajectory.csv", ["t", "mass", "energy", "h2_norm", "linf", "boundary_mass"], _trajectory_rows(traj))
    if cfg["snapshots"]:
        fdir = out.dir / "fields"
        fdir.mkdir(exist_ok=True)
        for k, s in enumerate(traj.samples):
            write_field(fdir / f"u_{k:06d}.ibnl", s)
    rep = conservation_probe(traj)
    out.note(f"mass_drift = {num(rep.mass_drift)}")
    out.note(f"energy_drift = {num(rep.energy_drift)}")
    for w in traj.warnings:
        out.note(f"warning: {w}")
    head = f"{len(traj)} samples to t = {num(traj.samples[-1].time)}, mass drift {rep.mass_drift:.3e}"
    if traj.blow_up:
        head += " (blow-up flag set)"
    return out.finish(INFO, head)


def run_picard(cfg: ExperimentConfig, out: Output) -> int:
    grid = _grid(cfg)
    scfg = _solver(cfg, grid)
    u0 = _initial(cfg, grid)
    n = cfg["picard.n_iters"]
    if n < 2:
        raise ConfigError("picard.n_iters must be at least 2")
    rep = picard_iterate(u0, scfg, n)
    rows = []
    for k, d in enumerate(rep.distances):
        ratio = rep.contraction_ratios[k - 1] if k >= 1 else None
        rows.append([k + 1, d, ratio])
    out.csv("picard.csv", ["iter", "distance", "ratio"], rows)
    out.note(f"converged = {fmt(rep.converged)}")
    bound = cfg["picard.ratio_bound"]
    defined = [r for r in rep.contraction_ratios if not math.isnan(r)]
    ok = all(r < bound for r in defined)
    if cfg["picard.compare_strang"]:
        ref = evolve(u0, scfg)
        last = rep.iterates[-1]
        by_time = {round(s.time / scfg.dt): s for s in last.samples}
        gaps = []
        for s in ref.samples:
            other = by_time.get(round(s.time / scfg.dt))
            if other is not None and np.any(s.values):
                gaps.append(np.linalg.norm(other.values - s.values) / np.linalg.norm(s.values))
        gap = max(gaps) if gaps else 0.0
        out.note(f"strang_gap = {num(gap)}")
    for w in rep.warnings:
        out.note(f"warning: {w}")
    head = f"max ratio {num(max(defined)) if defined else 'n/a'}, converged {fmt(rep.converged)}"
    return out.finish(PASS if ok else FAIL, head)


def run_norm(cfg: ExperimentConfig, out: Output) -> int:
    traj = _read_traj(cfg["traj"])
    t0 = cfg.get("t0", float(traj.times[0]))
    t1 = cfg.get("t1", float(traj.times[-1]))
    value = mixed_norm(traj, NormSpec(cfg["q"], cfg["r"], (t0, t1)))
    out.csv("norm.csv", ["q", "r", "t0", "t1", "value"], [[fmt(cfg["q"]), fmt(cfg["r"]), t0, t1, value]])
    print(num(value))
    out.summary.append(f"value = {num(value)}")
    (out.dir / "summary.txt").write_text("\n".join(out.summary) + "\n", encoding="utf-8")
    _write_manifest(cfg, out.dir)
    return EXIT_OK


def _read_pairs(path: str, s: Fraction, dim: int) -> List[ExponentPair]:
    pairs = []
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line or line.replace(" ", "").lower() == "q,r":
            continue
        try:
            q, r = (parse_rational(t, allow_inf=True) for t in line.split(","))
        except ValueError as exc:
            raise ConfigError(f"{path} line {n}: {exc}") from None
        pairs.append(ExponentPair(q, r, s, dim))
    return pairs


def run_strichartz(cfg: ExperimentConfig, out: Output) -> int:
    traj = _read_traj(cfg["traj"])
    s, dim = cfg["s"], traj.grid.dim
    kind = FamilyKind(cfg["kind"])
    if cfg.get("pairs"):
        level = s if kind is FamilyKind.SUP else -s
        fam = StrichartzFamily(s, tuple(_read_pairs(cfg["pairs"], level, dim)), kind)
    else:
        fam = StrichartzFamily.default(s, dim, kind)
    val = strichartz_norm(traj, fam)
    rows = [
        [fmt(q), fmt(r), v, fmt((q, r) == val.attained)] for (q, r), v in zip(fam.exponents(), val.values)
    ]
    out.csv("strichartz.csv", ["q", "r", "value", "attained"], rows)
    print(num(val.value))
    return out.finish(INFO, f"{kind.value} = {num(val.value)} at (q, r) = ({fmt(val.attained[0])}, {fmt(val.attained[1])})")


def _levels(text: str, params: ProblemParams) -> List[Fraction]:
    out = []
    for t in text.split(","):
        t = t.strip()
        if not t:
            continue
        out.append(critical_index(params).s_c if t.lower() in ("sc", "s_c") else parse_rational(t))
    return out


def run_scaling(cfg: ExperimentConfig, out: Output) -> int:
    p = cfg.params
    mode, mu = cfg["scaling.mode"], cfg["scaling.mu"]
    floor = cfg["scaling.floor"]
    grid = _grid(cfg)
    datum = _datum(cfg, grid.dim)
    rows, ok, notes = [], True, []
    if mode in ("static", "both"):
        fine = Grid(grid.dim, grid.points * 2, grid.length)
        tol = cfg["scaling.static_tol"]
        for s in _levels(cfg["scaling.levels"], p):
            c = ScalingCheckConfig(mu, s)
            e1 = static_scaling_check(datum, grid, p, c)
            e2 = static_scaling_check(datum, fine, p, c)
            rows.append(["static", mu, fmt(s), grid.points, "", e1])
            rows.append(["static", mu, fmt(s), fine.points, "", e2])
            good = e1 <= tol and e2 <= max(e1 / 4, floor)
            ok &= good
            notes.append(f"static s={fmt(s)}: {e1:.3e} -> {e2:.3e} {'ok' if good else 'FAILED'}")
    if mode in ("dynamic", "both"):
        tol = cfg["scaling.dynamic_tol"]
        scfg = _solver(cfg, grid)
        c = ScalingCheckConfig(mu, 0, cfg["scaling.t_probe"])
        errs = []
        for k in range(cfg["scaling.halvings"] + 1):
            dt = scfg.dt / 2**k
            rep = dynamic_scaling_check(datum, p, c, replace(scfg, dt=dt))
            errs.append(rep.error)
            rows.append(["dynamic", mu, "", grid.points, dt, rep.error])
        good = errs[0] <= tol and all(b <= a / 2 or b <= floor for a, b in zip(errs, errs[1:]))
        ok &= good
        notes.append("dynamic: " + " -> ".join(f"{e:.3e}" for e in errs) + (" ok" if good else " FAILED"))
    out.csv("scaling.csv", ["kind", "mu", "s", "points", "dt", "error"], rows)
    for n in notes:
        out.note(n)
    return out.finish(PASS if ok else FAIL, "; ".join(notes))


def run_conserve(cfg: ExperimentConfig, out: Output) -> int:
    grid = _grid(cfg)
    base = _solver(cfg, grid)
    u0 = _initial(cfg, grid)
    rows, reps = [], []
    for k, dt in enumerate((base.dt, base.dt / 2)):
        scfg = replace(base, dt=dt, sample_stride=base.sample_stride * 2**k)
        rep = conservation_probe(evolve(u0, scfg))
        reps.append(rep)
        rows += [[dt, t, m, e] for t, m, e in zip(rep.times, rep.mass, rep.energy)]
    out.csv("conservation.csv", ["dt", "t", "mass", "energy"], rows)
    mass_ok = all(r.mass_drift <= cfg["conserve.mass_tol"] for r in reps)
    ratio = reps[0].energy_drift / reps[1].energy_drift if reps[1].energy_drift > 0 else math.inf
    energy_ok = ratio >= cfg["conserve.energy_ratio"]
    out.note(f"mass_drift = {num(reps[0].mass_drift)} (dt), {num(reps[1].mass_drift)} (dt/2)")
    out.note(f"energy_drift = {num(reps[0].energy_drift)} (dt), {num(reps[1].energy_drift)} (dt/2)")
    out.note(f"energy_drift_ratio = {num(ratio)}")
    head = f"mass drift {max(r.mass_drift for r in reps):.3e}, energy drift ratio {ratio:.3f}"
    return out.finish(PASS if mass_ok and energy_ok else FAIL, head)


def run_estimate(cfg: ExperimentConfig, out: Output) -> int:
    kind = cfg["probe.kind"]
    rng = np.random.default_rng(cfg.seed)
    alphas = [parse_rational(a) for a in cfg["probe.alpha"].split(",") if a.strip()]
    if kind == "pointwise":
        reps = [pointwise_estimate_probe(a, cfg["probe.samples"], rng) for a in alphas]
        out.csv(
            "estimate.csv",
            ["alpha", "samples", "max_ratio", "min_ratio", "bound", "status"],
            [[fmt(r.alpha), r.samples, r.max_ratio, r.min_ratio, r.bound, r.status] for r in reps],
        )
        ok = all(r.status == PASS for r in reps)
        return out.finish(PASS if ok else FAIL, ", ".join(f"alpha={fmt(r.alpha)}: {r.max_ratio:.6f}" for r in reps))
    grid = Grid(cfg["probe.dim"], cfg["probe.points"], cfg["probe.length"])
    if kind == "gradient":
        dim = grid.dim
        u = Gaussian(1.0, 1.0, (), (1.0,) * dim)
        v = Gaussian(0.6, 1.3, (0.4,) * dim)
        reps = [gradient_estimate_probe(a, cfg["probe.b"], u, v, grid, cfg["probe.bound"]) for a in alphas if a != 1]
        out.csv(
            "estimate.csv",
            ["alpha", "b", "max_ratio", "nodes", "bound", "status"],
            [[fmt(r.alpha), fmt(r.b), r.max_ratio, r.nodes, r.bound, r.status] for r in reps],
        )
        ok = all(r.status == PASS for r in reps)
        return out.finish(PASS if ok else FAIL, ", ".join(f"alpha={fmt(r.alpha)}: {r.max_ratio:.4f}" for r in reps))
    ex = _rationals(cfg.get("probe.exponents", "") or ("2,2,1/4,1/4" if kind == "hl" else "2,2,2,1/2,1,1/2"))
    names = ("p", "q", "s", "rho") if kind == "hl" else ("p", "p0", "p1", "s", "s1", "theta")
    if len(ex) != len(names):
        raise ConfigError(f"probe.exponents for {kind} needs {len(names)} values ({','.join(names)})")
    args = dict(zip(names, ex))
    probe = hl_probe if kind == "hl" else gn_probe
    rep = probe(grid, **args, tol=cfg["probe.flatness"])
    out.csv(
        "estimate.csv",
        ["sigma", "lhs", "rhs", "ratio"],
        [[s, a, b, r] for s, a, b, r in zip(rep.sigmas, rep.lhs, rep.rhs, rep.ratios)],
    )
    return out.finish(rep.status, f"{rep.kind} flatness {rep.flatness:.4f} (bound {rep.tolerance})")


def run_strichartz_probe(cfg: ExperimentConfig, out: Output) -> int:
    grid = _grid(cfg)
    rep = strichartz_probe(
        grid,
        cfg["s"],
        cfg["trials"],
        np.random.default_rng(cfg.seed),
        t_end=cfg["t_end"],
        max_mode=cfg["max_mode"],
        threshold=cfg["threshold"],
    )
    out.csv(
        "strichartz_probe.csv",
        ["trial", "ratio", "q", "r"],
        [[k, r, fmt(a[0]), fmt(a[1])] for k, (r, a) in enumerate(zip(rep.ratios, rep.attained))],
    )
    out.note(f"min = {num(rep.minimum)}, median = {num(rep.median)}, max = {num(rep.maximum)}")
    return out.finish(rep.status, f"spread {rep.spread:.4f} (bound {num(rep.threshold)})")


def run_perturb(cfg: ExperimentConfig, out: Output) -> int:
    grid = _grid(cfg)
    scfg = _solver(cfg, grid)
    u0 = _initial(cfg, grid)
    shape = _datum(cfg, grid.dim, "forcing").sample(grid).values
    omega = cfg["forcing.omega"]
    gap = _datum(cfg, grid.dim, "gap").sample(grid).values
    pert = PerturbationConfig(
        forcing=lambda t: math.cos(omega * t) * shape,
        initial_gap=gap,
        ladder=tuple(cfg["perturb.ladder"]),
        slope_tolerance=cfg["perturb.slope_tol"],
    )
    rep = perturbation_experiment(u0, scfg, pert)
    out.csv(
        "perturb.csv",
        ["eps", "dist_linf_l2", "dist_diagonal"],
        [[e, a, b] for e, a, b in zip(rep.ladder, rep.dist_linf_l2, rep.dist_diagonal)],
    )
    out.note(f"diagonal pair = ({fmt(rep.diagonal_pair[0])}, {fmt(rep.diagonal_pair[1])})")
    for i in rep.info:
        out.note(f"info: {i}")
    return out.finish(rep.status, f"slopes {num(rep.slope_linf_l2)} (inf,2), {num(rep.slope_diagonal)} (diagonal)")


COMMAND_HELP = {
    "classify": "classify (N, b, alpha) and list theorem verdicts",
    "pairs": "exact exponent suites and their identities",
    "simulate": "evolve a datum and write a trajectory",
    "picard": "Picard iteration with contraction ratios",
    "norm": "mixed space-time norm of a trajectory",
    "strichartz": "norms of a trajectory over a pair family",
    "scaling-test": "static and dynamic scaling checks",
    "conserve-test": "mass and energy drift under dt halving",
    "estimate-probe": "pointwise, gradient, Hardy-Littlewood or GN probes",
    "strichartz-probe": "free Strichartz ratios over random data",
    "perturb": "perturbation ladder and log-log slopes",
}

RUNNERS: Dict[str, Callable[[ExperimentConfig, Output], int]] = {
    "classify": run_classify,
    "pairs": run_pairs,
    "simulate": run_simulate,
    "picard": run_picard,
    "norm": run_norm,
    "strichartz": run_strichartz,
    "scaling-test": run_scaling,
    "conserve-test": run_conserve,
    "estimate-probe": run_estimate,
    "strichartz-probe": run_strichartz_probe,
    "perturb": run_perturb,
}


def run(cfg: ExperimentConfig) -> int:
    return RUNNERS[cfg.command](cfg, Output(cfg))


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value configuration file")
    common.add_argument("--out", type=Path, help="output directory (default: out)")
    common.add_argument("--seed", type=int, help="random seed (overrides the config)")
    parser = argparse.ArgumentParser(
        prog="ibnls",
        description="Exact exponent checks and spectral experiments for the weighted biharmonic NLS.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"ibnls {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name, keys in SCHEMAS.items():
        sp = sub.add_parser(name, parents=[common], help=COMMAND_HELP[name])
        shorts = [k.short for k in keys]
        for k in keys:
            if k.name == "seed":
                continue
            qualified = shorts.count(k.short) > 1 or k.name.split(".")[0] in _PROFILE_SECTIONS
            flag = k.name.replace(".", "-") if qualified else k.short
            default = f" (default {k.default})" if k.default else (" (required)" if k.required else "")
            sp.add_argument("--" + flag.replace("_", "-"), dest=k.dest, metavar="VALUE", help=k.help + default)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    overrides = {k.name: getattr(args, k.dest) for k in SCHEMAS[args.command] if getattr(args, k.dest, None) is not None}
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        cfg = parse_config(text, args.command, overrides, args.seed, args.out)
        return run(cfg)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, TypeError, ParameterRangeError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
