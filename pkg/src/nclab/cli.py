"""Command-line front end: ``nclab <command> [options]``.

Every command writes ``<out>/<command>-<timestamp>.json`` (and ``.csv``
with ``--format csv``), prints a one-line summary and exits with 0 when
all checked tolerances hold, 2 when a tolerance fails and 1 on a usage or
configuration error (a JSON error object goes to stderr).
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .core import FourVector, ThetaMatrix, theta_standard
from .kernels import TwistKind, half_line_identity, schwinger_position
from .loops import ScanGrid, gaussian_regulator_bias, uvir_scan
from .quadrature import QuadratureSpec
from .schwartz import GaussianPacket, boundary_limit_probe, smear_two_point
from .twist import (associativity_defect, associativity_defect_offshell, moyal_star_packet,
                    reflection_defect_ft, wick_pairings)

SCHEMA = "nclab.report/1"
DEFAULT_SEED = 20240611
EXIT_OK, EXIT_CONFIG, EXIT_TOLERANCE = 0, 1, 2


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# configuration

@dataclass
class RunConfig:
    mass: float = 1.0
    theta: list = field(default_factory=lambda: [1.0, 1.0])
    theta_matrix: list | None = None
    rel_tol: float | None = None
    abs_tol: float | None = None
    max_evals: int | None = None
    regulator: str = "gaussian"
    cutoffs: list = field(default_factory=lambda: [10.0, 20.0, 40.0, 80.0])
    out: str = "nclab-out"
    format: str = "json"
    seed: int = DEFAULT_SEED
    plot: bool = False
    options: dict = field(default_factory=dict)

    def theta_obj(self) -> ThetaMatrix:
        if self.theta_matrix is not None:
            try:
                return ThetaMatrix.from_nearly_antisymmetric(np.array(self.theta_matrix, dtype=float))
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        return theta_standard(*self.theta)

    def spec(self, **defaults) -> QuadratureSpec:
        kw = dict(defaults)
        for name in ("rel_tol", "abs_tol", "max_evals"):
            if getattr(self, name) is not None:
                kw[name] = getattr(self, name)
        kw["regulator"] = self.regulator
        try:
            return QuadratureSpec(**kw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("plot")
        return d


def _floats(text: str, n: int | None = None) -> list:
    try:
        vals = [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise ConfigError(f"cannot parse numbers from {text!r}") from exc
    if n is not None and len(vals) != n:
        raise ConfigError(f"expected {n} numbers in {text!r}")
    return vals


def _vectors(text: str, n: int) -> list:
    return [_floats(part, n) for part in text.split(";") if part.strip()]


def parse_cutoffs(text: str) -> list:
    """``a:b:n`` for n log-spaced values, or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("cutoffs must be a:b:n")
        a, b = float(parts[0]), float(parts[1])
        n = int(parts[2])
        if not (0 < a < b and n >= 2):
            raise ConfigError("cutoffs a:b:n needs 0 < a < b and n >= 2")
        return [float(v) for v in np.geomspace(a, b, n)]
    vals = _floats(text)
    if not vals:
        raise ConfigError("empty cutoff list")
    return vals


def _linspace(text: str) -> list:
    if ":" in text:
        a, b, n = text.split(":")
        return [float(v) for v in np.linspace(float(a), float(b), int(n))]
    return _floats(text)


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    flat = {}
    for section in ("run", "quadrature", "theta"):
        flat.update({f"{section}.{k}": v for k, v in data.get(section, {}).items()})
    for key, value in data.items():
        if not isinstance(value, dict):
            flat[f"run.{key}"] = value
    flat["commands"] = {k: v for k, v in data.items() if isinstance(v, dict)
                        and k not in ("run", "quadrature", "theta")}
    return flat


def build_config(args) -> RunConfig:
    file = load_config(args.config)
    cfg = RunConfig()
    mapping = {"run.mass": "mass", "run.out": "out", "run.seed": "seed", "run.format": "format",
               "quadrature.rel_tol": "rel_tol", "quadrature.abs_tol": "abs_tol",
               "quadrature.max_evals": "max_evals", "quadrature.regulator": "regulator",
               "theta.standard": "theta", "theta.explicit": "theta_matrix"}
    for key, attr in mapping.items():
        if key in file:
            setattr(cfg, attr, file[key])
    if "quadrature.cutoffs" in file:
        c = file["quadrature.cutoffs"]
        cfg.cutoffs = parse_cutoffs(c) if isinstance(c, str) else [float(v) for v in c]
    cfg.options = dict(file.get("commands", {}).get(args.command, {}))
    # flags override the file
    if args.mass is not None:
        cfg.mass = args.mass
    if args.theta is not None:
        cfg.theta, cfg.theta_matrix = _floats(args.theta, 2), None
    if args.cutoffs is not None:
        cfg.cutoffs = parse_cutoffs(args.cutoffs)
    for name in ("out", "format", "seed", "rel_tol", "max_evals", "regulator"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    cfg.plot = bool(args.plot)
    if not (cfg.mass > 0 and math.isfinite(cfg.mass)):
        raise ConfigError("mass must be positive")
    if cfg.format not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    if cfg.regulator not in ("sharp", "gaussian"):
        raise ConfigError("regulator must be sharp or gaussian")
    cfg.theta = [float(v) for v in cfg.theta]
    cfg.cutoffs = [float(v) for v in cfg.cutoffs]
    return cfg


def _opt(args, cfg: RunConfig, name: str, default):
    v = getattr(args, name, None)
    if v is not None:
        return v
    return cfg.options.get(name, default)


# --------------------------------------------------------------------------
# output

def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, np.complexfloating):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


@dataclass
class Outcome:
    results: dict
    passed: bool
    summary: str
    columns: list | None = None
    rows: list | None = None
    units: str = ""
    csv_text: str | None = None
    plot: object = None


def _csv(outcome: Outcome) -> str:
    if outcome.csv_text is not None:
        return outcome.csv_text
    buf = io.StringIO()
    buf.write(f"# {outcome.units}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(outcome.columns)
    for row in outcome.rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _stamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")


def write_outputs(command: str, cfg: RunConfig, outcome: Outcome, wall: float) -> dict:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = out / f"{command}-{_stamp()}"
    report = {
        "schema": SCHEMA,
        "command": command,
        "toolVersion": __version__,
        "config": _jsonable(cfg.echo()),
        "passed": bool(outcome.passed),
        "results": _jsonable(outcome.results),
        "wallTime": round(wall, 6),
    }
    paths = {"json": str(stem) + ".json"}
    Path(paths["json"]).write_text(json.dumps(report, indent=2, sort_keys=False) + "\n")
    if cfg.format == "csv" and (outcome.rows is not None or outcome.csv_text is not None):
        paths["csv"] = str(stem) + ".csv"
        Path(paths["csv"]).write_text(_csv(outcome))
    if cfg.plot and outcome.plot is not None:
        try:
            outcome.plot(str(stem) + ".svg")
            paths["svg"] = str(stem) + ".svg"
        except Exception as exc:  # plots never change the exit code
            print(f"plot skipped: {exc}", file=sys.stderr)
    return paths


def _line_plot(series: dict, xlabel: str, ylabel: str, logx=False, logy=False):
    def draw(path):
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        fig, ax = plt.subplots(figsize=(6, 4))
        for label, (x, y) in series.items():
            ax.plot(x, y, marker="o", label=label)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        if len(series) > 1:
            ax.legend(fontsize="small")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return draw


# --------------------------------------------------------------------------
# commands

def _random_packets(rng: np.random.Generator, n: int) -> list:
    packets = []
    for _ in range(n):
        amp = complex(rng.normal(), rng.normal())
        packets.append(GaussianPacket(amp, rng.uniform(-1, 1, 4), rng.uniform(0.5, 1.5, 4),
                                      rng.uniform(-1, 1, 4)))
    return packets


def cmd_verify_identity3(args, cfg: RunConfig) -> Outcome:
    masses = _linspace(str(_opt(args, cfg, "masses", "0.5:2:5")))
    momenta = _linspace(str(_opt(args, cfg, "momenta", "0:3:5")))
    x4s = _linspace(str(_opt(args, cfg, "x4", "0.1:3:5")))
    if any(x <= 0 for x in x4s):
        raise ConfigError("all x4 values must be positive")
    if any(m <= 0 for m in masses):
        raise ConfigError("all masses must be positive")
    spec = cfg.spec(rel_tol=1e-10)
    rows, worst = [], 0.0
    for m in masses:
        for k in momenta:
            for x4 in x4s:
                chk = half_line_identity(k, x4, m, spec)
                err = chk.rel_error
                worst = max(worst, err)
                v = complex(chk.quadrature.value)
                rows.append([m, k, x4, chk.closed_form, v.real, v.imag, err])
    passed = worst <= 1e-8
    return Outcome({"maxRelError": worst, "tolerance": 1e-8, "points": len(rows)}, passed,
                   f"half-line identity: max rel error {worst:.3e} over {len(rows)} points",
                   ["m", "k_norm", "x4", "closed_form", "re", "im", "rel_error"], rows,
                   "m, k_norm, x4 in mass units; values in inverse mass units")


def cmd_boundary_limit(args, cfg: RunConfig) -> Outcome:
    n = int(_opt(args, cfg, "packets", 10))
    eta = _floats(str(_opt(args, cfg, "eta", "1,0,0,0")), 4)
    ts = _floats(str(_opt(args, cfg, "t", "0.04,0.02,0.01,0.005")))
    rng = np.random.default_rng(cfg.seed)
    spec = cfg.spec(rel_tol=1e-10)
    rows, results, worst = [], [], 0.0
    series = {}
    try:
        for i, g in enumerate(_random_packets(rng, n)):
            probe = boundary_limit_probe(g, eta, ts, cfg.mass, spec)
            ref = complex(smear_two_point(g, cfg.mass, spec).value)
            rel = abs(probe.limit - ref) / abs(ref)
            worst = max(worst, rel)
            results.append({"limit": probe.limit, "pairing": ref, "relError": rel, "order": probe.order})
            for t, v in zip(probe.t, probe.values):
                rows.append([i, t, v.real, v.imag, probe.limit.real, probe.limit.imag, ref.real, ref.imag])
            series[f"packet {i}"] = (list(probe.t), [abs(v - ref) for v in probe.values])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    orders = [r["order"] for r in results]
    passed = worst <= 1e-6
    return Outcome({"packets": results, "maxRelError": worst, "tolerance": 1e-6,
                    "meanOrder": float(np.mean(orders)) if orders else math.nan}, passed,
                   f"boundary limit: max rel error {worst:.3e}, mean order {np.mean(orders):.3f}",
                   ["packet", "t", "re", "im", "limit_re", "limit_im", "pairing_re", "pairing_im"], rows,
                   "t dimensionless; pairings in units fixed by the packet amplitude",
                   plot=_line_plot(series, "t", "|F(t) - pairing|", True, True))


DEFAULT_SCAN_MOMENTA = "0,0,0,0;0,0.05,0,0;0,0.1,0,0;0,0.2,0,0;0,0.5,0,0;0,1,0,0"


def cmd_tadpole_scan(args, cfg: RunConfig) -> Outcome:
    graph = str(_opt(args, cfg, "graph", "tadpole"))
    twist_name = str(_opt(args, cfg, "twist", "offShell"))
    momenta = _vectors(str(_opt(args, cfg, "momenta", DEFAULT_SCAN_MOMENTA)), 4)
    try:
        theta = cfg.theta_obj()
        twist = {"none": TwistKind.none(), "offShell": TwistKind.off_shell(theta),
                 "onShell": TwistKind.on_shell(theta)}[twist_name]
        grid = ScanGrid(momenta, cfg.cutoffs, twist, cfg.mass, cfg.spec(rel_tol=1e-5, max_evals=4_000_000),
                        graph, cfg.regulator)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid scan: {exc}") from exc
    res = uvir_scan(grid)
    # the closed form is only asserted where the Gaussian regulator bias is negligible
    worst, asserted = 0.0, 0
    for r in res.rows:
        if r.reference is None or cfg.regulator != "gaussian":
            continue
        a = theta.entries @ np.array(r.k)
        if gaussian_regulator_bias(a, cfg.mass, r.cutoff) <= 5e-4:
            asserted += 1
            worst = max(worst, abs(r.value - r.reference) / abs(r.reference))
    fits = {
        "lnCutoffSlopes": [{"k": list(k), "slope": f.slope, "stderr": f.stderr}
                           for k, f in res.log_slopes.items()],
        "cutoffSquaredSlopes": [{"k": list(k), "slope": f.slope, "stderr": f.stderr}
                                for k, f in res.quadratic_slopes.items()],
        "smallMomentumExponents": [{"cutoff": c, "exponent": f.slope, "stderr": f.stderr}
                                   for c, f in res.k_exponents.items()],
    }
    passed = worst <= 1e-3
    series = {}
    for k in grid.external_momenta:
        rows = res.table(k)
        series[f"|k|={np.linalg.norm(k):g}"] = ([r.cutoff for r in rows], [abs(r.value) for r in rows])
    nonconv = sum(not r.converged for r in res.rows)
    return Outcome({"graph": graph, "twist": twist_name, "cells": len(res.rows),
                    "nonConverged": nonconv, "assertedCells": asserted, "maxReferenceRelError": worst,
                    **fits}, passed,
                   f"{graph} scan ({twist_name}): {len(res.rows)} cells, {nonconv} not converged, "
                   f"max closed-form deviation {worst:.3e} over {asserted} cells",
                   csv_text=res.to_csv(),
                   plot=_line_plot(series, "cutoff", "|value|", True, True))


def cmd_assoc_check(args, cfg: RunConfig) -> Outcome:
    triple = _vectors(str(_opt(args, cfg, "triple", "1,0,0;0,1,0;0,0,1")), 3)
    if len(triple) != 3:
        raise ConfigError("triple needs three spatial vectors")
    scale = float(_opt(args, cfg, "scale", 0.5))
    samples = int(_opt(args, cfg, "samples", 1000))
    theta = cfg.theta_obj()
    on = associativity_defect(*triple, cfg.mass, theta, scale)
    rng = np.random.default_rng(cfg.seed)
    off_max = max((associativity_defect_offshell(*rng.normal(size=(3, 4)), theta) for _ in range(samples)),
                  default=0)
    passed = off_max == 0 and on > 0
    return Outcome({"onShellDefect": on, "offShellMaxDefect": float(off_max), "samples": samples,
                    "scale": scale}, passed,
                   f"associativity: on-shell defect {on:.15g}, off-shell max defect {float(off_max):g}",
                   ["kind", "defect"], [["onShell", on], ["offShell", float(off_max)]], "phases in radians")


def cmd_reflection_check(args, cfg: RunConfig) -> Outcome:
    k = _floats(str(_opt(args, cfg, "k", "1,0,0,0")), 4)
    p = _floats(str(_opt(args, cfg, "p", "0,1,0,0")), 4)
    samples = int(_opt(args, cfg, "samples", 1000))
    theta = cfg.theta_obj()
    kv, pv = FourVector.euclidean(*k), FourVector.euclidean(*p)
    kinds = {"none": TwistKind.none(), "offShell": TwistKind.off_shell(theta), "onShell": TwistKind.on_shell(theta)}
    point = {name: reflection_defect_ft(kv, pv, tw, cfg.mass) for name, tw in kinds.items()}
    rng = np.random.default_rng(cfg.seed)
    sampled = {"none": 0.0, "offShell": 0.0}
    for _ in range(samples):
        a, b = rng.normal(size=(2, 4))
        for name in sampled:
            sampled[name] = max(sampled[name], reflection_defect_ft(a, b, kinds[name], cfg.mass))
    passed = sampled["none"] == 0 and sampled["offShell"] == 0 and point["none"] == 0 and point["offShell"] == 0
    return Outcome({"point": point, "sampledMax": sampled, "samples": samples}, passed,
                   "reflection: " + ", ".join(f"{n} {v:.6g}" for n, v in point.items()),
                   ["twist", "defect_at_point", "sampled_max"],
                   [[n, point[n], sampled.get(n, "")] for n in kinds], "kernel units m^-4")


def cmd_wick(args, cfg: RunConfig) -> Outcome:
    n2 = int(_opt(args, cfg, "n2", 4))
    try:
        pairings = wick_pairings(n2)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    expected = 0 if n2 % 2 else math.prod(range(n2 - 1, 0, -2))
    passed = len(pairings) == expected
    rows = [[i, " ".join(f"{a}-{b}" for a, b in p.pairs)] for i, p in enumerate(pairings)]
    return Outcome({"n2": n2, "count": len(pairings), "pairings": [list(map(list, p.pairs)) for p in pairings]},
                   passed, f"{n2} points: {len(pairings)} pairings", ["index", "pairs"], rows, "index pairs")


def _default_radii() -> str:
    pts = []
    for r in map(float, np.geomspace(0.2, 5.0, 8)):
        pts.append(f"0,0,0,{r!r}")
        pts.append(f"{r / 2!r},{r / 2!r},{r / 2!r},{r / 2!r}")
    return ";".join(pts)


def cmd_schwinger_eval(args, cfg: RunConfig) -> Outcome:
    from scipy.special import k1
    points = _vectors(str(_opt(args, cfg, "points", _default_radii())), 4)
    spec = cfg.spec(rel_tol=1e-10)
    rows, worst = [], 0.0
    for x in points:
        r = math.sqrt(sum(c * c for c in x))
        if r == 0:
            raise ConfigError("x = 0 is singular")
        val = schwinger_position(FourVector.euclidean(*x), cfg.mass, spec)
        ref = cfg.mass * k1(cfg.mass * r) / (4 * math.pi ** 2 * r)
        rel = abs(val - ref) / ref
        worst = max(worst, rel)
        rows.append([*x, r, val, ref, rel])
    passed = worst <= 1e-6
    rs = [row[4] for row in rows]
    order = np.argsort(rs)
    return Outcome({"maxRelError": worst, "tolerance": 1e-6, "points": len(rows)}, passed,
                   f"Schwinger function: {len(rows)} points, max rel error vs Bessel form {worst:.3e}",
                   ["x1", "x2", "x3", "x4", "r", "value", "bessel_form", "rel_error"], rows,
                   "positions in inverse mass units; values in mass^2 units",
                   plot=_line_plot({"S(r)": ([rs[i] for i in order], [rows[i][5] for i in order])},
                                   "r", "S(r)", False, True))


def cmd_star_eval(args, cfg: RunConfig) -> Outcome:
    points = _vectors(str(_opt(args, cfg, "points", "0,0,0,0;0.3,-0.2,0.1,0.4;1,0,0,-1")), 4)
    rng = np.random.default_rng(cfg.seed)
    f, g = _random_packets(rng, 2)
    theta = cfg.theta_obj()
    if not theta.is_block_form:
        raise ConfigError("star-eval needs theta in block form")
    spec = cfg.spec(rel_tol=1e-10, abs_tol=1e-300)
    star = moyal_star_packet(f, g, theta, spec)
    plain = moyal_star_packet(f, g, ThetaMatrix(np.zeros((4, 4))), spec)
    rows, worst = [], 0.0
    for x in points:
        xs = np.array([x[3], x[0], x[1], x[2]])  # display order -> storage
        v = star(xs)
        v0 = plain(xs)
        prod = complex(f(xs) * g(xs))
        worst = max(worst, abs(v0 - prod) / max(abs(prod), 1e-300))
        rows.append([*x, v.real, v.imag, prod.real, prod.imag])
    passed = worst <= 1e-8
    return Outcome({"commutativeLimitRelError": worst, "points": len(rows)}, passed,
                   f"star product at {len(rows)} points; theta=0 check {worst:.3e}",
                   ["x1", "x2", "x3", "x4", "re", "im", "pointwise_re", "pointwise_im"], rows,
                   "positions in inverse mass units")


COMMANDS = {
    "verify-identity3": (cmd_verify_identity3,
                         "exp(-w x4)/(2w) = (1/2pi) int dk4 exp(i k4 x4)/(k4^2 + w^2) for x4 > 0"),
    "boundary-limit": (cmd_boundary_limit,
                       "int f(x - i t eta) g(x) dx -> <Delta+, g> as t -> 0+ for eta in the forward cone"),
    "tadpole-scan": (cmd_tadpole_scan,
                     "cutoff scan of the one-loop tadpole int d^4p e^{ip theta k}/(p^2+m^2) or the "
                     "twisted bubble int d^4p S(k-p) S(p) e^{-i p theta (k-p)}"),
    "assoc-check": (cmd_assoc_check,
                    "(a*b)*c vs a*(b*c) phases for the on-shell product with lifts (w_k, k)"),
    "reflection-check": (cmd_reflection_check,
                         "|S2(k,p) - S2(-k,-p)| for S2 = e^{-i p~ theta k~}/((k^2+m^2)(p^2+m^2))"),
    "wick": (cmd_wick, "perfect matchings of 2n points, (2n-1)!! of them"),
    "schwinger-eval": (cmd_schwinger_eval,
                       "S(x) = (2pi)^-4 int d^4k e^{ikx}/(k^2+m^2), checked against m K1(m r)/(4 pi^2 r)"),
    "star-eval": (cmd_star_eval,
                  "(f*g)(x) = int d^4k f~(k) e^{-ikx} g(x + theta k/2) for Gaussian packets"),
}


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="TOML config file; flags override its values")
    p.add_argument("--mass", type=float, help="field mass m > 0")
    p.add_argument("--theta", help="standard-form theta scales 'l1,l2'")
    p.add_argument("--cutoffs", help="cutoff grid 'a:b:n' (log-spaced) or a comma list")
    p.add_argument("--out", help="output directory (default nclab-out)")
    p.add_argument("--format", choices=("csv", "json"), help="also write a CSV data file with 'csv'")
    p.add_argument("--seed", type=int, help=f"seed for random samples (default {DEFAULT_SEED})")
    p.add_argument("--rel-tol", dest="rel_tol", type=float, help="quadrature relative tolerance")
    p.add_argument("--max-evals", dest="max_evals", type=int, help="quadrature evaluation budget")
    p.add_argument("--regulator", choices=("sharp", "gaussian"), help="UV regulator (default gaussian)")
    p.add_argument("--plot", action="store_true", help="write an SVG plot where one is defined")


def build_parser() -> argparse.ArgumentParser:
    epilog = "\n".join(f"  {name:18s} {desc}" for name, (_, desc) in COMMANDS.items())
    epilog += "\n  report-all         run every command above with its defaults"
    parser = argparse.ArgumentParser(
        prog="nclab", formatter_class=argparse.RawDescriptionHelpFormatter,
        description="Free scalar field kernels, twisted products and loop scans.",
        epilog="commands:\n" + epilog + "\n\nexit codes: 0 pass, 2 tolerance failed, 1 usage/config error")
    parser.add_argument("--version", action="version", version=f"nclab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        _add_common(p)
        return p

    p = add("verify-identity3", COMMANDS["verify-identity3"][1])
    p.add_argument("--masses", help="mass grid a:b:n (linear) or list")
    p.add_argument("--momenta", help="|k| grid a:b:n or list")
    p.add_argument("--x4", help="x4 grid a:b:n or list (all > 0)")
    p = add("boundary-limit", COMMANDS["boundary-limit"][1])
    p.add_argument("--packets", type=int, help="number of random packets (default 10)")
    p.add_argument("--eta", help="cone direction in storage order 'x0,x1,x2,x3'")
    p.add_argument("--t", help="decreasing t values, comma separated")
    p = add("tadpole-scan", COMMANDS["tadpole-scan"][1])
    p.add_argument("--graph", choices=("tadpole", "bubble"))
    p.add_argument("--twist", choices=("none", "offShell", "onShell"))
    p.add_argument("--momenta", help="external momenta 'k4,k1,k2,k3;...'")
    p = add("assoc-check", COMMANDS["assoc-check"][1])
    p.add_argument("--triple", help="three spatial vectors 'a1,a2,a3;b1,b2,b3;c1,c2,c3'")
    p.add_argument("--scale", type=float, help="phase scale (default 1/2)")
    p.add_argument("--samples", type=int, help="random off-shell triples")
    p = add("reflection-check", COMMANDS["reflection-check"][1])
    p.add_argument("--k", help="Euclidean k as 'x1,x2,x3,x4'")
    p.add_argument("--p", help="Euclidean p as 'x1,x2,x3,x4'")
    p.add_argument("--samples", type=int, help="random points for the exact-zero checks")
    p = add("wick", COMMANDS["wick"][1])
    p.add_argument("--n2", type=int, help="number of points (default 4)")
    p = add("schwinger-eval", COMMANDS["schwinger-eval"][1])
    p.add_argument("--points", help="positions 'x1,x2,x3,x4;...'")
    p = add("star-eval", COMMANDS["star-eval"][1])
    p.add_argument("--points", help="positions 'x1,x2,x3,x4;...'")
    add("report-all", "run every command with its defaults into one output directory")
    return parser


def _error(message: str, kind: str = "config") -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return EXIT_CONFIG


def run_command(name: str, args, cfg: RunConfig) -> int:
    func = COMMANDS[name][0]
    t0 = time.perf_counter()
    outcome = func(args, cfg)
    paths = write_outputs(name, cfg, outcome, time.perf_counter() - t0)
    status = "PASS" if outcome.passed else "FAIL"
    print(f"[{status}] {name}: {outcome.summary} -> {paths['json']}")
    return EXIT_OK if outcome.passed else EXIT_TOLERANCE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = build_config(args)
        if args.command == "report-all":
            codes = []
            for name in COMMANDS:
                sub_args = build_parser().parse_args([name])
                sub_cfg = build_config(sub_args)
                for attr in ("mass", "theta", "theta_matrix", "rel_tol", "abs_tol", "max_evals", "regulator",
                             "cutoffs", "out", "format", "seed", "plot"):
                    setattr(sub_cfg, attr, getattr(cfg, attr))
                codes.append(run_command(name, sub_args, sub_cfg))
            return max(codes)
        return run_command(args.command, args, cfg)
    except ConfigError as exc:
        return _error(str(exc))
    except (ValueError, OSError, ArithmeticError, RuntimeError) as exc:
        return _error(f"{type(exc).__name__}: {exc}", "runtime")


if __name__ == "__main__":
    sys.exit(main())
