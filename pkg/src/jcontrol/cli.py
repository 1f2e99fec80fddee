"""Command-line front end: ``jcontrol <command> [flags]``.

Every number printed here comes from a library call; this module only
parses configuration and formats tables.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from . import chain, dynamics, resonance
from .coupling import coupled_pairs
from .model import LevelIndex, ModelParams, energy, levels

SCHEMA_VERSION = 1
EXIT_USAGE = 64
EXIT_DATA = 65
VERDICT_EXIT = {
    chain.Verdict.CERTIFIED: 0,
    chain.Verdict.RESONANCE: 2,
    chain.Verdict.COUPLING_BROKEN: 3,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    omega: float = 1.0
    capital_omega: float = 1.0
    g: Optional[float] = None
    n_max: int = 10
    n_fock: Optional[int] = None
    tol: Optional[float] = None
    threshold: float = chain.DEFAULT_THRESHOLD
    g_min: float = 0.0
    g_max: float = 3.0
    g_step: float = 1e-3
    n_cap: int = 30
    format: str = "csv"
    out: Optional[str] = None
    include_benign: bool = False
    schedule: Optional[str] = None
    initial: str = "dressed:0,+"
    target: Optional[str] = None

    def params(self, g: Optional[float] = None) -> ModelParams:
        g = self.g if g is None else g
        return ModelParams(self.omega, self.capital_omega, 0.0 if g is None else g)

    @property
    def tolerance(self) -> float:
        return chain.DEFAULT_TOL * self.omega if self.tol is None else self.tol


FLOAT_KEYS = {"omega", "capital_omega", "g", "tol", "threshold", "g_min", "g_max", "g_step"}
INT_KEYS = {"n_max", "n_fock", "n_cap"}
KEY_ALIASES = {"Omega": "capital_omega"}


def _normalize_key(key: str) -> str:
    key = key.strip().lstrip("-")
    return KEY_ALIASES.get(key, key.replace("-", "_"))


def _convert(key: str, value):
    if value is None:
        return None
    try:
        if key in FLOAT_KEYS:
            x = float(value)
            if not math.isfinite(x):
                raise UsageError(f"{key} must be finite")
            return x
        if key in INT_KEYS:
            return int(value)
    except ValueError:
        raise UsageError(f"bad value for {key}: {value!r}") from None
    if key == "include_benign" and isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "on")
    return value


def read_config_file(path: str) -> dict:
    """``key=value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    known = {f.name for f in fields(RunConfig)}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _normalize_key(key)
        if key not in known:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _convert(key, value)
    return out


def build_config(ns: argparse.Namespace) -> RunConfig:
    values = read_config_file(ns.config) if ns.config else {}
    for f in fields(RunConfig):
        v = getattr(ns, f.name, None)
        if v is not None and v is not False:
            values[f.name] = _convert(f.name, v)
    cfg = RunConfig(**values)
    if cfg.format not in ("csv", "json"):
        raise UsageError("--format must be csv or json")
    return cfg


# -- formatting ---------------------------------------------------------------------


def fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return "" if x is None else str(x)


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _params_dict(cfg: RunConfig) -> dict:
    return {"omega": cfg.omega, "capital_omega": cfg.capital_omega}


# -- state specs --------------------------------------------------------------------


def parse_state(spec: str, params: ModelParams, n_fock: int) -> dynamics.StateVector:
    """``dressed:n,nu`` | ``bare:n,up`` | ``bare:n,down`` | ``spurious``."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "spurious":
            return dynamics.bare_state(n_fock, 0, -1)
        n_text, _, label = rest.partition(",")
        n = int(n_text)
        if kind == "dressed":
            return dynamics.dressed_state(params, LevelIndex(n, label.strip()).validate(params), n_fock)
        if kind == "bare":
            spin = {"up": 1, "down": -1}[label.strip()]
            return dynamics.bare_state(n_fock, n, spin)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad state spec {spec!r}: {exc}") from None
    raise UsageError(f"bad state spec {spec!r}")


# -- commands -----------------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig) -> int:
    params = cfg.params()
    oracle = dynamics.spectrum_oracle(params, cfg.n_max, cfg.n_fock)
    rows = []
    for lv in levels(params, cfg.n_max):
        e = energy(params, lv)
        o = oracle[lv]
        rows.append([lv.n, lv.nu, e, o, abs(e - o)])
    if cfg.format == "csv":
        emit(cfg, csv_text(["n", "nu", "E_analytic", "E_oracle", "abs_diff"], rows))
    else:
        emit(cfg, json_text({
            "schema_version": SCHEMA_VERSION,
            "command": "spectrum",
            **_params_dict(cfg),
            "g": params.g,
            "rows": [dict(zip(["n", "nu", "E_analytic", "E_oracle", "abs_diff"], r)) for r in rows],
        }))
    return 0


SINGULAR_HEADER = ["kind", "g_star", "residual", "tags"]


def cmd_singular(cfg: RunConfig) -> int:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", resonance.TruncationWarning)
        points = resonance.enumerate_singular(cfg.omega, cfg.capital_omega, cfg.g_max, cfg.n_cap)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    benign = (
        resonance.benign_crossings(cfg.omega, cfg.capital_omega, cfg.g_max, cfg.n_cap)
        if cfg.include_benign
        else []
    )
    if cfg.format == "csv":
        rows = [["singular", p.g_star, p.residual, ";".join(t.label() for t in p.tags)] for p in points]
        rows += [["benign", p.g_star, p.residual, ";".join(t.label() for t in p.tags)] for p in benign]
        emit(cfg, csv_text(SINGULAR_HEADER, rows))
    else:
        emit(cfg, json_text({
            "schema_version": SCHEMA_VERSION,
            "command": "singular",
            **_params_dict(cfg),
            "g_max": cfg.g_max,
            "n_cap": cfg.n_cap,
            "points": [p.to_dict() for p in points],
            "benign": [p.to_dict() for p in benign],
        }))
    return 0


def cmd_certify(cfg: RunConfig) -> int:
    if cfg.g is None:
        raise UsageError("certify needs --g")
    report = chain.certify(cfg.params(), cfg.n_max, cfg.tolerance, cfg.threshold)
    emit(cfg, json_text(report.to_dict()))
    return VERDICT_EXIT[report.verdict]


def cmd_propagate(cfg: RunConfig) -> int:
    if not cfg.schedule:
        raise UsageError("propagate needs --schedule")
    params = cfg.params()
    n_fock = cfg.n_max + dynamics.GUARD_BAND if cfg.n_fock is None else cfg.n_fock
    try:
        schedule = dynamics.PiecewiseControl.from_file(cfg.schedule)
    except OSError as exc:
        raise UsageError(f"cannot read schedule: {exc}") from None
    psi0 = parse_state(cfg.initial, params, n_fock)
    target = parse_state(cfg.target, params, n_fock) if cfg.target else None
    h = dynamics.build_jc(params, n_fock)
    ctrl = (dynamics.build_control("X", n_fock), dynamics.build_control("P", n_fock))
    run = dynamics.propagate(h, ctrl, schedule, psi0)
    lvls, basis = dynamics.dressed_basis(params, cfg.n_max, n_fock)
    header = ["t"] + [f"p{lv}" for lv in lvls] + ["norm_defect", "unitarity_defect"]
    if target is not None:
        header.append("fidelity_target")
    rows = []
    for k, (t, psi) in enumerate(zip(run.times, run.states)):
        pops = (abs(basis.conj().T @ psi.amplitudes) ** 2).tolist()
        defects = [0.0, 0.0] if k == 0 else [run.norm_defects[k - 1], run.unitarity_defects[k - 1]]
        row = [t] + pops + defects
        if target is not None:
            row.append(dynamics.fidelity(target, psi))
        rows.append(row)
    if cfg.format == "csv":
        emit(cfg, csv_text(header, rows))
    else:
        emit(cfg, json_text({
            "schema_version": SCHEMA_VERSION,
            "command": "propagate",
            "columns": header,
            "rows": rows,
        }))
    return 0


def cmd_scan(cfg: RunConfig) -> int:
    if cfg.g_step <= 0 or cfg.g_max < cfg.g_min:
        raise UsageError("scan needs g_step > 0 and g_max >= g_min")
    count = int(math.floor((cfg.g_max - cfg.g_min) / cfg.g_step + 1e-9)) + 1
    rows = []
    for k in range(count):
        g = cfg.g_min + k * cfg.g_step
        p = cfg.params(g)
        report = chain.certify(p, cfg.n_max, cfg.tolerance, cfg.threshold)
        coupled = coupled_pairs(p, cfg.n_max, cfg.threshold)
        min_freq = min((e.freq for e in coupled), default=math.inf)
        rows.append([g, chain.min_gap(p, cfg.n_max, cfg.threshold), min_freq, report.verdict.value])
    header = ["g", "min_gap", "min_coupled_freq", "verdict"]
    if cfg.format == "csv":
        emit(cfg, csv_text(header, rows))
    else:
        emit(cfg, json_text({
            "schema_version": SCHEMA_VERSION,
            "command": "scan",
            **_params_dict(cfg),
            "n_max": cfg.n_max,
            "rows": [dict(zip(header, r)) for r in rows],
        }))
    return 0


COMMANDS = {
    "spectrum": cmd_spectrum,
    "singular": cmd_singular,
    "certify": cmd_certify,
    "propagate": cmd_propagate,
    "scan": cmd_scan,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def make_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--omega", type=float, help="oscillator frequency")
    common.add_argument("--Omega", dest="capital_omega", type=float, help="two-level frequency")
    common.add_argument("--g", type=float, help="coupling constant")
    common.add_argument("--n-max", dest="n_max", type=int)
    common.add_argument("--n-fock", dest="n_fock", type=int)
    common.add_argument("--tol", type=float, help="frequency coincidence tolerance (default 1e-9*omega)")
    common.add_argument("--threshold", type=float, help="coupling amplitude treated as zero")
    common.add_argument("--g-min", dest="g_min", type=float)
    common.add_argument("--g-max", dest="g_max", type=float)
    common.add_argument("--g-step", dest="g_step", type=float)
    common.add_argument("--n-cap", dest="n_cap", type=int)
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--include-benign", dest="include_benign", action="store_true", default=None)
    common.add_argument("--schedule", help="file with one 'duration u1 u2' segment per line")
    common.add_argument("--initial", help="dressed:n,nu | bare:n,up|down | spurious")
    common.add_argument("--target", help="state spec to report fidelity against")

    parser = _Parser(prog="jcontrol", description="Spectral and resonance analysis of the Jaynes-Cummings control problem.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "spectrum": "closed-form spectrum against dense diagonalization",
        "singular": "singular couplings in [0, g_max]",
        "certify": "certify the chain C0 at one coupling (exit 0/2/3)",
        "propagate": "propagate a piecewise-constant control schedule",
        "scan": "resonance landscape over a g grid",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = make_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = build_config(ns)
        return COMMANDS[ns.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"jcontrol: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"jcontrol: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
