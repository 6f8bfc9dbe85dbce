"""Command-line front end.

    spinrelax lattice | correlators | bounds | tomography | squeeze | verify
              [--config FILE] [--alpha A] [--L 4,8,16] [--B B] [--J J]
              [--out DIR] [--threads N]

The config file is flat JSON whose keys are the :class:`RunConfig` fields;
command-line flags override it. Without any configuration the correlator
sweep produces the alpha = 3/2 triangular-lattice dataset for L = 4..32.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import _backend
from . import bounds as bd
from . import dynamics as dyn
from . import io
from . import oracle
from . import tomography as tomo
from .errors import InvalidArgumentError, SpinRelaxError
from .lattice import LatticeKind, build_lattice, power_law_couplings

COMMANDS = ("lattice", "correlators", "bounds", "tomography", "squeeze", "verify")
SQUEEZE_MAX_SITES = 400


class ConfigError(InvalidArgumentError):
    def __init__(self, field_name, message):
        super().__init__(f"config field {field_name!r}: {message}")
        self.field = field_name


@dataclass
class RunConfig:
    kind: str = "triangular-hex"
    L: list = field(default_factory=lambda: [4, 8, 16, 32])
    alpha: float = 1.5
    J: float = 1.0
    B: float = 0.0
    observables: list = field(default_factory=lambda: ["xx", "yy", "yz", "x"])
    indices: list | None = None
    t_min: float = 1e-3
    t_max: float = 1e2
    t_points: int = 512
    t_spacing: str = "geometric"
    out: str = "out"
    sx: float = 1.0
    sxx: float | None = None
    moments_file: str | None = None
    threads: int | None = None
    alphas: list = field(default_factory=lambda: [round(0.25 * k, 2) for k in range(1, 13)])
    thetas: int = 33
    n_instances: int = 200
    seed: int = 20121

    def grid(self) -> np.ndarray:
        if self.t_spacing == "geometric":
            return np.geomspace(self.t_min, self.t_max, self.t_points)
        return np.linspace(self.t_min, self.t_max, self.t_points)

    def validate(self, command: str) -> RunConfig:
        try:
            LatticeKind(self.kind)
        except ValueError:
            raise ConfigError("kind", f"unknown lattice kind {self.kind!r}; choose from "
                              f"{[k.value for k in LatticeKind]}") from None
        if not self.L or any(isinstance(v, bool) or int(v) != v or v < 1 for v in self.L):
            raise ConfigError("L", "need a non-empty list of positive integers")
        self.L = [int(v) for v in self.L]
        for name in ("alpha", "J", "B", "t_min", "t_max", "sx"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigError(name, "must be a finite number")
        if self.alpha < 0:
            raise ConfigError("alpha", "must be >= 0")
        if abs(self.sx) > 1:
            raise ConfigError("sx", "must lie in [-1, 1]")
        if self.sxx is not None and abs(self.sxx) > 1:
            raise ConfigError("sxx", "must lie in [-1, 1]")
        if self.t_spacing not in ("linear", "geometric"):
            raise ConfigError("t_spacing", "must be 'linear' or 'geometric'")
        if int(self.t_points) != self.t_points or self.t_points < 2:
            raise ConfigError("t_points", "need at least 2 points")
        if not self.t_min < self.t_max:
            raise ConfigError("t_max", "must exceed t_min")
        if self.t_min < 0 or (self.t_spacing == "geometric" and self.t_min <= 0):
            raise ConfigError("t_min", "must be >= 0 (> 0 for a geometric grid)")
        if self.threads is not None and self.threads < 0:
            raise ConfigError("threads", "must be >= 0")
        if command in ("correlators", "tomography"):
            if not self.observables and command == "correlators":
                raise ConfigError("observables", "observable list is empty")
            bad = [o for o in self.observables if o not in dyn.OBSERVABLES]
            if bad:
                raise ConfigError("observables", f"unknown {bad}; choose from {list(dyn.OBSERVABLES)}")
        if command in ("correlators", "tomography", "bounds", "squeeze"):
            for L in self.L:
                if build_lattice(self.kind, L).N < 2:
                    raise ConfigError("L", f"L={L} gives a single site, so no pair exists")
        if command == "bounds" and self.alpha in (0.0, 1.0):
            raise ConfigError("alpha", "bounds are undefined at alpha = 0 and alpha = 1")
        if command == "squeeze":
            big = [L for L in self.L if build_lattice(self.kind, L).N > SQUEEZE_MAX_SITES]
            if big:
                raise ConfigError("L", f"squeeze costs O(N^3); L={big} exceeds N={SQUEEZE_MAX_SITES}")
            if self.thetas < 1:
                raise ConfigError("thetas", "need at least one angle")
        if command == "verify" and self.n_instances < 1:
            raise ConfigError("n_instances", "need at least one instance")
        return self


def _coerce(name, value):
    """Parse a command-line string for field ``name``."""
    if name in ("L", "alphas"):
        cast = int if name == "L" else float
        try:
            return [cast(v) for v in str(value).split(",") if v.strip()]
        except ValueError:
            raise ConfigError(name, f"cannot parse {value!r} as a comma-separated list") from None
    try:
        return int(value) if name == "threads" else float(value)
    except ValueError:
        raise ConfigError(name, f"cannot parse {value!r}") from None


def load_config(path=None, overrides=None) -> RunConfig:
    data = {}
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", f"cannot read {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(unknown[0], "unknown config key")
    if "L" in data and not isinstance(data["L"], list):
        data["L"] = [data["L"]]
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig(**data)


# --- helpers ---------------------------------------------------------------------

def _setup(cfg, L):
    lat = build_lattice(cfg.kind, L)
    c = power_law_couplings(lat, cfg.J, cfg.alpha)
    return lat, c, _moments(cfg, lat.N)


def _moments(cfg, N):
    if cfg.moments_file:
        try:
            data = json.loads(Path(cfg.moments_file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("moments_file", f"cannot read {cfg.moments_file}: {exc}") from None
        sx = np.broadcast_to(np.asarray(data.get("sx", 1.0), dtype=float), (N,))
        return dyn.InitialMoments(sx, data.get("sxx"), data.get("sxxx"))
    return dyn.InitialMoments.uniform(N, cfg.sx, cfg.sxx)


def _indices(cfg, lat, observable):
    if cfg.indices is not None:
        idx = list(cfg.indices)
    else:
        i, j = lat.center_pair()
        idx = [i, j]
        if observable == "ppp":
            idx = [i, lat.center_site(), j]
    return idx[:dyn._ARITY[observable]]


def _tag(cfg, L):
    return f"L{L}_a{cfg.alpha:g}"


def _out(cfg) -> Path:
    return Path(cfg.out)


# --- commands --------------------------------------------------------------------

def cmd_lattice(cfg: RunConfig) -> list[Path]:
    paths = []
    for L in cfg.L:
        lat = build_lattice(cfg.kind, L)
        paths.append(io.write_lattice(_out(cfg) / f"lattice_{cfg.kind}_L{L}.csv", lat))
    return paths


def cmd_correlators(cfg: RunConfig) -> list[Path]:
    t = cfg.grid()
    paths = []
    for L in cfg.L:
        lat, c, m = _setup(cfg, L)
        for obs in cfg.observables:
            s = dyn.evaluate_series(m, c, obs, _indices(cfg, lat, obs), t, cfg.B)
            paths.append(io.write_series(_out(cfg) / f"corr_{obs}_{_tag(cfg, L)}.csv", s))
    return paths


def cmd_bounds(cfg: RunConfig) -> list[Path]:
    t = cfg.grid()
    paths = []
    for L in cfg.L:
        lat, c, m = _setup(cfg, L)
        i, j = lat.center_pair()
        delta = float(np.linalg.norm(lat.positions[i] - lat.positions[j]))
        minus = bd.bound_p_minus(t, cfg.alpha, delta, cfg.J).log10
        plus = bd.bound_p_plus(t, cfg.alpha, lat.N, cfg.J, delta=delta).log10
        meta = {"alpha": cfg.alpha, "J": cfg.J, "L": L, "N": lat.N, "delta": delta,
                "minus_valid_from": bd.validity_threshold(cfg.alpha, delta, cfg.J, "minus"),
                "plus_valid_from": bd.validity_threshold(cfg.alpha, delta, cfg.J, "plus")}
        paths.append(io.write_bounds(_out(cfg) / f"bounds_{_tag(cfg, L)}.csv", t, minus, plus, meta))
    # tau bound against finite-lattice relaxation times of <xx>
    rows = []
    lats = [(L, build_lattice(cfg.kind, L)) for L in cfg.L]
    for a in cfg.alphas:
        row = [a, bd.tau_bound(a, 2.0, cfg.J)]
        for L, lat in lats:
            c = power_law_couplings(lat, cfg.J, a)
            s = dyn.evaluate_series(_moments(cfg, lat.N), c, "xx", lat.center_pair(), t, 0.0)
            row.append(dyn.relaxation_time(s))
        rows.append(row)
    header = ["alpha", "tau_bound"] + [f"tau_xx_L{L}" for L, _ in lats]
    paths.append(io.write_csv(_out(cfg) / "tau_bound.csv", header, rows, {"J": cfg.J, "delta": 2.0}))
    return paths


def tomography_series(cfg: RunConfig, L: int, t):
    lat, c, m = _setup(cfg, L)
    i, j = lat.center_pair()
    ms = tomo.moments_at(m, c, i, j, t, cfg.B)
    r1 = tomo.rho_one(ms)
    r2 = tomo.rho_two(ms)
    mods = tomo.offdiag_moduli(r2)
    return (t, tomo.purity(r1), tomo.purity(r2)) + tuple(mods)


def cmd_tomography(cfg: RunConfig) -> list[Path]:
    t = cfg.grid()
    paths = []
    for L in cfg.L:
        cols = tomography_series(cfg, L, t)
        meta = {"alpha": cfg.alpha, "J": cfg.J, "B": cfg.B, "L": L}
        paths.append(io.write_tomography(_out(cfg) / f"tomography_{_tag(cfg, L)}.csv", *cols, meta=meta))
    return paths


def cmd_squeeze(cfg: RunConfig) -> list[Path]:
    t = cfg.grid()
    thetas = np.linspace(0.0, np.pi, cfg.thetas)
    paths = []
    for L in cfg.L:
        lat, c, m = _setup(cfg, L)
        syy, syz = tomo.jz2_sums(m, c, t, cfg.B)
        rows = ((th, tt, v) for th in thetas for tt, v in zip(t, tomo.jz2_from_sums(lat.N, th, syy, syz)))
        meta = {"alpha": cfg.alpha, "J": cfg.J, "B": cfg.B, "L": L, "N": lat.N}
        paths.append(io.write_csv(_out(cfg) / f"squeeze_{_tag(cfg, L)}.csv", ["theta", "t", "jz2"], rows, meta))
    return paths


def cmd_verify(cfg: RunConfig):
    report = oracle.verify(cfg.n_instances, cfg.seed)
    path = io.write_json(_out(cfg) / "verify_report.json", report)
    return report, path


# --- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spinrelax", description="Exact long-range Ising dynamics datasets.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat JSON config file")
    p.add_argument("--alpha", help="interaction exponent")
    p.add_argument("--L", help="side length(s), comma separated")
    p.add_argument("--B", help="longitudinal field")
    p.add_argument("--J", help="coupling strength")
    p.add_argument("--out", help="output directory")
    p.add_argument("--threads", help="kernel threads (0 = auto); falls back to SPIN_RELAX_THREADS")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = {k: _coerce(k, getattr(args, k)) for k in ("alpha", "L", "B", "J", "threads")
                     if getattr(args, k) is not None}
        if args.out is not None:
            overrides["out"] = args.out
        cfg = load_config(args.config, overrides).validate(args.command)
        threads = cfg.threads if cfg.threads is not None else _backend._env_threads()
        _backend.set_threads(threads)
        if args.command == "verify":
            report, path = cmd_verify(cfg)
            worst = report["overall"]
            print(f"verify: {report['n_instances']} instances, max deviation {worst:.3e} -> {path}")
            return 0 if report["passed"] else 1
        paths = globals()[f"cmd_{args.command}"](cfg)
        for path in paths:
            print(path)
        return 0
    except (SpinRelaxError, ValueError) as exc:
        print(f"spinrelax: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
