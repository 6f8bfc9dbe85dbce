"""CSV and JSON writers for lattices, series, bounds and tomography data.

Floats are written with ``repr`` (shortest round-trip form), so reruns give
byte-identical files and values read back exactly. Metadata goes into
leading ``#`` comment lines.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .dynamics import CorrelatorSeries
from .lattice import CouplingMatrix, Lattice


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path, header, rows, meta: dict | None = None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        for k in sorted(meta or {}):
            fh.write(f"# {k}={meta[k]}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    return path


def read_csv(path):
    """Return ``(meta, header, columns)`` with float columns."""
    meta, lines = {}, []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition("=")
                meta[k] = v
            else:
                lines.append(line)
    reader = csv.reader(lines)
    header = next(reader)
    data = [list(map(float, r)) for r in reader]
    cols = {h: np.array([r[n] for r in data]) for n, h in enumerate(header)}
    return meta, header, cols


def write_lattice(path, lat: Lattice):
    axes = ["x", "y", "z"][: lat.dim]
    rows = ([k, *lat.positions[k]] for k in range(lat.N))
    return write_csv(path, ["index", *axes], rows, {"kind": lat.kind.value, "L": lat.L, "N": lat.N})


def write_couplings(path, c: CouplingMatrix):
    """Upper-triangle triplets ``(i, j, J_ij)``."""
    def rows():
        for i in range(c.N):
            r = c.row(i)
            for j in range(i + 1, c.N):
                yield i, j, r[j]
    return write_csv(path, ["i", "j", "J_ij"], rows(), {"J": c.J, "alpha": c.alpha, "N": c.N})


def write_series(path, s: CorrelatorSeries):
    meta = dict(s.meta, observable=s.observable, indices=" ".join(map(str, s.indices)), B=s.B, norm=s.norm)
    sign = np.broadcast_to(s.values.sign, s.t.shape)
    log10 = np.broadcast_to(s.values.log10, s.t.shape)
    lin = np.broadcast_to(s.linear, s.t.shape)
    rows = zip(s.t, (int(v) for v in sign), log10, lin)
    return write_csv(path, ["t", "sign", "log10_magnitude", "linear_value"], rows, meta)


def write_bounds(path, t, minus_log10, plus_log10, meta=None):
    return write_csv(path, ["t", "bound_minus_log10", "bound_plus_log10"], zip(t, minus_log10, plus_log10), meta)


def write_tomography(path, t, gamma_i, gamma_ij, mod_diag, mod_14, mod_23, mod_12, meta=None):
    header = ["t", "gamma_i", "gamma_ij", "mod_diag", "mod_14", "mod_23", "mod_12"]
    return write_csv(path, header, zip(t, gamma_i, gamma_ij, mod_diag, mod_14, mod_23, mod_12), meta)


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path
