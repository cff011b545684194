"""Serialization of states, spectra and tables.

Floats go through ``repr`` (shortest round-trip form) in JSON and through
%.17g in CSV, so a reload reproduces the computation bit for bit.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, List, Sequence

import numpy as np

from ..lattice import LatticeField
from ..spectrum import KreinEntry, SpectrumReport
from ..stationary import StationaryState, gauge_anchors

BRANCH_SCHEMA = "# dnlsvortex branch.csv v1"
COMPARISON_SCHEMA = "# dnlsvortex comparison.csv v1"
BRANCH_COLUMNS = ("eps", "track_id", "re_lambda", "im_lambda", "krein")
COMPARISON_COLUMNS = ("eps", "track_id", "label", "numeric_re", "numeric_im",
                      "predicted_re", "predicted_im", "abs_error", "rel_error")


def fmt(x: float) -> str:
    return "%.17g" % float(x)


def eps_tag(eps: float) -> str:
    return f"{eps:.6f}"


def _dump(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def state_to_json(state: StationaryState) -> dict:
    grid = state.spec.grid
    nodes = []
    for k in range(grid.n_nodes):
        n, m = grid.node(k)
        row = {"index": k, "n": n, "m": m}
        for c, comp in enumerate(state.field.components):
            v = comp.ravel()[k]
            row[f"re{c}"], row[f"im{c}"] = float(v.real), float(v.imag)
        nodes.append(row)
    return {"epsilon": state.epsilon, "residual_norm": state.residual_norm,
            "newton_iters": state.newton_iters, "n_components": state.field.n_components,
            "nodes": nodes}


def state_from_json(data: dict, spec) -> StationaryState:
    C = data["n_components"]
    grid = spec.grid
    flat = np.zeros(C * grid.n_nodes, complex)
    for row in data["nodes"]:
        for c in range(C):
            flat[c * grid.n_nodes + row["index"]] = complex(row[f"re{c}"], row[f"im{c}"])
    field = LatticeField.from_flat(flat, grid, C)
    return StationaryState(field, spec.with_epsilon(data["epsilon"]), data["residual_norm"],
                           data["newton_iters"], gauge_anchors(spec))


def _cpairs(z: Iterable[complex]) -> List[List[float]]:
    return [[float(v.real), float(v.imag)] for v in z]


def _cvals(pairs) -> np.ndarray:
    return np.array([complex(a, b) for a, b in pairs], dtype=complex)


def report_to_json(rep: SpectrumReport) -> dict:
    return {
        "epsilon": rep.epsilon,
        "eigenvalues": _cpairs(rep.eigenvalues),
        "raw_eigenvalues": _cpairs(rep.raw_eigenvalues),
        "krein": [[float(k.eigenvalue.real), float(k.eigenvalue.imag), k.sign] for k in rep.krein],
        "zero_algebraic": rep.zero_algebraic,
        "zero_geometric": rep.zero_geometric,
        "n_negative_H": rep.n_negative_H,
        "n_constraints": rep.n_constraints,
        "max_real_part": rep.max_real_part,
        "h_eigenvalues": [float(x) for x in rep.h_eigenvalues],
        "zero_cluster": rep.zero_cluster,
    }


def report_from_json(d: dict) -> SpectrumReport:
    return SpectrumReport(
        epsilon=d["epsilon"], eigenvalues=_cvals(d["eigenvalues"]),
        raw_eigenvalues=_cvals(d["raw_eigenvalues"]),
        krein=tuple(KreinEntry(complex(a, b), s) for a, b, s in d["krein"]),
        zero_algebraic=d["zero_algebraic"], zero_geometric=d["zero_geometric"],
        n_negative_H=d["n_negative_H"], n_constraints=d["n_constraints"],
        max_real_part=d["max_real_part"], h_eigenvalues=np.array(d["h_eigenvalues"]),
        zero_cluster=d["zero_cluster"])


def write_csv(path: Path, schema: str, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(schema + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow(r)


def read_csv(path: Path) -> List[dict]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))
