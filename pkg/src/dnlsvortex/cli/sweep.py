"""Epsilon sweeps: continuation, spectra, tracking, HH search and persistence.

Every grid point is continued from the two previous *grid* states only, so a
run resumed from disk repeats exactly the arithmetic of an uninterrupted one.
States and reports are written as soon as they exist; the tables are rebuilt
from the full set at the end (or from the partial set on failure).
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .. import lsred
from ..errors import ConfigError, ContinuationError
from ..spectrum import Branch, detect_hh, spectrum_of, track_branch
from ..stationary import StationaryState, newton_continue
from . import store
from .config import RunConfig

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"


@dataclass(frozen=True)
class ComparisonRow:
    eps: float
    track_id: int
    label: str
    numeric: complex
    predicted: complex
    abs_error: float
    rel_error: float

    @classmethod
    def build(cls, eps, track_id, label, numeric, predicted) -> "ComparisonRow":
        err = abs(numeric - predicted)
        rel = err / abs(predicted) if predicted != 0 else math.inf
        return cls(eps, track_id, label, complex(numeric), complex(predicted), err, rel)

    def cells(self):
        return (store.fmt(self.eps), self.track_id, self.label,
                store.fmt(self.numeric.real), store.fmt(self.numeric.imag),
                store.fmt(self.predicted.real), store.fmt(self.predicted.imag),
                store.fmt(self.abs_error), store.fmt(self.rel_error))


@dataclass
class SweepResult:
    config: RunConfig
    out: Path
    branch: Optional[Branch]
    hh_events: list
    comparison: List[ComparisonRow]
    status: str
    last_good_eps: Optional[float]

    @property
    def exit_code(self) -> int:
        return 0 if self.status == "complete" else 2


def comparison_rows(branch: Branch) -> List[ComparisonRow]:
    """Pair each predicted eigenvalue with one tracked eigenvalue per epsilon.

    Assignment minimises the total distance; predictions that are exactly zero
    (degenerate leading order) have no partner and are skipped.
    """
    rows = []
    for st, rep in zip(branch.states, branch.reports):
        eps = rep.epsilon
        if eps == 0:
            continue
        preds = [p for p in lsred.evaluate(st.spec) if p.kind == "eigenvalue" and p.value != 0]
        tids = [t for t, tr in sorted(branch.tracks.items()) if tr.at(eps) is not None]
        if not preds or not tids:
            continue
        num = np.array([branch.tracks[t].at(eps) for t in tids])
        pv = np.array([p.value for p in preds])
        D = np.abs(pv[:, None] - num[None, :])
        for r, c in zip(*linear_sum_assignment(D)):
            rows.append(ComparisonRow.build(eps, tids[c], preds[r].label, num[c], pv[r]))
    rows.sort(key=lambda r: (r.eps, abs(r.predicted.imag), r.predicted.real, r.track_id, r.label))
    return rows


def branch_rows(branch: Branch):
    rows = []
    for tid, tr in branch.tracks.items():
        for e, v, k in zip(tr.eps, tr.values, tr.krein):
            rows.append((e, abs(v.imag), v.real, tid, v, k))
    rows.sort(key=lambda r: r[:4])
    return [(store.fmt(e), tid, store.fmt(v.real), store.fmt(v.imag), 0 if k is None else k)
            for e, _, _, tid, v, k in rows]


def hh_to_json(events) -> list:
    return [{"eps_star": e.eps_star, "bracket": list(e.bracket),
             "colliding_pair_ids": list(e.colliding_pair_ids),
             "post_collision": e.post_collision} for e in events]


def _write_manifest(out: Path, cfg: RunConfig, status: str, done: Sequence[float],
                    message: str = "") -> None:
    store._dump(out / MANIFEST, {
        "schema": "dnlsvortex manifest v1", "status": status,
        "last_good_eps": done[-1] if done else None, "completed_eps": list(done),
        "message": message, "config": cfg.to_dict()})


def _load_progress(out: Path, cfg: RunConfig):
    path = out / MANIFEST
    if not path.exists():
        return [], []
    man = json.loads(path.read_text())
    stored = RunConfig.from_dict(man["config"])
    # extending the grid or changing outputs keeps stored points valid
    if replace(stored, eps_stop=cfg.eps_stop, emit=cfg.emit) != cfg:
        raise ConfigError(f"{path} was written by a different configuration")
    states, reports = [], []
    for eps in man["completed_eps"]:
        tag = store.eps_tag(eps)
        spec = cfg.spec(eps)
        states.append(store.state_from_json(
            json.loads((out / "states" / f"eps_{tag}.json").read_text()), spec))
        reports.append(store.report_from_json(
            json.loads((out / "reports" / f"eps_{tag}.json").read_text())))
    return states, reports


def _solve_point(cfg: RunConfig, eps: float, window: List[StationaryState]) -> StationaryState:
    spec = cfg.spec(eps)
    kw = dict(tol=cfg.newton_tol, max_iters=cfg.max_iters, min_step=cfg.min_step,
              seed_order=cfg.seed_order)
    if not window:
        return newton_continue(spec, eps, step=cfg.eps_step, **kw)[-1]
    step = eps - window[-1].epsilon
    return newton_continue(spec, eps, step=step, start=window, **kw)[-1]


def _persist_point(out: Path, state, report) -> None:
    # always written: --resume reads them back
    tag = store.eps_tag(state.epsilon)
    store._dump(out / "states" / f"eps_{tag}.json", store.state_to_json(state))
    store._dump(out / "reports" / f"eps_{tag}.json", store.report_to_json(report))


def _write_tables(out: Path, cfg: RunConfig, branch: Branch, events, rows) -> None:
    # the figure reads branch.csv, so svg implies csv
    if "csv" in cfg.emit or "svg" in cfg.emit:
        store.write_csv(out / "branch.csv", store.BRANCH_SCHEMA, store.BRANCH_COLUMNS,
                        branch_rows(branch))
        store.write_csv(out / "comparison.csv", store.COMPARISON_SCHEMA,
                        store.COMPARISON_COLUMNS, (r.cells() for r in rows))
    if "json" in cfg.emit or "svg" in cfg.emit:
        store._dump(out / "hh_events.json", hh_to_json(events))


def run_sweep(cfg: RunConfig, resume: bool = False) -> SweepResult:
    """Continue, analyse and persist the branch over ``cfg.eps_grid()``."""
    out = cfg.out_dir()
    out.mkdir(parents=True, exist_ok=True)
    states, reports = _load_progress(out, cfg) if resume else ([], [])
    grid = cfg.eps_grid()
    done = [s.epsilon for s in states]
    if done != grid[:len(done)]:
        raise ConfigError("stored progress does not match the epsilon grid")
    status, message = "complete", ""
    _write_manifest(out, cfg, "running", done)
    for eps in grid[len(done):]:
        try:
            st = _solve_point(cfg, eps, states[-2:])
        except ContinuationError as exc:
            status, message = "failed", str(exc)
            log.error("continuation failed at eps=%g: %s", eps, exc)
            break
        rep = spectrum_of(st)
        states.append(st)
        reports.append(rep)
        done.append(eps)
        _persist_point(out, st, rep)
        _write_manifest(out, cfg, "running", done)
        log.info("eps=%.6f  max Re=%.3e  newton=%d", eps, rep.max_real_part, st.newton_iters)
    branch, events, rows = None, [], []
    if states:
        branch = track_branch(states, reports=reports)
        if status == "complete":
            events = detect_hh(branch, tol=cfg.hh_tol)
        rows = comparison_rows(branch)
        _write_tables(out, cfg, branch, events, rows)
    _write_manifest(out, cfg, status, done, message)
    return SweepResult(cfg, out, branch, events, rows, status, done[-1] if done else None)


def continue_single(cfg: RunConfig, eps: float) -> StationaryState:
    """Newton continuation from the anti-continuum limit to one epsilon."""
    spec = cfg.spec(eps)
    return newton_continue(spec, eps, step=cfg.eps_step, tol=cfg.newton_tol,
                           max_iters=cfg.max_iters, min_step=cfg.min_step,
                           seed_order=cfg.seed_order)[-1]
