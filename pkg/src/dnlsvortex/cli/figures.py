"""Two-panel (Im lambda, Re lambda) versus epsilon figures written as plain SVG.

Numerical tracks are solid lines, coincident (double) tracks are drawn once in
bold, and the leading-order predictions are overlaid dashed. The plotted
points also go to a CSV so any other plotting tool can redraw the figure.
"""
from __future__ import annotations

import json
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Optional, Tuple
from xml.sax.saxutils import escape

import numpy as np

from .. import lsred
from ..errors import ConfigError
from . import store
from .config import RunConfig
from .sweep import MANIFEST

FIGURE_SCHEMA = "# dnlsvortex figure-data v1"
FIGURE_COLUMNS = ("series", "source", "style", "panel", "eps", "value")
DOUBLE_TOL = 1e-6
PREDICTION_SAMPLES = 120
KREIN_COLOURS = {1: "#1f5fbf", -1: "#c0392b", 0: "#222222"}
REGIMES = {1: "scalar model", 2: "vector model with beta < 1",
           3: "vector model with beta > 1", 4: "vector model with beta = 1"}

W, H = 640, 560
LEFT, RIGHT, TOP, GAP, PANEL_H = 70, 20, 30, 60, 200


def figure_regime(cfg: RunConfig) -> int:
    if cfg.model == "scalar":
        return 1
    if cfg.beta == 1:
        return 4
    return 2 if cfg.beta < 1 else 3


def load_run(run_dir: Path) -> Tuple[RunConfig, List[float], List[dict]]:
    man_path, csv_path = run_dir / MANIFEST, run_dir / "branch.csv"
    if not man_path.exists() or not csv_path.exists():
        raise ConfigError(f"{run_dir} has no sweep artifacts (manifest.json and branch.csv)")
    man = json.loads(man_path.read_text())
    return RunConfig.from_dict(man["config"]), man["completed_eps"], store.read_csv(csv_path)


def _tracks(rows: List[dict]) -> Dict[int, List[Tuple[float, complex, int]]]:
    out = defaultdict(list)
    for r in rows:
        out[int(r["track_id"])].append(
            (float(r["eps"]), complex(float(r["re_lambda"]), float(r["im_lambda"])), int(r["krein"])))
    return dict(sorted(out.items()))


def _doubles(tracks) -> Dict[int, int]:
    """Map of duplicate track id -> the id drawn in its place (bold)."""
    hidden = {}
    ids = list(tracks)
    for i, a in enumerate(ids):
        if a in hidden:
            continue
        va = {e: v for e, v, _ in tracks[a]}
        for b in ids[i + 1:]:
            if b in hidden:
                continue
            vb = {e: v for e, v, _ in tracks[b]}
            common = sorted(set(va) & set(vb))
            if len(common) >= 2 and all(abs(va[e] - vb[e]) < DOUBLE_TOL for e in common):
                hidden[b] = a
    return hidden


def _prediction_series(cfg: RunConfig, lo: float, hi: float):
    eps = np.linspace(lo, hi, PREDICTION_SAMPLES)
    curves: Dict[str, List[complex]] = defaultdict(list)
    for e in eps:
        for p in lsred.evaluate(cfg.spec(float(e))):
            if p.kind == "eigenvalue":
                curves[p.label].append(p.value)
    out = []
    seen: List[np.ndarray] = []
    for label, vals in curves.items():
        vals = np.array(vals)
        dup = any(np.allclose(vals, s, atol=1e-14) for s in seen)
        if dup:
            continue
        mult = sum(np.allclose(vals, np.array(v), atol=1e-14) for v in curves.values())
        seen.append(vals)
        out.append((label, eps, vals, "bold-dashed" if mult > 1 else "dashed"))
    return out


class _Panel:
    def __init__(self, top: float, x_range, y_range, title: str):
        self.top, self.title = top, title
        self.x0, self.x1 = x_range
        lo, hi = y_range
        if hi - lo < 1e-12:
            lo, hi = lo - 1.0, hi + 1.0
        pad = 0.05 * (hi - lo)
        self.y0, self.y1 = lo - pad, hi + pad

    def x(self, e):
        return LEFT + (e - self.x0) / max(self.x1 - self.x0, 1e-300) * (W - LEFT - RIGHT)

    def y(self, v):
        return self.top + PANEL_H - (v - self.y0) / (self.y1 - self.y0) * PANEL_H

    def frame(self, clip_id: str) -> List[str]:
        w = W - LEFT - RIGHT
        parts = [f'<clipPath id="{clip_id}"><rect x="{LEFT}" y="{self.top}" width="{w}" '
                 f'height="{PANEL_H}"/></clipPath>',
                 f'<rect x="{LEFT}" y="{self.top}" width="{w}" height="{PANEL_H}" '
                 'fill="none" stroke="#000"/>',
                 f'<text x="{LEFT - 55}" y="{self.top + PANEL_H / 2}" font-size="13" '
                 f'transform="rotate(-90 {LEFT - 55} {self.top + PANEL_H / 2})" '
                 f'text-anchor="middle">{escape(self.title)}</text>']
        for t in np.linspace(self.x0, self.x1, 6):
            parts.append(f'<text x="{self.x(t):.2f}" y="{self.top + PANEL_H + 15}" '
                         f'font-size="10" text-anchor="middle">{t:.3g}</text>')
        for t in np.linspace(self.y0, self.y1, 5):
            parts.append(f'<text x="{LEFT - 5}" y="{self.y(t) + 3:.2f}" font-size="10" '
                         f'text-anchor="end">{t:.3g}</text>')
        return parts

    def line(self, eps, vals, style: str, colour: str, clip_id: str) -> str:
        pts = " ".join(f"{self.x(e):.2f},{self.y(v):.2f}" for e, v in zip(eps, vals))
        width = 2.8 if style.startswith("bold") else 1.2
        dash = ' stroke-dasharray="6,4"' if style.endswith("dashed") else ""
        return (f'<polyline points="{pts}" fill="none" stroke="{colour}" '
                f'stroke-width="{width}"{dash} clip-path="url(#{clip_id})"/>')


def emit_figure(run_dir, figure: int, out: Optional[Path] = None) -> Tuple[Path, Path]:
    """Write figure<k>.svg and figure<k>_data.csv for a finished sweep."""
    run_dir = Path(run_dir)
    if figure not in REGIMES:
        raise ConfigError(f"figure must be one of {sorted(REGIMES)}")
    cfg, done, rows = load_run(run_dir)
    if figure_regime(cfg) != figure:
        raise ConfigError(f"figure {figure} needs a {REGIMES[figure]} run; "
                          f"{run_dir} holds a {REGIMES[figure_regime(cfg)]} run")
    tracks = _tracks(rows)
    hidden = _doubles(tracks)
    if not done:
        raise ConfigError(f"{run_dir} holds no completed epsilon values")
    lo, hi = done[0], done[-1]
    preds = _prediction_series(cfg, lo, hi) if hi > lo else []

    data = []
    numeric = []
    for tid, pts in tracks.items():
        if tid in hidden:
            continue
        style = "bold" if tid in hidden.values() else "solid"
        eps = [p[0] for p in pts]
        vals = np.array([p[1] for p in pts])
        krein = pts[-1][2]
        numeric.append((f"track_{tid}", eps, vals, style, KREIN_COLOURS.get(krein, "#222")))
    for name, eps, vals, style, _ in numeric:
        for e, v in zip(eps, vals):
            data.append((name, "numeric", style, "im", e, v.imag))
            data.append((name, "numeric", style, "re", e, v.real))
    for label, eps, vals, style in preds:
        for e, v in zip(eps, vals):
            data.append((label, "prediction", style, "im", e, v.imag))
            data.append((label, "prediction", style, "re", e, v.real))

    num_vals = np.concatenate([n[2] for n in numeric]) if numeric else np.zeros(1, complex)
    x_range = (lo, hi if hi > lo else lo + 1e-3)
    im_panel = _Panel(TOP, x_range, (min(0.0, num_vals.imag.min()), num_vals.imag.max()), "Im λ")
    re_panel = _Panel(TOP + PANEL_H + GAP, x_range,
                      (min(0.0, num_vals.real.min()), max(num_vals.real.max(), 0.0)), "Re λ")

    svg = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}" font-family="sans-serif">',
           f'<rect width="{W}" height="{H}" fill="#fff"/>',
           f'<text x="{W / 2}" y="18" font-size="14" text-anchor="middle">'
           f'{escape(_title(cfg, figure))}</text>']
    for panel, clip, part in ((im_panel, "clip-im", "imag"), (re_panel, "clip-re", "real")):
        svg += panel.frame(clip)
        for name, eps, vals, style, colour in numeric:
            svg.append(panel.line(eps, getattr(vals, part), style, colour, clip))
        for label, eps, vals, style in preds:
            svg.append(panel.line(eps, getattr(vals, part), style, "#555", clip))
    svg.append(f'<text x="{(W + LEFT - RIGHT) / 2}" y="{H - 8}" font-size="13" '
               'text-anchor="middle">ε</text>')
    svg.append("</svg>")

    out = Path(out) if out is not None else run_dir
    out.mkdir(parents=True, exist_ok=True)
    svg_path, data_path = out / f"figure{figure}.svg", out / f"figure{figure}_data.csv"
    svg_path.write_text("\n".join(svg) + "\n")
    store.write_csv(data_path, FIGURE_SCHEMA, FIGURE_COLUMNS,
                    ((s, src, st, pn, store.fmt(e), store.fmt(v)) for s, src, st, pn, e, v in data))
    return svg_path, data_path


def _title(cfg: RunConfig, figure: int) -> str:
    if figure == 1:
        return "scalar vortex cross"
    pair = "(1,1)" if cfg.charges == "++" else "(1,-1)"
    text = f"{pair} vortex cross, beta={cfg.beta:g}, omega={cfg.omega:g}"
    if figure == 4:
        text += f", delta={cfg.delta:.4g}"
    return text
