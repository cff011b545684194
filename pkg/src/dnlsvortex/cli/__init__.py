"""Command line: ``dnlsvortex {continue,sweep,figure,verify,predict}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Dict, List, Optional

from ..errors import ConfigError, VortexError
from .config import EMIT_CHOICES, OUT_ENV, RunConfig, load_config

log = logging.getLogger("dnlsvortex")


def _emit_list(text: str):
    items = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [s for s in items if s not in EMIT_CHOICES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown emit flag(s) {bad}; choose from {EMIT_CHOICES}")
    return items


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration (overrides --config)")
    g.add_argument("--config", help="JSON run configuration")
    g.add_argument("--model", choices=("scalar", "vector"))
    g.add_argument("--charges", choices=("++", "+-"), help="(1,1) or (1,-1) for the vector model")
    g.add_argument("--beta", type=float)
    g.add_argument("--omega", type=float)
    g.add_argument("--delta", type=float, help="polarization angle for beta = 1")
    g.add_argument("--coupling", choices=("hop", "laplacian"))
    g.add_argument("--eps-start", type=float, dest="eps_start")
    g.add_argument("--eps-stop", type=float, dest="eps_stop")
    g.add_argument("--eps-step", type=float, dest="eps_step")
    g.add_argument("--grid-n", type=int, dest="grid_n", help="lattice half-width N")
    g.add_argument("--out", help=f"output directory (relative paths go under ${OUT_ENV})")
    g.add_argument("--emit", type=_emit_list, help="comma list of csv,json,svg")
    g.add_argument("--seed-order", type=int, dest="seed_order")
    g.add_argument("--workers", type=int)
    g.add_argument("-v", "--verbose", action="count", default=0)
    return p


OVERRIDES = ("model", "charges", "beta", "omega", "delta", "coupling", "eps_start", "eps_stop",
             "eps_step", "grid_n", "out", "emit", "seed_order", "workers")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="dnlsvortex", description="Vortex crosses in discrete NLS lattices: continuation, "
        "spectral stability and asymptotic predictions.")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("continue", parents=[common], help="solve at a single epsilon")
    c.add_argument("--eps", type=float, help="target epsilon (default: --eps-stop)")
    c.add_argument("--spectrum", action="store_true", help="also compute the spectrum")

    s = sub.add_parser("sweep", parents=[common], help="continue and analyse over an eps grid")
    s.add_argument("--resume", action="store_true", help="continue from manifest.json")

    f = sub.add_parser("figure", parents=[common], help="SVG and plot data from a sweep")
    f.add_argument("--figure", type=int, choices=(1, 2, 3, 4))
    f.add_argument("--run-dir", help="sweep directory (default: the configured output)")

    v = sub.add_parser("verify", parents=[common], help="acceptance checks for the regime")
    v.add_argument("--criteria", help="comma list of criterion numbers (overrides the regime)")
    v.add_argument("--all", action="store_true", help="run every criterion")
    v.add_argument("--json-out", help="also write the report to this file")

    p = sub.add_parser("predict", parents=[common], help="print leading-order eigenvalues")
    p.add_argument("--eps", type=float, nargs="*", help="epsilon values (default: the grid)")
    return parser


def _config(args) -> RunConfig:
    return load_config(args.config, {k: getattr(args, k, None) for k in OVERRIDES})


def _cmd_continue(args, cfg: RunConfig) -> int:
    from . import store
    from .sweep import continue_single

    eps = cfg.eps_stop if args.eps is None else args.eps
    st = continue_single(cfg, eps)
    out = cfg.out_dir()
    store._dump(out / "states" / f"eps_{store.eps_tag(eps)}.json", store.state_to_json(st))
    summary = {"epsilon": eps, "residual_norm": st.residual_norm, "newton_iters": st.newton_iters}
    if args.spectrum:
        from ..spectrum import spectrum_of

        rep = spectrum_of(st)
        store._dump(out / "reports" / f"eps_{store.eps_tag(eps)}.json", store.report_to_json(rep))
        summary.update(max_real_part=rep.max_real_part, zero_algebraic=rep.zero_algebraic,
                       zero_geometric=rep.zero_geometric, n_negative_H=rep.n_negative_H)
    print(json.dumps(summary, indent=2))
    return 0


def _cmd_sweep(args, cfg: RunConfig) -> int:
    from .figures import emit_figure, figure_regime
    from .sweep import run_sweep

    res = run_sweep(cfg, resume=args.resume)
    if res.status == "complete" and "svg" in cfg.emit:
        emit_figure(res.out, figure_regime(cfg))
    print(json.dumps({"status": res.status, "last_good_eps": res.last_good_eps,
                      "out": str(res.out), "hh_events": len(res.hh_events)}, indent=2))
    return res.exit_code


def _cmd_figure(args, cfg: RunConfig) -> int:
    from pathlib import Path

    from .figures import emit_figure, load_run, figure_regime

    run_dir = Path(args.run_dir) if args.run_dir else cfg.out_dir()
    figure = args.figure
    if figure is None:
        figure = figure_regime(load_run(run_dir)[0])
    svg, data = emit_figure(run_dir, figure)
    print(f"{svg}\n{data}")
    return 0


def _cmd_verify(args, cfg: RunConfig) -> int:
    from .criteria import CRITERIA, criteria_for, verify

    if args.all:
        numbers = sorted(CRITERIA)
    elif args.criteria:
        try:
            numbers = [int(x) for x in args.criteria.split(",") if x.strip()]
        except ValueError as exc:
            raise ConfigError(f"--criteria expects integers: {args.criteria}") from exc
        unknown = [n for n in numbers if n not in CRITERIA]
        if unknown:
            raise ConfigError(f"unknown criteria {unknown}")
    else:
        numbers = criteria_for(cfg.model, cfg.beta)
    report = verify(numbers, echo=lambda line: print(line, file=sys.stderr, flush=True))
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def _cmd_predict(args, cfg: RunConfig) -> int:
    from .. import lsred

    eps_values = args.eps if args.eps else cfg.eps_grid()
    rows: List[Dict] = []
    for eps in eps_values:
        for p in lsred.evaluate(cfg.spec(eps)):
            v = complex(p.value)
            rows.append({"eps": eps, "label": p.label, "kind": p.kind, "order": p.order,
                         "re": v.real, "im": v.imag, "krein": p.krein})
    print(json.dumps(rows, indent=2))
    return 0


COMMANDS = {"continue": _cmd_continue, "sweep": _cmd_sweep, "figure": _cmd_figure,
            "verify": _cmd_verify, "predict": _cmd_predict}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except VortexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
