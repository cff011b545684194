"""Acceptance criteria as data: each check reports measured, expected, tolerance, pass.

The same functions back ``dnlsvortex verify`` and tests/test_acceptance.py.
Continued states and spectra are cached per VortexSpec so checks that share
a configuration share the work.

Small-epsilon comparisons use bare hopping, in which the leading-order
formulas are stated. The Hamiltonian-Hopf thresholds are located with the
Laplacian coupling (onsite 4 eps shift), the convention in which those
thresholds are quoted; see lattice.VortexSpec.coupling.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .. import lsred
from ..dynamics import integrate_growth
from ..lattice import GridShape, S0_NODES, VortexSpec
from ..spectrum import (SpectrumReport, assemble_operators, band_edge, detect_hh,
                        spectrum_of, track_branch)
from ..stationary import (StationaryState, check_nondegeneracy, newton_continue,
                          residual_norm, series_field, series_terms)

GRID = GridShape(10)
HH_GRID_SCALAR = GridShape(14)
HH_TOL = 1e-6
GROWTH_TOL = 1e-4


@dataclass
class Check:
    id: str
    criterion: int
    description: str
    measured: object
    expected: object
    tolerance: object
    passed: bool

    def to_json(self) -> dict:
        return {"criterion": self.criterion, "description": self.description,
                "measured": _plain(self.measured), "expected": _plain(self.expected),
                "tolerance": _plain(self.tolerance), "pass": bool(self.passed)}


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: List[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failing = [c.id for c in self.checks if not c.passed]
        tail = f" (failing: {', '.join(failing)})" if failing else ""
        return f"[{status}] criterion {self.number:2d} {self.title} [{self.seconds:.1f}s]{tail}"


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_plain(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


# --- shared computations -----------------------------------------------------

def scalar(eps: float, grid: GridShape = GRID, coupling: str = "hop") -> VortexSpec:
    return VortexSpec("scalar", epsilon=eps, grid=grid, coupling=coupling)


def vector(beta: float, pair, eps: float, delta: Optional[float] = None, coupling: str = "hop",
           grid: GridShape = GRID) -> VortexSpec:
    return VortexSpec("vector", tuple(pair), beta, 1.0, delta, eps, grid, coupling)


@lru_cache(maxsize=None)
def state_at(spec: VortexSpec) -> StationaryState:
    return newton_continue(spec, spec.epsilon, step=0.01)[-1]


@lru_cache(maxsize=None)
def report_at(spec: VortexSpec) -> SpectrumReport:
    return spectrum_of(state_at(spec))


def clear_cache() -> None:
    state_at.cache_clear()
    report_at.cache_clear()


def below_band(rep: SpectrumReport, spec: VortexSpec) -> np.ndarray:
    reps = rep.representatives()
    return reps[(np.abs(reps.imag) < band_edge(spec)) | (np.abs(reps.real) > HH_TOL)]


def match_predictions(spec: VortexSpec, rep: SpectrumReport,
                      labels: Optional[Sequence[str]] = None) -> List[dict]:
    """Assign each nonzero predicted eigenvalue to one numerical representative."""
    preds = [p for p in lsred.evaluate(spec) if p.kind == "eigenvalue" and p.value != 0
             and (labels is None or p.label in labels)]
    vals = below_band(rep, spec)
    D = np.abs(np.array([p.value for p in preds])[:, None] - vals[None, :])
    rows, cols = linear_sum_assignment(D)
    out = []
    for r, c in zip(rows, cols):
        p = preds[r]
        out.append({"label": p.label, "order": p.order, "predicted": p.value,
                    "numeric": complex(vals[c]),
                    "abs_error": float(abs(vals[c] - p.value)),
                    "rel_error": float(abs(vals[c] - p.value) / abs(p.value))})
    return out


def hh_threshold(base: VortexSpec, scan: Sequence[float], tol: float = HH_TOL) -> Dict[str, float]:
    """First stability loss along the branch, bracketed on ``scan`` then bisected."""
    scan = sorted(scan)
    states = newton_continue(base, scan[-1], step=0.01)
    picked = [next(s for s in states if abs(s.epsilon - e) < 1e-9) for e in scan]
    reports = [spectrum_of(s, krein_radius=0) for s in picked]
    branch = track_branch(picked, reports=reports)
    events = detect_hh(branch, tol=tol)
    first = events[0] if events else None
    return {"eps_star": first.eps_star if first else math.nan,
            "kind": first.post_collision if first else "none",
            "stable_at_start": reports[0].max_real_part <= tol}


def _rel_slope(eps: Sequence[float], errs: Sequence[float]) -> float:
    return float(np.polyfit(np.log(eps), np.log(errs), 1)[0])


# --- criteria ------------------------------------------------------------------

def criterion_1() -> List[Check]:
    eps_list = (0.01, 0.02, 0.04)
    lin, quad, lin_err, quad_err, secs = [], [], [], [], []
    for eps in eps_list:
        t0 = time.perf_counter()
        spec = scalar(eps)
        m = match_predictions(spec, report_at(spec))
        secs.append(time.perf_counter() - t0)
        l1 = [x for x in m if x["order"] == 1]
        l2 = [x for x in m if x["order"] == 2]
        lin.append(max(x["rel_error"] for x in l1))
        quad.append(max(x["rel_error"] for x in l2))
        lin_err.append(max(x["abs_error"] for x in l1))
        quad_err.append(max(x["abs_error"] for x in l2))
    s1, s2 = _rel_slope(eps_list, lin_err), _rel_slope(eps_list, quad_err)
    return [
        Check("scalar_linear_pairs", 1, "two pairs near 2i eps, max relative error",
              max(lin), 0.0, 0.05, max(lin) <= 0.05),
        Check("scalar_quadratic_pair", 1, "pair near 4i eps^2, max relative error",
              max(quad), 0.0, 0.15, max(quad) <= 0.15),
        Check("scalar_slope_linear", 1, "log-log slope of the O(eps) pair errors",
              s1, "> 1.7", 1.7, s1 > 1.7),
        Check("scalar_slope_quadratic", 1, "log-log slope of the O(eps^2) pair error",
              s2, "> 2.7", 2.7, s2 > 2.7),
        Check("scalar_runtime", 1, "seconds per eps (continuation + spectrum)",
              max(secs), "< 60", 60.0, max(secs) < 60.0),
    ]


def criterion_2() -> List[Check]:
    t0 = time.perf_counter()
    hh = hh_threshold(scalar(0.0, HH_GRID_SCALAR, "laplacian"),
                      (0.1, 0.2, 0.3, 0.35, 0.4, 0.45, 0.5))
    secs = time.perf_counter() - t0
    e = hh["eps_star"]
    return [
        Check("hh_scalar", 2, "first max|Re lambda| > 1e-6 crossing, N=14",
              e, 0.395, 0.02, hh["stable_at_start"] and abs(e - 0.395) <= 0.02),
        Check("hh_scalar_runtime", 2, "seconds for scan and bisection", secs, "< 1800",
              1800.0, secs < 1800.0),
    ]


def criterion_3() -> List[Check]:
    hidden, double = [], []
    for eps in (0.02, 0.05):
        s1 = vector(2 / 3, (1, -1), eps)
        hidden += match_predictions(s1, report_at(s1))
        s2 = vector(2 / 3, (1, 1), eps)
        double += match_predictions(s2, report_at(s2), labels=("lambda_9,10", "lambda_11,12"))
    h_err = max(x["rel_error"] for x in hidden)
    d_err = max(x["rel_error"] for x in double)
    hh_h = hh_threshold(vector(2 / 3, (1, -1), 0.0, coupling="laplacian"),
                        (0.2, 0.4, 0.45, 0.5, 0.55))
    hh_d = hh_threshold(vector(2 / 3, (1, 1), 0.0, coupling="laplacian"),
                        (0.2, 0.3, 0.35, 0.4, 0.45, 0.5))
    eh, ed = hh_h["eps_star"], hh_d["eps_star"]
    return [
        Check("vector_hidden_pairs", 3, "(1,-1) beta=2/3: six small pairs, max relative error",
              h_err, 0.0, 0.10, h_err <= 0.10),
        Check("vector_double_pairs", 3, "(1,1) beta=2/3: 4i eps^2 and 0.8i eps^2 pairs",
              d_err, 0.0, 0.15, d_err <= 0.15),
        Check("hh_vector_hidden", 3, "(1,-1) beta=2/3 first instability",
              eh, 0.495, 0.03, hh_h["stable_at_start"] and abs(eh - 0.495) <= 0.03),
        Check("hh_vector_double", 3, "(1,1) beta=2/3 first instability",
              ed, 0.395, 0.02, hh_d["stable_at_start"] and abs(ed - 0.395) <= 0.02),
        Check("hidden_wider_window", 3, "hh(1,-1) > hh(1,1)",
              {"hidden": eh, "double": ed}, "hidden > double", 0.0, eh > ed),
    ]


def criterion_4() -> List[Check]:
    eps_list = (0.02, 0.04, 0.06, 0.08, 0.1)
    min_growth, quartet, real_tracks = {}, False, {}
    for pair in ((1, 1), (1, -1)):
        specs = [vector(2.0, pair, e) for e in eps_list]
        branch = track_branch([state_at(s) for s in specs], reports=[report_at(s) for s in specs])
        min_growth[str(pair)] = min(r.max_real_part for r in branch.reports)
        n_real = 0
        for tr in branch.tracks.values():
            v = np.array(tr.values)
            if np.any((np.abs(v.real) > GROWTH_TOL) & (np.abs(v.imag) <= GROWTH_TOL)):
                n_real += 1
            if pair == (1, 1) and np.any((np.abs(v.real) > GROWTH_TOL)
                                         & (np.abs(v.imag) > GROWTH_TOL)):
                quartet = True
        real_tracks[str(pair)] = n_real
    excess = real_tracks["(1, -1)"] - real_tracks["(1, 1)"]
    return [
        Check("beta2_unstable", 4, "min over eps in [0.02, 0.1] of max Re lambda, both pairs",
              min_growth, "> 1e-4", 1e-4, all(v > GROWTH_TOL for v in min_growth.values())),
        Check("beta2_quartet", 4, "(1,1) has a track with |Re| and |Im| > 1e-4",
              quartet, True, 1e-4, quartet),
        Check("beta2_extra_real_pairs", 4, "real-pair tracks (1,-1) minus (1,1)",
              {"counts": real_tracks, "excess": excess}, ">= 2", 2, excess >= 2),
    ]


def criterion_5() -> List[Check]:
    eps_list = (0.02, 0.05, 0.08)
    d = math.pi / 4
    stable = max(report_at(vector(1.0, (1, 1), e, d)).max_real_part for e in eps_list)
    errs = []
    for e in eps_list:
        ev = report_at(vector(1.0, (1, -1), e, d)).eigenvalues
        real = np.sort(ev[(np.abs(ev.imag) < HH_TOL) & (ev.real > HH_TOL)].real)[::-1]
        target = 2 * math.sqrt(3) * e ** 2
        top = real[:2] if real.size >= 2 else np.array([0.0, 0.0])
        errs.append(float(np.max(np.abs(top - target)) / target))
    alg = report_at(vector(1.0, (1, -1), 0.05, d)).zero_algebraic
    return [
        Check("manakov_11_stable", 5, "(1,1) delta=pi/4 max Re lambda over eps <= 0.08",
              stable, "< 1e-6", 1e-6, stable < 1e-6),
        Check("manakov_hidden_real_pair", 5, "(1,-1) delta=pi/4 double real pair vs 2 sqrt3 eps^2",
              max(errs), 0.0, 0.10, max(errs) <= 0.10),
        Check("manakov_hidden_kernel", 5, "(1,-1) delta=pi/4 algebraic zero multiplicity",
              alg, 8, 0, alg == 8),
    ]


MANAKOV_DELTAS = {"0": 0.0, "pi/24": math.pi / 24, "pi/12": math.pi / 12, "pi/8": math.pi / 8,
                  "pi/4": math.pi / 4, "3pi/8": 3 * math.pi / 8, "5pi/12": 5 * math.pi / 12,
                  "11pi/24": 11 * math.pi / 24, "pi/2": math.pi / 2}


def criterion_6() -> List[Check]:
    eps = 0.03
    margin = 3 * eps ** 3
    pred, numeric = {}, {}
    for name, d in MANAKOV_DELTAS.items():
        g1, g2_ = lsred.manakov_gamma_roots(d)
        degenerate = g1 == g2_ and abs(complex(g1).imag) == 0 and complex(g1).real < 0
        pred[name] = "unstable" if lsred.manakov_unstable(d) else (
            "marginal" if degenerate else "stable")
        numeric[name] = report_at(vector(1.0, (1, -1), eps, d)).max_real_part
    inside = ("pi/8", "pi/4", "3pi/8")
    ends = ("pi/12", "5pi/12")
    outside = ("0", "pi/24", "11pi/24", "pi/2")
    want = {**{k: "unstable" for k in inside}, **{k: "marginal" for k in ends},
            **{k: "stable" for k in outside}}
    return [
        Check("manakov_interval_prediction", 6, "quartic-root classification per delta",
              pred, want, 0.0, pred == want),
        Check("manakov_interval_interior", 6, "numerical max Re lambda inside (pi/12, 5pi/12)",
              {k: numeric[k] for k in inside}, "> 3 eps^3", margin,
              all(numeric[k] > margin for k in inside)),
        Check("manakov_interval_exterior", 6, "numerical max Re lambda outside [pi/12, 5pi/12]",
              {k: numeric[k] for k in outside}, "< 1e-6", HH_TOL,
              all(numeric[k] < HH_TOL for k in outside)),
        Check("manakov_interval_endpoints", 6, "numerical max Re lambda at pi/12 and 5pi/12",
              {k: numeric[k] for k in ends}, "< 3 eps^3", margin,
              all(numeric[k] < margin for k in ends)),
    ]


def criterion_7() -> List[Check]:
    cases = {
        "kernel_scalar": (scalar(0.05), (2, 1)),
        "kernel_vector": (vector(2 / 3, (1, -1), 0.05), (4, 2)),
        "kernel_manakov_pi_8": (vector(1.0, (1, -1), 0.05, math.pi / 8), (6, None)),
        "kernel_manakov_pi_4": (vector(1.0, (1, -1), 0.05, math.pi / 4), (8, None)),
    }
    out = []
    for cid, (spec, (alg, geo)) in cases.items():
        rep = report_at(spec)
        got = (rep.zero_algebraic, rep.zero_geometric)
        ok = got[0] == alg and (geo is None or got[1] == geo)
        out.append(Check(cid, 7, "(algebraic, geometric) multiplicity of lambda = 0",
                         list(got), [alg, geo], 0, ok))
    return out


def criterion_8() -> List[Check]:
    thetas = np.linspace(0.0, math.pi, 13)
    m2_dev = 0.0
    for th in thetas:
        m, eig = lsred.m2_matrix(float(th))
        want = sorted([0.0, 0.0, -2 + 4 * math.cos(th), -2 - 4 * math.cos(th)])
        m2_dev = max(m2_dev, float(np.max(np.abs(np.sort(np.linalg.eigvalsh(m)) - want))),
                     float(np.max(np.abs(np.array(eig) - want))))
    m4 = lsred.m4_matrix()
    p1, p2 = lsred.P1, lsred.P2
    kern = float(np.max(np.abs(m4 @ p1)))
    quot = float(p2 @ m4 @ p2 / (p2 @ p2))
    prop3 = lsred.prop3_reduced_problem()
    gam = np.linspace(-20, 20, 41)
    quartic = float(max(abs(lsred.manakov_quartic(g, math.pi / 4) - (g - 6) ** 2) for g in gam))
    cross = lsred.PhaseVector.vortex_cross()
    g_cross = float(max(np.max(np.abs(lsred.g2(cross))), np.max(np.abs(lsred.g4(cross)))))
    sign = np.array([(-1) ** j for j in range(1, 5)])
    fam = float(max(np.max(np.abs(lsred.g4(lsred.PhaseVector.asymmetric(th))
                                  - sign * 2 * math.sin(2 * th))) for th in thetas))
    return [
        Check("m2_eigenvalues", 8, "M2(theta) spectrum vs {0,0,-2+-4cos theta}", m2_dev, 0.0,
              1e-12, m2_dev <= 1e-12),
        Check("m4_kernel", 8, "|M4 p1|", kern, 0.0, 1e-12, kern <= 1e-12),
        Check("m4_p2_quotient", 8, "(p2, M4 p2)/(p2, p2)", quot, -8.0, 1e-12,
              abs(quot + 8) <= 1e-12),
        Check("prop3_multiset", 8, "decoupled reduced problem eigenvalues", list(prop3),
              [-2.0, 0.0, 0.0, 6.0], 1e-12,
              bool(np.allclose(prop3, (-2, 0, 0, 6), atol=1e-12, rtol=0))),
        Check("manakov_quartic_pi_4", 8, "quartic(gamma, pi/4) - (gamma - 6)^2 on a grid",
              quartic, 0.0, 1e-12, quartic <= 1e-12),
        Check("g_vanish_on_cross", 8, "max |g2|, |g4| at the vortex cross", g_cross, 0.0,
              1e-12, g_cross <= 1e-12),
        Check("g4_asymmetric_family", 8, "g4 - (-1)^j 2 sin 2theta on the asymmetric family",
              fam, 0.0, 1e-12, fam <= 1e-12),
    ]


def criterion_9() -> List[Check]:
    spec = vector(1.0, (1, -1), 0.05, math.pi / 4)
    st, rep = state_at(spec), report_at(spec)
    fit = integrate_growth(st, rep, horizon=4.0 / rep.max_real_part)
    rel = abs(fit.rate - rep.max_real_part) / rep.max_real_part
    drift = max(fit.power_drift, fit.energy_drift)
    return [
        Check("growth_rate_match", 9, "RK4 growth fit vs spectral max Re lambda",
              {"rk4": fit.rate, "spectral": rep.max_real_part, "rel_error": rel}, 0.0, 0.10,
              rel <= 0.10),
        Check("growth_conservation", 9, "relative power / Hamiltonian drift over the window",
              {"power": fit.power_drift, "energy": fit.energy_drift}, 0.0, 1e-6, drift < 1e-6),
    ]


def load_golden() -> dict:
    text = resources.files("dnlsvortex").joinpath("data/golden.json").read_text()
    return json.loads(text)


GOLDEN_KEYS = ("series_residual_ratio", "scalar_state_eps_0.1", "vector_second_order_radial",
               "nondegeneracy_eps_0.1", "hermitian_defect_eps_0.1", "growth_rate_beta_2",
               "g2_probe", "m2_eigenvalues_pi_3", "beta_2_real_pair_eps_0.1")


def _close(a, b, tol) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


def derived_values() -> Dict[str, dict]:
    """Main-implementation values for every golden entry."""
    out: Dict[str, dict] = {}
    res = [residual_norm(series_field(scalar(e), 2).field, scalar(e)) for e in (0.05, 0.025)]
    out["series_residual_ratio"] = {"residual_eps_0.05": res[0], "residual_eps_0.025": res[1],
                                    "ratio": res[0] / res[1]}
    st = state_at(scalar(0.1))
    out["scalar_state_eps_0.1"] = {
        "cross_modulus": float(np.mean([abs(st.field.at(n)) for n in S0_NODES])),
        "residual": st.residual_norm}
    terms = series_terms(vector(2 / 3, (1, 1), 0.0), 2)
    node = S0_NODES[0]
    sr = [float((np.conj(terms[0].at(node, c) / abs(terms[0].at(node, c)))
                 * terms[2].at(node, c)).real) for c in range(2)]
    out["vector_second_order_radial"] = {"s": sr[0], "r": sr[1]}
    out["nondegeneracy_eps_0.1"] = check_nondegeneracy(st)
    ops = assemble_operators(st)
    out["hermitian_defect_eps_0.1"] = {
        "defect": ops.hermitian_defect(),
        "lowest_h_eigenvalues": [float(x) for x in np.linalg.eigvalsh(ops.H)[:8]]}
    gspec = vector(2.0, (1, -1), 0.05)
    grep_ = report_at(gspec)
    fit = integrate_growth(state_at(gspec), grep_, horizon=4.0 / grep_.max_real_part)
    out["growth_rate_beta_2"] = {"rk4_rate": fit.rate, "spectral_rate": grep_.max_real_part}
    out["g2_probe"] = [float(x) for x in lsred.g2((0.0, math.pi / 3, math.pi, math.pi))]
    out["m2_eigenvalues_pi_3"] = list(lsred.m2_matrix(math.pi / 3)[1])
    mags = [abs(p.value(0.1)) for pair in ((1, 1), (1, -1))
            for p in lsred.predict_vector(2.0, 1.0, pair)
            if p.label in ("lambda_5,6", "lambda_7,8")]
    out["beta_2_real_pair_eps_0.1"] = mags
    return out


def criterion_10() -> List[Check]:
    gold = load_golden()
    main = derived_values()
    checks = [Check("golden_coverage", 10, "every derived example has a committed golden value",
                    sorted(gold), sorted(GOLDEN_KEYS), 0, set(GOLDEN_KEYS) <= set(gold))]
    for key in GOLDEN_KEYS:
        g, tol = gold[key]["value"], gold[key]["tolerance"]
        m = main[key]
        if key == "growth_rate_beta_2":
            # the spectral value is deterministic; the dynamical fit only to the stated 10 %
            dev_s = _close(m["spectral_rate"], g["spectral_rate"], tol)
            dev_d = abs(m["rk4_rate"] - g["rk4_rate"]) / g["rk4_rate"]
            ok = dev_s <= tol and dev_d <= 0.10
            dev = {"spectral": dev_s, "rk4_rel": dev_d}
        elif key == "beta_2_real_pair_eps_0.1":
            dev = _close(m, [g] * len(m), tol)
            ok = dev <= tol
        elif key == "hermitian_defect_eps_0.1":
            dev = {"defect": m["defect"],
                   "eigenvalues": _close(m["lowest_h_eigenvalues"], g["lowest_h_eigenvalues"], tol)}
            ok = m["defect"] < 1e-12 and dev["eigenvalues"] <= tol
        elif key == "scalar_state_eps_0.1":
            dev = _close(m["cross_modulus"], g["cross_modulus"], tol)
            ok = dev <= tol and m["residual"] < 1e-10
        elif key == "nondegeneracy_eps_0.1":
            dev = _close(m, g, tol)
            ok = dev <= tol and m > 1
        elif isinstance(g, dict):
            dev = max(_close(m[k], g[k], tol) for k in g)
            ok = dev <= tol
        else:
            dev = _close(m, g, tol)
            ok = dev <= tol
        checks.append(Check(f"oracle_{key}", 10, gold[key]["oracle"],
                            {"main": m, "deviation": dev}, g, tol, ok))
    return checks


CRITERIA: Dict[int, tuple] = {
    1: ("scalar asymptotics", criterion_1),
    2: ("scalar HH location", criterion_2),
    3: ("vector beta=2/3", criterion_3),
    4: ("vector beta=2", criterion_4),
    5: ("Manakov delta=pi/4", criterion_5),
    6: ("Manakov instability interval", criterion_6),
    7: ("kernel bookkeeping", criterion_7),
    8: ("LS algebra", criterion_8),
    9: ("dynamics cross-check", criterion_9),
    10: ("oracle equivalence", criterion_10),
}


def run_criterion(number: int) -> CriterionResult:
    title, fn = CRITERIA[number]
    t0 = time.perf_counter()
    checks = fn()
    return CriterionResult(number, title, checks, time.perf_counter() - t0)


def criteria_for(model: str, beta: float) -> List[int]:
    """Criteria exercising the regime of a run configuration."""
    if model == "scalar":
        return [1, 2, 7, 8]
    if beta == 1:
        return [5, 6, 7, 9]
    return [3, 7] if beta < 1 else [4]


def verify(numbers: Sequence[int], echo: Optional[Callable[[str], None]] = None) -> Dict[str, dict]:
    report: Dict[str, dict] = {}
    for k in numbers:
        res = run_criterion(k)
        if echo:
            echo(res.line())
        for c in res.checks:
            report[c.id] = c.to_json()
    return report
