"""Linear stability of vortex crosses.

Perturbations u = Phi + a e^{lambda t}, with the conjugate slot carried
separately, give H phi = i lambda sigma phi where H is the Hermitian
linearization of the stationary system and sigma = diag(1, -1, ...). We solve
the dense standard problem for sigma H and set lambda = -i eig(sigma H).

Unknowns are interleaved per node: (a, conj a) in the scalar model and
(phi, conj phi, psi, conj psi) in the vector model, nodes in the lattice
flattening order.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import linear_sum_assignment
from scipy.spatial import cKDTree

from .errors import NumericalError, StaleStateError
from .lattice import LatticeField, VortexSpec
from .stationary import StationaryState, _linear_operators, solve_at

log = logging.getLogger(__name__)

STALE_TOL = 1e-9
ZERO_TOL = 1e-8
NEG_TOL = 1e-10
HH_TOL = 1e-6
IMAG_AXIS_TOL = 1e-7
CLUSTER_TOL = 1e-6
RANK_TOL = 1e-6
SNAP_RADIUS = 1e-3
ZERO_GAP = 0.1
PART_SNAP = 1e-12
BAND_MARGIN = 1e-9


@dataclass(frozen=True)
class LinearizedOperators:
    H: np.ndarray
    sigma: np.ndarray
    H_sparse: sp.csr_matrix
    spec: VortexSpec

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    @property
    def norm_inf(self) -> float:
        return float(np.max(np.sum(np.abs(self.H), axis=1)))

    def sigma_matrix(self) -> np.ndarray:
        return np.diag(self.sigma.astype(float))

    def hermitian_defect(self) -> float:
        return float(np.max(np.sum(np.abs(self.H - self.H.conj().T), axis=1)))


def assemble_operators(state: StationaryState, stale_tol: float = STALE_TOL) -> LinearizedOperators:
    """Hermitian linearization H and the symplectic signature sigma at ``state``."""
    if not np.isfinite(state.residual_norm) or state.residual_norm > stale_tol:
        raise StaleStateError(
            f"state at eps={state.epsilon} has residual {state.residual_norm:.3g} > {stale_tol:g}")
    spec = state.spec
    A, B = _linear_operators(state.field, spec)
    C = spec.n_components
    nn = spec.grid.n_nodes
    # block form acting on (z, conj z) with z component-major
    block = sp.bmat([[A, B], [B.conj(), A.conj()]], format="coo")
    # position in block form -> interleaved position node*2C + 2c + slot
    pos = np.arange(2 * C * nn)
    slot, rest = np.divmod(pos, C * nn)
    comp, node = np.divmod(rest, nn)
    perm = node * 2 * C + 2 * comp + slot
    H = sp.csr_matrix((block.data, (perm[block.row], perm[block.col])), shape=block.shape)
    sigma = np.tile([1, -1], C * nn)
    return LinearizedOperators(H.toarray(), sigma, H, spec)


@dataclass(frozen=True)
class KreinEntry:
    eigenvalue: complex
    sign: int


@dataclass(frozen=True)
class SpectrumReport:
    epsilon: float
    eigenvalues: np.ndarray
    raw_eigenvalues: np.ndarray
    krein: Tuple[KreinEntry, ...]
    zero_algebraic: int
    zero_geometric: int
    n_negative_H: int
    n_constraints: int
    max_real_part: float
    h_eigenvalues: np.ndarray
    zero_cluster: int

    def krein_sign(self, lam: complex, tol: float = 1e-6) -> Optional[int]:
        """Signature of the tabulated eigenvalue closest to ``lam`` (or its mirror)."""
        lam = complex(lam)
        cand = complex(abs(lam.real) if abs(lam.real) < tol else lam.real, abs(lam.imag))
        best, dist = None, tol
        for k in self.krein:
            d = abs(k.eigenvalue - cand)
            if d <= dist:
                best, dist = k.sign, d
        return best

    def representatives(self) -> np.ndarray:
        """One eigenvalue per symmetry orbit: Im > 0, or real with Re > 0."""
        ev = self.eigenvalues
        keep = (ev.imag > 0) | ((ev.imag == 0) & (ev.real > 0))
        return ev[keep]

    def index_balance(self, tol: float = HH_TOL) -> Tuple[int, int]:
        """(n_negative_H - n_constraints, k_r + k_c + 2 k_i^-)."""
        ev = self.eigenvalues
        k_r = int(np.sum((ev.real > tol) & (np.abs(ev.imag) <= tol)))
        k_c = int(np.sum((ev.real > tol) & (np.abs(ev.imag) > tol)))
        k_i = sum(1 for k in self.krein if k.sign < 0)
        return self.n_negative_H - self.n_constraints, k_r + k_c + 2 * k_i


def n_constraints(spec: VortexSpec) -> int:
    """Gauge constraints subtracted from the negative index."""
    if spec.model == "scalar":
        return 1
    return 2 if spec.beta < 1 else 1


def band_edge(spec: VortexSpec) -> float:
    """Lower edge of the continuous spectrum |Im lambda| of the linear lattice."""
    w = 1.0 if spec.model == "scalar" else min(1.0, spec.omega)
    return w if spec.coupling == "laplacian" else w - 4 * spec.epsilon


def _eigvals(M: np.ndarray) -> np.ndarray:
    try:
        ev = la.eigvals(M, overwrite_a=False, check_finite=True)
    except (la.LinAlgError, ValueError) as exc:
        raise NumericalError(f"dense eigensolve failed: {exc}", _condition(M)) from exc
    if not np.all(np.isfinite(ev)):
        raise NumericalError("eigensolver returned non-finite values", _condition(M))
    return ev


def _condition(M: np.ndarray) -> float:
    try:
        return float(np.linalg.cond(M))
    except Exception:  # the report is best effort
        return float("nan")


def zero_multiplicities(ops: LinearizedOperators, h_vals: np.ndarray, tol: float) -> Tuple[int, int]:
    """Geometric and algebraic multiplicity of the zero eigenvalue of sigma H.

    The kernel K of H has the dimension read off its eigenvalues; a basis comes
    from block inverse iteration. Generalized kernels grow by
    V_{k+1} = K + H^+ sigma (V_k intersected with the sigma-preimage of range H);
    since range H is orthogonal to K, the admissible directions are the null
    space of K^* sigma V_k. These decisions involve O(1) Gram entries rather
    than eigenvalues split by a Jordan block, so they are insensitive to the
    sqrt(machine eps) scatter of a defective zero eigenvalue.
    """
    n0 = int(np.sum(np.abs(h_vals) < tol))
    if n0 == 0:
        return 0, 0
    n = ops.dim
    sigma = ops.sigma.astype(float)
    shift = 1e-12 * (1 + ops.norm_inf)
    lu = spla.splu((ops.H_sparse - shift * sp.identity(n, format="csc")).tocsc())
    rng = np.random.default_rng(2024)
    K = rng.standard_normal((n, n0)) + 1j * rng.standard_normal((n, n0))
    for _ in range(4):
        K, _ = np.linalg.qr(lu.solve(K))
    V = K
    for _ in range(n):
        G = K.conj().T @ (sigma[:, None] * V)
        _, s, vh = la.svd(G)
        rank = int(np.sum(s > RANK_TOL * max(1.0, s[0])))
        if V.shape[1] == rank:
            break
        Y = sigma[:, None] * (V @ vh[rank:].conj().T)
        Y -= K @ (K.conj().T @ Y)
        # kernel components of the near-singular solve stay inside span K
        X = lu.solve(Y)
        Vn = la.orth(np.hstack([K, X]))
        if Vn.shape[1] <= V.shape[1]:
            break
        V = Vn
    return n0, V.shape[1]


def _snap_zero(ev: np.ndarray, n_zero: int) -> np.ndarray:
    """Indices of the eigenvalues that represent the zero eigenvalue.

    A defective zero eigenvalue is scattered by roughly machine eps to the
    power 1/(block size), which can exceed 1e-6. We take the k <= n_zero
    eigenvalues nearest the origin for the largest k that is separated from
    the rest of the spectrum by a factor ZERO_GAP in modulus.
    """
    order = np.argsort(np.abs(ev), kind="stable")
    mags = np.abs(ev[order])
    for k in range(min(n_zero, ev.size), 0, -1):
        if mags[k - 1] < SNAP_RADIUS and (k == ev.size or mags[k - 1] <= ZERO_GAP * mags[k]):
            return order[:k]
    return order[:0]


def _symmetrize(ev: np.ndarray, n_zero: int) -> np.ndarray:
    """Average each eigenvalue over its images under lambda -> -lambda, +-conj(lambda)."""
    ev = np.array(ev, dtype=complex)
    zero = _snap_zero(ev, n_zero)
    ev[zero] = 0.0
    pts = np.column_stack([ev.real, ev.imag])
    tree = cKDTree(pts)

    def partner(z):
        _, idx = tree.query(np.column_stack([z.real, z.imag]))
        return ev[idx]

    out = (ev - partner(-ev) + np.conj(partner(np.conj(ev))) - np.conj(partner(-np.conj(ev)))) / 4
    out[zero] = 0.0
    scale = PART_SNAP * (1 + np.abs(out))
    out.real[np.abs(out.real) < scale] = 0.0
    out.imag[np.abs(out.imag) < scale] = 0.0
    return out + 0.0


def _sort_key(ev: np.ndarray) -> np.ndarray:
    return np.lexsort((ev.imag, ev.real, np.round(np.abs(ev.imag), 14)))


def _krein_signs(ops: LinearizedOperators, ev: np.ndarray, radius: float) -> Tuple[KreinEntry, ...]:
    """Krein signatures of the purely imaginary eigenvalues with 0 < Im < radius.

    Eigenvectors come from shift-inverted block inverse iteration with a sparse
    LU factorization; near-degenerate eigenvalues share one invariant subspace
    and are separated by Rayleigh-Ritz before evaluating (phi, H phi).
    """
    cand = np.sort(ev[(np.abs(ev.real) < IMAG_AXIS_TOL) & (ev.imag > ZERO_TOL)
                      & (ev.imag < radius)].imag)
    if cand.size == 0:
        return ()
    groups: List[List[float]] = [[cand[0]]]
    for y in cand[1:]:
        if y - groups[-1][-1] < CLUSTER_TOL:
            groups[-1].append(y)
        else:
            groups.append([y])
    n = ops.dim
    S = sp.diags(ops.sigma.astype(float)) @ ops.H_sparse
    eye = sp.identity(n, format="csc", dtype=complex)
    rng = np.random.default_rng(12345)
    entries = []
    for g in groups:
        k = len(g)
        # sigma H phi = i lambda phi with lambda = i y  ->  eigenvalue -y
        mu = -float(np.mean(g)) + 1e-11 * (1 + abs(np.mean(g)))
        lu = spla.splu((S - mu * eye).tocsc())
        X = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
        for _ in range(4):
            X, _ = np.linalg.qr(lu.solve(X))
        C = X.conj().T @ (S @ X)
        w, Y = la.eig(C)
        Phi = X @ Y
        for j in np.argsort(-w.real):
            lam = complex(0.0, -w[j].real)
            v = Phi[:, j]
            q = float(np.real(v.conj() @ (ops.H_sparse @ v))) / float(np.real(v.conj() @ v))
            sign = 0 if abs(q) < 1e-12 else int(math.copysign(1, q))
            entries.append(KreinEntry(lam, sign))
    entries.sort(key=lambda e: e.eigenvalue.imag)
    return tuple(entries)


def solve_spectrum(ops: LinearizedOperators, krein_radius: Optional[float] = None,
                   zero_tol: float = ZERO_TOL) -> SpectrumReport:
    """Full spectrum of sigma H with kernel counts, negative index and Krein signs.

    ``krein_radius`` bounds |Im lambda| for the Krein computation; by default
    it reaches slightly past the lower edge of the continuous band, which
    covers every negative-signature eigenvalue. Pass 0 to skip it.
    """
    spec = ops.spec
    tol = zero_tol * (1 + ops.norm_inf)
    raw = -1j * _eigvals(ops.sigma[:, None] * ops.H)
    try:
        h_vals = la.eigvalsh(ops.H)
    except la.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigensolve failed: {exc}", _condition(ops.H)) from exc
    geo, alg = zero_multiplicities(ops, h_vals, tol)
    ev = _symmetrize(raw, alg)
    ev = ev[_sort_key(ev)]
    if krein_radius is None:
        krein_radius = max(band_edge(spec), 0.0) + 0.05
    krein = _krein_signs(ops, ev, krein_radius) if krein_radius > 0 else ()
    return SpectrumReport(
        epsilon=spec.epsilon,
        eigenvalues=ev,
        raw_eigenvalues=raw,
        krein=krein,
        zero_algebraic=alg,
        zero_geometric=geo,
        n_negative_H=int(np.sum(h_vals < -NEG_TOL)),
        n_constraints=n_constraints(spec),
        max_real_part=float(np.max(np.abs(ev.real))),
        h_eigenvalues=h_vals,
        zero_cluster=int(np.sum(np.abs(raw) < tol)),
    )


def spectrum_of(state: StationaryState, **kwargs) -> SpectrumReport:
    return solve_spectrum(assemble_operators(state), **kwargs)


# --- branch tracking ---------------------------------------------------------

@dataclass
class Track:
    track_id: int
    eps: List[float] = field(default_factory=list)
    values: List[complex] = field(default_factory=list)
    krein: List[Optional[int]] = field(default_factory=list)

    def at(self, eps: float, tol: float = 1e-12) -> Optional[complex]:
        for e, v in zip(self.eps, self.values):
            if abs(e - eps) <= tol:
                return v
        return None

    def predict(self) -> complex:
        if len(self.values) >= 2 and self.eps[-1] > self.eps[-2]:
            t = 1.0
            return self.values[-1] + t * (self.values[-1] - self.values[-2])
        return self.values[-1]


@dataclass(frozen=True)
class PairingWarning:
    eps: float
    track_ids: Tuple[int, ...]
    message: str


@dataclass
class Branch:
    states: List[StationaryState]
    reports: List[SpectrumReport]
    tracks: Dict[int, Track]
    warnings: List[PairingWarning]

    @property
    def eps(self) -> List[float]:
        return [r.epsilon for r in self.reports]

    def double_tracks(self, tol: float = 1e-6) -> List[Tuple[int, int]]:
        """Pairs of tracks that coincide wherever both exist (bold curves)."""
        out = []
        ids = sorted(self.tracks)
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                ta, tb = self.tracks[a], self.tracks[b]
                common = [(va, tb.at(e)) for e, va in zip(ta.eps, ta.values) if tb.at(e) is not None]
                if len(common) >= 2 and all(abs(x - y) < tol for x, y in common if x != 0):
                    out.append((a, b))
        return out


def parallel_map(fn: Callable, items: Sequence, workers: int = 1) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _tracked_values(report: SpectrumReport, spec: VortexSpec, cutoff: Optional[float]) -> np.ndarray:
    reps = report.representatives()
    # the finite-lattice band sits strictly above its edge; stay below it
    limit = cutoff if cutoff is not None else max(band_edge(spec), 0.0) - BAND_MARGIN
    keep = (np.abs(reps.imag) < limit) | (np.abs(reps.real) > HH_TOL)
    return reps[keep]


def track_branch(states: Sequence[StationaryState], radius: Optional[float] = None,
                 cutoff: Optional[float] = None, workers: int = 1,
                 reports: Optional[Sequence[SpectrumReport]] = None,
                 krein_radius: Optional[float] = None) -> Branch:
    """Spectra along a continuation branch with persistent eigenvalue ids.

    Consecutive spectra are matched by minimum total distance to each track's
    linear extrapolation. Unmatched eigenvalues (farther than ``radius``)
    open new tracks. Only eigenvalues below the continuous band (or off the
    imaginary axis) are tracked unless ``cutoff`` overrides the band edge.
    The default radius is 0.01 + 4 * (median eps step).
    """
    states = list(states)
    if radius is None:
        steps = np.diff([s.epsilon for s in states])
        radius = 0.01 + 4 * (float(np.median(steps)) if steps.size else 0.0)
    if reports is None:
        reports = parallel_map(lambda s: spectrum_of(s, krein_radius=krein_radius), states, workers)
    reports = list(reports)
    tracks: Dict[int, Track] = {}
    warns: List[PairingWarning] = []
    live: List[int] = []
    for st, rep in zip(states, reports):
        vals = _tracked_values(rep, st.spec, cutoff)
        vals = vals[_sort_key(vals)]
        krs = [rep.krein_sign(v) for v in vals]
        if not live:
            assigned = {}
        else:
            pred = np.array([tracks[t].predict() for t in live])
            D = np.abs(pred[:, None] - vals[None, :]) if vals.size else np.zeros((len(live), 0))
            rows, cols = linear_sum_assignment(D) if vals.size else ([], [])
            assigned = {c: live[r] for r, c in zip(rows, cols) if D[r, c] <= radius}
            for r, t in enumerate(live):
                near = np.flatnonzero(D[r] <= radius) if vals.size else []
                if len(near) >= 2 and np.ptp(vals[near].real) + np.ptp(vals[near].imag) > CLUSTER_TOL:
                    warns.append(PairingWarning(rep.epsilon, (t,) + tuple(
                        assigned.get(c, -1) for c in near if assigned.get(c, -1) != t),
                        f"{len(near)} candidates within radius {radius}"))
        new_live = []
        for c, v in enumerate(vals):
            tid = assigned.get(c)
            if tid is None:
                tid = len(tracks)
                tracks[tid] = Track(tid)
            tr = tracks[tid]
            tr.eps.append(rep.epsilon)
            tr.values.append(complex(v))
            tr.krein.append(krs[c])
            new_live.append(tid)
        live = new_live
    for w in warns:
        log.debug("pairing ambiguity at eps=%g: %s", w.eps, w.message)
    return Branch(states, reports, tracks, warns)


# --- Hamiltonian-Hopf detection ---------------------------------------------

@dataclass(frozen=True)
class HHEvent:
    eps_star: float
    colliding_pair_ids: Tuple[int, int]
    post_collision: str
    bracket: Tuple[float, float] = (math.nan, math.nan)


def _max_re_at(spec: VortexSpec, lo: StationaryState, hi: StationaryState, eps: float):
    t = (eps - lo.epsilon) / (hi.epsilon - lo.epsilon)
    z = (1 - t) * lo.field.flat() + t * hi.field.flat()
    guess = LatticeField.from_flat(z, spec.grid, spec.n_components)
    st = solve_at(spec.with_epsilon(eps), guess)
    return st, solve_spectrum(assemble_operators(st), krein_radius=0)


def detect_hh(branch: Branch, tol: float = HH_TOL, resolution: float = 1e-4) -> List[HHEvent]:
    """Stability-loss events along ``branch`` located by bisection on max Re lambda.

    A branch that is already unstable at its first point has no crossing there.
    """
    events = []
    mr = [r.max_real_part for r in branch.reports]
    for i in range(1, len(mr)):
        if not (mr[i - 1] <= tol < mr[i]):
            continue
        lo, hi = branch.states[i - 1], branch.states[i]
        hi_rep = branch.reports[i]
        spec = hi.spec
        while hi.epsilon - lo.epsilon > resolution:
            mid = 0.5 * (lo.epsilon + hi.epsilon)
            st, rep = _max_re_at(spec, lo, hi, mid)
            if rep.max_real_part > tol:
                hi, hi_rep = st, rep
            else:
                lo = st
        events.append(HHEvent(0.5 * (lo.epsilon + hi.epsilon), _colliding_ids(branch, i, tol),
                              _classify(hi_rep, tol), (lo.epsilon, hi.epsilon)))
    return events


def _classify(rep: SpectrumReport, tol: float) -> str:
    ev = rep.eigenvalues
    lead = ev[np.argmax(ev.real)]
    return "complex-quartet" if abs(lead.imag) > tol else "real-pair"


def _colliding_ids(branch: Branch, i: int, tol: float) -> Tuple[int, int]:
    eps = branch.reports[i].epsilon
    cands = []
    for tid, tr in branch.tracks.items():
        v = tr.at(eps)
        if v is not None and abs(v.real) > tol:
            cands.append((v.real, tid))
    if not cands:
        return (-1, -1)
    cands.sort()
    return (cands[-1][1], cands[0][1]) if len(cands) > 1 else (cands[0][1], cands[0][1])


from .dynamics import validate_growth_rate  # noqa: E402  (re-export)
