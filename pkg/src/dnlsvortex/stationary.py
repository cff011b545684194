"""Stationary vortex-cross states: amplitudes, residuals, series and Newton.

The stationary system is

    (1 - |phi|^2 - beta |psi|^2) phi   = eps * hop(phi)
    (omega - beta |phi|^2 - |psi|^2) psi = eps * hop(psi)

with the scalar equation obtained for psi = 0. Laplacian coupling adds 4 eps
to both onsite frequencies (see ``hop_equivalent``). Newton iterations run on the
real/imaginary split of the unknowns with one phase-gauge row per component.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (ContinuationError, DegenerateLineError, ExistenceDomainError,
                     PreconditionError, ShapeMismatchError, SingularJacobianError,
                     SingularSystemError)
from .lattice import S0_NODES, GridShape, LatticeField, VortexSpec, anti_continuum_seed, hop

log = logging.getLogger(__name__)

NEWTON_TOL = 1e-10
MAX_ITERS = 50
MIN_STEP = 1e-4
ANCHOR_NODE = S0_NODES[0]


@dataclass(frozen=True)
class AmplitudePair:
    a: float
    b: Optional[float] = None


def solve_amplitudes(beta: float, omega: float, delta: Optional[float] = None) -> AmplitudePair:
    """Amplitudes (a, b) on the contour from a^2 + beta b^2 = 1, beta a^2 + b^2 = omega."""
    if beta < 0 or omega <= 0:
        raise ValueError("need beta >= 0 and omega > 0")
    if beta == 1.0:
        if omega != 1.0:
            raise DegenerateLineError("beta = 1 only admits omega = 1")
        if delta is None:
            raise DegenerateLineError("beta = 1 needs the polarization angle delta")
        return AmplitudePair(math.cos(delta), math.sin(delta))
    lo, hi = (min(beta, 1 / beta), max(beta, 1 / beta)) if beta else (0.0, math.inf)
    if not lo <= omega <= hi:
        raise ExistenceDomainError(f"omega={omega} outside [{lo}, {hi}] for beta={beta}")
    # clamp roundoff at the ends of the interval, where one amplitude vanishes
    a2 = max((1.0 - beta * omega) / (1.0 - beta ** 2), 0.0)
    b2 = max((omega - beta) / (1.0 - beta ** 2), 0.0)
    return AmplitudePair(math.sqrt(a2), math.sqrt(b2))


def spec_amplitudes(spec: VortexSpec) -> Optional[AmplitudePair]:
    if spec.model == "scalar":
        return None
    return solve_amplitudes(spec.beta, spec.omega, spec.delta)


def seed_for(spec: VortexSpec) -> LatticeField:
    return anti_continuum_seed(spec, spec_amplitudes(spec))


def _check_shape(field: LatticeField, spec: VortexSpec):
    if field.grid != spec.grid or field.n_components != spec.n_components:
        raise ShapeMismatchError(
            f"field has {field.n_components} component(s) on N={field.grid.half_width}, "
            f"spec expects {spec.n_components} on N={spec.grid.half_width}")


def residual(field: LatticeField, spec: VortexSpec) -> LatticeField:
    """Nodewise left-hand side minus right-hand side of the stationary system."""
    _check_shape(field, spec)
    eps, shift = spec.epsilon, spec.onsite_shift
    if spec.model == "scalar":
        (u,) = field.components
        return LatticeField(((1 + shift - np.abs(u) ** 2) * u - eps * hop(u),), field.grid)
    u, v = field.components
    pu, pv = np.abs(u) ** 2, np.abs(v) ** 2
    ru = (1 + shift - pu - spec.beta * pv) * u - eps * hop(u)
    rv = (spec.omega + shift - spec.beta * pu - pv) * v - eps * hop(v)
    return LatticeField((ru, rv), field.grid)


def residual_norm(field: LatticeField, spec: VortexSpec) -> float:
    return float(np.max(np.abs(residual(field, spec).flat())))


# --- local derivative blocks -------------------------------------------------

def local_blocks(field: LatticeField, spec: VortexSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Onsite parts of dF = A dz + B conj(dz).

    Returns arrays of shape (C, C, nodes): ``A[c, d]`` multiplies the
    perturbation of component d in equation c, ``B[c, d]`` its conjugate.
    The hopping term is not included.
    """
    shift = spec.onsite_shift
    if spec.model == "scalar":
        u = field.components[0].ravel()
        A = (1 + shift - 2 * np.abs(u) ** 2)[None, None, :]
        B = (-u ** 2)[None, None, :]
        return A.astype(complex), B
    u, v = (c.ravel() for c in field.components)
    beta, pu, pv = spec.beta, np.abs(u) ** 2, np.abs(v) ** 2
    A = np.empty((2, 2, u.size), complex)
    B = np.empty((2, 2, u.size), complex)
    A[0, 0] = 1 + shift - 2 * pu - beta * pv
    A[0, 1] = -beta * u * np.conj(v)
    A[1, 0] = -beta * np.conj(u) * v
    A[1, 1] = spec.omega + shift - beta * pu - 2 * pv
    B[0, 0] = -u ** 2
    B[0, 1] = -beta * u * v
    B[1, 0] = -beta * u * v
    B[1, 1] = -v ** 2
    return A, B


def hopping_matrix(grid: GridShape) -> sp.csr_matrix:
    """Sparse nearest-neighbour sum on the flattened grid (n fastest)."""
    side = grid.side
    t = sp.diags([np.ones(side - 1), np.ones(side - 1)], [-1, 1], format="csr")
    eye = sp.identity(side, format="csr")
    return (sp.kron(eye, t) + sp.kron(t, eye)).tocsr()


def _linear_operators(field: LatticeField, spec: VortexSpec):
    A_loc, B_loc = local_blocks(field, spec)
    C = spec.n_components
    hopm = hopping_matrix(spec.grid)
    A_blocks = [[sp.diags(A_loc[c, d]) - (spec.epsilon * hopm if c == d else 0)
                 for d in range(C)] for c in range(C)]
    B_blocks = [[sp.diags(B_loc[c, d]) for d in range(C)] for c in range(C)]
    return sp.bmat(A_blocks, format="csr"), sp.bmat(B_blocks, format="csr")


def real_jacobian(field: LatticeField, spec: VortexSpec) -> sp.csr_matrix:
    """Jacobian of (Re F, Im F) with respect to (Re z, Im z)."""
    A, B = _linear_operators(field, spec)
    P, M = A + B, A - B
    return sp.bmat([[P.real, -M.imag], [P.imag, M.real]], format="csr")


# --- states -------------------------------------------------------------------

@dataclass(frozen=True)
class StationaryState:
    field: LatticeField
    spec: VortexSpec
    residual_norm: float
    newton_iters: int
    gauge_anchor: Tuple[Tuple[Tuple[int, int], float], ...]

    @property
    def epsilon(self) -> float:
        return self.spec.epsilon


def gauge_anchors(spec: VortexSpec) -> Tuple[Tuple[Tuple[int, int], float], ...]:
    """(node, phase) per component, read from the seed at the anchor node."""
    seed = seed_for(spec)
    out = []
    for c in range(spec.n_components):
        val = seed.at(ANCHOR_NODE, c)
        out.append((ANCHOR_NODE, float(np.angle(val)) if abs(val) > 0 else float("nan")))
    return tuple(out)


def _gauged_system(field: LatticeField, spec: VortexSpec, anchors):
    grid = spec.grid
    nn, C = grid.n_nodes, spec.n_components
    z = field.flat()
    F = residual(field, spec).flat()
    rhs = np.concatenate([F.real, F.imag])
    J = real_jacobian(field, spec).tolil()
    k = grid.index(ANCHOR_NODE)
    for c, (_, theta) in enumerate(anchors):
        if math.isnan(theta):
            continue
        idx = c * nn + k
        re_row, im_row = idx, C * nn + idx
        cs, sn = math.cos(theta), math.sin(theta)
        J[re_row] = cs * J.getrow(re_row) + sn * J.getrow(im_row)
        rhs[re_row] = cs * F[idx].real + sn * F[idx].imag
        J[im_row] = 0
        J[im_row, re_row] = -sn
        J[im_row, im_row] = cs
        rhs[im_row] = (np.exp(-1j * theta) * z[idx]).imag
    return J.tocsc(), rhs, F


def newton_solve(spec: VortexSpec, guess: LatticeField, tol: float = NEWTON_TOL,
                 max_iters: int = MAX_ITERS) -> StationaryState:
    """Gauge-fixed Newton iteration at fixed epsilon.

    Raises ContinuationError when the residual does not drop below ``tol``.
    """
    _check_shape(guess, spec)
    if spec.is_manakov:
        raise SingularJacobianError(
            "beta = 1 has a five-dimensional solution manifold; use manakov_state")
    anchors = gauge_anchors(spec)
    grid, C = spec.grid, spec.n_components
    field = guess
    for it in range(max_iters + 1):
        J, rhs, F = _gauged_system(field, spec, anchors)
        rnorm = float(np.max(np.abs(F)))
        if rnorm <= tol and _anchor_error(field, anchors) <= tol:
            return StationaryState(field, spec, rnorm, it, anchors)
        if it == max_iters or not np.isfinite(rnorm) or rnorm > 1e6:
            break
        with warnings.catch_warnings():
            warnings.simplefilter("error", spla.MatrixRankWarning)
            try:
                dx = spla.spsolve(J, -rhs)
            except (spla.MatrixRankWarning, RuntimeError) as exc:
                raise SingularJacobianError(f"singular gauged Jacobian at eps={spec.epsilon}") from exc
        if not np.all(np.isfinite(dx)):
            raise SingularJacobianError(f"non-finite Newton step at eps={spec.epsilon}")
        n = C * grid.n_nodes
        z = field.flat() + dx[:n] + 1j * dx[n:]
        field = LatticeField.from_flat(z, grid, C)
    raise ContinuationError(
        f"Newton did not converge at eps={spec.epsilon} (residual {rnorm:.3e})", None)


def _anchor_error(field: LatticeField, anchors) -> float:
    err = 0.0
    for c, (node, theta) in enumerate(anchors):
        if not math.isnan(theta):
            err = max(err, abs((np.exp(-1j * theta) * field.at(node, c)).imag))
    return err


def manakov_state(spec: VortexSpec, scalar_state: StationaryState) -> StationaryState:
    """Embed a scalar vortex cross into the beta = omega = 1 system.

    (1, 1):  phi = cos(delta) Phi,  psi = sin(delta) Phi
    (1, -1): phi = cos(delta) Phi,  psi = sin(delta) conj(Phi)
    """
    if not spec.is_manakov:
        raise PreconditionError("manakov_state needs beta = 1")
    (Phi,) = scalar_state.field.components
    c, s = math.cos(spec.delta), math.sin(spec.delta)
    psi = s * (Phi if spec.winding == 1 else np.conj(Phi))
    field = LatticeField((c * Phi, psi), spec.grid)
    return StationaryState(field, spec, residual_norm(field, spec),
                           scalar_state.newton_iters, gauge_anchors(spec))


def _scalar_companion(spec: VortexSpec) -> VortexSpec:
    return VortexSpec("scalar", epsilon=spec.epsilon, grid=spec.grid, coupling=spec.coupling)


def solve_at(spec: VortexSpec, guess: Optional[LatticeField] = None, tol: float = NEWTON_TOL,
             max_iters: int = MAX_ITERS) -> StationaryState:
    """Newton solve at ``spec.epsilon`` from ``guess`` (default: series predictor)."""
    if spec.is_manakov:
        sguess = None if guess is None else _manakov_to_scalar_field(guess, spec)
        return manakov_state(spec, solve_at(_scalar_companion(spec), sguess, tol, max_iters))
    if guess is None:
        guess = default_guess(spec)
    if spec.epsilon == 0:
        seed = seed_for(spec)
        return StationaryState(seed, spec, residual_norm(seed, spec), 0, gauge_anchors(spec))
    return newton_solve(spec, guess, tol, max_iters)


def default_guess(spec: VortexSpec) -> LatticeField:
    order = 3 if spec.model == "scalar" else 2
    return series_field(spec, order).field


def newton_continue(spec: VortexSpec, eps_target: float, step: float = 0.01,
                    tol: float = NEWTON_TOL, max_iters: int = MAX_ITERS,
                    min_step: float = MIN_STEP, start: Optional[Sequence[StationaryState]] = None,
                    seed_order: Optional[int] = None) -> List[StationaryState]:
    """Continue the vortex cross from epsilon = 0 (or ``start``) to ``eps_target``.

    Nodes are visited at 0, step, 2 step, ..., eps_target; a failed Newton solve
    halves the step locally until ``min_step``. Warm starts use secant
    extrapolation from the last two converged states.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if spec.is_manakov:
        sstates = newton_continue(_scalar_companion(spec), eps_target, step, tol, max_iters,
                                  min_step, None if start is None else
                                  [_manakov_to_scalar(s) for s in start], seed_order)
        return [manakov_state(spec.with_epsilon(s.epsilon), s) for s in sstates]
    if start:
        states = list(start)
    else:
        base = spec.with_epsilon(0.0)
        states = [solve_at(base)]
    eps = states[-1].epsilon
    targets = []
    k = 1
    while eps + k * step < eps_target - 1e-9 * step:
        targets.append(eps + k * step)
        k += 1
    if eps_target > eps:
        targets.append(float(eps_target))
    for target in targets:
        current = states[-1].epsilon
        h = target - current
        while current < target - 1e-15:
            nxt = min(current + h, target)
            try:
                st = newton_solve(spec.with_epsilon(nxt), _predict(states, nxt, spec, seed_order),
                                  tol, max_iters)
            except (ContinuationError, SingularJacobianError) as exc:
                h /= 2
                if h < min_step:
                    raise ContinuationError(
                        f"continuation stalled near eps={nxt:.6g}: {exc}",
                        states[-1].epsilon, states) from exc
                log.debug("halving step to %g at eps=%g", h, current)
                continue
            states.append(st)
            current = nxt
    return states


def _manakov_to_scalar_field(field: LatticeField, spec: VortexSpec) -> LatticeField:
    # inverts manakov_state: Phi = cos(d) phi + sin(d) psi (or conj(psi) for (1, -1))
    u, v = field.components
    if spec.winding == -1:
        v = np.conj(v)
    return LatticeField((math.cos(spec.delta) * u + math.sin(spec.delta) * v,), spec.grid)


def _manakov_to_scalar(state: StationaryState) -> StationaryState:
    spec = _scalar_companion(state.spec)
    f = _manakov_to_scalar_field(state.field, state.spec)
    return StationaryState(f, spec, residual_norm(f, spec), state.newton_iters,
                           gauge_anchors(spec))


def _predict(states: Sequence[StationaryState], eps: float, spec: VortexSpec,
             seed_order: Optional[int]) -> LatticeField:
    last = states[-1]
    if len(states) >= 2 and states[-2].epsilon < last.epsilon:
        prev = states[-2]
        t = (eps - last.epsilon) / (last.epsilon - prev.epsilon)
        z = last.field.flat() + t * (last.field.flat() - prev.field.flat())
        return LatticeField.from_flat(z, spec.grid, spec.n_components)
    if last.epsilon == 0:
        order = seed_order if seed_order is not None else (3 if spec.model == "scalar" else 2)
        if order > 0:
            return series_field(spec.with_epsilon(eps), order).field
    return last.field


# --- perturbation series -----------------------------------------------------

@dataclass(frozen=True)
class SeriesField:
    order: int
    field: LatticeField
    terms: Tuple[LatticeField, ...]


def series_terms(spec: VortexSpec, order: int) -> List[LatticeField]:
    """Coefficients of the expansion of the vortex cross in powers of epsilon.

    Off the contour each order follows from the hopping of the previous one plus
    the cubic terms of lower orders. On the contour only the amplitude
    direction is solved; the tangential (phase) part is zero for the vortex
    cross because the bifurcation equations vanish there.
    """
    max_order = 3 if spec.model == "scalar" else 2
    if not 0 <= order <= max_order:
        raise ValueError(f"series order must be in [0, {max_order}] for the {spec.model} model")
    seed = seed_for(spec)
    grid = spec.grid
    C = spec.n_components
    on = np.abs(seed.components[0]) > 0
    weights = (1.0,) if C == 1 else (1.0, spec.omega)
    beta = spec.beta if C == 2 else 0.0
    amps = [np.abs(c) for c in seed.components]
    units = [np.where(np.abs(c) > 0, c / np.where(np.abs(c) > 0, np.abs(c), 1), 0)
             for c in seed.components]
    coefs = [list(seed.components)]
    for k in range(1, order + 1):
        rhs = []
        for c in range(C):
            known = _cubic_known(coefs, k, c, beta)
            rhs.append(hop(coefs[k - 1][c]) + known)
        new = [np.where(on, 0, rhs[c] / weights[c]) for c in range(C)]
        pts = np.argwhere(on)
        for (i, j) in pts:
            proj = [float((np.conj(units[c][i, j]) * rhs[c][i, j]).real) for c in range(C)]
            if C == 1:
                s = -proj[0] / (2 * amps[0][i, j] ** 2)
                new[0][i, j] = s * units[0][i, j]
                continue
            a, b = amps[0][i, j], amps[1][i, j]
            M = np.array([[-2 * a * a, -2 * beta * a * b], [-2 * beta * a * b, -2 * b * b]])
            if abs(np.linalg.det(M)) < 1e-12:
                raise SingularSystemError(
                    "contour amplitude system is singular (beta = 1 or vanishing component)")
            s, r = np.linalg.solve(M, proj)
            new[0][i, j] = s * units[0][i, j]
            new[1][i, j] = r * units[1][i, j]
        coefs.append(new)
    return [LatticeField(tuple(cs), grid) for cs in coefs]


def _cubic_known(coefs, k: int, c: int, beta: float) -> np.ndarray:
    """Order-k coefficient of the cubic term of equation c, without order-k unknowns."""
    C = len(coefs[0])
    out = np.zeros_like(coefs[0][0])
    other = 1 - c if C == 2 else None
    for i in range(k):
        for j in range(k):
            l = k - i - j
            if l < 0 or l >= k:
                continue
            out = out + coefs[i][c] * np.conj(coefs[j][c]) * coefs[l][c]
            if other is not None and beta:
                out = out + beta * coefs[i][other] * np.conj(coefs[j][other]) * coefs[l][c]
    return out


def hop_equivalent(spec: VortexSpec) -> Tuple[VortexSpec, float]:
    """Map a Laplacian-coupled problem onto the bare-hopping one.

    Dividing the stationary equations by 1 + 4 eps gives the hop model at
    eps' = eps / (1 + 4 eps) and omega' = (omega + 4 eps) / (1 + 4 eps), with
    fields scaled by 1 / sqrt(1 + 4 eps). Returns (hop spec, field scale).
    Hop-coupled specs map to themselves with scale 1.
    """
    if spec.coupling == "hop":
        return spec, 1.0
    g = 1.0 + 4.0 * spec.epsilon
    omega = spec.omega if spec.model == "scalar" else (spec.omega + 4.0 * spec.epsilon) / g
    return replace(spec, coupling="hop", epsilon=spec.epsilon / g, omega=omega), math.sqrt(g)


def series_field(spec: VortexSpec, order: int) -> SeriesField:
    """Partial sum of the perturbation series up to ``order`` at spec.epsilon.

    For Laplacian coupling the sum is taken in the equivalent hop problem and
    rescaled; ``terms`` are then the hop-model coefficients.
    """
    if spec.coupling != "hop":
        hspec, scale = hop_equivalent(spec)
        inner = series_field(hspec, order)
        return SeriesField(order, inner.field.scaled([scale] * spec.n_components), inner.terms)
    terms = series_terms(spec, order)
    eps = spec.epsilon
    total = [sum(eps ** k * t.components[c] for k, t in enumerate(terms))
             for c in range(spec.n_components)]
    return SeriesField(order, LatticeField(tuple(total), spec.grid), tuple(terms))


def check_nondegeneracy(state) -> float:
    """(sum |Phi|^2)^2 - |sum Phi^2|^2 for a scalar field; zero means degenerate."""
    field = state.field if isinstance(state, StationaryState) else state
    if field.n_components != 1:
        raise PreconditionError("non-degeneracy is defined for scalar states")
    (u,) = field.components
    return float(np.sum(np.abs(u) ** 2) ** 2 - np.abs(np.sum(u ** 2)) ** 2)
