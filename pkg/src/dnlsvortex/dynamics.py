"""Time integration of the lattice flow, used to cross-check growth rates.

In the frame rotating with the stationary frequencies the flow is simply
z' = -i F(z), F being the stationary residual, so the vortex cross is a fixed
point and a small kick along an unstable eigenvector grows like e^{Re lambda t}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import PreconditionError, StepSizeError
from .lattice import LatticeField, hop
from .stationary import StationaryState, residual

DRIFT_TOL = 1e-6
MIN_GROWTH = 1e-4


@dataclass(frozen=True)
class GrowthFit:
    rate: float
    times: np.ndarray
    deviation: np.ndarray
    power_drift: float
    energy_drift: float


def power(field: LatticeField) -> float:
    return field.power()


def energy(field: LatticeField, spec) -> float:
    """Lattice Hamiltonian of the (non-rotating) flow."""
    comps = field.components
    e = 0.0
    for u in comps:
        e += -spec.epsilon * float(np.real(np.sum(np.conj(u) * hop(u))))
        e += spec.onsite_shift * float(np.sum(np.abs(u) ** 2))
    p = [np.abs(u) ** 2 for u in comps]
    e -= 0.5 * float(sum(np.sum(q ** 2) for q in p))
    if len(p) == 2:
        e -= spec.beta * float(np.sum(p[0] * p[1]))
    return e


def _rhs(z: np.ndarray, spec, grid, C) -> np.ndarray:
    return -1j * residual(LatticeField.from_flat(z, grid, C), spec).flat()


def rk4(z0: np.ndarray, spec, dt: float, n_steps: int, every: int = 1):
    """Classical RK4; yields (step, z) every ``every`` steps including step 0."""
    grid, C = spec.grid, spec.n_components
    z = np.array(z0, dtype=complex)
    yield 0, z
    for n in range(1, n_steps + 1):
        k1 = _rhs(z, spec, grid, C)
        k2 = _rhs(z + 0.5 * dt * k1, spec, grid, C)
        k3 = _rhs(z + 0.5 * dt * k2, spec, grid, C)
        k4 = _rhs(z + dt * k3, spec, grid, C)
        z = z + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if n % every == 0:
            yield n, z


def unstable_direction(state: StationaryState, report) -> np.ndarray:
    """Field perturbation a + conj(b) from the eigenvector of the largest Re lambda."""
    from .spectrum import assemble_operators

    ops = assemble_operators(state)
    lam = report.eigenvalues[np.argmax(report.eigenvalues.real)]
    S = sp.diags(ops.sigma.astype(float)) @ ops.H_sparse
    mu = 1j * lam * (1 + 1e-10)
    lu = spla.splu((S - mu * sp.identity(ops.dim, dtype=complex, format="csc")).tocsc())
    x = np.random.default_rng(7).standard_normal(ops.dim).astype(complex)
    for _ in range(6):
        x = lu.solve(x)
        x /= np.linalg.norm(x)
    C = state.spec.n_components
    nn = state.spec.grid.n_nodes
    x = x.reshape(nn, C, 2)
    a, b = x[:, :, 0], x[:, :, 1]
    pert = (a + np.conj(b)).T.reshape(-1)
    return pert / np.linalg.norm(pert)


def integrate_growth(state: StationaryState, report, horizon: float, dt: float = 0.05,
                     amplitude: float = 1e-6, samples: int = 200) -> GrowthFit:
    spec = state.spec
    z_star = state.field.flat()
    z0 = z_star + amplitude * unstable_direction(state, report)
    n_steps = int(np.ceil(horizon / dt))
    every = max(1, n_steps // samples)
    f0 = LatticeField.from_flat(z0, spec.grid, spec.n_components)
    p0, e0 = power(f0), energy(f0, spec)
    times, dev = [], []
    p_drift = e_drift = 0.0
    for n, z in rk4(z0, spec, dt, n_steps, every):
        f = LatticeField.from_flat(z, spec.grid, spec.n_components)
        p_drift = max(p_drift, abs(power(f) - p0) / p0)
        e_drift = max(e_drift, abs(energy(f, spec) - e0) / abs(e0))
        times.append(n * dt)
        dev.append(np.linalg.norm(z - z_star))
    times, dev = np.array(times), np.array(dev)
    half = times >= 0.5 * times[-1]
    rate = float(np.polyfit(times[half], np.log(dev[half]), 1)[0])
    return GrowthFit(rate, times, dev, p_drift, e_drift)


def validate_growth_rate(state: StationaryState, report, horizon: float = None,
                         dt: float = 0.05, drift_tol: float = DRIFT_TOL) -> float:
    """Growth rate of a small unstable perturbation fitted from direct simulation.

    The default horizon spans four e-folds of the spectral rate. Raises
    StepSizeError when power or energy drift beyond ``drift_tol`` (relative).
    """
    if report.max_real_part <= MIN_GROWTH:
        raise PreconditionError(
            f"max Re lambda = {report.max_real_part:.3g} is not an instability")
    if horizon is None:
        horizon = 4.0 / report.max_real_part
    fit = integrate_growth(state, report, horizon, dt)
    if fit.power_drift > drift_tol or fit.energy_drift > drift_tol:
        raise StepSizeError(
            f"conserved-quantity drift too large (power {fit.power_drift:.2e}, "
            f"energy {fit.energy_drift:.2e}); reduce dt", fit.power_drift, fit.energy_drift)
    return fit.rate
