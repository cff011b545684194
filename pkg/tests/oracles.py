"""Brute-force reference computations, kept free of any dnlsvortex import.

Everything here is written the slow, obvious way: explicit node loops, a
general-purpose root finder, dense LAPACK eigensolves of matrices assembled
entry by entry, and a textbook RK4 loop. Values produced here are frozen into
the package's golden file by ``make_golden.py`` and the main implementation
is then checked against them.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import newton_krylov

CROSS = ((-1, 0), (0, -1), (1, 0), (0, 1))


def _idx(N, n, m):
    return (m + N) * (2 * N + 1) + (n + N)


def _nodes(N):
    for m in range(-N, N + 1):
        for n in range(-N, N + 1):
            yield n, m


def _neighbours(N, n, m):
    for dn, dm in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        if abs(n + dn) <= N and abs(m + dm) <= N:
            yield n + dn, m + dm


def seed(N, amp=1.0, sign=1):
    z = np.zeros((2 * N + 1) ** 2, complex)
    for j, (n, m) in enumerate(CROSS):
        z[_idx(N, n, m)] = amp * np.exp(1j * sign * math.pi * j / 2)
    return z


def hop_loop(N, z):
    out = np.zeros_like(z)
    for n, m in _nodes(N):
        out[_idx(N, n, m)] = sum(z[_idx(N, a, b)] for a, b in _neighbours(N, n, m))
    return out


def scalar_residual_loop(N, z, eps):
    h = hop_loop(N, z)
    return np.array([(1 - abs(z[k]) ** 2) * z[k] - eps * h[k] for k in range(z.size)])


# --- perturbation series, order 2, scalar ------------------------------------

def scalar_series2(N, eps):
    """Order-two series built node by node.

    Order one lives off the cross (hopping of the seed). At order two the
    cross sites only move radially: s = -Re(conj(u) rhs) / 2 with |u| = 1.
    """
    z0 = seed(N)
    on = np.abs(z0) > 0
    h0 = hop_loop(N, z0)
    z1 = np.where(on, 0, h0)
    h1 = hop_loop(N, z1)
    z2 = np.zeros_like(z0)
    for k in range(z0.size):
        if on[k]:
            s = -(np.conj(z0[k]) * h1[k]).real / 2
            z2[k] = s * z0[k]
        else:
            z2[k] = h1[k]
    return z0 + eps * z1 + eps ** 2 * z2


def series_residual_ratio(N=10, eps=0.05):
    r1 = float(np.max(np.abs(scalar_residual_loop(N, scalar_series2(N, eps), eps))))
    r2 = float(np.max(np.abs(scalar_residual_loop(N, scalar_series2(N, eps / 2), eps / 2))))
    return r1, r2, r1 / r2


# --- stationary solutions via a general root finder ---------------------------

def _vec_residual(N, beta, omega, eps):
    nn = (2 * N + 1) ** 2
    side = 2 * N + 1

    def hop(z):
        a = z.reshape(side, side)
        out = np.zeros_like(a)
        out[1:, :] += a[:-1, :]
        out[:-1, :] += a[1:, :]
        out[:, 1:] += a[:, :-1]
        out[:, :-1] += a[:, 1:]
        return out.ravel()

    def F(x, C):
        z = x[:C * nn] + 1j * x[C * nn:]
        if C == 1:
            r = (1 - abs(z) ** 2) * z - eps * hop(z)
        else:
            u, v = z[:nn], z[nn:]
            pu, pv = abs(u) ** 2, abs(v) ** 2
            r = np.concatenate([(1 - pu - beta * pv) * u - eps * hop(u),
                                (omega - beta * pu - pv) * v - eps * hop(v)])
        return np.concatenate([r.real, r.imag])

    return F


def root_solve(N, eps, guess, beta=0.0, omega=1.0, C=1):
    """Jacobian-free Newton-Krylov on the real form of the stationary system."""
    F = _vec_residual(N, beta, omega, eps)
    x0 = np.concatenate([guess.real, guess.imag])
    x = newton_krylov(lambda x: F(x, C), x0, f_tol=1e-12, method="lgmres")
    z = x[:len(guess)] + 1j * x[len(guess):]
    return z, float(np.max(np.abs(F(x, C))))


def scalar_state(N=10, eps=0.1):
    """Scalar cross reached in small root-finder steps from the seed."""
    z = seed(N)
    for e in np.linspace(0.02, eps, int(round(eps / 0.02))):
        z, res = root_solve(N, e, z)
    return z, res


def vector_state(N, beta, omega, sign, eps):
    a = math.sqrt((1 - beta * omega) / (1 - beta ** 2))
    b = math.sqrt((omega - beta) / (1 - beta ** 2))
    z = np.concatenate([seed(N, a, 1), seed(N, b, sign)])
    for e in np.linspace(0.01, eps, int(round(eps / 0.01))):
        z, res = root_solve(N, e, z, beta, omega, C=2)
    return z, res


def cross_moduli(N, z):
    return [abs(z[_idx(N, n, m)]) for n, m in CROSS]


def nondegeneracy_loop(z):
    s1 = sum(abs(x) ** 2 for x in z)
    s2 = sum(x * x for x in z)
    return float(s1 ** 2 - abs(s2) ** 2)


# --- linearization, assembled entry by entry ---------------------------------

def linearization(N, z, eps, beta=0.0, omega=1.0, C=1):
    """Hermitian H on (z_c, conj z_c) per node and component; sigma = diag(+1, -1, ...)."""
    nn = (2 * N + 1) ** 2
    dim = 2 * C * nn
    H = np.zeros((dim, dim), complex)
    comps = [z[c * nn:(c + 1) * nn] for c in range(C)]
    freq = (1.0, omega)

    def row(k, c, slot):
        return k * 2 * C + 2 * c + slot

    for n, m in _nodes(N):
        k = _idx(N, n, m)
        for c in range(C):
            u = comps[c][k]
            diag = freq[c] - 2 * abs(u) ** 2
            if C == 2:
                w = comps[1 - c][k]
                diag -= beta * abs(w) ** 2
                cross = -beta * u * np.conj(w)
                cross_b = -beta * u * w
                H[row(k, c, 0), row(k, 1 - c, 0)] = cross
                H[row(k, c, 1), row(k, 1 - c, 1)] = np.conj(cross)
                H[row(k, c, 0), row(k, 1 - c, 1)] = cross_b
                H[row(k, c, 1), row(k, 1 - c, 0)] = np.conj(cross_b)
            H[row(k, c, 0), row(k, c, 0)] = diag
            H[row(k, c, 1), row(k, c, 1)] = diag
            H[row(k, c, 0), row(k, c, 1)] = -u * u
            H[row(k, c, 1), row(k, c, 0)] = -np.conj(u * u)
            for a, b in _neighbours(N, n, m):
                j = _idx(N, a, b)
                H[row(k, c, 0), row(j, c, 0)] = -eps
                H[row(k, c, 1), row(j, c, 1)] = -eps
    sigma = np.tile([1.0, -1.0], C * nn)
    return H, sigma


def hermitian_defect(H):
    return float(np.max(np.sum(np.abs(H - H.conj().T), axis=1)))


def eigenvalues(H, sigma):
    """lambda with sigma H v = i lambda v."""
    return -1j * np.linalg.eigvals(sigma[:, None] * H)


# --- direct time integration ---------------------------------------------------

def rk4_growth(N, z, eps, beta, omega, dt=0.05):
    """Growth rate of a kicked vector state from a plain RK4 loop."""
    nn = (2 * N + 1) ** 2
    H, sigma = linearization(N, z, eps, beta, omega, C=2)
    w, V = np.linalg.eig(sigma[:, None] * H)
    lam = -1j * w
    i = int(np.argmax(lam.real))
    rate = float(lam[i].real)
    vec = V[:, i].reshape(2 * nn, 2)
    comp = vec[:, 0] + np.conj(vec[:, 1])
    pert = np.concatenate([comp[0::2], comp[1::2]])
    pert /= np.linalg.norm(pert)
    F = _vec_residual(N, beta, omega, eps)

    def rhs(y):
        x = np.concatenate([y.real, y.imag])
        r = F(x, 2)
        return -1j * (r[:2 * nn] + 1j * r[2 * nn:])

    y = z + 1e-6 * pert
    horizon = 4.0 / rate
    steps = int(math.ceil(horizon / dt))
    t, d = [], []
    for s in range(steps + 1):
        if s:
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * dt * k1)
            k3 = rhs(y + 0.5 * dt * k2)
            k4 = rhs(y + dt * k3)
            y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t.append(s * dt)
        d.append(np.linalg.norm(y - z))
    t, d = np.array(t), np.array(d)
    half = t >= 0.5 * t[-1]
    fit = float(np.polyfit(t[half], np.log(d[half]), 1)[0])
    return fit, rate


# --- reduction algebra by direct evaluation ----------------------------------

def g2_loop(theta):
    out = []
    for j in range(4):
        t = theta[j]
        out.append(2 * math.sin(t - theta[(j + 1) % 4]) + 2 * math.sin(t - theta[(j - 1) % 4])
                   + math.sin(t - theta[(j + 2) % 4]))
    return np.array(out)


def m2_eigs(theta, h=1e-5):
    base = np.array([0.0, theta, math.pi, math.pi + theta])
    J = np.zeros((4, 4))
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        J[:, k] = (g2_loop(base + e) - g2_loop(base - e)) / (2 * h)
    return sorted(np.linalg.eigvals(J).real)


def vector_s2(beta, omega):
    """Radial second-order correction s = r at the cross, from its 2x2 system with RHS 3."""
    a = math.sqrt((1 - beta * omega) / (1 - beta ** 2))
    b = math.sqrt((omega - beta) / (1 - beta ** 2))
    M = np.array([[-2 * a * a, -2 * beta * a * b], [-2 * beta * a * b, -2 * b * b]])
    # projection of the order-two forcing (three neighbouring cross sites) onto each unit phase
    rhs = np.array([3 * a, 3 * b])
    s, r = np.linalg.solve(M, rhs)
    return float(s), float(r)


def beta2_real_pair(eps=0.1, beta=2.0):
    gamma = -2 * (1 - beta) / (1 + beta)
    return math.sqrt(2 * gamma) * eps
