"""Lyapunov-Schmidt reduction near the anti-continuum limit.

Bifurcation functions for the phases on the four-site contour, the reduced
Jacobians M2 and M4, and the leading-order small eigenvalues they predict for
the scalar, coupled (beta != 1) and Manakov (beta = 1) vortex crosses.

Indices j = 1..4 are cyclic: theta_{j+1} wraps mod 4. All formulas are for
the bare-hopping coupling; ``evaluate`` maps them onto Laplacian coupling.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from .errors import ManakovError
from .lattice import VortexSpec

P1 = np.array([1.0, 1.0, 1.0, 1.0])
P2 = np.array([-1.0, 1.0, -1.0, 1.0])
DISC_TOL = 1e-12

Krein = Union[int, str]  # -1, +1, "real-pair" or "complex-quartet"


@dataclass(frozen=True)
class PhaseVector:
    theta: Tuple[float, float, float, float]
    nu: Optional[Tuple[float, float, float, float]] = None

    @classmethod
    def vortex_cross(cls, sign: Optional[int] = None) -> "PhaseVector":
        theta = tuple(math.pi * j / 2 for j in range(4))
        nu = None if sign is None else tuple(sign * t for t in theta)
        return cls(theta, nu)

    @classmethod
    def asymmetric(cls, theta: float) -> "PhaseVector":
        return cls((0.0, theta, math.pi, math.pi + theta))

    def array(self) -> np.ndarray:
        return np.asarray(self.theta, dtype=float)


@dataclass(frozen=True)
class ReductionMatrices:
    m2: np.ndarray
    m4: np.ndarray
    p1: np.ndarray = P1
    p2: np.ndarray = P2


@dataclass(frozen=True)
class AsymptoticPrediction:
    """lambda ~ leading_coeff * eps**order (or a Jacobian eigenvalue when kind == "jacobian")."""

    label: str
    leading_coeff: complex
    order: int
    krein: Optional[Krein]
    kind: str = "eigenvalue"

    def value(self, epsilon: float) -> complex:
        return self.leading_coeff * epsilon ** self.order


def _phases(phases) -> np.ndarray:
    return phases.array() if isinstance(phases, PhaseVector) else np.asarray(phases, float)


def _shift(t: np.ndarray, k: int) -> np.ndarray:
    # element j holds theta_{j+k}
    return np.roll(t, -k)


def g2(phases) -> np.ndarray:
    t = _phases(phases)
    s = np.sin
    return 2 * s(t - _shift(t, 1)) + 2 * s(t - _shift(t, -1)) + s(t - _shift(t, 2))


def g4(phases) -> np.ndarray:
    t = _phases(phases)
    c, s = np.cos, np.sin
    tp1, tm1, tp2, tm2 = _shift(t, 1), _shift(t, -1), _shift(t, 2), _shift(t, -2)
    out = (4 + 2 * c(tp2 - tp1) + 2 * c(t - tp1) + c(tm1 - tp1)) * s(tp1 - t)
    out += (4 + 2 * c(tm2 - tm1) + 2 * c(t - tm1) + c(tp1 - tm1)) * s(tm1 - t)
    out += 0.5 * (4 + 2 * c(tm1 - tm2) + 2 * c(tp1 - tp2) + c(t - tp2)) * s(tp2 - t)
    out += 0.5 * (4 + 2 * c(tp1 - tp2) + 2 * c(tm1 - tm2) + c(t - tm2)) * s(tm2 - t)
    out += 2 * (1 + c(tp1 - t)) * s(t - tp1) + 2 * (1 + c(tm1 - t)) * s(t - tm1)
    pair_sum = sum(math.cos(t[b] - t[a]) for a in range(4) for b in range(a + 1, 4))
    out += 2 * (2 + pair_sum) * (s(t - tp1) + s(t - tm1) + s(t - tp2))
    out += 4 * s(t - tp1) + 4 * s(t - tm1)
    return out


def m2_matrix(theta: float) -> Tuple[np.ndarray, Tuple[float, float, float, float]]:
    """Jacobian of g2 on the asymmetric family and its eigenvalues {0, 0, -2 +- 4 cos theta}."""
    k = 2 * math.cos(theta)
    m = np.array([[-1, -k, 1, k],
                  [-k, -1, k, 1],
                  [1, k, -1, -k],
                  [k, 1, -k, -1]], dtype=float)
    eig = tuple(sorted((0.0, 0.0, -2 + 4 * math.cos(theta), -2 - 4 * math.cos(theta))))
    return m, eig


def m4_matrix() -> np.ndarray:
    """Jacobian of g4 at the vortex cross."""
    return np.array([[3, 2, -7, 2],
                     [2, 3, 2, -7],
                     [-7, 2, 3, 2],
                     [2, -7, 2, 3]], dtype=float)


def reduction_matrices() -> ReductionMatrices:
    return ReductionMatrices(m2_matrix(math.pi / 2)[0], m4_matrix())


def numerical_jacobian(fn, phases, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian, d fn_j / d theta_k."""
    t = _phases(phases)
    cols = [(fn(t + h * e) - fn(t - h * e)) / (2 * h) for e in np.eye(4)]
    return np.array(cols).T


def prop3_matrix() -> np.ndarray:
    """Circulant of alpha_j + alpha_{j+2} + 2 (alpha_{j+1} + alpha_{j-1})."""
    row = np.array([1.0, 2.0, 1.0, 2.0])
    return np.array([np.roll(row, j) for j in range(4)])


def prop3_reduced_problem() -> Tuple[float, ...]:
    """Eigenvalue multiset of the reduced problem for the decoupled Manakov components."""
    return tuple(sorted(float(x) for x in np.round(np.linalg.eigvalsh(prop3_matrix()), 12) + 0.0))


def zero_multiplicities(model: str, charge_pair=None, beta: float = 0.0,
                        delta: Optional[float] = None) -> Tuple[int, int]:
    """(algebraic, geometric) multiplicity of the zero eigenvalue for small eps > 0."""
    if model == "scalar":
        return 2, 1
    if beta != 1:
        return 4, 2
    if tuple(charge_pair) == (1, -1) and delta is not None and abs(math.cos(2 * delta)) < 1e-12:
        return 8, 5
    return 6, 5


# --- scalar -------------------------------------------------------------------

def predict_scalar(epsilon: float = 1.0) -> List[AsymptoticPrediction]:
    """Small eigenvalues and small Jacobian eigenvalues of the scalar vortex cross.

    ``epsilon`` is accepted for symmetry with the other predictors; the
    returned objects evaluate at any eps via ``value``.
    """
    return [
        AsymptoticPrediction("lambda_1,2", 2j, 1, -1),
        AsymptoticPrediction("lambda_3,4", 2j, 1, -1),
        AsymptoticPrediction("lambda_5,6", 4j, 2, -1),
        AsymptoticPrediction("gamma_1", -2.0, 2, None, "jacobian"),
        AsymptoticPrediction("gamma_2", -2.0, 2, None, "jacobian"),
        AsymptoticPrediction("gamma_3", -8.0, 4, None, "jacobian"),
        AsymptoticPrediction("gamma_4", 0.0, 4, None, "jacobian"),
    ]


# --- coupled, beta != 1 -------------------------------------------------------

def vector_amplitudes_sq(beta: float, omega: float) -> Tuple[float, float]:
    return (1 - beta * omega) / (1 - beta ** 2), (omega - beta) / (1 - beta ** 2)


def vector_gamma_roots(beta: float, omega: float) -> Tuple[float, float]:
    """Non-zero roots of (g + 2a^2)(g + 2b^2) = 4 a^2 b^2 beta^2, most negative first."""
    a2, b2 = vector_amplitudes_sq(beta, omega)
    mean = -(a2 + b2)
    disc = math.sqrt((a2 - b2) ** 2 + 4 * a2 * b2 * beta ** 2)
    return mean - disc, mean + disc


def representative(z: complex) -> complex:
    """Member of the pair +-z with Im > 0, or Re >= 0 when real."""
    z = complex(z)
    if z.imag < 0 or (z.imag == 0 and z.real < 0):
        z = -z
    return complex(z.real + 0.0, z.imag + 0.0)


def _pair_coeff(gamma: float) -> complex:
    # lambda = +- sqrt(2 gamma)
    return representative(cmath.sqrt(2 * gamma) if gamma < 0 else math.sqrt(2 * gamma))


def _tag(coeff: complex, sign: int) -> Krein:
    if abs(coeff.imag) < 1e-15 and abs(coeff.real) > 0:
        return "real-pair"
    return sign


def predict_vector(beta: float, omega: float, charge_pair, epsilon: float = 1.0
                   ) -> List[AsymptoticPrediction]:
    """Small eigenvalues of the coupled vortex cross for beta != 1.

    Second-order pairs come from the quadratic for gamma = lambda^2 / 2 at any
    admissible omega; the fourth-order pairs and Jacobian eigenvalues are only
    available for omega = 1.
    """
    if beta == 1:
        raise ManakovError("beta = 1 is the Manakov case; use predict_manakov")
    cp = tuple(charge_pair)
    g_minus, g_plus = vector_gamma_roots(beta, omega)
    c_minus, c_plus = _pair_coeff(g_minus), _pair_coeff(g_plus)
    out = [
        AsymptoticPrediction("lambda_1,2", c_minus, 1, _tag(c_minus, -1)),
        AsymptoticPrediction("lambda_3,4", c_minus, 1, _tag(c_minus, -1)),
        AsymptoticPrediction("lambda_5,6", c_plus, 1, _tag(c_plus, -1)),
        AsymptoticPrediction("lambda_7,8", c_plus, 1, _tag(c_plus, -1)),
    ]
    if omega != 1:
        return out
    r = (1 - beta) / (1 + beta)
    if cp == (1, 1):
        c9, c11 = 4j, 4j * abs(r)
        out += [AsymptoticPrediction("lambda_9,10", c9, 2, -1),
                AsymptoticPrediction("lambda_11,12", c11, 2, -1 if beta < 1 else +1)]
    else:
        c = 4j * math.sqrt(r) if r > 0 else complex(4 * math.sqrt(-r), 0.0)
        out += [AsymptoticPrediction("lambda_9,10", c, 2, _tag(c, -1)),
                AsymptoticPrediction("lambda_11,12", c, 2, _tag(c, -1))]
    out += [AsymptoticPrediction(f"gamma_{k}", -2.0, 2, None, "jacobian") for k in range(1, 5)]
    out += [AsymptoticPrediction("gamma_5", -8.0, 4, None, "jacobian"),
            AsymptoticPrediction("gamma_6", -8.0 * r, 4, None, "jacobian")]
    return out


# --- Manakov, beta = omega = 1 -------------------------------------------------

def manakov_quartic(gamma: complex, delta: float) -> complex:
    return gamma ** 2 + 4 * (1 + 4 * math.cos(4 * delta)) * gamma + 36


def manakov_gamma_roots(delta: float) -> Tuple[complex, complex]:
    """Roots of gamma^2 + 4(1 + 4 cos 4delta) gamma + 36 = 0, smaller |1 + 4c -+ root| first."""
    c = math.cos(4 * delta)
    disc = 8 * manakov_discriminant(delta)  # = (1 + 4c)^2 - 9
    if abs(disc) < DISC_TOL:
        disc = 0.0
    root = cmath.sqrt(disc) if disc < 0 else math.sqrt(disc)
    return -2 * (1 + 4 * c - root), -2 * (1 + 4 * c + root)


def manakov_discriminant(delta: float) -> float:
    return math.cos(4 * delta) + math.cos(8 * delta)


def manakov_unstable(delta: float, tol: float = 1e-12) -> bool:
    """True when the quartic has non-real roots or a positive real root."""
    g1, g2_ = manakov_gamma_roots(delta)
    return any(abs(complex(g).imag) > tol or complex(g).real > tol for g in (g1, g2_))


def predict_manakov(delta: float, charge_pair, epsilon: float = 1.0) -> List[AsymptoticPrediction]:
    cp = tuple(charge_pair)
    out = [AsymptoticPrediction("lambda_1,2", 2j, 1, -1),
           AsymptoticPrediction("lambda_3,4", 2j, 1, -1)]
    if cp == (1, 1):
        return out + [AsymptoticPrediction("lambda_5,6", 2j, 2, +1),
                      AsymptoticPrediction("lambda_7,8", 6j, 2, -1),
                      AsymptoticPrediction("lambda_9,10", 4j, 2, -1)]
    for label, gamma, sign in zip(("lambda_5,6", "lambda_7,8"), manakov_gamma_roots(delta), (+1, -1)):
        gamma = complex(gamma)
        coeff = representative(cmath.sqrt(2 * gamma))
        if abs(gamma.imag) > 1e-12:
            tag: Krein = "complex-quartet"
        elif gamma.real > 1e-12:
            tag, coeff = "real-pair", complex(abs(coeff), 0.0)
        else:
            tag, coeff = sign, complex(0.0, abs(coeff))
        out.append(AsymptoticPrediction(label, coeff, 2, tag))
    c2 = abs(math.cos(2 * delta))
    out.append(AsymptoticPrediction("lambda_9,10", 4j * (c2 if c2 > DISC_TOL else 0.0), 2, -1))
    return out


# --- evaluation against a lattice problem ------------------------------------

@dataclass(frozen=True)
class PredictedValue:
    label: str
    value: complex
    order: int
    krein: Optional[Krein]
    kind: str


def predictions_for(spec: VortexSpec) -> List[AsymptoticPrediction]:
    """Prediction list for the regime of ``spec`` (bare-hopping parameters)."""
    if spec.model == "scalar":
        return predict_scalar()
    if spec.is_manakov:
        return predict_manakov(spec.delta, spec.charge_pair)
    return predict_vector(spec.beta, spec.omega, spec.charge_pair)


def evaluate(spec: VortexSpec) -> List[PredictedValue]:
    """Predicted small eigenvalues at spec.epsilon in the coupling convention of ``spec``.

    Laplacian coupling is the hop problem at eps' = eps / (1 + 4 eps) and
    omega' = (omega + 4 eps) / (1 + 4 eps) with the linearization scaled by
    1 + 4 eps, so eigenvalues scale the same way.
    """
    from .stationary import hop_equivalent

    hspec, _ = hop_equivalent(spec)
    scale = 1 + 4 * spec.epsilon if spec.coupling == "laplacian" else 1.0
    out = []
    for p in predictions_for(hspec):
        out.append(PredictedValue(p.label, scale * p.value(hspec.epsilon), p.order, p.krein, p.kind))
    return out
