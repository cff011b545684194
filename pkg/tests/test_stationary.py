import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dnlsvortex.errors import (DegenerateLineError, ExistenceDomainError, ShapeMismatchError,
                               SingularSystemError, StaleStateError)
from dnlsvortex.lattice import S0_NODES, GridShape, LatticeField, VortexSpec
from dnlsvortex.stationary import (check_nondegeneracy, hop_equivalent, newton_continue, residual,
                                   residual_norm, seed_for, series_field, series_terms,
                                   solve_amplitudes)

from oracles import scalar_series2, scalar_residual_loop

G6 = GridShape(6)


def test_amplitude_examples():
    p = solve_amplitudes(2 / 3, 1.0)
    assert p.a == pytest.approx(math.sqrt(0.6), abs=1e-12) and p.b == pytest.approx(math.sqrt(0.6), abs=1e-12)
    p = solve_amplitudes(0.0, 1.0)
    assert (p.a, p.b) == pytest.approx((1.0, 1.0))
    p = solve_amplitudes(1.0, 1.0, math.pi / 4)
    assert (p.a, p.b) == pytest.approx((math.sqrt(0.5), math.sqrt(0.5)))
    with pytest.raises(ExistenceDomainError):
        solve_amplitudes(2.0, 0.3)
    with pytest.raises(DegenerateLineError):
        solve_amplitudes(1.0, 1.1, 0.2)


@settings(max_examples=60, deadline=None)
@given(beta=st.one_of(st.just(0.0), st.floats(0.05, 5.0).filter(lambda b: abs(b - 1) > 1e-3)),
       t=st.floats(0.0, 1.0))
def test_amplitudes_solve_quadratic_system(beta, t):
    lo, hi = (0.0, 3.0) if beta == 0 else sorted((beta, 1 / beta))
    omega = max(lo + t * (hi - lo), 1e-3)
    p = solve_amplitudes(beta, omega)
    assert p.a ** 2 + beta * p.b ** 2 == pytest.approx(1.0, abs=1e-12)
    assert beta * p.a ** 2 + p.b ** 2 == pytest.approx(omega, abs=1e-12)


def test_residual_of_zero_field_and_shape_check():
    spec = VortexSpec(epsilon=0.3, grid=G6)
    assert residual_norm(LatticeField.zeros(G6), spec) == 0.0
    with pytest.raises(ShapeMismatchError):
        residual(LatticeField.zeros(GridShape(4)), spec)


def test_residual_matches_loop_oracle():
    spec = VortexSpec(epsilon=0.07, grid=G6)
    rng = np.random.default_rng(0)
    z = rng.normal(size=G6.n_nodes) + 1j * rng.normal(size=G6.n_nodes)
    field = LatticeField.from_flat(z, G6, 1)
    assert np.allclose(residual(field, spec).flat(), scalar_residual_loop(6, z, 0.07), atol=1e-13)


def test_series_scalar_coefficients():
    spec = VortexSpec(grid=G6)
    terms = series_terms(spec, 2)
    # first order vanishes at the centre, second order on S0 is -3/2 along the seed
    assert abs(terms[1].at((0, 0))) < 1e-15
    for node in S0_NODES:
        assert terms[2].at(node) / terms[0].at(node) == pytest.approx(-1.5)
    assert np.allclose(series_field(spec.with_epsilon(0.05), 2).field.flat(),
                       scalar_series2(6, 0.05), atol=1e-14)


def test_series_order_two_residual_ratio(golden):
    """Residual of the order-two sum shrinks by ~8 when epsilon halves."""
    spec = VortexSpec(grid=GridShape(10))
    r = [residual_norm(series_field(spec.with_epsilon(e), 2).field, spec.with_epsilon(e))
         for e in (0.05, 0.025)]
    g = golden["series_residual_ratio"]
    assert r[0] / r[1] == pytest.approx(g["value"]["ratio"], abs=g["tolerance"])
    assert r[0] / r[1] == pytest.approx(8.0, rel=0.15)


def test_vector_second_order_radial(golden):
    spec = VortexSpec("vector", (1, 1), beta=2 / 3, grid=G6)
    terms = series_terms(spec, 2)
    a = math.sqrt(0.6)
    # node (-1, 0) carries phase zero in both components
    s = terms[2].at(S0_NODES[0], 0).real
    r = terms[2].at(S0_NODES[0], 1).real
    g = golden["vector_second_order_radial"]
    assert s == pytest.approx(g["value"]["s"], abs=g["tolerance"])
    assert r == pytest.approx(s, abs=1e-12)
    assert s == pytest.approx(-3 / (2 * a * (1 + 2 / 3)), abs=1e-10)


def test_manakov_second_order_is_singular():
    spec = VortexSpec("vector", (1, 1), beta=1.0, delta=0.3, grid=G6)
    with pytest.raises(SingularSystemError):
        series_terms(spec, 2)


def test_zero_target_returns_seed():
    for spec in (VortexSpec(grid=G6), VortexSpec("vector", (1, -1), beta=2 / 3, grid=G6)):
        (st0,) = newton_continue(spec, 0.0)
        assert np.array_equal(st0.field.flat(), seed_for(spec).flat())


def test_scalar_continuation_and_symmetry(golden):
    spec = VortexSpec(grid=GridShape(10))
    states = newton_continue(spec, 0.1, step=0.02)
    last = states[-1]
    assert last.epsilon == pytest.approx(0.1)
    assert last.residual_norm < 1e-10
    g = golden["scalar_state_eps_0.1"]
    assert abs(last.field.at(S0_NODES[0])) == pytest.approx(g["value"]["cross_modulus"], abs=g["tolerance"])
    # four bright sites, rotation by 90 degrees multiplies by i
    u = last.field.components[0]
    assert np.allclose(np.rot90(u, k=1), 1j * u, atol=1e-10) or np.allclose(np.rot90(u, k=-1), 1j * u, atol=1e-10)
    # gauge anchor keeps the phase of (-1, 0) at zero
    assert abs(np.angle(last.field.at((-1, 0)))) < 1e-12
    gn = golden["nondegeneracy_eps_0.1"]
    assert check_nondegeneracy(last) == pytest.approx(gn["value"], abs=gn["tolerance"])
    assert check_nondegeneracy(states[0]) == pytest.approx(16.0)


def test_continuation_tracks_series_to_third_order():
    spec = VortexSpec(grid=G6)
    errs = []
    for eps in (0.02, 0.01):
        st_ = newton_continue(spec, eps, step=eps)[-1]
        errs.append(np.max(np.abs(st_.field.flat() - series_field(spec.with_epsilon(eps), 2).field.flat())))
    assert errs[0] / errs[1] == pytest.approx(8.0, rel=0.15)


def test_hidden_charge_winding_and_amplitudes():
    spec = VortexSpec("vector", (1, -1), beta=2 / 3, grid=G6)
    last = newton_continue(spec, 0.1, step=0.02)[-1]
    ph = np.array([np.angle(last.field.at(n, 1)) for n in S0_NODES])
    steps = np.angle(np.exp(1j * np.diff(np.r_[ph, ph[0]])))
    assert steps.sum() == pytest.approx(-2 * math.pi)
    small = newton_continue(spec, 0.01, step=0.01)[-1]
    b = math.sqrt(0.6)
    assert abs(abs(small.field.at(S0_NODES[2], 1)) - b) < 5e-3


def test_laplacian_maps_onto_hop():
    spec = VortexSpec(coupling="laplacian", epsilon=0.1, grid=G6)
    hspec, scale = hop_equivalent(spec)
    assert hspec.coupling == "hop" and hspec.epsilon == pytest.approx(0.1 / 1.4)
    assert scale == pytest.approx(math.sqrt(1.4))
    lap = newton_continue(spec.with_epsilon(0.0), 0.1, step=0.05)[-1]
    hop_ = newton_continue(hspec.with_epsilon(0.0), hspec.epsilon, step=hspec.epsilon / 2)[-1]
    assert np.allclose(lap.field.flat(), scale * hop_.field.flat(), atol=1e-9)
