import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dnlsvortex.errors import DegenerateLineError, ExistenceDomainError, ShapeMismatchError, SizingError
from dnlsvortex.lattice import (S0_NODES, GridShape, LatticeField, VortexSpec, anti_continuum_seed,
                                build_contours, contour_sum, cross_phases, hop)
from dnlsvortex.stationary import residual_norm, solve_amplitudes


def test_grid_counts_and_index_roundtrip():
    g = GridShape(5)
    assert g.n_nodes == 121
    for k in (0, 17, 60, 120):
        assert g.index(g.node(k)) == k
    # n runs fastest
    assert g.index((-4, -5)) == 1
    with pytest.raises(SizingError):
        GridShape(2)


def test_contour_shells():
    cs = build_contours(GridShape(5))
    assert list(cs.s0) == [(-1, 0), (0, -1), (1, 0), (0, 1)]
    assert set(cs.s1) == {(0, 0), (-1, -1), (1, -1), (1, 1), (-1, 1), (-2, 0), (0, -2), (2, 0), (0, 2)}
    assert cs.s1[(0, 0)] == {0: 1, 1: 1, 2: 1, 3: 1}
    # outer corner of j = 1: two paths from theta_1, one from theta_2
    assert cs.s2[(-2, -1)] == {0: 2, 1: 1}
    shells = [set(cs.s0), set(cs.s1), set(cs.s2), set(cs.s3)]
    for i in range(4):
        for j in range(i + 1, 4):
            assert not shells[i] & shells[j]
    assert {(3, 0), (-3, 0), (0, 3), (0, -3)} <= shells[2]
    assert {(4, 0), (-4, 0), (0, 4), (0, -4)} <= shells[3]


def test_first_shell_sum_vanishes_at_centre():
    cs = build_contours(GridShape(5))
    assert abs(contour_sum(cs.s1[(0, 0)], np.pi * np.arange(4) / 2)) < 1e-15


def test_scalar_seed_values():
    spec = VortexSpec(grid=GridShape(5))
    seed = anti_continuum_seed(spec)
    assert np.allclose([seed.at(n) for n in S0_NODES], [1, 1j, -1, -1j], atol=1e-15)
    assert seed.power() == pytest.approx(4.0)
    assert seed.boundary_power() == 0.0
    assert residual_norm(seed, spec) == 0.0


def test_hidden_charge_seed():
    spec = VortexSpec("vector", (1, -1), beta=2 / 3, grid=GridShape(5))
    seed = anti_continuum_seed(spec, solve_amplitudes(2 / 3, 1.0))
    b = math.sqrt(3 / 5)
    assert np.allclose([seed.at(n, 1) for n in S0_NODES], [b, -1j * b, -b, 1j * b], atol=1e-14)
    assert residual_norm(seed, spec) < 1e-15


def test_spec_domain_checks():
    with pytest.raises(ExistenceDomainError):
        VortexSpec("vector", (1, 1), beta=2.0, omega=0.3)
    with pytest.raises(DegenerateLineError):
        VortexSpec("vector", (1, 1), beta=1.0, omega=1.2, delta=0.3)
    with pytest.raises(DegenerateLineError):
        VortexSpec("vector", (1, 1), beta=1.0)
    with pytest.raises(ValueError):
        VortexSpec(coupling="periodic")


def test_field_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        LatticeField((np.zeros((3, 3)),), GridShape(5))


def test_hop_is_symmetric_with_dirichlet_ring():
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=(2, 9, 9))
    assert np.vdot(a, hop(b)) == pytest.approx(np.vdot(hop(a), b))


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(-math.pi, math.pi), sign=st.sampled_from([1, -1]))
def test_seed_gauge_equivariance(alpha, sign):
    spec = VortexSpec("vector", (1, sign), beta=0.5, omega=1.0, grid=GridShape(4))
    seed = anti_continuum_seed(spec, solve_amplitudes(0.5, 1.0))
    rot = seed.scaled([np.exp(1j * alpha), 1.0])
    assert np.allclose(rot.components[0], np.exp(1j * alpha) * seed.components[0])
    assert residual_norm(rot, spec) < 1e-14
    assert np.allclose(cross_phases(sign), sign * np.pi * np.arange(4) / 2)
