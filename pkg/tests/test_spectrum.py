import math

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from dnlsvortex.dynamics import validate_growth_rate
from dnlsvortex.errors import PreconditionError, StaleStateError
from dnlsvortex.lattice import S0_NODES, GridShape, VortexSpec
from dnlsvortex.stationary import StationaryState, newton_continue, seed_for
from dnlsvortex.spectrum import assemble_operators, band_edge, detect_hh, spectrum_of, track_branch

import oracles

G6 = GridShape(6)


def _state(spec, eps, step=0.01):
    return newton_continue(spec, eps, step=step)[-1]


def _scalar(eps, N=6):
    return _state(VortexSpec(grid=GridShape(N)), eps)


def _vector(beta, pair, eps, delta=None, N=6):
    return _state(VortexSpec("vector", pair, beta=beta, delta=delta, grid=GridShape(N)), eps)


def _match(a, b):
    d = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(d)
    return float(d[r, c].max())


def test_seed_blocks():
    spec = VortexSpec(grid=G6)
    ops = assemble_operators(StationaryState(seed_for(spec), spec, 0.0, 0, ()))
    for j, node in enumerate(S0_NODES):
        k = G6.index(node)
        blk = ops.H[2 * k:2 * k + 2, 2 * k:2 * k + 2]
        assert np.allclose(np.linalg.eigvalsh(blk), [-2.0, 0.0], atol=1e-14)
        assert blk[0, 1] == pytest.approx(-np.exp(1j * math.pi * j))
    k = G6.index((3, 3))
    assert np.array_equal(ops.H[2 * k:2 * k + 2, 2 * k:2 * k + 2], np.eye(2))
    assert np.array_equal(ops.sigma ** 2, np.ones(ops.dim))


def test_stale_state_rejected():
    spec = VortexSpec(grid=G6, epsilon=0.1)
    with pytest.raises(StaleStateError):
        assemble_operators(StationaryState(seed_for(spec), spec, 1e-3, 0, ()))


def test_assembly_matches_entrywise_oracle():
    st = _vector(2 / 3, (1, -1), 0.08)
    ops = assemble_operators(st)
    H, sigma = oracles.linearization(6, st.field.flat(), 0.08, 2 / 3, 1.0, C=2)
    assert np.abs(ops.H - H).max() < 1e-14
    assert np.array_equal(ops.sigma, sigma)
    assert ops.hermitian_defect() < 1e-12


def test_hermitian_defect_golden(golden):
    st = _scalar(0.1, N=10)
    ops = assemble_operators(st)
    g = golden["hermitian_defect_eps_0.1"]
    assert ops.hermitian_defect() <= g["value"]["defect"] + 1e-12
    low = np.sort(np.linalg.eigvalsh(ops.H))[:8]
    assert np.allclose(low, g["value"]["lowest_h_eigenvalues"], atol=g["tolerance"])


def test_scalar_small_eps_structure():
    eps = 0.05
    rep = spectrum_of(_scalar(eps))
    assert (rep.zero_algebraic, rep.zero_geometric) == (2, 1)
    assert rep.n_negative_H == 7
    small = rep.representatives()
    small = np.sort(small[(np.abs(small) > 1e-6) & (np.abs(small) < band_edge(VortexSpec(epsilon=eps)))].imag)
    assert len(small) == 3
    assert small == pytest.approx([4 * eps ** 2, 2 * eps, 2 * eps], rel=0.15)
    assert all(rep.krein_sign(1j * v) == -1 for v in small)
    assert rep.max_real_part < 1e-8


@pytest.mark.parametrize("case", ["scalar", "hidden", "double_b2", "manakov"])
def test_quartet_symmetry(case):
    st = {"scalar": lambda: _scalar(0.2),
          "hidden": lambda: _vector(2 / 3, (1, -1), 0.1),
          "double_b2": lambda: _vector(2.0, (1, 1), 0.05),
          "manakov": lambda: _vector(1.0, (1, -1), 0.05, math.pi / 4)}[case]()
    ev = spectrum_of(st).eigenvalues
    assert _match(ev, -ev) < 1e-8
    assert _match(ev, ev.conj()) < 1e-8


def test_gauge_kernel_vectors():
    for st in (_scalar(0.1), _vector(2 / 3, (1, 1), 0.1)):
        ops = assemble_operators(st)
        C = st.spec.n_components
        nn = st.spec.grid.n_nodes
        for c in range(C):
            v = np.zeros(ops.dim, complex)
            z = st.field.components[c].ravel()
            v[np.arange(nn) * 2 * C + 2 * c] = 1j * z
            v[np.arange(nn) * 2 * C + 2 * c + 1] = -1j * np.conj(z)
            assert np.linalg.norm(ops.sigma * (ops.H @ v)) < 1e-8


def test_hidden_charge_kernel_and_index_count():
    for eps in (0.05, 0.1):
        rep = spectrum_of(_vector(2 / 3, (1, -1), eps))
        assert (rep.zero_algebraic, rep.zero_geometric) == (4, 2)
        lhs, rhs = rep.index_balance()
        assert lhs == rhs == 12


def test_manakov_double_charge_block_split():
    """(1,1) at beta = 1 is a rotated scalar state: its spectrum is the scalar one
    together with +-i times the spectrum of the self-adjoint operator of the idle component."""
    eps, d = 0.06, 0.4
    vec = _vector(1.0, (1, 1), eps, d)
    sca = _scalar(eps)
    full = spectrum_of(vec).raw_eigenvalues
    scal = spectrum_of(sca).raw_eigenvalues
    u = sca.field.components[0].ravel()
    L = np.diag(1.0 - np.abs(u) ** 2) - eps * np.array(
        [oracles.hop_loop(6, e) for e in np.eye(G6.n_nodes)]).T
    mu = np.linalg.eigvalsh(L)
    union = np.concatenate([scal, 1j * mu, -1j * mu])
    assert _match(full, union) < 1e-8


def test_manakov_hidden_mirror_in_delta():
    eps = 0.04
    a = spectrum_of(_vector(1.0, (1, -1), eps, math.pi / 8)).raw_eigenvalues
    b = spectrum_of(_vector(1.0, (1, -1), eps, math.pi / 2 - math.pi / 8)).raw_eigenvalues
    assert _match(a, b) < 1e-8


def test_manakov_kernel_sizes():
    assert spectrum_of(_vector(1.0, (1, -1), 0.05, math.pi / 4)).zero_algebraic == 8
    assert spectrum_of(_vector(1.0, (1, -1), 0.05, math.pi / 8)).zero_algebraic == 6


def test_spectrum_matches_dense_oracle():
    st = _vector(2.0, (1, -1), 0.05)
    rep = spectrum_of(st)
    H, sigma = oracles.linearization(6, st.field.flat(), 0.05, 2.0, 1.0, C=2)
    ref = oracles.eigenvalues(H, sigma)
    assert rep.max_real_part == pytest.approx(ref.real.max(), abs=1e-9)


def test_track_branch_scalar_slopes():
    states = newton_continue(VortexSpec(grid=G6), 0.06, step=0.01)
    assert track_branch([]).tracks == {}
    br = track_branch(states)
    assert br.eps == pytest.approx([0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06])
    ratios = sorted(abs(t.at(0.01).imag) / 0.01 for t in br.tracks.values()
                    if t.at(0.01) is not None and abs(t.at(0.01)) > 1e-6)
    assert ratios[-2:] == pytest.approx([2.0, 2.0], rel=0.02)


def test_track_branch_hidden_doubles():
    states = newton_continue(VortexSpec("vector", (1, -1), beta=2 / 3, grid=G6), 0.05, step=0.01)
    br = track_branch(states)
    doubles = br.double_tracks()
    vals = sorted(abs(br.tracks[a].at(0.05)) for a, _ in doubles)
    # the O(eps) pairs are double; the O(eps^2) degeneracy splits at higher order
    assert len(doubles) == 2
    assert vals == pytest.approx([2 * 0.05 * math.sqrt(0.2), 0.1], rel=0.1)


def test_detect_hh_stable_and_already_unstable_branches():
    states = newton_continue(VortexSpec(grid=G6), 0.1, step=0.02)
    assert detect_hh(track_branch(states)) == []
    spec = VortexSpec("vector", (1, 1), beta=2.0, grid=G6)
    states = newton_continue(spec, 0.1, step=0.01)[1:]
    br = track_branch(states)
    assert all(r.max_real_part > 1e-4 for r in br.reports)
    assert detect_hh(br) == []
    assert any(any(abs(v.real) > 1e-4 and abs(v.imag) > 1e-4 for v in t.values)
               for t in br.tracks.values())


def test_growth_rate_needs_an_unstable_state():
    st = _scalar(0.1)
    with pytest.raises(PreconditionError):
        validate_growth_rate(st, spectrum_of(st))


def test_growth_rate_matches_spectrum_beta_2(golden):
    st = _vector(2.0, (1, -1), 0.05, N=10)
    rep = spectrum_of(st)
    g = golden["growth_rate_beta_2"]["value"]
    assert rep.max_real_part == pytest.approx(g["spectral_rate"], abs=1e-8)
    rate = validate_growth_rate(st, rep)
    assert rate == pytest.approx(rep.max_real_part, rel=0.1)
