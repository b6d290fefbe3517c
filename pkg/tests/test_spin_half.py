import numpy as np
import pytest

from relqi import geometry as geo
from relqi import qmatrix as qm
from relqi import spin_half as sh
from relqi.wavepacket import Measure, MomentumGrid

RNG = np.random.default_rng(90210)

KET0 = np.diag([1.0, 0.0]).astype(complex)

# converged reference values (40 nodes per axis), delta/m = 1, theta = pi/2
ENTROPY_GAMMA_05 = 0.120364514661
PAIR_ERROR_GAMMA_0005 = 1.65510017619e-06


def reduced_density_oracle(psi):
    """Direct summation over nodes, independent of the einsum path."""
    out = np.zeros((2, 2), dtype=complex)
    for w, a in zip(psi.grid.weights, psi.amps):
        out += w * np.outer(a, a.conj())
    return out


def test_gaussian_spin_up_is_product_state():
    psi = sh.gaussian_spin_up(0.4, 1.0, 8)
    assert psi.norm() == pytest.approx(1.0, abs=1e-8)
    tau = sh.reduced_spin_density(psi)
    np.testing.assert_allclose(tau, KET0, atol=1e-10)
    assert qm.entropy(tau) < 1e-9
    assert np.abs(psi.amps[:, 1]).max() == 0.0


def test_product_packet_reduces_to_projector():
    spinor = np.array([0.6, 0.8j])
    psi = sh.gaussian_packet(0.7, 1.0, 8, spinor=spinor)
    spinor = spinor / np.linalg.norm(spinor)
    np.testing.assert_allclose(
        sh.reduced_spin_density(psi), np.outer(spinor, spinor.conj()), atol=1e-10
    )


def test_identity_boost_is_noop():
    psi = sh.gaussian_spin_up(0.5, 1.0, 6)
    out = sh.boost_packet(np.eye(4), psi)
    np.testing.assert_allclose(out.amps, psi.amps, atol=1e-12)
    np.testing.assert_allclose(out.grid.nodes, psi.grid.nodes, atol=1e-12)


def test_sharp_packet_spin_survives_boost():
    psi = sh.gaussian_spin_up(1e-4, 1.0, 8)
    boosted = sh.boost_packet(geo.boost_from_velocity([0.0, 0.0, 0.9]), psi)
    np.testing.assert_allclose(sh.reduced_spin_density(boosted), KET0, atol=1e-6)


def test_boost_norm_conservation():
    psi = sh.gaussian_spin_up(0.8, 1.0, 8)
    for _ in range(10):
        direction = RNG.normal(size=3)
        direction /= np.linalg.norm(direction)
        lam = geo.boost_from_velocity(RNG.uniform(0.1, 0.99) * direction)
        assert abs(sh.boost_packet(lam, psi).norm() - 1.0) < 1e-8


def test_boost_composition_covariance():
    psi = sh.gaussian_spin_up(0.6, 1.0, 8)
    lam1 = sh.boost_for_angle(0.5, 0.9)
    lam2 = geo.boost_from_velocity([0.2, -0.1, 0.3])
    two_step = sh.boost_packet(lam2, sh.boost_packet(lam1, psi))
    one_step = sh.boost_packet(lam2 @ lam1, psi)
    s_two = qm.entropy(sh.reduced_spin_density(two_step))
    s_one = qm.entropy(sh.reduced_spin_density(one_step))
    assert abs(s_two - s_one) < 1e-8


def test_reduced_density_direct_sum_oracle():
    beta = sh.beta_for_gamma(0.5, 1.0)
    boosted = sh.boost_packet(
        sh.boost_for_angle(beta, np.pi / 2), sh.gaussian_spin_up(1.0, 1.0, 8)
    )
    np.testing.assert_allclose(
        sh.reduced_spin_density(boosted), reduced_density_oracle(boosted), atol=1e-12
    )


def test_disjoint_supports_with_orthogonal_spins_mix():
    up = sh.gaussian_packet(0.3, 1.0, 6, spinor=(1.0, 0.0))
    shift = np.array([0.0, 0.0, 6.0])
    grid = MomentumGrid(
        nodes=np.vstack([up.grid.nodes - shift, up.grid.nodes + shift]),
        weights=np.concatenate([up.grid.weights, up.grid.weights]),
        convention=Measure.PLAIN,
        mass=1.0,
    )
    n = up.grid.n
    amps = np.zeros((2 * n, 2), dtype=complex)
    amps[:n, 0] = up.amps[:, 0] / np.sqrt(2.0)
    amps[n:, 1] = up.amps[:, 0] / np.sqrt(2.0)
    psi = sh.SpinorPacket(grid=grid, amps=amps, mass=1.0)
    np.testing.assert_allclose(sh.reduced_spin_density(psi), np.eye(2) / 2, atol=1e-8)


def test_gamma_parameter_values():
    assert sh.gamma_parameter(1.0, 1.0, 0.6) == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert sh.gamma_parameter(0.2, 1.0, 0.0) == 0.0
    # small-beta expansion: gamma ~ (delta/m) beta / 2
    assert sh.gamma_parameter(0.2, 1.0, 0.01) == pytest.approx(0.001, rel=1e-2)
    with pytest.raises(ValueError):
        sh.gamma_parameter(0.2, 1.0, 1.0)
    with pytest.raises(ValueError):
        sh.gamma_parameter(-0.1, 1.0, 0.5)


def test_beta_for_gamma_inversion():
    for gamma in (1e-4, 0.05, 0.3, 0.8):
        beta = sh.beta_for_gamma(gamma, 1.0)
        assert sh.gamma_parameter(1.0, 1.0, beta) == pytest.approx(gamma, rel=1e-10)
    assert sh.beta_for_gamma(0.0, 1.0) == 0.0
    with pytest.raises(ValueError, match="unreachable"):
        sh.beta_for_gamma(0.7, 0.5)


def test_gamma_monotonicity():
    betas = np.linspace(0.05, 0.95, 10)
    gammas = [sh.gamma_parameter(0.5, 1.0, b) for b in betas]
    assert np.all(np.diff(gammas) > 0)
    deltas = np.linspace(0.1, 1.0, 10)
    gammas = [sh.gamma_parameter(d, 1.0, 0.5) for d in deltas]
    assert np.all(np.diff(gammas) > 0)


def test_boosted_entropy_positive_and_pinned():
    beta = sh.beta_for_gamma(0.5, 1.0)
    tau, _ = sh.boosted_pair_densities(1.0, 1.0, beta, np.pi / 2, 20)
    s = qm.entropy(tau)
    assert s > 0.0
    assert s == pytest.approx(ENTROPY_GAMMA_05, abs=1e-6)
    tau2, _ = sh.boosted_pair_densities(1.0, 1.0, beta, np.pi / 2, 40)
    assert abs(qm.entropy(tau2) - s) < 1e-6


def test_pair_error_zero_at_rest():
    assert sh.boosted_pair_error(0.5, 1.0, 0.0, 0.3, 6) < 1e-9


def test_pair_error_quadratic_law():
    ratios = []
    for gamma in (0.001, 0.002, 0.005):
        beta = sh.beta_for_gamma(gamma, 1.0)
        ratios.append(sh.boosted_pair_error(1.0, 1.0, beta, np.pi / 2, 12) / gamma**2)
    ratios = np.array(ratios)
    assert ratios.max() / ratios.min() < 1.05


def test_pair_error_refined_grid_pin():
    beta = sh.beta_for_gamma(0.005, 1.0)
    coarse = sh.boosted_pair_error(1.0, 1.0, beta, np.pi / 2, 12)
    fine = sh.boosted_pair_error(1.0, 1.0, beta, np.pi / 2, 24)
    assert abs(coarse - fine) < 1e-7
    assert fine == pytest.approx(PAIR_ERROR_GAMMA_0005, rel=1e-4)


def test_pair_error_exchange_symmetry():
    beta = sh.beta_for_gamma(0.3, 1.0)
    tau_up, tau_down = sh.boosted_pair_densities(1.0, 1.0, beta, 0.8, 8)
    assert qm.helstrom_error(tau_up, tau_down) == pytest.approx(
        qm.helstrom_error(tau_down, tau_up), abs=1e-10
    )


def test_sharp_momentum_limit_entropy_vanishes():
    values = []
    for delta in (0.3, 0.1, 0.03):
        tau, _ = sh.boosted_pair_densities(delta, 1.0, 0.8, np.pi / 2, 10)
        values.append(qm.entropy(tau))
    assert values[0] > values[1] > values[2]
    assert values[2] < 1e-3


def test_entropy_sweep_rows():
    rows = sh.entropy_sweep(
        [0.5, np.pi - 0.5], [0.0, 0.4], nodes_per_axis=8, check_convergence=False
    )
    assert len(rows) == 4
    by_key = {(round(r["theta"], 6), r["gamma"]): r for r in rows}
    for theta in (0.5, np.pi - 0.5):
        assert by_key[(round(theta, 6), 0.0)]["entropy_bits"] < 1e-9
    s1 = by_key[(round(0.5, 6), 0.4)]["entropy_bits"]
    s2 = by_key[(round(np.pi - 0.5, 6), 0.4)]["entropy_bits"]
    assert abs(s1 - s2) < 1e-8


def test_entropy_sweep_marks_unreachable_gamma():
    rows = sh.entropy_sweep([0.1], [0.9], delta_over_m=0.5, nodes_per_axis=6)
    assert len(rows) == 1
    assert not rows[0]["converged"]
    assert np.isnan(rows[0]["entropy_bits"])
    assert "unreachable" in rows[0]["error"]


def test_entropy_sweep_convergence_flag():
    row = sh.sweep_row(np.pi / 2, 0.25, nodes_per_axis=12, tolerance=1e-4)
    assert row["converged"]
    row = sh.sweep_row(np.pi / 2, 0.5, nodes_per_axis=4, tolerance=1e-8)
    assert not row["converged"]


def test_mass_mismatch_rejected():
    psi = sh.gaussian_spin_up(0.5, 1.0, 4)
    with pytest.raises(ValueError, match="mass"):
        sh.SpinorPacket(grid=psi.grid, amps=psi.amps, mass=2.0)
