"""Massive spin-1/2 wave packets under Lorentz boosts.

A packet is a two-component spinor amplitude on a PLAIN-convention momentum
grid.  Boosts transport each node q to the spatial part of L q, rotate the
spinor by the SU(2) Wigner rotation of the little group at q, multiply by
the energy-ratio prefactor sqrt(q0 / (Lq)0), and scale the weight by the
inverse Jacobian (Lq)0 / q0, so the quadrature norm is conserved exactly
and no resampling or interpolation ever happens.

The dimensionless boost-mixing parameter is
gamma_parameter = (width / mass) * (1 - sqrt(1 - beta^2)) / beta;
boost directions for sweeps lie in the x-z plane at angle theta from z
(the azimuth is immaterial by symmetry).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import geometry, qmatrix
from .wavepacket import GaussianSpec, Measure, MomentumGrid, gauss_grid, inner_product

DEFAULT_NODES_PER_AXIS = 12


@dataclass(frozen=True)
class SpinorPacket:
    """Two-component spinor amplitudes on a PLAIN momentum grid."""

    grid: MomentumGrid
    amps: np.ndarray   # (n, 2) complex
    mass: float

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amps, dtype=complex)
        if self.grid.convention is not Measure.PLAIN:
            raise ValueError("spinor packets require the PLAIN measure convention")
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if self.grid.mass != self.mass:
            raise ValueError("grid mass does not match the packet mass")
        if amps.shape != (self.grid.n, 2):
            raise ValueError("amplitudes must have shape (n_nodes, 2)")
        nrm = self.norm(amps)
        if abs(nrm - 1.0) > 1e-8:
            raise ValueError(f"packet norm {nrm:.12g} differs from 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    def norm(self, amps=None) -> float:
        a = self.amps if amps is None else amps
        return float(np.sqrt(np.real(inner_product(self.grid, a, a))))


def gaussian_packet(
    delta: float,
    mass: float,
    nodes_per_axis: int = DEFAULT_NODES_PER_AXIS,
    spinor=(1.0, 0.0),
) -> SpinorPacket:
    """Zero-centered isotropic Gaussian profile times a fixed spinor."""
    if delta <= 0.0 or mass <= 0.0:
        raise ValueError("width and mass must be positive")
    grid = gauss_grid(GaussianSpec.isotropic(delta), nodes_per_axis, Measure.PLAIN, mass=mass)
    profile = np.exp(-np.sum(grid.nodes**2, axis=1) / (2.0 * delta * delta))
    spinor = np.asarray(spinor, dtype=complex)
    spinor = spinor / np.linalg.norm(spinor)
    amps = profile[:, None] * spinor[None, :]
    amps /= np.sqrt(np.real(inner_product(grid, amps, amps)))
    return SpinorPacket(grid=grid, amps=amps, mass=mass)


def gaussian_spin_up(delta, mass, nodes_per_axis=DEFAULT_NODES_PER_AXIS) -> SpinorPacket:
    return gaussian_packet(delta, mass, nodes_per_axis, spinor=(1.0, 0.0))


def gaussian_spin_down(delta, mass, nodes_per_axis=DEFAULT_NODES_PER_AXIS) -> SpinorPacket:
    return gaussian_packet(delta, mass, nodes_per_axis, spinor=(0.0, 1.0))


def boost_packet(lam: np.ndarray, psi: SpinorPacket) -> SpinorPacket:
    """Apply a Lorentz transformation to a packet (node transport, no resampling)."""
    p4_out, wigner = geometry.wigner_su2_batch(lam, psi.grid.nodes, psi.mass)
    q0 = psi.grid.k0()
    p0 = p4_out[:, 0]
    amps = np.sqrt(q0 / p0)[:, None] * np.einsum("nij,nj->ni", wigner, psi.amps)
    grid = MomentumGrid(
        nodes=p4_out[:, 1:],
        weights=psi.grid.weights * (p0 / q0),
        convention=Measure.PLAIN,
        mass=psi.mass,
    )
    return SpinorPacket(grid=grid, amps=amps, mass=psi.mass)


def reduced_spin_density(psi: SpinorPacket) -> np.ndarray:
    """2x2 spin state obtained by integrating out the momentum."""
    tau = np.einsum("n,ni,nj->ij", psi.grid.weights, psi.amps, psi.amps.conj())
    return qmatrix.hermitize(tau)


def gamma_parameter(delta: float, mass: float, beta: float) -> float:
    """(delta/mass) (1 - sqrt(1 - beta^2)) / beta, continued to 0 at beta = 0."""
    if delta <= 0.0 or mass <= 0.0:
        raise ValueError("width and mass must be positive")
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must lie in [0, 1)")
    if beta == 0.0:
        return 0.0
    return (delta / mass) * (1.0 - np.sqrt(1.0 - beta * beta)) / beta


def beta_for_gamma(gamma: float, delta_over_m: float) -> float:
    """Invert gamma_parameter for beta at fixed delta/mass.

    Requires gamma < delta/mass, since (1 - sqrt(1 - b^2))/b < 1.
    """
    if gamma < 0.0:
        raise ValueError("gamma must be nonnegative")
    if gamma == 0.0:
        return 0.0
    target = gamma / delta_over_m
    if target >= 1.0:
        raise ValueError(
            f"gamma {gamma:.6g} unreachable at delta/m = {delta_over_m:.6g}"
        )
    return float(brentq(
        lambda b: (1.0 - np.sqrt(1.0 - b * b)) / b - target,
        1e-15, 1.0 - 1e-15, xtol=1e-14,
    ))


def boost_for_angle(beta: float, theta: float) -> np.ndarray:
    """Boost with speed beta at angle theta from z, in the x-z plane."""
    velocity = beta * np.array([np.sin(theta), 0.0, np.cos(theta)])
    return geometry.boost_from_velocity(velocity)


def boosted_pair_densities(delta, mass, beta, theta, nodes_per_axis=DEFAULT_NODES_PER_AXIS):
    """Reduced spin states of boosted spin-up and spin-down Gaussian packets."""
    lam = boost_for_angle(beta, theta)
    up = boost_packet(lam, gaussian_spin_up(delta, mass, nodes_per_axis))
    down = boost_packet(lam, gaussian_spin_down(delta, mass, nodes_per_axis))
    return reduced_spin_density(up), reduced_spin_density(down)


def boosted_pair_error(delta, mass, beta, theta, nodes_per_axis=DEFAULT_NODES_PER_AXIS) -> float:
    """Helstrom error for the boosted images of the orthogonal spin pair."""
    tau_up, tau_down = boosted_pair_densities(delta, mass, beta, theta, nodes_per_axis)
    return qmatrix.helstrom_error(tau_up, tau_down)


def _row_values(theta, gamma, delta_over_m, mass, nodes_per_axis):
    beta = beta_for_gamma(gamma, delta_over_m)
    tau_up, tau_down = boosted_pair_densities(
        delta_over_m * mass, mass, beta, theta, nodes_per_axis
    )
    return beta, qmatrix.entropy(tau_up), qmatrix.helstrom_error(tau_up, tau_down)


def sweep_row(
    theta: float,
    gamma: float,
    *,
    delta_over_m: float = 1.0,
    mass: float = 1.0,
    nodes_per_axis: int = DEFAULT_NODES_PER_AXIS,
    tolerance: float = 1e-6,
    check_convergence: bool = True,
) -> dict:
    """One sweep entry: spin entropy and pair error at (theta, gamma).

    Gamma is inverted for beta at the fixed delta_over_m; an unreachable
    gamma yields a NaN row carrying an "error" note instead of raising.
    With check_convergence the observables are recomputed at twice the
    resolution and the row is flagged converged when both move by less than
    `tolerance`.
    """
    row = {
        "theta": float(theta),
        "gamma": float(gamma),
        "beta": np.nan,
        "delta_over_m": float(delta_over_m),
        "entropy_bits": np.nan,
        "p_error": np.nan,
        "grid_nodes": nodes_per_axis**3,
        "converged": False,
    }
    try:
        beta, ent, perr = _row_values(theta, gamma, delta_over_m, mass, nodes_per_axis)
    except ValueError as exc:
        row["error"] = str(exc)
        return row
    row.update(beta=beta, entropy_bits=ent, p_error=perr, converged=True)
    if check_convergence:
        _, ent2, perr2 = _row_values(theta, gamma, delta_over_m, mass, 2 * nodes_per_axis)
        row["converged"] = bool(
            abs(ent2 - ent) < tolerance and abs(perr2 - perr) < tolerance
        )
    return row


def entropy_sweep(theta_list, gamma_list, **kwargs) -> list:
    """Rows of sweep_row over the (theta, gamma) product grid, in input order.

    Row keys match the CSV header theta,gamma,beta,delta_over_m,
    entropy_bits,p_error,grid_nodes,converged.
    """
    return [
        sweep_row(theta, gamma, **kwargs)
        for theta in theta_list
        for gamma in gamma_list
    ]
