"""Photon polarization on momentum wave packets.

Polarization is a momentum-attached (transverse) degree of freedom, so no
exact reduced density matrix exists; what is measurable is the POVM built
from the transverse parts of the Cartesian axes.  For each node k the
helicity basis is eps_pm(k) = R(khat) (1, +-i, 0)/sqrt(2) with R the
standard rotation, and the measurement vector attached to a real direction
d is its transverse projection b_d(k) = d - (d.khat) khat.  The effective
3x3 polarization matrix rho_mn = integral dmu |f|^2 alpha_m alpha_n^*
coincides entry by entry with the tomographic reconstruction from POVM
expectation values; both routes are implemented and cross-checked.

Boosts transport nodes along L k with the invariant-measure weights and the
helicity amplitudes unchanged (the transported 3-vector is the standard
rotation of the old one, which fixes the residual little-group phase to
zero); pure spatial rotations act on polarization vectors exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import geometry, qmatrix
from .wavepacket import (
    GaussianSpec,
    Measure,
    MomentumGrid,
    ensure_same_grid,
    gauss_grid,
    inner_product,
    normalize,
)

DEFAULT_NODES_PER_AXIS = 12

EPS_PLUS_STD = np.array([1.0, 1.0j, 0.0]) / np.sqrt(2.0)
EPS_MINUS_STD = np.array([1.0, -1.0j, 0.0]) / np.sqrt(2.0)

_AXES = np.eye(3)


def helicity_vectors(khat):
    """Right/left circular polarization vectors attached to a direction."""
    rot = geometry.standard_rotation(khat)
    return rot @ EPS_PLUS_STD, rot @ EPS_MINUS_STD


def helicity_vectors_batch(khats):
    rots = geometry.standard_rotation_batch(khats)
    return rots @ EPS_PLUS_STD, rots @ EPS_MINUS_STD


def transversal_b(direction, khat):
    """Transverse part of a real unit direction and its longitudinal coefficient.

    Returns (b, ell) with b = direction - ell * khat, ell = direction . khat,
    so |b|^2 + ell^2 = 1 and b . khat = 0.
    """
    direction = np.asarray(direction, dtype=float)
    khat = np.asarray(khat, dtype=float)
    for v in (direction, khat):
        if abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise ValueError("direction and khat must be unit vectors")
    ell = float(direction @ khat)
    return direction - ell * khat, ell


@dataclass(frozen=True)
class PhotonPacket:
    """Scalar profile and per-node helicity amplitudes on an invariant grid."""

    grid: MomentumGrid
    profile: np.ndarray    # (n,) complex
    helicity: np.ndarray   # (n, 2) complex, unit norm per node

    def __post_init__(self):
        profile = np.ascontiguousarray(self.profile, dtype=complex)
        helicity = np.ascontiguousarray(self.helicity, dtype=complex)
        if self.grid.convention is not Measure.INVARIANT:
            raise ValueError("photon packets require the INVARIANT measure convention")
        if self.grid.mass != 0.0:
            raise ValueError("photon grids must be massless")
        if profile.shape != (self.grid.n,) or helicity.shape != (self.grid.n, 2):
            raise ValueError("profile/helicity shapes do not match the grid")
        node_norm = np.sum(np.abs(helicity) ** 2, axis=1)
        if np.abs(node_norm - 1.0).max() > 1e-10:
            raise ValueError("per-node helicity amplitudes must be normalized")
        total = np.real(inner_product(self.grid, profile, profile))
        if abs(total - 1.0) > 1e-8:
            raise ValueError(f"profile norm {total:.12g} differs from 1")
        profile.setflags(write=False)
        helicity.setflags(write=False)
        object.__setattr__(self, "profile", profile)
        object.__setattr__(self, "helicity", helicity)

    def khat(self) -> np.ndarray:
        k = self.grid.nodes
        return k / np.linalg.norm(k, axis=1)[:, None]

    def alpha_vectors(self) -> np.ndarray:
        """Geometrical polarization 3-vector at every node."""
        eps_p, eps_m = helicity_vectors_batch(self.khat())
        return self.helicity[:, :1] * eps_p + self.helicity[:, 1:] * eps_m


def gaussian_beam(
    k_mean: float,
    delta_z: float,
    delta_r: float,
    helicity: int = +1,
    nodes_per_axis: int = DEFAULT_NODES_PER_AXIS,
    polarization=None,
) -> PhotonPacket:
    """Cylindrical Gaussian beam along +z with fixed polarization.

    `helicity` +-1 selects a circular state; alternatively `polarization`
    gives constant helicity amplitudes (a_plus, a_minus).  Requires
    k_mean > 5 delta_z so the grid stays in the forward cone; a beam with
    k_mean < 5 delta_r triggers a warning (the paraxial picture degrades).
    """
    if k_mean <= 0.0 or delta_z <= 0.0 or delta_r <= 0.0:
        raise ValueError("k_mean and widths must be positive")
    if k_mean <= 5.0 * delta_z:
        raise ValueError("k_mean must exceed 5 * delta_z to keep nodes forward")
    if k_mean < 5.0 * delta_r:
        warnings.warn("k_mean < 5 * delta_r: beam is far from paraxial", stacklevel=2)
    grid = gauss_grid(GaussianSpec.beam(k_mean, delta_z, delta_r),
                      nodes_per_axis, Measure.INVARIANT, mass=0.0)
    radius = np.linalg.norm(grid.nodes, axis=1)
    if np.any(radius < 1e-12 * k_mean) or np.any(grid.nodes[:, 2] <= 0.0):
        raise ValueError("beam grid reaches zero or backward momenta")
    k = grid.nodes
    f = np.exp(
        -((k[:, 2] - k_mean) ** 2) / (2.0 * delta_z**2)
        - (k[:, 0] ** 2 + k[:, 1] ** 2) / (2.0 * delta_r**2)
    ).astype(complex)
    f = normalize(grid, f)
    if polarization is None:
        polarization = (1.0, 0.0) if helicity > 0 else (0.0, 1.0)
    pol = np.asarray(polarization, dtype=complex)
    pol = pol / np.linalg.norm(pol)
    hel = np.broadcast_to(pol, (grid.n, 2)).copy()
    return PhotonPacket(grid=grid, profile=f, helicity=hel)


@dataclass(frozen=True)
class PolarizationPOVM:
    """Momentum-diagonal POVM elements for the x, y, z directions.

    Each element is stored as its per-node transverse vector; the three
    expectation values sum to one on every transverse state by construction.
    """

    grid: MomentumGrid
    bvecs: np.ndarray    # (3, n, 3) real

    def _weights2(self, packet: PhotonPacket) -> np.ndarray:
        ensure_same_grid(self.grid, packet.grid)
        return self.grid.weights * np.abs(packet.profile) ** 2

    def probabilities(self, packet: PhotonPacket) -> np.ndarray:
        """(p_x, p_y, p_z) on a packet."""
        w2 = self._weights2(packet)
        alpha = packet.alpha_vectors()
        overlaps = np.einsum("mnc,nc->mn", self.bvecs, alpha)
        return np.einsum("n,mn->m", w2, np.abs(overlaps) ** 2).real

    def expectation(self, packet: PhotonPacket, direction) -> float:
        """Expectation of the element attached to a (possibly complex) direction.

        The direction is normalized; its transverse part per node is the
        same linear combination of the stored vectors.
        """
        d = np.asarray(direction, dtype=complex)
        d = d / np.linalg.norm(d)
        w2 = self._weights2(packet)
        alpha = packet.alpha_vectors()
        b_d = np.einsum("m,mnc->nc", d, self.bvecs)
        overlaps = np.einsum("nc,nc->n", b_d.conj(), alpha)
        return float(np.sum(w2 * np.abs(overlaps) ** 2))

    def completeness_residual(self, packet: PhotonPacket) -> float:
        return float(abs(self.probabilities(packet).sum() - 1.0))


def build_povm(grid: MomentumGrid) -> PolarizationPOVM:
    """Transverse-projection POVM elements for the Cartesian directions."""
    if grid.convention is not Measure.INVARIANT:
        raise ValueError("polarization POVMs require an INVARIANT-convention grid")
    k = grid.nodes
    khat = k / np.linalg.norm(k, axis=1)[:, None]
    bvecs = np.empty((3, grid.n, 3))
    for m in range(3):
        bvecs[m] = _AXES[m] - khat * khat[:, m:m + 1]
    return PolarizationPOVM(grid=grid, bvecs=bvecs)


def effective_density(psi: PhotonPacket, validate: bool = True) -> np.ndarray:
    """3x3 polarization matrix integral dmu |f|^2 alpha alpha^dagger.

    With validate=True the tomographic POVM reconstruction is evaluated as
    well and the two routes are required to agree to 1e-10.
    """
    w2 = psi.grid.weights * np.abs(psi.profile) ** 2
    alpha = psi.alpha_vectors()
    rho = qmatrix.hermitize(np.einsum("n,nm,nc->mc", w2, alpha, alpha.conj()))
    if validate:
        other = effective_density_tomography(psi)
        gap = float(np.abs(rho - other).max())
        if gap > 1e-10:
            raise RuntimeError(f"polarization matrix routes disagree by {gap:.3g}")
    return rho


def effective_density_tomography(psi: PhotonPacket) -> np.ndarray:
    """Polarization matrix rebuilt from POVM expectation values only.

    Diagonals come from the axis elements; off-diagonal entries from the
    combination elements along (m + n)/sqrt(2) and (m - i n)/sqrt(2).
    """
    povm = build_povm(psi.grid)
    diag = povm.probabilities(psi)
    rho = np.diag(diag).astype(complex)
    for m in range(3):
        for n in range(m + 1, 3):
            base = 0.5 * (diag[m] + diag[n])
            re = povm.expectation(psi, _AXES[m] + _AXES[n]) - base
            im = povm.expectation(psi, _AXES[m] - 1j * _AXES[n]) - base
            rho[m, n] = re + 1j * im
            rho[n, m] = re - 1j * im
    return rho


def boost_photon(lam: np.ndarray, psi: PhotonPacket) -> PhotonPacket:
    """Transport a packet through a boost.

    Nodes move to the spatial part of L k; the invariant-measure weights and
    the profile values ride along unchanged, and so do the helicity
    amplitudes (polarization vectors follow the standard-rotation transport).
    """
    k = psi.grid.nodes
    k4 = np.concatenate([np.linalg.norm(k, axis=1)[:, None], k], axis=1)
    k4_out = k4 @ np.asarray(lam, dtype=float).T
    if np.any(k4_out[:, 0] <= 0.0):
        raise ValueError("transported photon energies are not positive")
    grid = MomentumGrid(
        nodes=k4_out[:, 1:],
        weights=psi.grid.weights,
        convention=Measure.INVARIANT,
        mass=0.0,
    )
    return PhotonPacket(grid=grid, profile=psi.profile, helicity=psi.helicity)


def rotate_packet(rot: np.ndarray, psi: PhotonPacket) -> PhotonPacket:
    """Rotate a packet exactly: nodes and polarization 3-vectors by `rot`."""
    rot = np.asarray(rot, dtype=float)
    nodes = psi.grid.nodes @ rot.T
    grid = MomentumGrid(
        nodes=nodes,
        weights=psi.grid.weights,
        convention=Measure.INVARIANT,
        mass=0.0,
    )
    alpha = psi.alpha_vectors() @ rot.T
    khat = nodes / np.linalg.norm(nodes, axis=1)[:, None]
    eps_p, eps_m = helicity_vectors_batch(khat)
    hel = np.stack(
        [
            np.einsum("nc,nc->n", eps_p.conj(), alpha),
            np.einsum("nc,nc->n", eps_m.conj(), alpha),
        ],
        axis=1,
    )
    return PhotonPacket(grid=grid, profile=psi.profile, helicity=hel)


def circular_pair_error(
    k_mean: float,
    delta_z: float,
    delta_r: float,
    nodes_per_axis: int = DEFAULT_NODES_PER_AXIS,
) -> float:
    """Helstrom error between the two circular beams of a common profile.

    Strictly positive for any finite radial spread; tends to the leading
    order delta_r^2 / (4 k_mean^2) as delta_r / k_mean -> 0.
    """
    plus = gaussian_beam(k_mean, delta_z, delta_r, +1, nodes_per_axis)
    minus = gaussian_beam(k_mean, delta_z, delta_r, -1, nodes_per_axis)
    return orthogonality_audit(plus, minus)


def orthogonality_audit(psi1: PhotonPacket, psi2: PhotonPacket) -> float:
    """Helstrom error of the two effective polarization matrices."""
    ensure_same_grid(psi1.grid, psi2.grid)
    return qmatrix.helstrom_error(effective_density(psi1), effective_density(psi2))


@dataclass(frozen=True)
class DopplerReport:
    k_mean: float
    delta_z: float
    delta_r: float
    v: float
    pe_rest: float
    pe_boosted: float
    ratio: float
    closed_form_ratio: float
    grid_nodes: int

    def as_dict(self) -> dict:
        return {
            "kA": self.k_mean,
            "delta_z": self.delta_z,
            "delta_r": self.delta_r,
            "v": self.v,
            "pe_rest": self.pe_rest,
            "pe_boosted": self.pe_boosted,
            "ratio": self.ratio,
            "closed_form_ratio": self.closed_form_ratio,
            "grid_nodes": self.grid_nodes,
        }


def doppler_report(
    k_mean: float,
    delta_z: float,
    delta_r: float,
    v: float,
    nodes_per_axis: int = DEFAULT_NODES_PER_AXIS,
) -> DopplerReport:
    """Distinguishability of the circular pair for an observer moving along z.

    Positive v (observer receding along the propagation axis) redshifts the
    beam and scales the error by (1 + v)/(1 - v) at leading order; negative
    v shrinks it by the same law.
    """
    if abs(v) >= 1.0:
        raise ValueError("observer speed must satisfy |v| < 1")
    plus = gaussian_beam(k_mean, delta_z, delta_r, +1, nodes_per_axis)
    minus = gaussian_beam(k_mean, delta_z, delta_r, -1, nodes_per_axis)
    pe_rest = orthogonality_audit(plus, minus)
    lam = geometry.observer_boost(np.array([0.0, 0.0, v]))
    pe_boosted = orthogonality_audit(boost_photon(lam, plus), boost_photon(lam, minus))
    return DopplerReport(
        k_mean=k_mean,
        delta_z=delta_z,
        delta_r=delta_r,
        v=v,
        pe_rest=pe_rest,
        pe_boosted=pe_boosted,
        ratio=pe_boosted / pe_rest,
        closed_form_ratio=(1.0 + v) / (1.0 - v),
        grid_nodes=nodes_per_axis**3,
    )


def doppler_error(
    k_mean: float,
    delta_z: float,
    delta_r: float,
    v: float,
    nodes_per_axis: int = DEFAULT_NODES_PER_AXIS,
) -> float:
    """Recomputed pair error in the moving observer's frame."""
    return doppler_report(k_mean, delta_z, delta_r, v, nodes_per_axis).pe_boosted
