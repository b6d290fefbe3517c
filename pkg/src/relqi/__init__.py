"""Relativistic quantum information numerics.

Lorentz/Wigner transformations of momentum wave packets for massive
spin-1/2 particles and photons, frame-dependent reduced density matrices
and entropies, minimum-error distinguishability, the photon-polarization
POVM, boost dependence of two-particle entanglement, and
complete-positivity audits of boost-induced effective channels.
"""

from . import channel, entangle, geometry, photon, qmatrix, spin_half, wavepacket
from .entangle import TwoParticleAmplitude, bell_gaussian, boost_pair, concurrence
from .geometry import (
    boost_from_velocity,
    observer_boost,
    rotation_to_su2,
    standard_boost,
    standard_rotation,
    wigner_rotation,
)
from .photon import (
    PhotonPacket,
    PolarizationPOVM,
    build_povm,
    circular_pair_error,
    doppler_report,
    effective_density,
    gaussian_beam,
    helicity_vectors,
    transversal_b,
)
from .qmatrix import (
    QubitChannel,
    choi_matrix,
    entropy,
    helstrom_error,
    is_completely_positive,
    partial_trace,
)
from .spin_half import (
    SpinorPacket,
    boost_packet,
    boosted_pair_error,
    gamma_parameter,
    gaussian_spin_up,
    reduced_spin_density,
)
from .wavepacket import GaussianSpec, Measure, MomentumGrid, gauss_grid

__version__ = "0.1.0"
