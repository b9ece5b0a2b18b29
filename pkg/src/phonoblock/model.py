"""Rotating-frame Hamiltonians and Lindblad generators for two weakly nonlinear
mechanical resonators with Coulomb-mediated hopping, optionally read out by a
cavity coupled to the primary resonator at the red sideband.

All rates are expressed in units of the mechanical damping gamma unless a
geometry converts laboratory quantities. The master equation convention is

    drho/dt = i [rho, H] + sum_k r_k (C rho C+ - 1/2 C+C rho - 1/2 rho C+C)

and superoperators act on column-stacked density matrices.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.constants
import scipy.sparse as sp

from . import fock
from .fock import HilbertSpace, adjoint, destroy, number

DEFAULT_MECH_DIMS = (6, 6)
DEFAULT_FULL_DIMS = (5, 5, 3)

# Drive amplitudes above this fraction of gamma leave the weak-driving regime
# in which the truncated correlation analysis is controlled.
WEAK_DRIVE_LIMIT = 0.2

__all__ = [
    "DEFAULT_FULL_DIMS",
    "DEFAULT_MECH_DIMS",
    "WEAK_DRIVE_LIMIT",
    "CoulombGeometry",
    "MechParams",
    "OmParams",
    "Superoperator",
    "WeakDriveWarning",
    "build_full_hamiltonian",
    "build_liouvillian",
    "build_mech_hamiltonian",
    "coulomb_coupling",
    "full_collapse_ops",
    "mech_collapse_ops",
    "thermal_occupation",
]


class WeakDriveWarning(UserWarning):
    """Raised when drive amplitudes leave the weak-driving regime."""


@dataclass(frozen=True)
class MechParams:
    """Parameters of the two-resonator model in the frame rotating at the drive.

    delta   detuning of both resonators from the drive
    u       Kerr nonlinearity of each resonator
    j       hopping rate between the resonators
    omega1  amplitude of the drive on the primary resonator
    omega2  amplitude of the drive on the secondary resonator
    phi     phase of the secondary drive relative to the primary
    gamma   mechanical damping rate (the unit, normally 1)
    nth     thermal occupation of the mechanical baths
    """

    delta: float
    u: float
    j: float
    omega1: float
    omega2: float = 0.0
    phi: float = 0.0
    gamma: float = 1.0
    nth: float = 0.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.nth < 0:
            raise ValueError(f"nth must be nonnegative, got {self.nth}")
        if self.omega1 < 0 or self.omega2 < 0:
            raise ValueError("drive amplitudes must be nonnegative")
        if max(self.omega1, self.omega2) > WEAK_DRIVE_LIMIT * self.gamma:
            warnings.warn(
                f"drive amplitude {max(self.omega1, self.omega2):g} exceeds "
                f"{WEAK_DRIVE_LIMIT:g}*gamma; steady-state correlations leave the "
                "weak-driving regime",
                WeakDriveWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class OmParams:
    """Cavity readout parameters: beam-splitter coupling g to the primary
    resonator, linewidth kappa, and cavity detuning (defaults to the
    mechanical detuning when None)."""

    g: float
    kappa: float
    delta_a: float | None = None

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.g < 0:
            raise ValueError(f"g must be nonnegative, got {self.g}")

    def adiabatic_regime(self, params: MechParams) -> bool:
        """Whether the cavity is fast enough to follow the mechanics."""
        return self.kappa >= 5.0 * max(
            self.g, params.j, params.gamma * (params.nth + 1.0)
        )


@dataclass(frozen=True)
class CoulombGeometry:
    """Laboratory geometry of the two charged resonators: plate capacitances
    and bias voltages, equilibrium separation d, effective masses, and the
    common mechanical frequency (SI units throughout)."""

    c1: float
    v1: float
    c2: float
    v2: float
    d: float
    m1: float
    m2: float
    omega_m: float

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError("separation d must be positive")
        if self.m1 <= 0 or self.m2 <= 0:
            raise ValueError("masses must be positive")
        if self.omega_m <= 0:
            raise ValueError("omega_m must be positive")


def coulomb_coupling(geom: CoulombGeometry) -> float:
    """Hopping rate (rad/s) produced by the linearized Coulomb interaction.

    The quadratic term of the expanded interaction, expressed with zero-point
    displacements, gives j = k_e C1 V1 C2 V2 / (d^3 omega_m sqrt(m1 m2));
    Planck's constant cancels. Flipping the sign of one voltage flips j.
    """
    k_e = 1.0 / (4.0 * np.pi * scipy.constants.epsilon_0)
    q1q2 = geom.c1 * geom.v1 * geom.c2 * geom.v2
    return k_e * q1q2 / (geom.d**3 * geom.omega_m * np.sqrt(geom.m1 * geom.m2))


def thermal_occupation(omega_m: float, temperature: float) -> float:
    """Bose occupation of a mode at omega_m (rad/s) and temperature (K)."""
    if omega_m <= 0:
        raise ValueError("omega_m must be positive")
    if temperature < 0:
        raise ValueError("temperature must be nonnegative")
    if temperature == 0:
        return 0.0
    x = scipy.constants.hbar * omega_m / (scipy.constants.k * temperature)
    return 1.0 / np.expm1(x)


def _kerr(space: HilbertSpace, mode: int):
    b = destroy(space, mode)
    bd = adjoint(b)
    return bd @ bd @ b @ b


def build_mech_hamiltonian(params: MechParams, space: HilbertSpace):
    """Two-mode rotating-frame Hamiltonian: detuning, Kerr terms, hopping,
    a real drive on mode 0 and a phase-shifted drive on mode 1."""
    if space.nmodes != 2:
        raise ValueError(f"expected a two-mode space, got {space.nmodes} modes")
    b1 = destroy(space, 0)
    b2 = destroy(space, 1)
    b1d, b2d = adjoint(b1), adjoint(b2)
    h = params.delta * (number(space, 0) + number(space, 1))
    h = h + params.u * (_kerr(space, 0) + _kerr(space, 1))
    h = h + params.j * (b1d @ b2 + b1 @ b2d)
    h = h + params.omega1 * (b1d + b1)
    if params.omega2 != 0.0:
        ph = np.exp(-1j * params.phi)
        h = h + params.omega2 * (b2d * ph + b2 * np.conj(ph))
    return h


def build_full_hamiltonian(params: MechParams, om: OmParams, space: HilbertSpace):
    """Three-mode Hamiltonian (b1, b2, a): the mechanical block plus a detuned
    cavity exchanging quanta with the primary resonator."""
    if space.nmodes != 3:
        raise ValueError(f"expected a three-mode space, got {space.nmodes} modes")
    b1 = destroy(space, 0)
    b2 = destroy(space, 1)
    a = destroy(space, 2)
    b1d, b2d, ad = adjoint(b1), adjoint(b2), adjoint(a)
    delta_a = params.delta if om.delta_a is None else om.delta_a
    h = params.delta * (number(space, 0) + number(space, 1))
    h = h + delta_a * number(space, 2)
    h = h + params.u * (_kerr(space, 0) + _kerr(space, 1))
    h = h + params.j * (b1d @ b2 + b1 @ b2d)
    h = h + om.g * (ad @ b1 + a @ b1d)
    h = h + params.omega1 * (b1d + b1)
    if params.omega2 != 0.0:
        ph = np.exp(-1j * params.phi)
        h = h + params.omega2 * (b2d * ph + b2 * np.conj(ph))
    return h


def mech_collapse_ops(params: MechParams, space: HilbertSpace) -> list:
    """Thermal damping channels of both mechanical modes: downward jumps at
    gamma (nth + 1) and, for nth > 0, upward jumps at gamma nth."""
    ops = []
    for mode in range(2):
        b = destroy(space, mode)
        ops.append((b, params.gamma * (params.nth + 1.0)))
        if params.nth > 0:
            ops.append((adjoint(b), params.gamma * params.nth))
    return ops


def full_collapse_ops(params: MechParams, om: OmParams, space: HilbertSpace) -> list:
    """Mechanical thermal channels plus cavity decay at kappa."""
    ops = mech_collapse_ops(params, space)
    ops.append((destroy(space, 2), om.kappa))
    return ops


@dataclass(frozen=True)
class Superoperator:
    """Lindblad generator acting on column-stacked density matrices.

    matrix has shape (d*d, d*d) for a composite Hilbert dimension d and is
    dense or compressed-sparse depending on d.
    """

    matrix: object
    space_dim: int

    @property
    def dim(self) -> int:
        return self.space_dim * self.space_dim

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)


# Composite Hilbert dimensions above this store the generator sparse; the
# three-mode default (dim 75) must stay sparse because its dense generator
# would occupy about half a gigabyte.
DENSE_SUPEROP_MAX_DIM = 64


def build_liouvillian(h, collapse_ops, *, hermiticity_tol: float = 1e-10) -> Superoperator:
    """Assemble the Lindblad generator from a Hamiltonian and (operator, rate)
    pairs. The Hamiltonian must be Hermitian and every rate nonnegative.

    Column-stacking turns rho H into (H^T kron I) vec(rho) and H rho into
    (I kron H) vec(rho); each dissipator contributes
    r (conj(C) kron C - 1/2 I kron C+C - 1/2 (C+C)^T kron I).
    """
    h_d = fock.to_dense(h)
    d = h_d.shape[0]
    if h_d.shape != (d, d):
        raise ValueError(f"Hamiltonian must be square, got {h_d.shape}")
    if np.abs(h_d - h_d.conj().T).max() > hermiticity_tol:
        raise ValueError("Hamiltonian is not Hermitian within tolerance")

    eye = sp.identity(d, dtype=complex, format="csr")
    h_sp = sp.csr_array(h_d)
    l_op = 1j * (sp.kron(h_sp.T, eye, format="csr") - sp.kron(eye, h_sp, format="csr"))
    for c, rate in collapse_ops:
        rate = float(rate)
        if rate < 0:
            raise ValueError(f"collapse rate must be nonnegative, got {rate}")
        if rate == 0.0:
            continue
        c_sp = sp.csr_array(fock.to_dense(c)) if not sp.issparse(c) else sp.csr_array(c)
        if c_sp.shape != (d, d):
            raise ValueError(f"collapse operator shape {c_sp.shape} != ({d}, {d})")
        cdc = sp.csr_array(c_sp.conj().T @ c_sp)
        l_op = l_op + rate * (
            sp.kron(c_sp.conj(), c_sp, format="csr")
            - 0.5 * sp.kron(eye, cdc, format="csr")
            - 0.5 * sp.kron(cdc.T, eye, format="csr")
        )

    if d <= DENSE_SUPEROP_MAX_DIM:
        return Superoperator(matrix=l_op.toarray(), space_dim=d)
    return Superoperator(matrix=sp.csr_array(l_op), space_dim=d)
