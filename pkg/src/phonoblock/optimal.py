"""Closed-form optimal blockade conditions from truncated amplitude equations.

Expanding the weakly driven steady state on the zero-to-two phonon subspace
and demanding destructive interference of the two-phonon amplitude yields
algebraic conditions on the drive and resonator parameters.  Two regimes are
covered: a single drive, where the Kerr shift and detuning are tuned against
the coupling, and a pair of drives, where the relative amplitude and phase of
the second drive are tuned at fixed detuning and nonlinearity.  All rates are
in units of the mechanical linewidth unless a gamma is passed explicitly.

The same truncated ansatz also gives a 5x5 linear system for the steady-state
amplitudes, used as an independent weak-drive oracle for the master-equation
solver, and a 3x3 coefficient matrix whose determinant vanishes on the
optimal-blockade locus.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import MechParams

__all__ = [
    "AmplitudeState",
    "QuadraticCoeffs",
    "SingleDriveOptimum",
    "TwoDriveOptimum",
    "amplitude_g2",
    "amplitude_steady_state",
    "coefficient_matrix",
    "determinant_residual",
    "first_order_amplitudes",
    "quadratic_coeffs",
    "single_drive_optimal",
    "two_drive_optimal",
]

ROOT_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class SingleDriveOptimum:
    """Optimal detuning and Kerr strength for blockade under a single drive."""

    delta_opt: float
    u_opt: float
    j: float
    gamma: float
    branch: int


def single_drive_optimal(j: float, gamma: float = 1.0, branch: int = 1) -> SingleDriveOptimum:
    """Detuning and nonlinearity that cancel the two-phonon amplitude.

    Real solutions exist only for j > gamma / sqrt(2); below that threshold
    the interference cannot be completed and a ValueError is raised.  The
    branch sign selects the sign of the optimal detuning; the u value is odd
    in the detuning and flips with it.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    if 2 * j**2 <= gamma**2:
        raise ValueError(
            f"no real optimum for j = {j:g}, gamma = {gamma:g}; requires j > gamma/sqrt(2)"
        )
    radicand = math.sqrt(9 * j**4 + 8 * gamma**2 * j**2) - gamma**2 - 3 * j**2
    delta = branch * 0.5 * math.sqrt(radicand)
    u = delta * (5 * gamma**2 + 4 * delta**2) / (2 * (2 * j**2 - gamma**2))
    return SingleDriveOptimum(delta_opt=delta, u_opt=u, j=j, gamma=gamma, branch=branch)


@dataclass(frozen=True)
class QuadraticCoeffs:
    """Coefficients of the quadratic in z = zeta e^{-i phi} that cancels C20."""

    a2: complex
    a1: complex
    a0: complex
    delta_prime: complex

    def residual(self, z: complex) -> float:
        """Magnitude of the quadratic evaluated at z, relative to its term scale."""
        value = self.a2 * z * z + self.a1 * z + self.a0
        scale = max(abs(self.a2 * z * z), abs(self.a1 * z), abs(self.a0), 1e-300)
        return abs(value) / scale


def quadratic_coeffs(
    u: float, j: float, delta: float, gamma: float = 1.0
) -> QuadraticCoeffs:
    """Quadratic for the complex drive ratio z = (Omega2/Omega1) e^{-i phi}."""
    dp = delta - 0.5j * gamma
    a2 = 2 * j**2 * (dp + u / 2)
    a1 = -4 * j * dp * (dp + u)
    a0 = 2 * dp**3 + u * (j**2 + 2 * dp**2)
    return QuadraticCoeffs(a2=a2, a1=a1, a0=a0, delta_prime=dp)


@dataclass(frozen=True)
class TwoDriveOptimum:
    """Optimal relative amplitude and phase of the second drive, one branch."""

    zeta: float
    phi: float
    u: float
    j: float
    delta: float
    gamma: float
    branch: int

    @property
    def z(self) -> complex:
        """The complex root zeta e^{-i phi} itself."""
        return self.zeta * cmath.exp(-1j * self.phi)

    @property
    def phi_over_pi(self) -> float:
        """Phase in units of pi, the normalization used in figure captions."""
        return self.phi / math.pi


def two_drive_optimal(
    u: float, j: float, delta: float, gamma: float = 1.0
) -> tuple[TwoDriveOptimum, TwoDriveOptimum]:
    """Second-drive amplitude ratios and phases that cancel the two-phonon amplitude.

    Returns both roots of the underlying quadratic, plus branch first (plus
    sign in front of the principal-branch square root).  Phases are reported
    in (-pi, pi], so zeta >= 0 always.
    """
    dp = delta - 0.5j * gamma
    den = j**2 * (u + 2 * dp)
    if abs(den) == 0:
        raise ValueError("degenerate root denominator j^2 (u + 2 delta') = 0")
    root = cmath.sqrt(
        j**2 * u * (2 * u * dp**2 + 2 * dp**3 - j**2 * u - 2 * j**2 * dp)
    )
    coeffs = quadratic_coeffs(u, j, delta, gamma)
    out = []
    for branch in (1, -1):
        z = (2 * j * dp * (u + dp) + branch * root) / den
        res = coeffs.residual(z)
        if res > ROOT_RESIDUAL_TOL:
            raise ArithmeticError(
                f"root fails its own quadratic, relative residual {res:.3e}"
            )
        phi = -cmath.phase(z)
        if phi == -math.pi:
            phi = math.pi
        out.append(
            TwoDriveOptimum(
                zeta=abs(z), phi=phi, u=u, j=j, delta=delta, gamma=gamma, branch=branch
            )
        )
    return out[0], out[1]


def coefficient_matrix(params: MechParams, x22_phase_power: int = 1) -> np.ndarray:
    """Coefficient matrix of the homogeneous two-excitation amplitude system.

    The x22_phase_power switch selects the exponent of the drive-phase factor
    on the Omega2 squared term of the middle element.  Power 1, the default,
    keeps a linear phase factor there; power 2 uses the squared factor that
    matches the bottom-row element, and only that variant makes the
    determinant vanish exactly on the optimal-blockade locus.  The
    verification report compares both.
    """
    if x22_phase_power not in (1, 2):
        raise ValueError("x22_phase_power must be 1 or 2")
    dp = params.delta - 0.5j * params.gamma
    w = dp**2 - params.j**2
    if abs(w) == 0:
        raise ValueError("matrix elements diverge: (delta - i gamma/2)^2 = j^2")
    o1, o2, j = params.omega1, params.omega2, params.j
    e1 = cmath.exp(-1j * params.phi)
    ep = cmath.exp(-1j * params.phi * x22_phase_power)
    x = np.empty((3, 3), dtype=complex)
    x[0, 0] = j
    x[0, 1] = (j * o1 * o2 * e1 - o1**2 * dp) / w
    x[0, 2] = 0.0
    x[1, 0] = 2 * dp
    x[1, 1] = (j * (o1**2 + o2**2 * ep) - 2 * o1 * o2 * e1 * dp) / w
    x[1, 2] = math.sqrt(2) * j
    x[2, 0] = j
    x[2, 1] = (j * o1 * o2 * e1 - o2**2 * e1**2 * dp) / w
    x[2, 2] = math.sqrt(2) * (params.delta + params.u - 0.5j * params.gamma)
    return x


def determinant_residual(params: MechParams, x22_phase_power: int = 1) -> complex:
    """Determinant of the coefficient matrix; zero on the optimal-blockade locus.

    Callers judging smallness should normalize by max |x_mn| cubed.
    """
    x = coefficient_matrix(params, x22_phase_power)
    return complex(np.linalg.det(x))


@dataclass(frozen=True)
class AmplitudeState:
    """Steady-state amplitudes on the zero-to-two excitation subspace."""

    c00: complex
    c10: complex
    c01: complex
    c20: complex
    c11: complex
    c02: complex


def first_order_amplitudes(params: MechParams) -> tuple[complex, complex]:
    """Closed-form one-excitation amplitudes to leading order in the drives."""
    dp = params.delta - 0.5j * params.gamma
    w = dp**2 - params.j**2
    if abs(w) == 0:
        raise ValueError("amplitudes diverge: (delta - i gamma/2)^2 = j^2")
    e1 = cmath.exp(-1j * params.phi)
    c10 = (params.j * params.omega2 * e1 - params.omega1 * dp) / w
    c01 = (params.j * params.omega1 - params.omega2 * e1 * dp) / w
    return c10, c01


def amplitude_steady_state(params: MechParams) -> AmplitudeState:
    """Steady-state amplitudes from the linear system on the truncated subspace.

    The ground amplitude is pinned to 1 (weak-drive normalization) and the
    five excited amplitudes solve the stationary ansatz equations.  Thermal
    occupation is ignored: the ansatz has no thermal input.  Unlike
    first_order_amplitudes this keeps the back-action of the two-excitation
    amplitudes on the one-excitation ones.
    """
    dp = params.delta - 0.5j * params.gamma
    o1, j, u = params.omega1, params.j, params.u
    o2p = params.omega2 * cmath.exp(1j * params.phi)
    o2m = params.omega2 * cmath.exp(-1j * params.phi)
    s2 = math.sqrt(2)
    a = np.array(
        [
            [dp, j, s2 * o1, o2p, 0],
            [j, dp, 0, o1, s2 * o2p],
            [s2 * o1, 0, 2 * (dp + u), s2 * j, 0],
            [o2m, o1, s2 * j, 2 * dp, s2 * j],
            [0, s2 * o2m, 0, s2 * j, 2 * (dp + u)],
        ],
        dtype=complex,
    )
    rhs = -np.array([o1, o2m, 0, 0, 0], dtype=complex)
    try:
        c = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"amplitude system is singular: {exc}") from exc
    return AmplitudeState(c00=1.0, c10=c[0], c01=c[1], c20=c[2], c11=c[3], c02=c[4])


def amplitude_g2(state: AmplitudeState, floor: float = 1e-30) -> float:
    """Equal-time correlation 2 |C20|^2 / |C10|^4 of the driven mode."""
    p1 = abs(state.c10) ** 2
    if p1 <= floor:
        raise ValueError("one-excitation amplitude is at the floor; g2 undefined")
    return 2 * abs(state.c20) ** 2 / p1**2
