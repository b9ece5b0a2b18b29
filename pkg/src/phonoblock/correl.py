"""Second-order correlation functions of steady states.

Equal-time statistics come straight from expectation values; delayed
correlations use the quantum regression theorem, propagating b rho b+ under
the same generator that produced the steady state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import HilbertSpace, adjoint, destroy, expectation
from .model import Superoperator
from .steady import evolve, propagator

OCCUPANCY_FLOOR = 1e-12
_IMAG_TOL = 1e-10

__all__ = [
    "OCCUPANCY_FLOOR",
    "CorrelationSeries",
    "UndefinedCorrelationError",
    "g2_tau",
    "g2_zero",
    "occupation",
    "photon_g2_zero",
]


class UndefinedCorrelationError(ValueError):
    """g2 is undefined because the mode occupancy is at the vacuum floor."""


def _real(value: complex, what: str) -> float:
    if abs(value.imag) > _IMAG_TOL * max(1.0, abs(value.real)):
        raise ValueError(f"{what} has non-negligible imaginary part {value.imag:.3e}")
    return value.real


def occupation(rho: np.ndarray, space: HilbertSpace, mode: int) -> float:
    """Mean occupation of one mode in the given state."""
    b = destroy(space, mode)
    return _real(expectation(rho, adjoint(b) @ b), "occupation")


def g2_zero(
    rho: np.ndarray,
    space: HilbertSpace,
    mode: int = 0,
    *,
    occupancy_floor: float = OCCUPANCY_FLOOR,
) -> float:
    """Equal-time second-order correlation <b+ b+ b b> / <b+ b>^2 of one mode.

    Computed through the same sandwich b rho b+ used for delayed correlations
    so that g2_tau at tau = 0 agrees to machine precision.
    """
    b = destroy(space, mode)
    nbar = _real(expectation(rho, adjoint(b) @ b), "occupation")
    if nbar <= occupancy_floor:
        raise UndefinedCorrelationError(
            f"mode {mode} occupancy {nbar:.3e} is at the vacuum floor; g2 undefined"
        )
    sandwich = b @ rho @ adjoint(b)
    num = _real(expectation(sandwich, adjoint(b) @ b), "g2 numerator")
    return num / nbar**2


def photon_g2_zero(rho: np.ndarray, space: HilbertSpace, **kwargs) -> float:
    """Equal-time correlation of the cavity mode of a three-mode state."""
    if space.nmodes != 3:
        raise ValueError("photon statistics require the three-mode model")
    return g2_zero(rho, space, mode=2, **kwargs)


@dataclass(frozen=True)
class CorrelationSeries:
    """Delayed correlation values over a tau grid (tau in units of 1/gamma)."""

    taus: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.taus.shape != self.values.shape:
            raise ValueError("taus and values must have matching shapes")
        if np.any(self.values < -_IMAG_TOL):
            raise ValueError("correlation values must be nonnegative")


def g2_tau(
    liouv: Superoperator,
    rho_ss: np.ndarray,
    space: HilbertSpace,
    taus,
    mode: int = 0,
    *,
    local_tol: float = 1e-10,
    occupancy_floor: float = OCCUPANCY_FLOOR,
) -> CorrelationSeries:
    """Delayed correlation g2(tau) = <b+(0) b+(tau) b(tau) b(0)> / <b+ b>^2.

    The regression input b rho_ss b+ is propagated segment by segment along
    the (strictly increasing, nonnegative) tau grid; on the dense path the
    segment propagators are cached so uniform grids cost a single matrix
    exponential.
    """
    taus = np.asarray(taus, dtype=float)
    if taus.ndim != 1 or taus.size == 0:
        raise ValueError("taus must be a nonempty one-dimensional grid")
    if taus[0] < 0:
        raise ValueError("tau values must be nonnegative")
    if np.any(np.diff(taus) <= 0):
        raise ValueError("tau values must be strictly increasing")

    b = destroy(space, mode)
    nop = adjoint(b) @ b
    nbar = _real(expectation(rho_ss, nop), "occupation")
    if nbar <= occupancy_floor:
        raise UndefinedCorrelationError(
            f"mode {mode} occupancy {nbar:.3e} is at the vacuum floor; g2 undefined"
        )

    state = b @ rho_ss @ adjoint(b)
    values = np.empty_like(taus)
    cache: dict[float, np.ndarray] = {}
    prev = 0.0
    for k, tau in enumerate(taus):
        dt = tau - prev
        if dt > 0:
            if liouv.is_sparse:
                state = evolve(liouv, state, dt, local_tol=local_tol)
            else:
                key = round(dt, 15)
                if key not in cache:
                    cache[key] = propagator(liouv, dt)
                vec = state.reshape(-1, order="F")
                state = (cache[key] @ vec).reshape((liouv.space_dim,) * 2, order="F")
        values[k] = _real(expectation(state, nop), "g2 numerator") / nbar**2
        prev = tau
    return CorrelationSeries(taus=taus, values=values)
