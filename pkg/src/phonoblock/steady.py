"""Steady states and time propagation of Lindblad generators.

The steady state is obtained by replacing one row of the generator with the
vectorized trace constraint and solving the resulting linear system: dense LU
up to DENSE_SUPEROP_MAX_DIM, sparse direct (SuperLU) above. Propagation uses
the dense matrix exponential on the dense path and an adaptive step-doubling
Runge-Kutta integrator on the sparse path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import fock, model
from .fock import HilbertSpace, adjoint, destroy, expectation
from .model import DENSE_SUPEROP_MAX_DIM, Superoperator

__all__ = [
    "ConvergenceReport",
    "DegenerateSteadyStateError",
    "SteadyOptions",
    "SteadyStateError",
    "convergence_check",
    "evolve",
    "propagator",
    "steady_state",
]


class SteadyStateError(RuntimeError):
    """The steady-state solve did not produce a valid density matrix."""


class DegenerateSteadyStateError(SteadyStateError):
    """The generator has a degenerate kernel (no unique steady state)."""


@dataclass(frozen=True)
class SteadyOptions:
    residual_tol: float = 1e-10
    psd_tol: float = 1e-9
    truncation_check: bool = True


_HERMITICITY_TOL = 1e-12


def _vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def _unvec(v: np.ndarray, d: int) -> np.ndarray:
    return v.reshape((d, d), order="F")


def _trace_row(d: int) -> np.ndarray:
    row = np.zeros(d * d, dtype=complex)
    row[np.arange(d) * (d + 1)] = 1.0
    return row


def _solve_dense(l_mat: np.ndarray, d: int) -> np.ndarray:
    a = l_mat.copy()
    a[0, :] = _trace_row(d)
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0
    try:
        return scipy.linalg.solve(a, rhs)
    except scipy.linalg.LinAlgError as exc:
        raise DegenerateSteadyStateError(
            "trace-replaced system is singular; the steady state is not unique"
        ) from exc


def _solve_sparse(l_mat, d: int) -> np.ndarray:
    coo = sp.coo_array(l_mat)
    keep = coo.row != 0
    rows = np.concatenate([coo.row[keep], np.zeros(d, dtype=coo.row.dtype)])
    cols = np.concatenate([coo.col[keep], np.arange(d) * (d + 1)])
    data = np.concatenate([coo.data[keep], np.ones(d, dtype=complex)])
    a = sp.csc_matrix((data, (rows, cols)), shape=l_mat.shape)
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0
    try:
        lu = spla.splu(a)
        x = lu.solve(rhs)
    except RuntimeError as exc:
        raise DegenerateSteadyStateError(
            "sparse factorization is singular; the steady state is not unique"
        ) from exc
    if not np.all(np.isfinite(x)):
        raise DegenerateSteadyStateError("sparse solve returned non-finite entries")
    return x


def steady_state(liouv: Superoperator, options: SteadyOptions | None = None) -> np.ndarray:
    """Unique stationary density matrix of a Lindblad generator.

    Returns a dense, exactly Hermitian, unit-trace matrix. Raises
    SteadyStateError when the residual, Hermiticity, or positivity checks
    fail, and DegenerateSteadyStateError when the kernel is degenerate.
    """
    opts = options or SteadyOptions()
    d = liouv.space_dim
    if liouv.is_sparse:
        x = _solve_sparse(liouv.matrix, d)
    else:
        x = _solve_dense(liouv.matrix, d)

    rho = _unvec(x, d)
    trace = np.trace(rho)
    if abs(trace - 1.0) > 1e-9:
        raise SteadyStateError(f"solved state has trace {trace}, expected 1")

    herm_defect = np.abs(rho - rho.conj().T).max()
    if herm_defect > _HERMITICITY_TOL:
        raise SteadyStateError(
            f"steady state is not Hermitian within {_HERMITICITY_TOL:g} "
            f"(defect {herm_defect:.3e})"
        )
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real

    residual = np.linalg.norm(liouv.matrix @ _vec(rho))
    if residual > opts.residual_tol:
        raise SteadyStateError(
            f"generator residual {residual:.3e} exceeds {opts.residual_tol:g}"
        )
    eigmin = scipy.linalg.eigvalsh(rho).min()
    if eigmin < -opts.psd_tol:
        raise SteadyStateError(
            f"steady state has negative eigenvalue {eigmin:.3e} beyond {opts.psd_tol:g}"
        )
    return rho


def propagator(liouv: Superoperator, tau: float) -> np.ndarray:
    """Dense propagator exp(L tau). Only available on the dense path."""
    if liouv.is_sparse:
        raise ValueError("dense propagator requested for a sparse generator")
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    return scipy.linalg.expm(liouv.matrix * tau)


def _rk4_deriv(l_mat, v: np.ndarray) -> np.ndarray:
    return l_mat @ v


def _adaptive_rk4(l_mat, v0: np.ndarray, tau: float, local_tol: float) -> np.ndarray:
    """Classic step-doubling RK4 with Richardson extrapolation; the local error
    of each accepted step is kept below local_tol relative to the state norm."""

    def step(v, h):
        k1 = _rk4_deriv(l_mat, v)
        k2 = _rk4_deriv(l_mat, v + 0.5 * h * k1)
        k3 = _rk4_deriv(l_mat, v + 0.5 * h * k2)
        k4 = _rk4_deriv(l_mat, v + h * k3)
        return v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    scale = abs(l_mat).sum(axis=1).max()
    h = min(tau, 0.5 / scale) if scale > 0 else tau
    t = 0.0
    v = v0
    while t < tau:
        h = min(h, tau - t)
        big = step(v, h)
        half = step(step(v, 0.5 * h), 0.5 * h)
        err = np.abs(big - half).max()
        norm = max(np.abs(half).max(), 1e-300)
        tol = local_tol * norm
        if err <= tol or h <= 1e-14 * max(tau, 1.0):
            v = half + (half - big) / 15.0
            t += h
            grow = 0.9 * (tol / err) ** 0.2 if err > 0 else 2.0
            h *= min(2.0, max(0.5, grow))
        else:
            h *= max(0.1, 0.9 * (tol / err) ** 0.2)
    return v


def evolve(
    liouv: Superoperator,
    rho0: np.ndarray,
    tau: float,
    *,
    local_tol: float = 1e-10,
    method: str = "auto",
) -> np.ndarray:
    """Propagate a (not necessarily normalized) matrix under exp(L tau).

    method selects "expm" (dense exponential), "rk4" (adaptive integrator),
    or "auto" to pick by storage kind. The trace is checked to be preserved
    to 1e-9 relative.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    d = liouv.space_dim
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (d, d):
        raise ValueError(f"state shape {rho0.shape} does not match dimension {d}")
    if method not in ("auto", "expm", "rk4"):
        raise ValueError(f"unknown method {method!r}")
    if tau == 0:
        return rho0.copy()
    if method == "expm" and liouv.is_sparse:
        raise ValueError("expm method requires a dense generator")

    v0 = _vec(rho0)
    if method == "expm" or (method == "auto" and not liouv.is_sparse):
        v = propagator(liouv, tau) @ v0
    else:
        v = _adaptive_rk4(liouv.matrix, v0, tau, local_tol)

    out = _unvec(v, d)
    tr0, tr1 = np.trace(rho0), np.trace(out)
    scale = max(abs(tr0), float(np.abs(rho0).max()), 1e-300)
    if abs(tr1 - tr0) > 1e-9 * scale:
        raise SteadyStateError(
            f"propagation did not preserve the trace: {tr0} -> {tr1}"
        )
    return out


@dataclass(frozen=True)
class ConvergenceReport:
    """Observables at the requested truncation and with every mode dimension
    incremented by one, with their relative changes."""

    base_dims: tuple[int, ...]
    bumped_dims: tuple[int, ...]
    base: dict = field(default_factory=dict)
    bumped: dict = field(default_factory=dict)
    rel_changes: dict = field(default_factory=dict)
    converged: bool = True
    threshold: float = 1e-3


def _point_metrics(params, dims, om, options):
    space = HilbertSpace(tuple(dims))
    if om is None:
        h = model.build_mech_hamiltonian(params, space)
        cops = model.mech_collapse_ops(params, space)
    else:
        h = model.build_full_hamiltonian(params, om, space)
        cops = model.full_collapse_ops(params, om, space)
    rho = steady_state(model.build_liouvillian(h, cops), options)
    out = {}
    for mode in range(space.nmodes):
        b = destroy(space, mode)
        nbar = expectation(rho, adjoint(b) @ b).real
        out[f"n_{mode}"] = nbar
        num = expectation(rho, adjoint(b) @ adjoint(b) @ b @ b).real
        out[f"g2_{mode}"] = num / nbar**2 if nbar > 1e-12 else None
    return out


def convergence_check(
    params,
    base_dims,
    om=None,
    options: SteadyOptions | None = None,
    threshold: float = 1e-3,
) -> ConvergenceReport:
    """Recompute occupations and g2 with every mode dimension incremented by
    one; relative changes above the threshold flag inadequate truncation.
    Observables undefined at both truncations (vacuum) count as zero change.
    """
    base_dims = tuple(int(d) for d in base_dims)
    bumped_dims = tuple(d + 1 for d in base_dims)
    base = _point_metrics(params, base_dims, om, options)
    bumped = _point_metrics(params, bumped_dims, om, options)
    rel = {}
    for key, v0 in base.items():
        v1 = bumped[key]
        if v0 is None and v1 is None:
            rel[key] = 0.0
        elif v0 is None or v1 is None:
            rel[key] = np.inf
        elif max(abs(v0), abs(v1)) <= 1e-12:
            rel[key] = 0.0
        else:
            rel[key] = abs(v1 - v0) / max(abs(v0), abs(v1))
    converged = all(r <= threshold for r in rel.values())
    return ConvergenceReport(
        base_dims=base_dims,
        bumped_dims=bumped_dims,
        base=base,
        bumped=bumped,
        rel_changes=rel,
        converged=converged,
        threshold=threshold,
    )
