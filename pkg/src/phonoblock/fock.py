"""Truncated Fock spaces and ladder operators on tensor products of bosonic modes.

Operators are plain numpy arrays for small composite dimensions and
compressed-sparse matrices above DENSE_OPERATOR_MAX_DIM, so downstream
code must treat the two interchangeably (both support @, .conj(), .T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

DENSE_OPERATOR_MAX_DIM = 100

__all__ = [
    "DENSE_OPERATOR_MAX_DIM",
    "HilbertSpace",
    "adjoint",
    "create",
    "destroy",
    "expectation",
    "fock_state",
    "identity",
    "is_sparse",
    "number",
    "projector",
    "to_dense",
]


@dataclass(frozen=True)
class HilbertSpace:
    """Tensor product of truncated single-mode Fock spaces, in fixed mode order."""

    mode_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.mode_dims)
        if len(dims) == 0:
            raise ValueError("at least one mode is required")
        if any(d < 2 for d in dims):
            raise ValueError(f"every mode needs dimension >= 2, got {dims}")
        object.__setattr__(self, "mode_dims", dims)

    @property
    def nmodes(self) -> int:
        return len(self.mode_dims)

    @property
    def dim(self) -> int:
        return math.prod(self.mode_dims)

    @property
    def storage(self) -> str:
        return "dense" if self.dim <= DENSE_OPERATOR_MAX_DIM else "sparse"


def is_sparse(a) -> bool:
    return sp.issparse(a)


def to_dense(a) -> np.ndarray:
    return a.toarray() if sp.issparse(a) else np.asarray(a)


def _single_mode_destroy(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1).astype(complex)


def _embed(space: HilbertSpace, mode: int, op: np.ndarray):
    """Kronecker-embed a single-mode operator at position `mode`."""
    if not 0 <= mode < space.nmodes:
        raise IndexError(f"mode {mode} out of range for {space.nmodes} modes")
    factors = []
    for k, d in enumerate(space.mode_dims):
        factors.append(op if k == mode else np.eye(d, dtype=complex))
    if space.storage == "sparse":
        out = reduce(lambda a, b: sp.kron(a, b, format="csr"), map(sp.csr_array, factors))
        return sp.csr_array(out)
    return reduce(np.kron, factors)


def identity(space: HilbertSpace):
    if space.storage == "sparse":
        return sp.identity(space.dim, dtype=complex, format="csr")
    return np.eye(space.dim, dtype=complex)


def destroy(space: HilbertSpace, mode: int):
    """Annihilation operator of one mode, embedded in the composite space."""
    return _embed(space, mode, _single_mode_destroy(space.mode_dims[mode]))


def create(space: HilbertSpace, mode: int):
    return adjoint(destroy(space, mode))


def number(space: HilbertSpace, mode: int):
    n = space.mode_dims[mode]
    return _embed(space, mode, np.diag(np.arange(n, dtype=float)).astype(complex))


def adjoint(a):
    """Conjugate transpose, preserving the storage kind of the input."""
    if sp.issparse(a):
        return sp.csr_array(a.conj().T)
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square operator, got shape {a.shape}")
    return a.conj().T


def expectation(rho, a) -> complex:
    """Trace of (a @ rho). `rho` need not be normalized."""
    rho_d = to_dense(rho)
    if rho_d.shape != (a.shape[0], a.shape[1]):
        raise ValueError(f"dimension mismatch: rho {rho_d.shape}, operator {a.shape}")
    if sp.issparse(a):
        return complex((a.multiply(rho_d.T)).sum())
    return complex(np.einsum("ij,ji->", a, rho_d))


def fock_state(space: HilbertSpace, occupations) -> np.ndarray:
    """Basis ket |n_0 n_1 ...> as a dense vector."""
    occs = tuple(int(n) for n in occupations)
    if len(occs) != space.nmodes:
        raise ValueError(f"expected {space.nmodes} occupation numbers, got {len(occs)}")
    idx = 0
    for n, d in zip(occs, space.mode_dims):
        if not 0 <= n < d:
            raise ValueError(f"occupation {n} outside [0, {d})")
        idx = idx * d + n
    vec = np.zeros(space.dim, dtype=complex)
    vec[idx] = 1.0
    return vec


def projector(state: np.ndarray) -> np.ndarray:
    """Rank-one density matrix |state><state| (state is normalized first)."""
    v = np.asarray(state, dtype=complex).ravel()
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("cannot project the zero vector")
    v = v / nrm
    return np.outer(v, v.conj())
