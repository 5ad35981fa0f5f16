"""Shared pieces of both Q_R constructions: gauge twisting and chain assembly."""

from __future__ import annotations

import numpy as np

from . import _kernels
from .lattice import Lattice, check_budget
from .repspace import RepBasis


def twist(L: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """``left^{-1} L right`` for ``L`` of shape ``(2, 2, d, d)`` and scalar 2x2 gauges.

    Returns the same shape; ``[0,0], [0,1], [1,0], [1,1]`` are alpha, beta,
    gamma, delta.
    """
    inv = np.linalg.inv(left)
    return np.einsum("ik,kmpq,mj->ijpq", inv, L, right)


def generic_constants(dim: int, r0: int, seed: int, stream: int) -> np.ndarray:
    """Seeded ``tau_{k j''}`` on the annulus ``0.5 <= |tau| <= 2``; shape ``(dim, r0)``."""
    rng = np.random.default_rng([seed, stream])
    mod = rng.uniform(0.5, 2.0, size=(dim, r0))
    ph = rng.uniform(0.0, 2 * np.pi, size=(dim, r0))
    return mod * np.exp(1j * ph)


def rank_one_grid(vectors: dict, taus: np.ndarray, r0: int, dim: int) -> np.ndarray:
    """Grid ``(r0, r0, d, d)`` with entry ``(i, j) = f_{ij} tau[:, j]^T`` (0-based)."""
    grid = np.zeros((r0, r0, dim, dim), dtype=np.complex128)
    for (i, j), f in vectors.items():
        grid[i, j] = np.outer(f, taus[:, j])
    return grid


def chain_operator(grid: np.ndarray, lat: Lattice) -> np.ndarray:
    N = lat.params.N
    check_budget(lat.dim ** N, lat.max_dim)
    return _kernels.chain_trace(grid, N)


def conjugated_block(lat: Lattice, u: complex, grid: np.ndarray, gauges: list[np.ndarray]) -> np.ndarray:
    """``M^{-1}(L(u) (x) S(u)) M`` as a ``(2, 2, r0, r0, d, d)`` array.

    ``[i', j', i'', j'']`` is the twisted L entry ``(i', j')`` of
    ``gauges[i'']^{-1} L gauges[j'']`` composed with ``S^{i''}_{j''}``.
    """
    L = lat.l_operator(u)
    r0 = grid.shape[0]
    d = lat.dim
    out = np.zeros((2, 2, r0, r0, d, d), dtype=np.complex128)
    for i in range(r0):
        for j in range(r0):
            if not np.any(grid[i, j]):
                continue
            tw = twist(L, gauges[i], gauges[j])
            out[:, :, i, j] = np.einsum("abpq,qs->abps", tw, grid[i, j])
    return out


def shifted_basis_vector(basis: RepBasis, a: complex) -> np.ndarray:
    """Coefficients of ``[z; a]_{2l}``."""
    return basis.shift_product(a).coeffs
