"""L-operator and transfer matrix on ``V_N (x) ... (x) V_1`` built from the R-matrix weights.

Operators on the lattice are dense ``(2l+1)^N`` square arrays; site 1 is the
rightmost tensor factor. Auxiliary ``C^2`` indices are ordered ``(-, +)``.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .params import ModelParams
from .repspace import RepBasis, generators
from .theta import ThetaEngine

PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)

DEFAULT_MAX_DIM = 4096


class BudgetExceeded(MemoryError):
    pass


class ConventionMismatch(AssertionError):
    pass


def check_budget(dim: int, max_dim: int = DEFAULT_MAX_DIM) -> None:
    if dim > max_dim:
        raise BudgetExceeded(f"lattice dimension {dim} exceeds budget {max_dim}")


# ---------------------------------------------------------------------------
# R-matrix
# ---------------------------------------------------------------------------

def r_matrix_sigma(u: complex, params: ModelParams, engine: ThetaEngine) -> np.ndarray:
    eta = params.eta
    out = np.zeros((4, 4), dtype=np.complex128)
    for a in range(4):
        out += engine.coeff_WR(a, u, eta) * np.kron(PAULI[a], PAULI[a])
    return out


def r_weights_explicit(u: complex, params: ModelParams, engine: ThetaEngine):
    """``(a, b, c, d)`` from the nome-``2it`` product formulas, ``t = i/tau``.

    The prefactor carries ``+2``: with ``[z] = theta_11`` (which is ``-theta_1``)
    this is the sign that reproduces ``sum_a W^R_a sigma^a (x) sigma^a``.
    """
    eta, tau = params.eta, params.tau
    t = 1j / tau
    tt = 2j * t
    th = lambda ab, z: engine.theta(ab[0], ab[1], z, tt)
    c01, c11 = (0, 1), (1, 1)
    C = 2 * np.exp(-np.pi * t * u * (u + 2 * eta)) / (
        th(c01, 0) * th(c01, 2j * t * eta) * th(c11, 2j * t * eta)
    )
    x1, x2 = 1j * t * u, 1j * t * (u + 2 * eta)
    a = C * th(c01, 2j * t * eta) * th(c01, x1) * th(c11, x2)
    b = C * th(c01, 2j * t * eta) * th(c11, x1) * th(c01, x2)
    c = C * th(c11, 2j * t * eta) * th(c01, x1) * th(c01, x2)
    d = C * th(c11, 2j * t * eta) * th(c11, x1) * th(c11, x2)
    return a, b, c, d


def r_matrix_explicit(u: complex, params: ModelParams, engine: ThetaEngine) -> np.ndarray:
    a, b, c, d = r_weights_explicit(u, params, engine)
    return np.array(
        [[a, 0, 0, d], [0, b, c, 0], [0, c, b, 0], [d, 0, 0, a]], dtype=np.complex128
    )


def r_matrix(u: complex, params: ModelParams, engine: ThetaEngine | None = None,
             rtol: float = 1e-9) -> np.ndarray:
    """Baxter's R-matrix; both constructions are computed and must agree."""
    engine = engine or params.engine()
    rs = r_matrix_sigma(u, params, engine)
    rx = r_matrix_explicit(u, params, engine)
    err = np.max(np.abs(rs - rx)) / np.max(np.abs(rs))
    if not err < rtol:
        raise ConventionMismatch(f"R-matrix forms disagree: relative error {err:.3e}")
    return rs


# ---------------------------------------------------------------------------
# L-operator and transfer matrix
# ---------------------------------------------------------------------------

class Lattice:
    """Per-basis cache of generator matrices with the lattice constructions."""

    def __init__(self, basis: RepBasis, max_dim: int = DEFAULT_MAX_DIM):
        self.basis = basis
        self.params = basis.params
        self.engine = basis.engine
        self.S = generators(basis)
        self.max_dim = max_dim

    @property
    def dim(self) -> int:
        return self.basis.dim

    def weights(self, u: complex) -> list[complex]:
        return [self.engine.coeff_WL(a, u, self.params.eta) for a in range(4)]

    def l_operator(self, u: complex) -> np.ndarray:
        """Shape ``(2, 2, d, d)``: ``[i', j']`` is the block ``L^{i'}_{j'}(u)``."""
        W = self.weights(u)
        return np.einsum("a,aij,apq->ijpq", W, PAULI, np.asarray(self.S))

    def l_full(self, u: complex) -> np.ndarray:
        """``sum_a W_a S^a (x) sigma^a`` as a ``2d`` square matrix (site (x) aux)."""
        W = self.weights(u)
        return sum(W[a] * np.kron(self.S[a], PAULI[a]) for a in range(4))

    def transfer_matrix(self, u: complex) -> np.ndarray:
        N = self.params.N
        check_budget(self.dim ** N, self.max_dim)
        return _kernels.chain_trace(self.l_operator(u), N)

    def gram_H(self) -> np.ndarray:
        g = np.ones((1, 1), dtype=np.complex128)
        for _ in range(self.params.N):
            g = np.kron(self.basis.gram, g)
        return g

    def adjoint(self, op: np.ndarray) -> np.ndarray:
        """Adjoint of an operator on H with respect to the tensor Sklyanin form."""
        G = self.gram_H()
        return np.linalg.solve(G, op.conj().T @ G)

    def site_tensor(self, op: np.ndarray) -> np.ndarray:
        out = np.ones((1, 1), dtype=np.complex128)
        for _ in range(self.params.N):
            out = np.kron(op, out)
        return out


def h_pm(u: complex, sign: int, params: ModelParams, engine: ThetaEngine) -> complex:
    """``h_+(u) = (2[u - 2l eta])^N`` and ``h_-(u) = (2[u + 2l eta])^N``."""
    return (2 * engine.bracket(u - sign * 2 * params.l * params.eta)) ** params.N


def rll_residual(lat: Lattice, u: complex, v: complex) -> float:
    d = lat.dim
    I2 = np.eye(2)
    Wv, Wu = lat.weights(v), lat.weights(u)
    L12 = sum(Wv[a] * np.kron(np.kron(lat.S[a], PAULI[a]), I2) for a in range(4))
    L13 = sum(Wu[a] * np.kron(np.kron(lat.S[a], I2), PAULI[a]) for a in range(4))
    R23 = np.kron(np.eye(d), r_matrix(u - v, lat.params, lat.engine))
    lhs = L12 @ L13 @ R23
    rhs = R23 @ L13 @ L12
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs))


def eight_vertex_transfer(u: complex, params: ModelParams, engine: ThetaEngine) -> np.ndarray:
    """Spin-1/2 transfer matrix from the explicit R weights in the spin basis.

    Equals ``theta_11(2 eta)^{-N} T(u)`` after the change to the basis that
    identifies the spin-1/2 representation with Pauli matrices.
    """
    R = r_matrix_explicit(u - params.eta, params, engine)
    grid = R.reshape(2, 2, 2, 2).transpose(1, 3, 0, 2)
    return _kernels.chain_trace(grid, params.N)


def pauli_identification(basis: RepBasis) -> np.ndarray:
    """Columns: coefficients of ``theta_00(2z,2tau) -+ theta_10(2z,2tau)`` (spin 1/2 only)."""
    if basis.params.two_l != 1:
        raise ValueError("identification with C^2 exists only for l = 1/2")
    e, tau2 = basis.engine, 2 * basis.params.tau
    f0 = lambda z: e.theta(0, 0, 2 * z, tau2) - e.theta(1, 0, 2 * z, tau2)
    f1 = lambda z: e.theta(0, 0, 2 * z, tau2) + e.theta(1, 0, 2 * z, tau2)
    return np.stack([basis.project(f0), basis.project(f1)], axis=1)
