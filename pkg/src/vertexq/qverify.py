"""Normalised Q-operator built from Q_R and Q_L, with the identities common to both constructions."""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .lattice import Lattice, h_pm
from .params import ModelParams


@dataclass
class Report:
    """One verified identity."""

    id: str
    anchor: str
    residual: float
    tolerance: float
    seconds: float = 0.0
    params: dict = field(default_factory=dict)
    note: str = ""
    failure: str = ""  # "degenerate" or "budget" when the computation itself could not be done

    def __post_init__(self):
        # residuals stay finite so that the JSON report is standard; NaN counts as failure
        r = abs(float(self.residual))
        self.residual = r if np.isfinite(r) else sys.float_info.max
        self.tolerance = float(self.tolerance)

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "anchor": self.anchor,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "seconds": self.seconds,
            "params": self.params,
            "note": self.note,
            "failure": self.failure,
        }


def timed(id_: str, anchor: str, tol: float, fn: Callable[[], float], params: dict | None = None,
          note: str = "") -> Report:
    t0 = time.perf_counter()
    res = fn()
    return Report(id_, anchor, res, tol, time.perf_counter() - t0, dict(params or {}), note)


class DegenerateQ(ArithmeticError):
    """No normalisation point with a well-conditioned ``Q_R(u0)`` was found."""

    def __init__(self, method: str, singular: dict):
        self.singular = singular
        parts = ", ".join(f"u0={k:.4f}: cond={v[0]:.2e}, rank={v[1]}/{v[2]}" for k, v in singular.items())
        super().__init__(f"{method}: Q_R(u0) is singular at every candidate ({parts})")


def rel(a: np.ndarray, b: np.ndarray) -> float:
    den = max(np.linalg.norm(a), np.linalg.norm(b))
    return float(np.linalg.norm(a - b) / den) if den > 0 else 0.0


def tensor_power(op: np.ndarray, n: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for _ in range(n):
        out = np.kron(op, out)
    return out


# ---------------------------------------------------------------------------
# Q_L and functional relations
# ---------------------------------------------------------------------------

def ql_from_qr(u: complex, qr: Callable[[complex], np.ndarray], lat: Lattice) -> np.ndarray:
    """``Q_L(u) = Q_R(-u*)^H Gram_H`` in coefficient coordinates."""
    return qr(-np.conj(u)).conj().T @ lat.gram_H()


def tq_residual(lat: Lattice, qop: Callable[[complex], np.ndarray], u: complex, side: str = "left") -> float:
    """``T Q = h_- Q(u-2eta) + h_+ Q(u+2eta)`` (``side='left'``) or ``Q T = ...``."""
    p, e = lat.params, lat.engine
    T = lat.transfer_matrix(u)
    q = qop(u)
    lhs = T @ q if side == "left" else q @ T
    rhs = h_pm(u, -1, p, e) * qop(u - 2 * p.eta) + h_pm(u, 1, p, e) * qop(u + 2 * p.eta)
    return rel(lhs, rhs)


def h_conjugation_residual(params: ModelParams, u: complex) -> float:
    """``h_{+-}(-u*) = (-1)^N conj(h_{-+}(u))``; the two signs trade places."""
    e = params.engine()
    worst = 0.0
    for s in (1, -1):
        a = h_pm(-np.conj(u), s, params, e)
        b = (-1) ** params.N * np.conj(h_pm(u, -s, params, e))
        worst = max(worst, abs(a - b) / abs(b))
    return float(worst)


def adjoint_consistency(lat: Lattice, qr: Callable[[complex], np.ndarray], u: complex, seed: int) -> float:
    """``(Q_L phi, w) = <phi, Q_R(-u*) w>`` for random ``phi, w``."""
    rng = np.random.default_rng([seed, 77])
    n = lat.dim ** lat.params.N
    phi = rng.normal(size=n) + 1j * rng.normal(size=n)
    w = rng.normal(size=n) + 1j * rng.normal(size=n)
    G = lat.gram_H()
    lhs = np.vdot(ql_from_qr(u, qr, lat) @ phi, w)
    rhs = np.vdot(phi, G @ (qr(-np.conj(u)) @ w))
    return float(abs(lhs - rhs) / abs(rhs))


def commutation_check(lat: Lattice, qr: Callable[[complex], np.ndarray], u: complex, u2: complex) -> float:
    """``Q_L(u) Q_R(u') = Q_L(u') Q_R(u)``."""
    a = ql_from_qr(u, qr, lat) @ qr(u2)
    b = ql_from_qr(u2, qr, lat) @ qr(u)
    return rel(a, b)


# ---------------------------------------------------------------------------
# normalised Q
# ---------------------------------------------------------------------------

def u0_candidates(params: ModelParams, n: int = 8) -> list[float]:
    if params.u0 is not None:
        return [complex(params.u0)]
    rng = np.random.default_rng([params.seed, 5])
    return [float(x) for x in rng.uniform(0.05, 0.45, size=n)]


@dataclass
class QOperator:
    """``Q(u) = Q_R(u) Q_R(u0)^{-1}`` together with its left-hand definition."""

    lat: Lattice
    qr: Callable[[complex], np.ndarray]
    u0: complex
    cond: float

    def __post_init__(self):
        self._qr0_inv = np.linalg.inv(self.qr(self.u0))
        self._ql0_inv = np.linalg.inv(ql_from_qr(self.u0, self.qr, self.lat))

    def right(self, u: complex) -> np.ndarray:
        return self.qr(u) @ self._qr0_inv

    def left(self, u: complex) -> np.ndarray:
        return self._ql0_inv @ ql_from_qr(u, self.qr, self.lat)

    __call__ = right


def q_operator(lat: Lattice, qr: Callable[[complex], np.ndarray], method: str,
               max_cond: float = 1e10) -> QOperator:
    """Scan the seeded normalisation points; raise :class:`DegenerateQ` if none is admissible."""
    seen = {}
    best = None
    for u0 in u0_candidates(lat.params):
        s = np.linalg.svd(qr(u0), compute_uv=False)
        cond = float(s[0] / s[-1]) if s[-1] > 0 else float("inf")
        rank = int(np.sum(s > 1e-12 * s[0]))
        seen[float(np.real(u0))] = (cond, rank, len(s))
        if cond < max_cond and (best is None or cond < best[1]):
            best = (u0, cond)
    if best is None:
        raise DegenerateQ(method, seen)
    return QOperator(lat, qr, best[0], best[1])


def q_left_right(Q: QOperator, u: complex) -> float:
    return rel(Q.right(u), Q.left(u))


def q_commutator(Q: QOperator, u: complex, u2: complex) -> float:
    a, b = Q(u), Q(u2)
    return rel(a @ b, b @ a)


def quasi_periodicity_q(Q: QOperator, U1: np.ndarray, U3: np.ndarray, u: complex) -> dict[str, float]:
    """Four residuals: ``U^{(x)N} Q(u)`` and ``Q(u) U^{(x)N}`` against the shifted ``Q``."""
    p = Q.lat.params
    N, l, tau = p.N, p.l, p.tau
    U1N, U3N = tensor_power(U1, N), tensor_power(U3, N)
    q = Q(u)
    q1 = np.exp(-1j * np.pi * N * l) * Q(u + 1)
    q3 = np.exp(1j * np.pi * N * l * (tau - 1) + 2j * np.pi * N * l * u) * Q(u + tau)
    return {
        "U1-left": rel(U1N @ q, q1),
        "U1-right": rel(q @ U1N, q1),
        "U3-left": rel(U3N @ q, q3),
        "U3-right": rel(q @ U3N, q3),
    }


def eigen_tq(Q: QOperator, u: complex, seed: int) -> tuple[float, int]:
    """Scalar TQ on joint eigenvectors of ``T`` and ``Q``; returns the best residual and count.

    Eigenvectors come from a generic combination ``T(u1) + c Q(u2)``; for each,
    ``t(u)`` and ``q(u +- 2eta)`` are Rayleigh quotients.
    """
    lat = Q.lat
    p, e = lat.params, lat.engine
    rng = np.random.default_rng([seed, 13])
    u1, u2 = 0.11 + 0.03j, 0.29 - 0.02j
    c = complex(rng.normal(), rng.normal())
    _, vecs = np.linalg.eig(lat.transfer_matrix(u1) + c * Q(u2))
    T, q0 = lat.transfer_matrix(u), Q(u)
    qm, qp = Q(u - 2 * p.eta), Q(u + 2 * p.eta)
    hm, hp = h_pm(u, -1, p, e), h_pm(u, 1, p, e)
    best, good = np.inf, 0
    for k in range(vecs.shape[1]):
        phi = vecs[:, k] / np.linalg.norm(vecs[:, k])
        ray = lambda op: np.vdot(phi, op @ phi)
        # skip vectors that are not joint eigenvectors
        if np.linalg.norm(T @ phi - ray(T) * phi) > 1e-6 * max(np.linalg.norm(T), 1.0):
            continue
        t, qv = ray(T), ray(q0)
        lhs = t * qv
        rhs = hm * ray(qm) + hp * ray(qp)
        scale = max(abs(lhs), abs(hm * ray(qm)), abs(hp * ray(qp)))
        if scale == 0:
            continue
        good += 1
        best = min(best, abs(lhs - rhs) / scale)
    return float(best), good
