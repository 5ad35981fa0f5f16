"""The spin-l representation space of the Sklyanin algebra.

Vectors are even, 1-periodic theta functions of degree 4l. A concrete basis is
made of symmetric shift products ``g_j(z) = [z; a_j]_{2l}``; every vector is
stored by its coefficients in that basis and every operator (generators,
unitaries) as a ``(2l+1) x (2l+1)`` complex matrix acting on coefficients.
Matrices are obtained by collocation: evaluate the image of each basis
function at ``2l+1`` points and solve the collocation system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .params import ModelParams
from .theta import ThetaEngine


class CollocationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class RepBasis:
    """Sklyanin-orthonormalised shift-product basis.

    ``raw`` evaluates the shift products ``g_j``; the working basis is
    ``e_k = sum_j g_j transform[j, k]`` with ``transform = R^{-1}`` from the
    Cholesky factor of the raw Gram matrix, so that ``gram`` is the identity up
    to quadrature error and adjoints are conjugate transposes.
    """

    params: ModelParams
    engine: ThetaEngine
    shifts: np.ndarray
    points: np.ndarray
    colloc: np.ndarray
    transform: np.ndarray
    gram: np.ndarray = field(repr=False)
    gram_raw: np.ndarray = field(repr=False)
    quad_n: int = 0

    @property
    def dim(self) -> int:
        return len(self.shifts)

    def raw_values(self, z) -> np.ndarray:
        """``g_j(z_i)`` as an array of shape ``(len(z), dim)``."""
        z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        p = self.params
        cols = [self.engine.bracket_sym(z, a, p.two_l, p.eta) for a in self.shifts]
        return np.stack(cols, axis=-1)

    def values(self, z) -> np.ndarray:
        return self.raw_values(z) @ self.transform

    def evaluate(self, coeffs, z):
        return self.values(z) @ np.asarray(coeffs)

    def project(self, func: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Coefficients of a function known to lie in the space (vectorised ``func``)."""
        return np.linalg.solve(self.colloc, func(self.points))

    def project_values(self, vals: np.ndarray) -> np.ndarray:
        return np.linalg.solve(self.colloc, vals)

    def shift_product(self, a: complex) -> "ThetaVector":
        p = self.params
        return ThetaVector(
            self.project(lambda z: self.engine.bracket_sym(z, a, p.two_l, p.eta)), self
        )

    def inner(self, f, g) -> complex:
        """Sklyanin form through the Gram matrix (antilinear in ``f``)."""
        return complex(np.conj(_coeffs(f)) @ self.gram @ _coeffs(g))


@dataclass(frozen=True, eq=False)
class ThetaVector:
    coeffs: np.ndarray
    basis: RepBasis

    def __call__(self, z):
        return self.basis.evaluate(self.coeffs, z)

    def __add__(self, other: "ThetaVector") -> "ThetaVector":
        return ThetaVector(self.coeffs + other.coeffs, self.basis)

    def __rmul__(self, c) -> "ThetaVector":
        return ThetaVector(c * self.coeffs, self.basis)

    def apply(self, op: np.ndarray) -> "ThetaVector":
        return ThetaVector(op @ self.coeffs, self.basis)


def _coeffs(f) -> np.ndarray:
    return f.coeffs if isinstance(f, ThetaVector) else np.asarray(f)


# ---------------------------------------------------------------------------
# basis construction
# ---------------------------------------------------------------------------

def build_basis(params: ModelParams, engine: ThetaEngine | None = None,
                quad_n: int | None = None, max_tries: int = 32) -> RepBasis:
    """Seeded shift-product basis with well-conditioned collocation and its Gram matrix."""
    engine = engine or params.engine()
    rng = np.random.default_rng(params.seed)
    dim = params.dim
    eye = np.eye(dim, dtype=np.complex128)
    y0 = params.tau.imag / 7.0
    for _ in range(max_tries):
        a0, delta = rng.uniform(0.05, 0.45, size=2)
        shifts = a0 + delta * np.arange(dim)
        xs = np.sort(rng.uniform(0.02, 0.48, size=dim))
        points = xs + 1j * y0
        if np.min(np.abs(engine.bracket(2 * points))) < 1e-6:
            continue
        raw = RepBasis(params, engine, shifts, points, eye, eye, eye, eye)
        colloc = raw.raw_values(points)
        if np.linalg.cond(colloc) >= 1e8:
            continue
        raw = RepBasis(params, engine, shifts, points, colloc, eye, eye, eye)
        gram_raw, n = converged_gram(raw, quad_n or params.quad_n)
        chol = np.linalg.cholesky(gram_raw)  # gram_raw = chol chol^H
        transform = np.linalg.inv(chol.conj().T)
        gram = transform.conj().T @ gram_raw @ transform
        gram = 0.5 * (gram + gram.conj().T)
        return RepBasis(params, engine, shifts, points, colloc @ transform, transform,
                        gram, gram_raw, n)
    raise CollocationError(f"no well-conditioned basis after {max_tries} draws")


def converged_gram(basis: RepBasis, n0: int, rtol: float = 1e-13, n_cap: int = 1024):
    """Gram matrix by trapezoid quadrature, doubling ``n`` until it stabilises."""
    n = max(int(n0), 8)
    g = gram_matrix(basis, n)
    while n < n_cap:
        g2 = gram_matrix(basis, 2 * n)
        change = np.linalg.norm(g2 - g) / np.linalg.norm(g2)
        g, n = g2, 2 * n
        if change < rtol:
            break
    return g, n


# ---------------------------------------------------------------------------
# generators and unitaries
# ---------------------------------------------------------------------------

def _s_func(engine: ThetaEngine, a: int, eta: float):
    chars = ((1, 1), (1, 0), (0, 0), (0, 1))[a]
    c = engine.theta(*chars, eta)
    if a == 2:
        c = 1j * c
    return lambda z: c * engine.theta(*chars, 2 * z)


def apply_generator(a: int, f: Callable, basis: RepBasis, z) -> np.ndarray:
    """Values of ``rho^l(S^a) f`` at ``z`` by the difference-operator formula."""
    p, eng = basis.params, basis.engine
    s = _s_func(eng, a, p.eta)
    eta, l = p.eta, p.l
    z = np.asarray(z, dtype=np.complex128)
    num = s(z - l * eta) * f(z + eta) - s(-z - l * eta) * f(z - eta)
    den = eng.bracket(2 * z)
    if np.min(np.abs(den)) < 1e-6:
        raise CollocationError("collocation point too close to a zero of theta_11(2z)")
    return num / den


def sklyanin_generator(a: int, basis: RepBasis) -> np.ndarray:
    """Matrix of ``rho^l(S^a)`` in the shift-product basis."""
    if a not in (0, 1, 2, 3):
        raise ValueError("generator index must be 0..3")
    pts = basis.points
    cols = []
    for j in range(basis.dim):
        e = np.zeros(basis.dim, dtype=np.complex128)
        e[j] = 1.0
        cols.append(apply_generator(a, lambda z, e=e: basis.evaluate(e, z), basis, pts))
    return basis.project_values(np.stack(cols, axis=-1))


def generators(basis: RepBasis) -> list[np.ndarray]:
    return [sklyanin_generator(a, basis) for a in range(4)]


def apply_unitary(a: int, f: Callable, basis: RepBasis, z) -> np.ndarray:
    p = basis.params
    l, tau = p.l, p.tau
    z = np.asarray(z, dtype=np.complex128)
    if a == 1:
        return np.exp(1j * np.pi * l) * f(z + 0.5)
    if a == 3:
        return np.exp(1j * np.pi * l) * np.exp(1j * np.pi * l * (4 * z + tau)) * f(z + 0.5 * tau)
    if a == 2:
        return apply_unitary(3, lambda w: apply_unitary(1, f, basis, w), basis, z)
    raise ValueError("unitary index must be 1, 2 or 3")


def unitary_U(a: int, basis: RepBasis) -> np.ndarray:
    cols = []
    for j in range(basis.dim):
        e = np.zeros(basis.dim, dtype=np.complex128)
        e[j] = 1.0
        cols.append(apply_unitary(a, lambda z, e=e: basis.evaluate(e, z), basis, basis.points))
    return basis.project_values(np.stack(cols, axis=-1))


# ---------------------------------------------------------------------------
# Sklyanin form
# ---------------------------------------------------------------------------

POLE_GUARD = 1e-10


def _kernel_parts(p: ModelParams, engine: ThetaEngine, z, w):
    eta = p.eta
    num = engine.bracket(2 * z) * engine.bracket(2 * w)
    den = np.ones_like(num)
    smallest = np.inf
    for j in range(p.two_l + 2):
        c = (2 * j - p.two_l - 1) * eta
        a, b = engine.theta(0, 0, z + w + c), engine.theta(0, 0, z - w + c)
        smallest = min(smallest, float(np.min(np.abs(a))), float(np.min(np.abs(b))))
        den = den * a * b
    return num, den, smallest


def kernel_mu(basis_or_params, engine: ThetaEngine, z, w):
    p = basis_or_params if isinstance(basis_or_params, ModelParams) else basis_or_params.params
    num, den, _ = _kernel_parts(p, engine, z, w)
    return num / den


@lru_cache(maxsize=8)
def kernel_on_grid(params: ModelParams, engine: ThetaEngine, n: int, rule: str = "trapezoid"):
    """Quadrature grid with kernel values; a grid touching a kernel pole is shifted by half a step.

    Results are cached per grid and must not be modified in place.
    """
    z, w = quadrature_grid(params, n, rule)
    num, den, smallest = _kernel_parts(params, engine, z, np.conj(z))
    if smallest < POLE_GUARD and rule == "trapezoid":
        return kernel_on_grid(params, engine, n, "midpoint")
    return z, w, num / den


def quadrature_grid(params: ModelParams, n: int, rule: str = "trapezoid"):
    """Nodes ``z = x + i y`` on ``[0,1) x [0, Im tau)`` and the uniform weight."""
    t = params.tau.imag
    off = 0.0 if rule == "trapezoid" else 0.5
    xs = (np.arange(n) + off) / n
    ys = (np.arange(n) + off) * t / n
    z = (xs[:, None] + 1j * ys[None, :]).ravel()
    return z, t / (n * n)


def _form_from_values(fv, gv, mu, w):
    return np.conj(fv).T @ (gv * (mu * w)[:, None])


@lru_cache(maxsize=4)
def _basis_on_grid(basis: RepBasis, n: int, rule: str) -> np.ndarray:
    z, _, _ = kernel_on_grid(basis.params, basis.engine, n, rule)
    return basis.values(z)


def gram_matrix(basis: RepBasis, n: int, rule: str = "trapezoid") -> np.ndarray:
    z, w, mu = kernel_on_grid(basis.params, basis.engine, n, rule)
    vals = basis.values(z)
    g = _form_from_values(vals, vals, mu, w)
    return 0.5 * (g + g.conj().T)


def sklyanin_form(f, g, basis: RepBasis, quad_n: int | None = None,
                  rule: str = "trapezoid") -> complex:
    """Direct quadrature of the Sklyanin form of two vectors (or callables)."""
    n = quad_n or basis.quad_n or basis.params.quad_n
    if n < 8:
        raise ValueError("quad_n must be >= 8")
    z, w, mu = kernel_on_grid(basis.params, basis.engine, n, rule)
    is_fn = lambda x: callable(x) and not isinstance(x, ThetaVector)
    vals = None if is_fn(f) and is_fn(g) else _basis_on_grid(basis, n, rule)
    fv = f(z) if is_fn(f) else vals @ _coeffs(f)
    gv = g(z) if is_fn(g) else vals @ _coeffs(g)
    return complex(np.sum(np.conj(fv) * gv * mu) * w)


def shift_product_form_closed(alpha: complex, gamma: complex, params: ModelParams,
                              engine: ThetaEngine) -> complex:
    """Closed form of ``<[z; alpha]_{2l}, [z; gamma]_{2l}>`` for real ``eta``."""
    two_l, eta = params.two_l, params.eta
    ab = np.conj(alpha)
    first = engine.theta_pow2l(gamma - ab, two_l, eta)
    second = engine.theta_pow2l(gamma + ab + 2 * (two_l - 1) * eta, two_l, eta)
    return form_scale(params, engine) * first * second


def form_scale(params: ModelParams, engine: ThetaEngine | None = None) -> complex:
    """Overall constant of the closed-form products: ``C'_{2l} e^{-i pi tau (l+1)}``.

    The exponential is fixed by matching the quadrature form; it is real and
    positive for imaginary ``tau``.
    """
    engine = engine or params.engine()
    return engine.c_prime(params.two_l, params.eta) * np.exp(-1j * np.pi * params.tau * (params.l + 1))


# ---------------------------------------------------------------------------
# algebraic checks
# ---------------------------------------------------------------------------

CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))


def structure_constant(alpha: int, beta: int, gamma: int, engine: ThetaEngine, u: complex, eta: float) -> complex:
    """``J = (W_beta^2 - W_gamma^2) / (W_alpha^2 - W_0^2)`` from the ``W^L`` coefficients at ``u``."""
    W = [engine.coeff_WL(a, u, eta) for a in range(4)]
    return (W[beta] ** 2 - W[gamma] ** 2) / (W[alpha] ** 2 - W[0] ** 2)


def commutation_residuals(S: list[np.ndarray], engine: ThetaEngine, eta: float,
                          u: complex = 0.3) -> dict[str, float]:
    """Both families of quadratic relations over cyclic ``(alpha, beta, gamma)``.

    Residuals are relative to ``|S^x| |S^y|`` of the commutator on the left, since
    at spin 1/2 both sides of the first family vanish identically.
    """
    comm = lambda a, b: a @ b - b @ a
    acomm = lambda a, b: a @ b + b @ a
    out = {}
    for al, be, ga in CYCLIC:
        J = structure_constant(al, be, ga, engine, u, eta)
        lhs = comm(S[al], S[0])
        rhs = -1j * J * acomm(S[be], S[ga])
        ref = np.linalg.norm(S[al]) * np.linalg.norm(S[0])
        out[f"[S{al},S0]"] = float(np.linalg.norm(lhs - rhs) / ref)
        lhs = comm(S[al], S[be])
        rhs = 1j * acomm(S[0], S[ga])
        ref = np.linalg.norm(S[al]) * np.linalg.norm(S[be])
        out[f"[S{al},S{be}]"] = float(np.linalg.norm(lhs - rhs) / ref)
    return out


def intertwining_residual(S: list[np.ndarray], U: dict[int, np.ndarray]) -> float:
    """``U_a^{-1} S^b U_a = X_a(S^b)`` where ``X_a`` flips the two generators other than ``S^0, S^a``."""
    worst = 0.0
    for a, Ua in U.items():
        inv = np.linalg.inv(Ua)
        for b in range(4):
            sign = 1.0 if b in (0, a) else -1.0
            got = inv @ S[b] @ Ua
            worst = max(worst, np.linalg.norm(got - sign * S[b]) / np.linalg.norm(S[b]))
    return float(worst)


def membership_residual(basis: RepBasis, coeffs: np.ndarray, z: np.ndarray) -> float:
    """``f(z+1) = f(-z) = f(z)`` and ``f(z+tau) = e^{-4 l pi i (2z + tau)} f(z)``, relative."""
    p = basis.params
    f = lambda x: basis.evaluate(coeffs, x)
    f0 = f(z)
    scale = np.max(np.abs(f0))
    r1 = np.max(np.abs(f(z + 1) - f0))
    r2 = np.max(np.abs(f(-z) - f0))
    r3 = np.max(np.abs(f(z + p.tau) - np.exp(-4j * p.l * np.pi * (2 * z + p.tau)) * f0)
                / np.abs(np.exp(-4j * p.l * np.pi * (2 * z + p.tau))))
    return float(max(r1, r2, r3) / scale)


def unitary_algebra_residuals(U: dict[int, np.ndarray], gram: np.ndarray, two_l: int) -> dict[str, float]:
    """``U_a^2 = (-1)^{2l}``, ``U_a U_b = (-1)^{2l} U_b U_a = U_c`` and unitarity."""
    sgn = (-1.0) ** two_l
    I = np.eye(gram.shape[0])
    out = {}
    for a in (1, 2, 3):
        out[f"U{a}^2"] = float(np.linalg.norm(U[a] @ U[a] - sgn * I) / np.linalg.norm(I))
        out[f"U{a} unitary"] = float(np.linalg.norm(U[a].conj().T @ gram @ U[a] - gram) / np.linalg.norm(gram))
    for a, b, c in CYCLIC:
        ref = np.linalg.norm(U[c])
        out[f"U{a}U{b}=U{c}"] = float(np.linalg.norm(U[a] @ U[b] - U[c]) / ref)
        out[f"U{a}U{b}=sU{b}U{a}"] = float(np.linalg.norm(U[a] @ U[b] - sgn * U[b] @ U[a]) / ref)
    return out


# ---------------------------------------------------------------------------
# closed forms for the vector families used by the Q constructions
# ---------------------------------------------------------------------------

def f_pair_closed(eps: int, lam: float, u: complex, eps2: int, lam2: float, v: complex,
                  params: ModelParams, engine: ThetaEngine) -> complex:
    """``<f_eps(lam, -u*, .), f_eps2(lam2, v, .)>`` for real ``lam, lam2`` as ``F * G``."""
    two_l, eta, l = params.two_l, params.eta, params.l
    a = (eps2 * lam2 - eps * lam) / 2 + (v + u) / 2
    b = (eps2 * lam2 + eps * lam) / 2 + (v - u) / 2 + 2 * l * eta
    return (form_scale(params, engine) * engine.theta_pow2l(a, two_l, eta)
            * engine.cap_G(b, two_l, eta))


def omega_pair_closed(sig: int, lam: complex, u: complex, v: complex,
                      sig2: int, lam2: complex, u2: complex, v2: complex,
                      params: ModelParams, engine: ThetaEngine) -> complex:
    """``<omega_{sig lam}(-u*; sig v), omega_{sig2 lam2}(u2; sig2 v2)>``."""
    two_l, eta, le = params.two_l, params.eta, params.l * params.eta
    x, y = np.conj(lam - v), lam2 - v2
    a = (y - x) / 2 + (sig2 * u2 + sig * u) / 2 + (sig2 - sig) * le
    b = (y + x) / 2 + (sig2 * u2 - sig * u) / 2 + (sig2 + sig) * le
    return (form_scale(params, engine) * engine.theta_pow2l(a, two_l, eta)
            * engine.theta_pow2l(b, two_l, eta))
