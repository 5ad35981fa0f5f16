"""Theta functions with characteristics and the scalar products built on them.

Conventions follow Mumford: ``theta_ab(z, tau) = sum_n exp(pi i (n + a/2)^2 tau
+ 2 pi i (n + a/2)(z + b/2))``. ``[z]`` is ``theta_11(z, tau)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels

ArrayLike = complex | np.ndarray


class ThetaDomainError(ValueError):
    """Argument outside the region where the truncated series is certified."""


class NearZeroDenominator(ArithmeticError):
    pass


@dataclass(frozen=True)
class ThetaParams:
    tau: complex = 1j
    n_max: int = 30
    tol: float = 1e-12

    def __post_init__(self):
        tau = complex(self.tau)
        if tau.real != 0.0 or tau.imag <= 0.0:
            raise ValueError(f"tau must be purely imaginary with Im tau > 0, got {tau}")
        if int(self.n_max) < 1:
            raise ValueError("n_max must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "n_max", int(self.n_max))


def _as_imag_tau(tau) -> complex:
    tau = complex(tau)
    if tau.real != 0.0 or tau.imag <= 0.0:
        raise ValueError(f"tau must be purely imaginary with Im tau > 0, got {tau}")
    return tau


@dataclass(frozen=True)
class ThetaEngine:
    """Immutable evaluator; every method is a pure function of its arguments.

    Methods accept scalars or arrays for the spectral/theta argument and return
    the same shape. ``tau`` may be overridden per call (the model also needs
    ``tau/2``, ``2 tau`` and ``2 i t`` with ``t = i/tau``).
    """

    params: ThetaParams = field(default_factory=ThetaParams)

    @property
    def tau(self) -> complex:
        return self.params.tau

    def _kvals(self, a: int) -> np.ndarray:
        n = self.params.n_max
        ks = np.arange(-n - 1, n + 1, dtype=np.float64) + 0.5 * a
        return ks[np.abs(ks) <= n]

    @cached_property
    def _k0(self) -> np.ndarray:
        return self._kvals(0)

    @cached_property
    def _k1(self) -> np.ndarray:
        return self._kvals(1)

    # -- primitive ----------------------------------------------------------

    def theta(self, a: int, b: int, z: ArrayLike, tau=None) -> ArrayLike:
        if a not in (0, 1) or b not in (0, 1):
            raise ValueError("characteristics must be 0 or 1")
        tau = self.tau if tau is None else _as_imag_tau(tau)
        zarr = np.asarray(z, dtype=np.complex128)
        if zarr.size and np.max(np.abs(zarr.imag)) > 4.0 * tau.imag:
            raise ThetaDomainError(
                f"|Im z| = {np.max(np.abs(zarr.imag)):.3g} exceeds 4 Im tau = "
                f"{4 * tau.imag:.3g}; reduce z by quasi-periodicity first"
            )
        k = self._k1 if a else self._k0
        out = _kernels.theta_series(zarr, k, tau, 0.5 * b).reshape(zarr.shape)
        if np.ndim(z) == 0:
            return complex(out)
        return out

    def bracket(self, z: ArrayLike) -> ArrayLike:
        return self.theta(1, 1, z)

    def bracket_run(self, z: ArrayLike, k: int, eta: float) -> ArrayLike:
        """``[z]_k = [z][z+2eta]...[z+2(k-1)eta]``; ``[z]_0 = 1``."""
        if k < 0:
            raise ValueError("k must be >= 0")
        out = np.ones_like(np.asarray(z, dtype=np.complex128))
        for j in range(k):
            out = out * self.bracket(np.asarray(z) + 2 * j * eta)
        return complex(out) if np.ndim(z) == 0 else out

    def bracket_sym(self, z: ArrayLike, a: complex, k: int, eta: float) -> ArrayLike:
        """``[z; a]_k = [z + a]_k [-z + a]_k``."""
        z = np.asarray(z, dtype=np.complex128) if np.ndim(z) else complex(z)
        return self.bracket_run(z + a, k, eta) * self.bracket_run(-z + a, k, eta)

    # -- constants and products used by the Sklyanin form ---------------------

    def q_product(self, tau=None, j_max: int = 200) -> complex:
        """``prod_{j>=1} (1 - e^{2 j pi i tau})^3``, truncated once factors reach 1."""
        tau = self.tau if tau is None else _as_imag_tau(tau)
        acc = 1.0 + 0j
        for j in range(1, j_max + 1):
            x = np.exp(2j * np.pi * j * tau)
            if abs(x) < 1e-16:
                break
            acc *= (1.0 - x) ** 3
        return complex(acc)

    def c_const(self, n: int, eta: float) -> complex:
        """Normalisation ``C_n`` of the closed-form Sklyanin product."""
        den = self.bracket(2 * (n + 1) * eta) * self.q_product()
        return -2.0 * eta * np.exp(0.75j * np.pi * self.tau) / den

    def c_prime(self, two_l: int, eta: float) -> complex:
        return self.c_const(two_l, eta) * np.exp(0.5j * np.pi * two_l * self.tau)

    def theta_pow2l(self, u: ArrayLike, two_l: int, eta: float) -> ArrayLike:
        """``prod_{j=0}^{2l-1} theta_00(u + (2j - 2l + 1) eta)``."""
        _check_two_l(two_l)
        u = np.asarray(u, dtype=np.complex128)
        out = np.ones_like(u)
        for j in range(two_l):
            out = out * self.theta(0, 0, u + (2 * j - two_l + 1) * eta)
        return complex(out) if out.ndim == 0 else out

    def cap_F(self, z: ArrayLike, two_l: int, eta: float) -> ArrayLike:
        return self.c_prime(two_l, eta) * self.theta_pow2l(z, two_l, eta)

    def cap_G(self, z: ArrayLike, two_l: int, eta: float) -> ArrayLike:
        """``prod_j theta_00(z + (2j+2l-1) eta - 2(2l-1) eta)``, even and 1-periodic."""
        _check_two_l(two_l)
        z = np.asarray(z, dtype=np.complex128)
        out = np.ones_like(z)
        for j in range(two_l):
            out = out * self.theta(0, 0, z + (2 * j + two_l - 1) * eta - 2 * (two_l - 1) * eta)
        return complex(out) if out.ndim == 0 else out

    # -- Boltzmann weights ----------------------------------------------------

    _W_CHARS = ((1, 1), (1, 0), (0, 0), (0, 1))

    def coeff_WL(self, a: int, u: ArrayLike, eta: float) -> ArrayLike:
        ca, cb = self._W_CHARS[a]
        den = self.theta(ca, cb, eta)
        if abs(den) < 1e-13:
            raise NearZeroDenominator(f"theta_{ca}{cb}(eta) = {den!r}")
        return self.theta(ca, cb, u) / den

    def coeff_WR(self, a: int, u: ArrayLike, eta: float) -> ArrayLike:
        return self.coeff_WL(a, np.asarray(u) + eta if np.ndim(u) else u + eta, eta)


def _check_two_l(two_l: int) -> None:
    if int(two_l) != two_l or two_l < 1:
        raise ValueError("2l must be a positive integer")
