"""Model constants and their validation."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from .theta import ThetaEngine, ThetaParams


class ConfigError(ValueError):
    """A parameter set violates a model constraint; ``constraint`` names it."""

    def __init__(self, constraint: str, message: str):
        super().__init__(message)
        self.constraint = constraint


@dataclass(frozen=True)
class ModelParams:
    N: int
    l: float
    r: int
    r_prime: int = 1
    tau: complex = 1j
    v: complex = 0.09
    rpp: int = 1
    lambda0: complex | None = None
    u0: complex | None = None
    seed: int = 20240917
    n_max: int = 30
    tol: float = 1e-12
    quad_n: int = 64

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "v", complex(self.v))
        if self.lambda0 is None:
            object.__setattr__(self, "lambda0", self.v + 2 * self.rpp * self.l * self.eta)
        else:
            object.__setattr__(self, "lambda0", complex(self.lambda0))
        self.validate()

    # -- derived ------------------------------------------------------------

    @property
    def two_l(self) -> int:
        return int(round(2 * self.l))

    @property
    def dim(self) -> int:
        return self.two_l + 1

    @property
    def eta(self) -> float:
        return self.r_prime / (2 * self.l * self.r)

    @property
    def hilbert_dim(self) -> int:
        return self.dim ** self.N

    def engine(self) -> ThetaEngine:
        return ThetaEngine(ThetaParams(self.tau, self.n_max, self.tol))

    def gauge_consistent(self) -> bool:
        """``lambda0 - v == 2 r'' l eta`` (required by the Fabricius commutation proof)."""
        return abs(self.lambda0 - self.v - 2 * self.rpp * self.l * self.eta) < 1e-14

    def snapshot(self) -> dict:
        d = asdict(self)
        for k, val in d.items():
            if isinstance(val, complex):
                d[k] = [val.real, val.imag]
        d["eta"] = self.eta
        return d

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        if not isinstance(self.N, int) or self.N < 1:
            raise ConfigError("N>0", f"N must be a positive integer, got {self.N!r}")
        if abs(2 * self.l - round(2 * self.l)) > 1e-12 or self.l <= 0:
            raise ConfigError("2l in Z>0", f"l must be a positive half-integer, got {self.l!r}")
        if (self.N * self.two_l) % 2:
            raise ConfigError("Nl in Z", f"N*l must be an integer (N={self.N}, l={self.l})")
        if not isinstance(self.r, int) or self.r < 1:
            raise ConfigError("r>0", f"r must be a positive integer, got {self.r!r}")
        if self.r_prime == 0 or math.gcd(self.r, self.r_prime) != 1:
            raise ConfigError("gcd(r,r')=1", f"r={self.r} and r'={self.r_prime} must be coprime")
        bound = Fraction(1, 2 * (self.two_l + 1))
        if abs(Fraction(self.r_prime, self.two_l * self.r)) > bound:
            raise ConfigError(
                "eta range",
                f"eta = {self.eta} outside [-{float(bound)}, {float(bound)}]",
            )
        tau = self.tau
        if tau.real != 0.0 or tau.imag <= 0.0:
            raise ConfigError("tau in iR>0", f"tau must be purely imaginary, got {tau}")
        if self.quad_n < 8:
            raise ConfigError("quad_n>=8", "quad_n must be at least 8")
