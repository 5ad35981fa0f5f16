"""Q_R after Fabricius: cyclic 2r x 2r auxiliary matrix S(u) built on pseudo-vacua.

Indices ``i'', j''`` run over ``1..2r`` and are taken modulo ``2r``; arrays are
0-based. The gauge parameters must satisfy ``lambda0 - v = 2 r'' l eta`` for the
commutation machinery (``y`` periodicity); TQ alone does not need it.
"""

from __future__ import annotations

import numpy as np

from .gauge import chain_operator, conjugated_block, generic_constants, rank_one_grid, twist
from .lattice import Lattice
from .params import ConfigError, ModelParams
from .repspace import RepBasis, form_scale
from .theta import ThetaEngine

TAU_STREAM = 2


class OddSiteCount(ConfigError):
    def __init__(self, N: int):
        super().__init__("N even (fabricius)", f"the cyclic construction needs an even N, got N={N}")


def gauge_matrix(lam: complex, v: complex, engine: ThetaEngine) -> np.ndarray:
    """``M_lambda(v)`` with half-period theta functions."""
    h = engine.tau / 2
    a, b = (lam - v) / 2, (lam + v) / 2
    return np.array(
        [
            [-engine.theta(0, 0, a, h), -engine.theta(0, 0, b, h)],
            [engine.theta(0, 1, a, h), engine.theta(0, 1, b, h)],
        ],
        dtype=np.complex128,
    )


def omega_shift(lam: complex, u: complex, v: complex, params: ModelParams) -> complex:
    return (lam + u - v) / 2 + (1 - params.l) * params.eta


def omega_vector(lam: complex, u: complex, v: complex, basis: RepBasis) -> np.ndarray:
    """Coefficients of ``omega_lambda(u; v) = [z; (lambda + u - v)/2 + (1-l) eta]_{2l}``."""
    return basis.shift_product(omega_shift(lam, u, v, basis.params)).coeffs


def support(r0: int) -> list[tuple[int, int]]:
    """1-based ``(i'', j'')`` with ``i'' = j'' +- 1 (mod r0)``."""
    out = []
    for j in range(1, r0 + 1):
        for s in (1, -1):
            out.append(((j - 1 + s) % r0 + 1, j))
    return sorted(set(out))


def move(i: int, j: int, r0: int) -> int:
    """``+1`` if ``i = j + 1``, ``-1`` if ``i = j - 1`` (mod ``r0``)."""
    if (i - j - 1) % r0 == 0:
        return 1
    if (i - j + 1) % r0 == 0:
        return -1
    raise ValueError(f"({i}, {j}) is not in the support")


class FabriciusQ:
    """Builder for the cyclic grid ``S(u)`` and ``Q_R(u)``."""

    method = "fabricius"

    def __init__(self, lattice: Lattice):
        self.lat = lattice
        self.basis = lattice.basis
        self.params = lattice.params
        self.engine = lattice.engine
        if self.params.N % 2:
            raise OddSiteCount(self.params.N)
        self.r0 = 2 * self.params.r
        self.taus = generic_constants(self.basis.dim, self.r0, self.params.seed, TAU_STREAM)

    def lam(self, i: int) -> complex:
        """``lambda0 + 4 i'' l eta``."""
        p = self.params
        return p.lambda0 + 4 * i * p.l * p.eta

    def entry_vector(self, i: int, j: int, u: complex) -> np.ndarray:
        s = move(i, j, self.r0)
        return omega_vector(s * self.lam(j), u, s * self.params.v, self.basis)

    def vectors(self, u: complex) -> dict:
        return {(i - 1, j - 1): self.entry_vector(i, j, u) for i, j in support(self.r0)}

    def s_grid(self, u: complex) -> np.ndarray:
        return rank_one_grid(self.vectors(u), self.taus, self.r0, self.basis.dim)

    def qr(self, u: complex) -> np.ndarray:
        return chain_operator(self.s_grid(u), self.lat)

    def gauges(self) -> list[np.ndarray]:
        return [gauge_matrix(self.lam(i), self.params.v, self.engine) for i in range(1, self.r0 + 1)]

    def conjugated(self, u: complex) -> np.ndarray:
        return conjugated_block(self.lat, u, self.s_grid(u), self.gauges())

    def x_diag(self) -> np.ndarray:
        return np.array([self.engine.bracket(self.lam(i)) for i in range(1, self.r0 + 1)])

    def a_d_expected(self, u: complex) -> tuple[np.ndarray, np.ndarray]:
        """``A = 2[u+2l eta] S(u-2eta)`` and ``D = X^{-1}(2[u-2l eta] S(u+2eta)) X``."""
        e, p = self.engine, self.params
        eta, l = p.eta, p.l
        A = 2 * e.bracket(u + 2 * l * eta) * self.s_grid(u - 2 * eta)
        x = self.x_diag()
        ratio = x[None, :] / x[:, None]
        D = 2 * e.bracket(u - 2 * l * eta) * self.s_grid(u + 2 * eta) * ratio[:, :, None, None]
        return A, D

    def d_value(self, i: int, j: int) -> complex:
        p = self.params
        l, eta = p.l, p.eta
        if move(i, j, self.r0) == 1:
            return 2 * (2 * j + 1) * l * eta + (p.lambda0 - p.v)
        return -2 * (2 * i + 1) * l * eta - (p.lambda0 - p.v)

    def u3_phase(self, i: int, j: int, u: complex) -> complex:
        p = self.params
        l, tau = p.l, p.tau
        return np.exp(1j * np.pi * (l * (tau - 1) + 2 * l * u + 2 * l * self.d_value(i, j)))


# ---------------------------------------------------------------------------
# pseudo-vacuum actions
# ---------------------------------------------------------------------------

def action_on_vacuum(fq: FabriciusQ, lam: complex, u: complex) -> dict[str, float]:
    """Residuals of the alpha/gamma/delta actions of ``M_{lambda+-4l eta}^{-1} L M_lambda``."""
    p, e = fq.params, fq.engine
    l, eta, v = p.l, p.eta, p.v
    L = fq.lat.l_operator(u)
    out = {}
    for s, tag in ((1, "+"), (-1, "-")):
        tw = twist(L, gauge_matrix(lam + s * 4 * l * eta, v, e), gauge_matrix(lam, v, e))
        w = omega_vector(s * lam, u, s * v, fq.basis)
        nw = np.linalg.norm(w)
        out[f"gamma{tag}"] = float(np.linalg.norm(tw[1, 0] @ w) / (np.linalg.norm(tw[1, 0]) * nw))
        want_a = 2 * e.bracket(u + 2 * l * eta) * omega_vector(s * lam - 2 * eta, u, s * v, fq.basis)
        ratio = e.bracket(lam) / e.bracket(lam + s * 4 * l * eta)
        want_d = 2 * e.bracket(u - 2 * l * eta) * ratio * omega_vector(s * lam + 2 * eta, u, s * v, fq.basis)
        out[f"alpha{tag}"] = float(np.linalg.norm(tw[0, 0] @ w - want_a) / np.linalg.norm(want_a))
        out[f"delta{tag}"] = float(np.linalg.norm(tw[1, 1] @ w - want_d) / np.linalg.norm(want_d))
    return out


def periodicity_residuals(fq: FabriciusQ, lam: complex, u: complex) -> dict[str, float]:
    """``M``, ``omega`` and ``[lambda]`` are ``4 r l eta``-periodic in ``lambda``;
    ``omega_{lambda +- 2 eta}(u) = omega_lambda(u +- 2 eta)``."""
    p, e = fq.params, fq.engine
    per = 4 * p.r * p.l * p.eta
    v = p.v
    M0, M1 = gauge_matrix(lam, v, e), gauge_matrix(lam + per, v, e)
    w0, w1 = omega_vector(lam, u, v, fq.basis), omega_vector(lam + per, u, v, fq.basis)
    b0, b1 = e.bracket(lam), e.bracket(lam + per)
    shift = max(
        np.linalg.norm(omega_vector(lam + s * 2 * p.eta, u, v, fq.basis)
                       - omega_vector(lam, u + s * 2 * p.eta, v, fq.basis)) / np.linalg.norm(w0)
        for s in (1, -1)
    )
    return {
        "M": float(np.linalg.norm(M1 - M0) / np.linalg.norm(M0)),
        "omega": float(np.linalg.norm(w1 - w0) / np.linalg.norm(w0)),
        "bracket": float(abs(b1 - b0) / abs(b0)),
        "omega-shift": float(shift),
    }


# ---------------------------------------------------------------------------
# W matrix, u/mu tables, Y
# ---------------------------------------------------------------------------

# keys (i''' move, j''' move); values (u coefficient pair (c_u', c_u), mu)
U1_TABLE = {(1, 1): ((1, 1), 0), (1, -1): ((1, -1), 2), (-1, 1): ((-1, 1), -2), (-1, -1): ((-1, -1), 0)}
U2_TABLE = {(1, 1): ((1, -1), 2), (1, -1): ((1, 1), 0), (-1, 1): ((-1, -1), 0), (-1, -1): ((-1, 1), -2)}


def u_mu_tables(i_move: int, j_move: int) -> tuple[tuple[int, int], int, tuple[int, int], int]:
    """``(u1, mu1, u2, mu2)`` with ``u`` given as coefficients of ``(u', u)``."""
    (c1, m1), (c2, m2) = U1_TABLE[(i_move, j_move)], U2_TABLE[(i_move, j_move)]
    return c1, m1, c2, m2


def u_mu_derived(i_move: int, j_move: int) -> tuple[tuple[int, int], int, tuple[int, int], int]:
    """Same table recomputed from the shift-product parameters of both entries.

    The first factor carries ``i Im(lambda0 - v)`` and the second ``Re(lambda0 - v)``;
    evenness of ``theta^(2l)`` is used to make the ``(lambda0 - v)`` coefficient ``+1``.
    """
    ei, ej = i_move, j_move
    # gamma - conj(alpha): (ei*x - ej*conj(x))/2 + 2l eta (ei i - ej j) + (u' + u)/2
    # gamma + conj(alpha) + 2(2l-1)eta: (ei*x + ej*conj(x))/2 + 2l eta (ei i + ej j) + (u' - u)/2 + 2l eta
    first = ("im", ei, (1, 1), 0) if ei == ej else ("re", ei, (1, 1), 0)
    second = ("re", ei, (1, -1), 2) if ei == ej else ("im", ei, (1, -1), 2)
    res = {}
    for kind, sgn, (cu_p, cu), mu in (first, second):
        # normalise the sign so that the (lambda0 - v) part enters with +1
        res[kind] = ((sgn * cu_p, sgn * cu), sgn * mu)
    (c1, m1), (c2, m2) = res["im"], res["re"]
    return c1, m1, c2, m2


def w_matrix_closed(j: int, i: int, u: complex, u2: complex, fq: FabriciusQ) -> np.ndarray:
    """``W(j, i | u, u')`` from the closed form and the ``u/mu`` tables; rows ``(j''', i''')``."""
    p, e = fq.params, fq.engine
    r0, l, eta, two_l = fq.r0, p.l, p.eta, p.two_l
    x = p.lambda0 - p.v
    scale = form_scale(p, e)
    W = np.zeros((r0 * r0, r0 * r0), dtype=np.complex128)
    supp = support(r0)
    for j3, j2 in supp:
        for i3, i2 in supp:
            c1, m1, c2, m2 = u_mu_tables(move(i3, i2, r0), move(j3, j2, r0))
            arg1 = 1j * x.imag + 2 * (i2 - j2) * l * eta + (c1[0] * u2 + c1[1] * u) / 2 + m1 * l * eta
            arg2 = x.real + 2 * (i2 + j2) * l * eta + (c2[0] * u2 + c2[1] * u) / 2 + m2 * l * eta
            W[(j3 - 1) * r0 + (i3 - 1), (j2 - 1) * r0 + (i2 - 1)] = (
                np.conj(fq.taus[j, j2 - 1]) * fq.taus[i, i2 - 1] * scale
                * e.theta_pow2l(arg1, two_l, eta) * e.theta_pow2l(arg2, two_l, eta)
            )
    return W


def w_matrix_forms(j: int, i: int, u: complex, u2: complex, fq: FabriciusQ) -> np.ndarray:
    """``W(j, i | u, u')`` from Sklyanin forms of entries of ``S(-u*)`` and ``S(u')``."""
    r0 = fq.r0
    left, right = fq.s_grid(-np.conj(u)), fq.s_grid(u2)
    W = np.zeros((r0 * r0, r0 * r0), dtype=np.complex128)
    supp = support(r0)
    for j3, j2 in supp:
        for i3, i2 in supp:
            W[(j3 - 1) * r0 + (i3 - 1), (j2 - 1) * r0 + (i2 - 1)] = fq.basis.inner(
                left[j3 - 1, j2 - 1][:, j], right[i3 - 1, i2 - 1][:, i])
    return W


class YSystem:
    """Coefficients ``A_{i''j''}``, ``B_{i''j''}`` of the linear difference system for ``y``."""

    def __init__(self, u: complex, u2: complex, params: ModelParams, engine: ThetaEngine):
        self.u, self.u2 = u, u2
        self.p, self.e = params, engine
        x = params.lambda0 - params.v
        self.re, self.im = x.real, x.imag

    def _th(self, z):
        return self.e.theta_pow2l(z, self.p.two_l, self.p.eta)

    def A(self, i: int, j: int) -> complex:
        le = self.p.l * self.p.eta
        base = self.re + 2 * (i + j) * le + 2 * le
        return self._th(base + (self.u2 - self.u) / 2) / self._th(base + (self.u - self.u2) / 2)

    def B(self, i: int, j: int) -> complex:
        le = self.p.l * self.p.eta
        base = 1j * self.im + 2 * (i - j) * le + 2 * le
        return self._th(base + (self.u2 - self.u) / 2) / self._th(base + (self.u - self.u2) / 2)

    def Am(self, i: int, j: int) -> complex:
        """Right side of the ``(-,-)`` family."""
        le = self.p.l * self.p.eta
        base = self.re + 2 * (i + j) * le - 2 * le
        return self._th(base + (self.u - self.u2) / 2) / self._th(base + (self.u2 - self.u) / 2)

    def Bm(self, i: int, j: int) -> complex:
        """Right side of the ``(-,+)`` family."""
        le = self.p.l * self.p.eta
        base = 1j * self.im + 2 * (i - j) * le - 2 * le
        return self._th(base + (self.u - self.u2) / 2) / self._th(base + (self.u2 - self.u) / 2)

    def compatibility(self, i: int, j: int) -> float:
        lhs = self.B(i + 1, j + 1) * self.A(i, j)
        rhs = self.A(i + 1, j - 1) * self.B(i, j)
        return float(abs(lhs - rhs) / abs(lhs))

    def lemma_products(self, i: int, j: int) -> tuple[complex, complex]:
        r = self.p.r
        pa = np.prod([self.A(i + k, j + k) for k in range(r)])
        pb = np.prod([self.B(i + k, j - k) for k in range(r)])
        return complex(pa), complex(pb)

    def y_path(self, i: int, j: int) -> complex:
        """``y_{i''j''}`` on the unbounded lattice from ``y_{11} = y_{12} = 1``.

        Walk ``a`` steps along ``(+1,+1)`` then ``b`` steps along ``(+1,-1)``
        (negative ``b`` uses the inverse relation).
        """
        j0 = 1 if (i + j) % 2 == 0 else 2
        a2, b2 = (i - 1) + (j - j0), (i - 1) - (j - j0)
        a, b = a2 // 2, b2 // 2
        y = 1.0 + 0j
        ci, cj = 1, j0
        step = 1 if a >= 0 else -1
        for _ in range(abs(a)):
            if step > 0:
                y *= self.A(ci, cj)
                ci, cj = ci + 1, cj + 1
            else:
                ci, cj = ci - 1, cj - 1
                y /= self.A(ci, cj)
        step = 1 if b >= 0 else -1
        for _ in range(abs(b)):
            if step > 0:
                y *= self.B(ci, cj)
                ci, cj = ci + 1, cj - 1
            else:
                ci, cj = ci - 1, cj + 1
                y /= self.B(ci, cj)
        assert (ci, cj) == (i, j)
        return y

    def y_table(self, r0: int) -> np.ndarray:
        """``y[i''-1, j''-1]`` for ``1 <= i'', j'' <= r0``."""
        return np.array([[self.y_path(i, j) for j in range(1, r0 + 1)] for i in range(1, r0 + 1)])


def y_conjugation_fab(u: complex, u2: complex, fq: FabriciusQ) -> np.ndarray:
    """Diagonal of ``Y`` over ``(j'', i'')`` row-major with ``Y W(u,u') Y^{-1} = W(u',u)``.

    The recurrence yields ``y`` with ``Y^{-1} W(u,u') Y = W(u',u)``; the returned
    diagonal is its reciprocal.
    """
    ys = YSystem(u, u2, fq.params, fq.engine)
    tab = ys.y_table(fq.r0)  # [i, j]
    return 1.0 / tab.T.reshape(-1)  # rows (j'', i'')


def family_residuals(ys: YSystem, r0: int) -> dict[str, float]:
    """All four ratio families checked against one constructed ``y``."""
    worst = {"++": 0.0, "+-": 0.0, "-+": 0.0, "--": 0.0}
    y = ys.y_path
    for i in range(1, r0 + 1):
        for j in range(1, r0 + 1):
            y0 = y(i, j)
            checks = {
                "++": (y(i + 1, j + 1) / y0, ys.A(i, j)),
                "+-": (y(i + 1, j - 1) / y0, ys.B(i, j)),
                "-+": (y(i - 1, j + 1) / y0, ys.Bm(i, j)),
                "--": (y(i - 1, j - 1) / y0, ys.Am(i, j)),
            }
            for k, (got, want) in checks.items():
                worst[k] = max(worst[k], abs(got - want) / abs(want))
    return {k: float(v) for k, v in worst.items()}


def y_periodicity_residual(ys: YSystem, r0: int) -> float:
    worst = 0.0
    for i in range(1, r0 + 1):
        for j in range(1, r0 + 1):
            y0 = ys.y_path(i, j)
            for yy in (ys.y_path(i + r0, j), ys.y_path(i, j + r0)):
                worst = max(worst, abs(yy - y0) / abs(y0))
    return float(worst)


# ---------------------------------------------------------------------------
# quasi-periodicity
# ---------------------------------------------------------------------------

def similarity_diag(params: ModelParams, r0: int) -> np.ndarray:
    """``A_{j''} = exp(4 j''(j''+r'') l^2 eta pi i)`` for ``j'' = 1..r0``."""
    j = np.arange(1, r0 + 1)
    return np.exp(4j * np.pi * j * (j + params.rpp) * params.l ** 2 * params.eta)


def similarity_cancels(fq: FabriciusQ, u: complex) -> float:
    """Residual of ``phase(i, j) A_j / A_i`` being independent of ``(i, j)``."""
    A = similarity_diag(fq.params, fq.r0)
    vals = np.asarray([fq.u3_phase(i, j, u) * A[j - 1] / A[i - 1] for i, j in support(fq.r0)])
    return float(np.max(np.abs(vals - vals[0])) / abs(vals[0]))


def similarity_period(params: ModelParams, r0: int) -> float:
    """``A_{i''+2r} = A_{i''}``."""
    j = np.arange(1, r0 + 1)
    a0 = np.exp(4j * np.pi * j * (j + params.rpp) * params.l ** 2 * params.eta)
    j2 = j + r0
    a1 = np.exp(4j * np.pi * j2 * (j2 + params.rpp) * params.l ** 2 * params.eta)
    return float(np.max(np.abs(a1 - a0)))


def entry_quasi_periodicity(fq: FabriciusQ, U1: np.ndarray, U3: np.ndarray, u: complex) -> dict[str, float]:
    l, tau = fq.params.l, fq.params.tau
    s0, s1, st = fq.s_grid(u), fq.s_grid(u + 1), fq.s_grid(u + tau)
    w1 = w3 = 0.0
    for i, j in support(fq.r0):
        a, b = i - 1, j - 1
        w1 = max(w1, _rel(U1 @ s0[a, b], np.exp(-1j * np.pi * l) * s1[a, b]))
        w3 = max(w3, _rel(U3 @ s0[a, b], fq.u3_phase(i, j, u) * st[a, b]))
    return {"U1": w1, "U3": w3}


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b)))
