"""Check groups: every identity becomes a :class:`Report` with a residual and a tolerance.

Groups are keyed by the names accepted on the command line. A group receives a
:class:`Context` holding the shared objects for one parameter set and returns
its reports in a fixed order.
"""

from __future__ import annotations

import dataclasses
import time
from concurrent.futures import ThreadPoolExecutor
from functools import cached_property
from typing import Callable

import numpy as np

from . import qbaxter as qb
from . import qfabricius as qf
from . import qverify as qv
from . import repspace as rs
from .lattice import (
    DEFAULT_MAX_DIM,
    BudgetExceeded,
    Lattice,
    PAULI,
    eight_vertex_transfer,
    pauli_identification,
    r_matrix_explicit,
    r_matrix_sigma,
    rll_residual,
)
from .params import ConfigError, ModelParams
from .qverify import Report, rel

CHECKS = ("theta", "rep", "rll", "tt", "tq", "qt", "wy", "lemma", "quasi", "q-full")
METHODS = ("baxter", "fabricius", "both")

DEFAULT_U_GRID = (0.13 + 0.02j, 0.21, 0.29 - 0.03j, 0.37 + 0.05j, 0.08 - 0.04j)


class Context:
    """Shared, read-only objects for one parameter set."""

    def __init__(self, params: ModelParams, method: str = "both", u_grid=DEFAULT_U_GRID,
                 max_dim: int = DEFAULT_MAX_DIM):
        if method not in METHODS:
            raise ConfigError("method", f"method must be one of {METHODS}, got {method!r}")
        if method == "fabricius" and params.N % 2:
            raise qf.OddSiteCount(params.N)
        self.params = params
        self.method = method
        self.u_grid = tuple(complex(u) for u in u_grid)
        self.max_dim = max_dim
        self.engine = params.engine()
        self.snapshot = params.snapshot()

    # built eagerly by ``prepare`` so that worker threads only read
    @cached_property
    def basis(self) -> rs.RepBasis:
        return rs.build_basis(self.params, self.engine)

    @cached_property
    def lattice(self) -> Lattice:
        return Lattice(self.basis, self.max_dim)

    @cached_property
    def unitaries(self) -> dict[int, np.ndarray]:
        return {a: rs.unitary_U(a, self.basis) for a in (1, 2, 3)}

    @cached_property
    def builders(self) -> dict:
        out = {}
        if self.method in ("baxter", "both"):
            out["baxter"] = qb.BaxterQ(self.lattice)
        if self.method in ("fabricius", "both") and self.params.N % 2 == 0:
            out["fabricius"] = qf.FabriciusQ(self.lattice)
        return out

    def prepare(self, checks) -> None:
        if set(checks) - {"theta"}:
            _ = self.basis, self.lattice, self.unitaries, self.builders

    def rng(self, stream: int) -> np.random.Generator:
        return np.random.default_rng([self.params.seed, 1000 + stream])

    def report(self, id_: str, anchor: str, tol: float, fn: Callable[[], float], note: str = "") -> Report:
        return qv.timed(id_, anchor, tol, fn, self.snapshot, note)


def _maxv(d: dict) -> float:
    return float(max(d.values()))


def _random_z(rng: np.random.Generator, n: int, tau: complex) -> np.ndarray:
    return rng.uniform(0, 1, n) + 1j * rng.uniform(-0.5, 0.5, n) * tau.imag


# ---------------------------------------------------------------------------
# theta
# ---------------------------------------------------------------------------

def group_theta(ctx: Context) -> list[Report]:
    e, p = ctx.engine, ctx.params
    tau, eta, tl = p.tau, p.eta, p.two_l
    z = _random_z(ctx.rng(1), 20, tau)
    doubled = dataclasses.replace(e.params, n_max=2 * e.params.n_max)
    e2 = type(e)(doubled)

    def quasi():
        lhs = e.bracket(z + tau)
        return np.max(np.abs(lhs + np.exp(-1j * np.pi * (tau + 2 * z)) * e.bracket(z))) / np.max(np.abs(lhs))

    def odd_shift():
        return np.max(np.abs(e.bracket(z + 1) + e.bracket(z)))

    def b_shift():
        return np.max(np.abs(e.theta(0, 1, z) - e.theta(0, 0, z + 0.5)))

    def doubling():
        zz = np.concatenate([z, z + 1j * tau.imag])
        return max(np.max(np.abs(e.theta(a, b, zz) - e2.theta(a, b, zz))) for a in (0, 1) for b in (0, 1))

    def g_even():
        return np.max(np.abs(e.cap_G(-z, tl, eta) - e.cap_G(z, tl, eta)))

    def g_periodic():
        return np.max(np.abs(e.cap_G(z + 1, tl, eta) - e.cap_G(z, tl, eta)))

    def pow_even():
        return np.max(np.abs(e.theta_pow2l(-z, tl, eta) - e.theta_pow2l(z, tl, eta)))

    def pow_period():
        return np.max(np.abs(e.theta_pow2l(z + p.r_prime, tl, eta) - e.theta_pow2l(z, tl, eta)))

    def runs():
        a = abs(e.bracket_run(0.1, 0, eta) - 1)
        b = np.max(np.abs(e.bracket_run(z, 1, eta) - e.bracket(z)))
        c = np.max(np.abs(e.bracket_sym(-z, 0.05, 2, eta) - e.bracket_sym(z, 0.05, 2, eta)))
        return max(a, b, c)

    def weights():
        u = z[:5]
        a = max(abs(e.coeff_WL(k, eta, eta) - 1) for k in range(4))
        b = max(np.max(np.abs(e.coeff_WR(k, u, eta) - e.coeff_WL(k, u + eta, eta))) for k in range(4))
        return max(a, b)

    tol = 1e-12
    return [
        ctx.report("theta.quasi-periodicity", "[z+tau] = -exp(-i pi (tau + 2z)) [z]", tol, quasi),
        ctx.report("theta.odd-shift", "[z+1] = -[z]", tol, odd_shift),
        ctx.report("theta.b-shift", "theta_01(z) = theta_00(z + 1/2)", tol, b_shift),
        ctx.report("theta.doubling", "|theta(n_max) - theta(2 n_max)|", tol, doubling),
        ctx.report("theta.G-even", "G(-z) = G(z)", tol, g_even),
        ctx.report("theta.G-periodic", "G(z+1) = G(z)", tol, g_periodic),
        ctx.report("theta.pow2l-even", "theta^(2l)_00(-u) = theta^(2l)_00(u)", tol, pow_even),
        ctx.report("theta.pow2l-period", "theta^(2l)_00(u + 2rl eta) = theta^(2l)_00(u)", tol, pow_period),
        ctx.report("theta.bracket-products", "[z]_0 = 1, [z]_1 = [z], [-z;a]_k = [z;a]_k", tol, runs),
        ctx.report("theta.weights", "W^L_a(eta) = 1, W^R_a(u) = W^L_a(u + eta)", tol, weights),
    ]


# ---------------------------------------------------------------------------
# representation space
# ---------------------------------------------------------------------------

def group_rep(ctx: Context) -> list[Report]:
    b, e, p = ctx.basis, ctx.engine, ctx.params
    S = ctx.lattice.S
    U = ctx.unitaries
    out = []

    def comm():
        return max(_maxv(rs.commutation_residuals(S, e, p.eta, u)) for u in (0.3, 0.17 + 0.1j))

    out.append(ctx.report("rep.commutation", "[S^a,S^0] = -i J [S^b,S^c]_+, [S^a,S^b] = i [S^0,S^c]_+",
                          1e-9, comm))

    if p.two_l == 1:
        def pauli():
            P = pauli_identification(b)
            Pi = np.linalg.inv(P)
            c = e.bracket(2 * p.eta)
            return max(np.linalg.norm(Pi @ S[a] @ P - c * PAULI[a]) / abs(c) for a in range(4))

        out.append(ctx.report("rep.pauli", "rho^(1/2)(S^a) = [2 eta] sigma^a", 1e-9, pauli))

    def self_adjoint():
        G = b.gram
        return max(np.linalg.norm(G @ S[a] - S[a].conj().T @ G) / np.linalg.norm(G @ S[a]) for a in range(4))

    out.append(ctx.report("rep.self-adjoint", "<f, S^a g> = <S^a f, g>", 1e-8, self_adjoint))

    def positive():
        G = b.gram_raw
        herm = np.linalg.norm(G - G.conj().T) / np.linalg.norm(G)
        ev = np.linalg.eigvalsh(0.5 * (G + G.conj().T))
        rng = ctx.rng(2)
        vals = []
        for _ in range(10):
            c = rng.normal(size=b.dim) + 1j * rng.normal(size=b.dim)
            vals.append(b.inner(c, c).real)
        neg = max(0.0, -ev[0] / ev[-1]) + (0.0 if min(vals) > 0 else 1.0)
        return herm + neg

    out.append(ctx.report("rep.positive-form", "<f,f> > 0, Gram Hermitian", 1e-10, positive))

    def gram_vs_quadrature():
        rng = ctx.rng(3)
        worst = 0.0
        n = b.quad_n
        for _ in range(4):
            f = rng.normal(size=b.dim) + 1j * rng.normal(size=b.dim)
            g = rng.normal(size=b.dim) + 1j * rng.normal(size=b.dim)
            direct = rs.sklyanin_form(f, g, b, quad_n=n, rule="midpoint")
            worst = max(worst, abs(b.inner(f, g) - direct) / abs(direct))
        return worst

    out.append(ctx.report("rep.gram-vs-quadrature", "c_f^H Gram c_g = <f, g> (midpoint nodes)", 1e-8,
                          gram_vs_quadrature))

    def generator_oracle():
        rng = ctx.rng(4)
        m = 3 * p.two_l + 4
        zs = 0.03 + 0.44 * rng.uniform(size=m) + 1j * p.tau.imag * rng.uniform(0.05, 0.2, size=m)
        worst = 0.0
        for a in range(4):
            direct = np.stack([rs.apply_generator(a, lambda z, k=k: b.evaluate(np.eye(b.dim)[k], z), b, zs)
                               for k in range(b.dim)], axis=-1)
            fit = np.linalg.lstsq(b.values(zs), direct, rcond=None)[0]
            worst = max(worst, np.linalg.norm(fit - S[a]) / np.linalg.norm(S[a]))
        return worst

    out.append(ctx.report("rep.generator-oracle", "rho(S^a) by least squares at extra points", 1e-9,
                          generator_oracle))

    def u_algebra():
        d = rs.unitary_algebra_residuals(U, b.gram, p.two_l)
        return max(v for k, v in d.items() if "unitary" not in k)

    def unitarity():
        d = rs.unitary_algebra_residuals(U, b.gram, p.two_l)
        return max(v for k, v in d.items() if "unitary" in k)

    out.append(ctx.report("rep.unitary-algebra", "U_a^2 = (-1)^(2l), U_a U_b = (-1)^(2l) U_b U_a = U_c",
                          1e-9, u_algebra))
    out.append(ctx.report("rep.unitarity", "U_a^H Gram U_a = Gram", 1e-8, unitarity))
    out.append(ctx.report("rep.intertwining", "U_a^-1 rho(S^b) U_a = rho(X_a(S^b))", 1e-9,
                          lambda: rs.intertwining_residual(S, U)))

    def membership():
        rng = ctx.rng(5)
        z = _random_z(rng, 10, p.tau) * 0.5
        vecs = [S[a][:, k] for a in range(4) for k in range(b.dim)]
        vecs += [b.shift_product(x).coeffs for x in (0.1 + 0.02j, -0.23, 0.31 - 0.05j)]
        vecs += [qb.null_vector_f(s, 0.37, 0.11 + 0.02j, b) for s in (1, -1)]
        vecs += [qf.omega_vector(0.29, 0.13, s * 0.09, b) for s in (1, -1)]
        return max(rs.membership_residual(b, c, z) for c in vecs)

    out.append(ctx.report("rep.membership", "f(z+1) = f(-z) = f(z), f(z+tau) = e^(-4l pi i (2z+tau)) f(z)",
                          1e-8, membership))

    out.extend(_closed_forms(ctx))
    return out


def _closed_forms(ctx: Context, draws: int = 10) -> list[Report]:
    b, e, p = ctx.basis, ctx.engine, ctx.params
    n = b.quad_n

    def quad(f, g):
        return rs.sklyanin_form(f, g, b, quad_n=n)

    def shift_products():
        rng = ctx.rng(6)
        worst = 0.0
        for _ in range(draws):
            al, ga = rng.uniform(-0.5, 0.5, 2) + 1j * rng.uniform(-0.1, 0.1, 2)
            closed = rs.shift_product_form_closed(al, ga, p, e)
            direct = quad(b.shift_product(al).coeffs, b.shift_product(ga).coeffs)
            worst = max(worst, abs(closed - direct) / abs(direct))
        return worst

    def f_pairs():
        rng = ctx.rng(7)
        worst = 0.0
        for _ in range(draws):
            lam, lam2 = rng.uniform(-0.5, 0.5, 2)
            u, v = rng.uniform(-0.5, 0.5, 2) + 1j * rng.uniform(-0.1, 0.1, 2)
            s, s2 = (int(x) for x in rng.choice([1, -1], 2))
            closed = rs.f_pair_closed(s, lam, u, s2, lam2, v, p, e)
            direct = quad(qb.null_vector_f(s, lam, -np.conj(u), b), qb.null_vector_f(s2, lam2, v, b))
            worst = max(worst, abs(closed - direct) / abs(direct))
        return worst

    def omega_pairs():
        rng = ctx.rng(8)
        worst = 0.0
        for _ in range(draws):
            lam, lam2, v, v2 = rng.uniform(-0.5, 0.5, 4) + 1j * rng.uniform(-0.1, 0.1, 4)
            u, u2 = rng.uniform(-0.5, 0.5, 2) + 1j * rng.uniform(-0.1, 0.1, 2)
            s, s2 = (int(x) for x in rng.choice([1, -1], 2))
            closed = rs.omega_pair_closed(s, lam, u, v, s2, lam2, u2, v2, p, e)
            direct = quad(qf.omega_vector(s * lam, -np.conj(u), s * v, b),
                          qf.omega_vector(s2 * lam2, u2, s2 * v2, b))
            worst = max(worst, abs(closed - direct) / abs(direct))
        return worst

    tol = 1e-7
    return [
        ctx.report("rep.closed-form.shift-products", "<[z;a]_2l, [z;c]_2l> closed form vs quadrature", tol,
                   shift_products, note=f"{draws} draws"),
        ctx.report("rep.closed-form.f-pairs", "<f_e(lam,-u*), f_e'(lam',v)> = F(.) G(.)", tol, f_pairs,
                   note=f"{draws} draws"),
        ctx.report("rep.closed-form.omega-pairs", "<omega, omega> closed form vs quadrature", tol,
                   omega_pairs, note=f"{draws} draws"),
    ]


# ---------------------------------------------------------------------------
# lattice
# ---------------------------------------------------------------------------

def group_rll(ctx: Context) -> list[Report]:
    lat, p, e = ctx.lattice, ctx.params, ctx.engine
    out = [
        ctx.report("rll.r-forms", "sum_a W^R_a sigma^a (x) sigma^a = explicit (a,b,c,d) matrix", 1e-9,
                   lambda: max(rel(r_matrix_sigma(u, p, e), r_matrix_explicit(u, p, e))
                               for u in ctx.u_grid)),
        ctx.report("rll.rll", "L12(v) L13(u) R23(u-v) = R23(u-v) L13(u) L12(v)", 1e-8,
                   lambda: max(rll_residual(lat, u, v) for u, v in zip(ctx.u_grid[:3], ctx.u_grid[1:4]))),
    ]
    if p.two_l == 1:
        def eight_vertex():
            P = pauli_identification(ctx.basis)
            PN = qv.tensor_power(P, p.N)
            PNi = np.linalg.inv(PN)
            c = e.bracket(2 * p.eta) ** p.N
            return max(rel(PNi @ lat.transfer_matrix(u) @ PN, c * eight_vertex_transfer(u, p, e))
                       for u in ctx.u_grid[:3])

        out.append(ctx.report("rll.eight-vertex", "spin-1/2 T(u) = [2 eta]^N T_8v(u)", 1e-8, eight_vertex))
    return out


def group_tt(ctx: Context) -> list[Report]:
    lat, p = ctx.lattice, ctx.params

    def commute():
        worst = 0.0
        for u, v in zip(ctx.u_grid[:3], ctx.u_grid[2:5]):
            a, b = lat.transfer_matrix(u), lat.transfer_matrix(v)
            worst = max(worst, np.linalg.norm(a @ b - b @ a) / np.linalg.norm(a @ b))
        return worst

    def adjoint():
        return max(rel(lat.adjoint(lat.transfer_matrix(u)), (-1) ** p.N * lat.transfer_matrix(-np.conj(u)))
                   for u in ctx.u_grid[:3])

    def entire():
        u, h = ctx.u_grid[0], 1e-4
        d1 = (lat.transfer_matrix(u + h) - lat.transfer_matrix(u - h)) / (2 * h)
        d2 = (lat.transfer_matrix(u + 1j * h) - lat.transfer_matrix(u - 1j * h)) / (2j * h)
        return rel(d1, d2)

    return [
        ctx.report("tt.commute", "T(u) T(u') = T(u') T(u)", 1e-8, commute),
        ctx.report("tt.adjoint", "T(u)* = (-1)^N T(-u*)", 1e-8, adjoint),
        ctx.report("tt.entire", "dT/du along real and imaginary directions agree", 1e-6, entire),
    ]


# ---------------------------------------------------------------------------
# Q_R constructions
# ---------------------------------------------------------------------------

def _sparsity_errors(grid: np.ndarray, allowed: set) -> float:
    r0 = grid.shape[0]
    bad = 0
    for i in range(r0):
        for j in range(r0):
            nz = bool(np.any(grid[i, j]))
            if nz != ((i + 1, j + 1) in allowed):
                bad += 1
    return float(bad)


def _chain_oracle(builder, u: complex, row: int, col: int) -> float:
    """One entry of ``Q_R`` by explicit summation over closed index chains."""
    import itertools

    grid = builder.s_grid(u)
    r0, d, N = grid.shape[0], builder.basis.dim, builder.params.N
    rows = np.unravel_index(row, (d,) * N)  # site N first
    cols = np.unravel_index(col, (d,) * N)
    acc = 0j
    for chain in itertools.product(range(r0), repeat=N):
        # chain[k] is the auxiliary index to the left of site N-k
        term = 1 + 0j
        for k in range(N):
            a, c = chain[k], chain[(k + 1) % N]
            term *= grid[a, c][rows[k], cols[k]]
            if term == 0:
                break
        acc += term
    direct = builder.qr(u)[row, col]
    return abs(acc - direct) / max(abs(direct), np.max(np.abs(builder.qr(u))))


def group_tq(ctx: Context) -> list[Report]:
    lat, p, e = ctx.lattice, ctx.params, ctx.engine
    out = []
    u_a = ctx.u_grid[0]
    if ctx.method in ("fabricius", "both"):
        def odd_rejected():
            try:
                odd = dataclasses.replace(p, N=p.N + 1 if p.N % 2 == 0 else p.N)
                qf.FabriciusQ(Lattice(rs.build_basis(odd)))
            except ConfigError:
                return 0.0
            return 1.0

        out.append(ctx.report("fabricius.odd-N-rejected", "cyclic construction requires even N", 0.5,
                              odd_rejected))
    for name, bq in ctx.builders.items():
        if name == "baxter":
            out.append(ctx.report("baxter.p-boundary", "p_0 = p_1, p_r = p_(r+1)", 1e-10,
                                  lambda: max(abs(bq.p[0] - bq.p[1]), abs(bq.p[-1] - bq.p[-2]))))
            out.append(ctx.report("baxter.null-vectors", "beta f_+- = 0; alpha, delta act diagonally on f_+-",
                                  1e-8, lambda: max(_maxv(qb.null_vector_residuals(bq, lam, u_a))
                                                    for lam in (0.31, 0.12 + 0.03j))))
            out.append(ctx.report("baxter.support-null", "beta_(i'',j'') S^(i'')_(j'') = 0", 1e-8,
                                  lambda: qb.support_beta_residual(bq, u_a)))
            allowed = set(qb.support(bq.r0))
        else:
            out.append(ctx.report("fabricius.vacuum-action", "gamma omega = 0; alpha, delta on omega", 1e-8,
                                  lambda: max(_maxv(qf.action_on_vacuum(bq, lam, u_a))
                                              for lam in (0.31, 0.12 + 0.03j))))
            out.append(ctx.report("fabricius.periodicities", "M, omega, [lambda] periodic under 4rl eta", 1e-10,
                                  lambda: _maxv(qf.periodicity_residuals(bq, 0.31 + 0.02j, u_a))))
            allowed = set(qf.support(bq.r0))
        out.append(ctx.report(f"{name}.sparsity", "S^(i'')_(j'') = 0 off the support", 0.5,
                              lambda: _sparsity_errors(bq.s_grid(u_a), allowed)))

        def blocks(bq=bq, name=name):
            C = bq.conjugated(u_a)
            A, D = bq.a_d_expected(u_a)
            zero = C[0, 1] if name == "baxter" else C[1, 0]
            return {
                "off": float(np.linalg.norm(zero) / np.linalg.norm(C)),
                "A": rel(C[0, 0], A),
                "D": rel(C[1, 1], D),
            }

        cache = {}
        blk = lambda k, f=blocks, c=cache: c.setdefault("v", f())[k]
        out.append(ctx.report(f"{name}.triangular", "M^-1 (L (x) S) M is block triangular", 1e-8,
                              lambda blk=blk: blk("off")))
        out.append(ctx.report(f"{name}.A-block", "A(u) block of the conjugated product", 1e-8,
                              lambda blk=blk: blk("A")))
        out.append(ctx.report(f"{name}.D-block", "D(u) block of the conjugated product", 1e-8,
                              lambda blk=blk: blk("D")))
        out.append(ctx.report(f"{name}.tq", "T(u)Q_R(u) = h_-(u)Q_R(u-2eta) + h_+(u)Q_R(u+2eta)", 1e-7,
                              lambda bq=bq: max(qv.tq_residual(lat, bq.qr, u) for u in ctx.u_grid),
                              note=f"{len(ctx.u_grid)} points"))
        out.append(ctx.report(f"{name}.period-2", "Q_R(u+2) = Q_R(u)", 1e-7,
                              lambda bq=bq: rel(bq.qr(u_a + 2), bq.qr(u_a))))
        out.append(ctx.report(f"{name}.chain-oracle", "Q_R entry by direct chain summation", 1e-10,
                              lambda bq=bq: max(_chain_oracle(bq, u_a, i, j) for i, j in ((0, 0), (1, 2)))))
    return out


def group_qt(ctx: Context) -> list[Report]:
    lat, p = ctx.lattice, ctx.params
    out = [ctx.report("qt.h-conjugation", "h_+-(-u*) = (-1)^N conj(h_-+(u))", 1e-12,
                      lambda: max(qv.h_conjugation_residual(p, u) for u in ctx.u_grid))]
    for name, bq in ctx.builders.items():
        ql = lambda u, bq=bq: qv.ql_from_qr(u, bq.qr, lat)
        out.append(ctx.report(f"{name}.qt", "Q_L(u)T(u) = h_-(u)Q_L(u-2eta) + h_+(u)Q_L(u+2eta)", 1e-7,
                              lambda ql=ql: max(qv.tq_residual(lat, ql, u, "right") for u in ctx.u_grid)))
        out.append(ctx.report(f"{name}.adjoint-consistency", "(Q_L phi, w) = <phi, Q_R(-u*) w>", 1e-9,
                              lambda bq=bq: qv.adjoint_consistency(lat, bq.qr, ctx.u_grid[0], p.seed)))
    return out


def group_wy(ctx: Context) -> list[Report]:
    p, e = ctx.params, ctx.engine
    u, v = 0.13 + 0.02j, 0.21 - 0.01j
    out = []
    d = ctx.basis.dim
    pairs = [(j, i) for j in range(d) for i in range(d)]
    for name, bq in ctx.builders.items():
        mod = qb if name == "baxter" else qf
        if name == "baxter":
            out.append(ctx.report("baxter.tables-derived", "w^F, w^G tables = shifts of the null vectors", 0.5,
                                  lambda: float(qb.tables_match_derivation(p.r))))
            out.append(ctx.report("baxter.table-y", "y'''/y'' in t-indices from y_ji = t_(j+i) t_(-j+i+1)", 0.5,
                                  lambda: float(qb.y_table_mismatches(p.r))))
            out.append(ctx.report("baxter.y-ratio", "y'''/y'' = G((u-v)/2 + 2w^G l eta)/G((v-u)/2 + ...)", 1e-7,
                                  lambda: qb.y_ratio_residual(u, v, p, e)))
            out.append(ctx.report("baxter.t-symmetry", "t_(m+1) = t_(-m+1)", 1e-10,
                                  lambda: qb.t_symmetry_residual(u, v, p, e)))
            ydiag = lambda a, b: qb.y_conjugation_bax(a, b, p, e)
        else:
            def umu():
                moves = [(a, b) for a in (1, -1) for b in (1, -1)]
                return float(sum(qf.u_mu_tables(a, b) != qf.u_mu_derived(a, b) for a, b in moves))

            out.append(ctx.report("fabricius.u-mu-tables", "u^(k), mu^(k) tables = derived shifts", 0.5, umu))
            ydiag = lambda a, b, bq=bq: qf.y_conjugation_fab(a, b, bq)

        def w_two_ways(bq=bq, mod=mod):
            return max(rel(mod.w_matrix_forms(j, i, u, v, bq), mod.w_matrix_closed(j, i, u, v, bq))
                       for j, i in pairs)

        def ywy(bq=bq, mod=mod, ydiag=ydiag):
            y = ydiag(u, v)
            worst = 0.0
            for j, i in pairs:
                W = mod.w_matrix_closed(j, i, u, v, bq)
                W2 = mod.w_matrix_closed(j, i, v, u, bq)
                worst = max(worst, rel((y[:, None] * W) / y[None, :], W2))
            return worst

        out.append(ctx.report(f"{name}.w-closed-form", "W(j,i|u,v) from forms = closed form", 1e-7, w_two_ways))
        out.append(ctx.report(f"{name}.ywy", "Y W(j,i|u,v) Y^-1 = W(j,i|v,u)", 1e-7, ywy))
        out.append(ctx.report(f"{name}.qlqr-symmetry", "Q_L(u) Q_R(u') = Q_L(u') Q_R(u)", 1e-7,
                              lambda bq=bq: qv.commutation_check(ctx.lattice, bq.qr, u, v)))
    return out


def group_lemma(ctx: Context) -> list[Report]:
    if "fabricius" not in ctx.builders:
        return []
    p, e = ctx.params, ctx.engine
    fq = ctx.builders["fabricius"]
    ys = qf.YSystem(0.13 + 0.02j, 0.21 - 0.01j, p, e)
    r0 = fq.r0
    idx = [(i, j) for i in range(1, r0 + 1) for j in range(1, r0 + 1)]

    def lemma():
        worst = 0.0
        for i, j in idx:
            a, b = ys.lemma_products(i, j)
            worst = max(worst, abs(a - 1), abs(b - 1))
        return worst

    return [
        ctx.report("fabricius.gauge-condition", "lambda0 - v = 2 r'' l eta", 1e-14,
                   lambda: abs(p.lambda0 - p.v - 2 * p.rpp * p.l * p.eta)),
        ctx.report("fabricius.compatibility", "B_(i+1,j+1) A_(ij) = A_(i+1,j-1) B_(ij)", 1e-10,
                   lambda: max(ys.compatibility(i, j) for i, j in idx)),
        ctx.report("fabricius.lemma-products", "prod_k A_(i+k,j+k) = prod_k B_(i+k,j-k) = 1", 1e-9, lemma),
        ctx.report("fabricius.y-periodicity", "y_(i+2r,j) = y_(i,j+2r) = y_(ij)", 1e-9,
                   lambda: qf.y_periodicity_residual(ys, r0)),
        ctx.report("fabricius.ratio-families", "(--) follows from (++), (-+) from (+-)", 1e-9,
                   lambda: _maxv(qf.family_residuals(ys, r0))),
    ]


def group_quasi(ctx: Context) -> list[Report]:
    p = ctx.params
    U1, U3 = ctx.unitaries[1], ctx.unitaries[3]
    u = 0.1
    out = []
    for name, bq in ctx.builders.items():
        mod = qb if name == "baxter" else qf
        cache = {}
        ent = lambda k, bq=bq, mod=mod, c=cache: c.setdefault("v", mod.entry_quasi_periodicity(bq, U1, U3, u))[k]
        out.append(ctx.report(f"{name}.entry-U1", "U_1 S(u) = e^(-l pi i) S(u+1)", 1e-7, lambda ent=ent: ent("U1")))
        out.append(ctx.report(f"{name}.entry-U3", "U_3 S(u) = e^(l(tau-1) pi i + 2l pi i u + ...) S(u+tau)",
                              1e-7, lambda ent=ent: ent("U3")))
        out.append(ctx.report(f"{name}.similarity", "A^-1 S A removes the index-dependent U_3 phases", 1e-10,
                              lambda bq=bq, mod=mod: mod.similarity_cancels(bq, u)))
        if name == "fabricius":
            out.append(ctx.report("fabricius.similarity-period", "A_(i+2r) = A_i", 1e-10,
                                  lambda bq=bq: qf.similarity_period(p, bq.r0)))
        cq = {}
        qq = lambda k, bq=bq, c=cq: c.setdefault("v", qb.quasi_periodicity_qr(bq.qr, U1, U3, p, u))[k]
        out.append(ctx.report(f"{name}.qr-U1", "U_1^(x)N Q_R(u) = e^(-N pi i l) Q_R(u+1)", 1e-7,
                              lambda qq=qq: qq("U1")))
        out.append(ctx.report(f"{name}.qr-U3", "U_3^(x)N Q_R(u) = e^(Nl pi i (tau-1) + 2Nl pi i u) Q_R(u+tau)",
                              1e-7, lambda qq=qq: qq("U3")))
    return out


def group_q_full(ctx: Context) -> list[Report]:
    lat = ctx.lattice
    U1, U3 = ctx.unitaries[1], ctx.unitaries[3]
    out = []
    for name, bq in ctx.builders.items():
        t0 = time.perf_counter()
        try:
            Q = qv.q_operator(lat, bq.qr, name)
        except qv.DegenerateQ as exc:
            best = min(v[0] for v in exc.singular.values())
            out.append(Report(f"{name}.q-normalisation", "Q_R(u0) invertible (cond < 1e10)", best, 1e10,
                              time.perf_counter() - t0, ctx.snapshot, note=str(exc), failure="degenerate"))
            continue
        out.append(Report(f"{name}.q-normalisation", "Q_R(u0) invertible (cond < 1e10)", Q.cond, 1e10,
                          time.perf_counter() - t0, ctx.snapshot, note=f"u0={Q.u0:.6f}"))
        u, u2 = ctx.u_grid[0], ctx.u_grid[2]
        out.append(ctx.report(f"{name}.q-identity", "Q(u0) = 1", 1e-10,
                              lambda Q=Q: rel(Q(Q.u0), np.eye(Q._qr0_inv.shape[0]))))
        out.append(ctx.report(f"{name}.q-left-right", "Q_R(u) Q_R(u0)^-1 = Q_L(u0)^-1 Q_L(u)", 1e-6,
                              lambda Q=Q: max(qv.q_left_right(Q, x) for x in ctx.u_grid)))
        out.append(ctx.report(f"{name}.q-tq", "T(u)Q(u) = h_-(u)Q(u-2eta) + h_+(u)Q(u+2eta)", 1e-6,
                              lambda Q=Q: max(qv.tq_residual(lat, Q, x) for x in ctx.u_grid)))
        out.append(ctx.report(f"{name}.q-qt", "Q(u)T(u) = h_-(u)Q(u-2eta) + h_+(u)Q(u+2eta)", 1e-6,
                              lambda Q=Q: max(qv.tq_residual(lat, Q, x, "right") for x in ctx.u_grid)))
        out.append(ctx.report(f"{name}.q-commute", "Q(u) Q(u') = Q(u') Q(u)", 1e-6,
                              lambda Q=Q: qv.q_commutator(Q, u, u2)))
        cache = {}
        qp = lambda k, Q=Q, c=cache: c.setdefault("v", qv.quasi_periodicity_q(Q, U1, U3, 0.1))[k]
        for k, anchor in (("U1-left", "U_1^(x)N Q(u) = e^(-Nl pi i) Q(u+1)"),
                          ("U1-right", "Q(u) U_1^(x)N = e^(-Nl pi i) Q(u+1)"),
                          ("U3-left", "U_3^(x)N Q(u) = e^(Nl pi i (tau-1) + 2Nl pi i u) Q(u+tau)"),
                          ("U3-right", "Q(u) U_3^(x)N = e^(Nl pi i (tau-1) + 2Nl pi i u) Q(u+tau)")):
            out.append(ctx.report(f"{name}.q-quasi-{k}", anchor, 1e-6, lambda k=k, qp=qp: qp(k)))

        def eig(Q=Q):
            res, count = qv.eigen_tq(Q, 0.19 + 0.01j, ctx.params.seed)
            return res if count else 1.0

        rep = ctx.report(f"{name}.q-eigen-tq", "t(u) q(u) = h_- q(u-2eta) + h_+ q(u+2eta)", 1e-5, eig)
        rep.note = "best over joint eigenvectors"
        out.append(rep)
    return out


GROUPS: dict[str, Callable[[Context], list[Report]]] = {
    "theta": group_theta,
    "rep": group_rep,
    "rll": group_rll,
    "tt": group_tt,
    "tq": group_tq,
    "qt": group_qt,
    "wy": group_wy,
    "lemma": group_lemma,
    "quasi": group_quasi,
    "q-full": group_q_full,
}


def run_checks(ctx: Context, checks=CHECKS, workers: int = 1) -> list[Report]:
    """Run the selected groups; output order follows ``CHECKS`` regardless of scheduling."""
    unknown = [c for c in checks if c not in GROUPS]
    if unknown:
        raise ConfigError("checks", f"unknown checks {unknown}; choose from {list(CHECKS)}")
    selected = [c for c in CHECKS if c in checks]
    ctx.prepare(selected)
    if workers <= 1 or len(selected) == 1:
        results = [_run_group(ctx, c) for c in selected]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: _run_group(ctx, c), selected))
    return [r for group in results for r in group]


def _run_group(ctx: Context, name: str) -> list[Report]:
    t0 = time.perf_counter()
    try:
        return GROUPS[name](ctx)
    except BudgetExceeded as exc:
        return [Report(f"{name}.budget", "dim(H) within the configured memory budget", float(ctx.params.hilbert_dim),
                       float(ctx.max_dim), time.perf_counter() - t0, ctx.snapshot, note=str(exc),
                       failure="budget")]


def computational_failures(reports: list[Report]) -> list[Report]:
    return [r for r in reports if r.failure]
