import numpy as np
import pytest

from vertexq import _kernels
from vertexq import repspace as rs
from vertexq.lattice import (
    BudgetExceeded,
    Lattice,
    eight_vertex_transfer,
    pauli_identification,
    r_matrix_explicit,
    r_matrix_sigma,
    rll_residual,
)
from vertexq.params import ModelParams
from vertexq.qverify import tensor_power


@pytest.fixture(scope="module", params=[(0.5, 3, 1, 5), (1.0, 2, 1, 4)], ids=["l=1/2", "l=1"])
def lat(request):
    l, N, rp, r = request.param
    if l == 0.5 and N == 3:
        N = 4
    return Lattice(rs.build_basis(ModelParams(N=N, l=l, r=r, r_prime=rp)))


def test_r_matrix_forms_agree(lat):
    for u in (0.1, 0.3 + 0.2j):
        R1, R2 = r_matrix_sigma(u, lat.params, lat.engine), r_matrix_explicit(u, lat.params, lat.engine)
        assert np.linalg.norm(R1 - R2) < 1e-12 * np.linalg.norm(R1)


def test_rll(lat):
    assert rll_residual(lat, 0.13 + 0.02j, 0.31 - 0.05j) < 1e-10


def test_transfer_matrices_commute(lat):
    a, b = lat.transfer_matrix(0.12 + 0.03j), lat.transfer_matrix(-0.27 + 0.1j)
    assert np.linalg.norm(a @ b - b @ a) < 1e-10 * np.linalg.norm(a @ b)


def test_adjoint_law(lat):
    u = 0.17 + 0.06j
    lhs = lat.adjoint(lat.transfer_matrix(u))
    rhs = (-1) ** lat.params.N * lat.transfer_matrix(-np.conj(u))
    assert np.linalg.norm(lhs - rhs) < 1e-10 * np.linalg.norm(rhs)


def test_transfer_matrix_matches_direct_sum(lat):
    """Chain trace against an explicit sum over auxiliary configurations."""
    import itertools

    u = 0.21 - 0.04j
    L = lat.l_operator(u)
    N, d = lat.params.N, lat.dim
    T = lat.transfer_matrix(u)
    rows, cols = (0,) * N, tuple(k % d for k in range(N))
    acc = 0j
    for chain in itertools.product(range(2), repeat=N):
        term = 1
        for k in range(N):
            term *= L[chain[k], chain[(k + 1) % N]][rows[k], cols[k]]
        acc += term
    idx = lambda t: int(np.ravel_multi_index(t, (d,) * N))
    assert abs(T[idx(rows), idx(cols)] - acc) < 1e-12 * max(1, np.max(np.abs(T)))


def test_eight_vertex_cross_check():
    p = ModelParams(N=4, l=0.5, r=5)
    lat = Lattice(rs.build_basis(p))
    P = tensor_power(pauli_identification(lat.basis), p.N)
    c = lat.engine.bracket(2 * p.eta) ** p.N
    u = 0.19 + 0.03j
    lhs = np.linalg.inv(P) @ lat.transfer_matrix(u) @ P
    assert np.linalg.norm(lhs - c * eight_vertex_transfer(u, p, lat.engine)) < 1e-10 * np.linalg.norm(lhs)


def test_budget_is_enforced():
    lat = Lattice(rs.build_basis(ModelParams(N=4, l=1, r=4)), max_dim=50)
    with pytest.raises(BudgetExceeded):
        lat.transfer_matrix(0.1)


def test_numba_and_numpy_chain_trace_agree():
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    rng = np.random.default_rng(2)
    g = rng.normal(size=(3, 3, 2, 2)) + 1j * rng.normal(size=(3, 3, 2, 2))
    for n in (1, 2, 5):
        a, b = _kernels.chain_trace_numpy(g, n), _kernels.chain_trace_numba(g, n)
        assert np.linalg.norm(a - b) < 1e-12 * np.linalg.norm(a)
