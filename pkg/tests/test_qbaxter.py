import numpy as np
import pytest

from vertexq import qbaxter as qb
from vertexq import repspace as rs
from vertexq.lattice import Lattice
from vertexq.params import ModelParams
from vertexq.qverify import commutation_check, tq_residual


@pytest.fixture(scope="module", params=[(0.5, 2, 5), (1.0, 2, 4)], ids=["l=1/2", "l=1"])
def bq(request):
    l, N, r = request.param
    return qb.BaxterQ(Lattice(rs.build_basis(ModelParams(N=N, l=l, r=r))))


def test_support_shape():
    assert qb.support(4) == [(1, 1), (1, 2), (2, 1), (2, 3), (3, 2), (3, 4), (4, 3), (4, 4)]


def test_p_boundary(bq):
    assert abs(bq.p[0] - bq.p[1]) < 1e-12 and abs(bq.p[-1] - bq.p[-2]) < 1e-12


def test_null_vectors(bq):
    res = qb.null_vector_residuals(bq, 0.27 + 0.01j, 0.11 - 0.03j)
    assert max(res.values()) < 1e-9
    assert qb.support_beta_residual(bq, 0.11) < 1e-9


def test_block_structure(bq):
    u = 0.17 + 0.02j
    C = bq.conjugated(u)
    A, D = bq.a_d_expected(u)
    assert np.linalg.norm(C[0, 1]) < 1e-9 * np.linalg.norm(C)
    assert np.linalg.norm(C[0, 0] - A) < 1e-9 * np.linalg.norm(A)
    assert np.linalg.norm(C[1, 1] - D) < 1e-9 * np.linalg.norm(D)


def test_tq_relation(bq):
    for u in (0.09 + 0.03j, 0.33 - 0.01j):
        assert tq_residual(bq.lat, bq.qr, u) < 1e-9


def test_ql_qr_symmetry(bq):
    assert commutation_check(bq.lat, bq.qr, 0.13, 0.13) == 0.0
    assert commutation_check(bq.lat, bq.qr, 0.13, 0.21) < 1e-9


@pytest.mark.parametrize("r", [3, 4, 5, 7])
def test_tables_against_derivation(r):
    assert qb.tables_match_derivation(r) == 0
    assert qb.y_table_mismatches(r) == 0


def test_w_matrix_closed_form(bq):
    u, v = 0.13 + 0.02j, 0.21 - 0.01j
    for j in range(bq.basis.dim):
        for i in range(bq.basis.dim):
            a, b = qb.w_matrix_forms(j, i, u, v, bq), qb.w_matrix_closed(j, i, u, v, bq)
            assert np.linalg.norm(a - b) < 1e-9 * np.linalg.norm(b)


def test_ywy(bq):
    u, v = 0.13 + 0.02j, 0.21 - 0.01j
    y = qb.y_conjugation_bax(u, v, bq.params, bq.engine)
    W, W2 = qb.w_matrix_closed(0, 0, u, v, bq), qb.w_matrix_closed(0, 0, v, u, bq)
    assert np.linalg.norm(y[:, None] * W / y[None, :] - W2) < 1e-9 * np.linalg.norm(W2)


def test_quasi_periodicity(bq):
    U1, U3 = rs.unitary_U(1, bq.basis), rs.unitary_U(3, bq.basis)
    assert max(qb.entry_quasi_periodicity(bq, U1, U3, 0.1).values()) < 1e-9
    assert qb.similarity_cancels(bq, 0.1) < 1e-10
    assert max(qb.quasi_periodicity_qr(bq.qr, U1, U3, bq.params, 0.1).values()) < 1e-9
