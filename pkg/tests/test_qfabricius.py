import numpy as np
import pytest

from vertexq import qfabricius as qf
from vertexq import repspace as rs
from vertexq.lattice import Lattice
from vertexq.params import ModelParams
from vertexq.qverify import tq_residual


@pytest.fixture(scope="module", params=[(0.5, 2, 5), (1.0, 2, 4)], ids=["l=1/2", "l=1"])
def fq(request):
    l, N, r = request.param
    return qf.FabriciusQ(Lattice(rs.build_basis(ModelParams(N=N, l=l, r=r, rpp=1, v=0.09))))


def test_odd_n_rejected():
    lat = Lattice(rs.build_basis(ModelParams(N=3, l=1, r=4)))
    with pytest.raises(qf.OddSiteCount) as exc:
        qf.FabriciusQ(lat)
    assert exc.value.constraint == "N even (fabricius)"


def test_cyclic_support():
    sup = qf.support(8)
    assert len(sup) == 16 and (1, 8) in sup and (8, 1) in sup


def test_vacuum_action(fq):
    assert max(qf.action_on_vacuum(fq, 0.29 + 0.02j, 0.12).values()) < 1e-9


def test_periodicities(fq):
    assert max(qf.periodicity_residuals(fq, 0.31, 0.07 + 0.01j).values()) < 1e-10


def test_block_structure_and_tq(fq):
    u = 0.17 + 0.02j
    C = fq.conjugated(u)
    A, D = fq.a_d_expected(u)
    assert np.linalg.norm(C[1, 0]) < 1e-9 * np.linalg.norm(C)
    assert np.linalg.norm(C[0, 0] - A) < 1e-9 * np.linalg.norm(A)
    assert np.linalg.norm(C[1, 1] - D) < 1e-9 * np.linalg.norm(D)
    assert tq_residual(fq.lat, fq.qr, u) < 1e-9


def test_u_mu_tables():
    for a in (1, -1):
        for b in (1, -1):
            assert qf.u_mu_tables(a, b) == qf.u_mu_derived(a, b)


def test_y_system(fq):
    ys = qf.YSystem(0.13 + 0.02j, 0.21 - 0.01j, fq.params, fq.engine)
    r0 = fq.r0
    assert max(ys.compatibility(i, j) for i in range(1, r0 + 1) for j in range(1, r0 + 1)) < 1e-10
    a, b = ys.lemma_products(2, 3)
    assert abs(a - 1) < 1e-10 and abs(b - 1) < 1e-10
    assert qf.y_periodicity_residual(ys, r0) < 1e-10
    assert max(qf.family_residuals(ys, r0).values()) < 1e-10


def test_w_and_ywy(fq):
    u, v = 0.13 + 0.02j, 0.21 - 0.01j
    y = qf.y_conjugation_fab(u, v, fq)
    for j, i in ((0, 0), (1, 0)):
        W, W2 = qf.w_matrix_closed(j, i, u, v, fq), qf.w_matrix_closed(j, i, v, u, fq)
        F = qf.w_matrix_forms(j, i, u, v, fq)
        assert np.linalg.norm(F - W) < 1e-9 * np.linalg.norm(W)
        assert np.linalg.norm(y[:, None] * W / y[None, :] - W2) < 1e-9 * np.linalg.norm(W2)


def test_quasi_periodicity(fq):
    U1, U3 = rs.unitary_U(1, fq.basis), rs.unitary_U(3, fq.basis)
    assert max(qf.entry_quasi_periodicity(fq, U1, U3, 0.1).values()) < 1e-9
    assert qf.similarity_cancels(fq, 0.1) < 1e-10
    assert qf.similarity_period(fq.params, fq.r0) < 1e-10
