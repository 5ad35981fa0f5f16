import numpy as np
import pytest

from vertexq import qbaxter as qb
from vertexq import qfabricius as qf
from vertexq import qverify as qv
from vertexq import repspace as rs
from vertexq.lattice import Lattice
from vertexq.params import ModelParams


def test_report_pass_rule_and_finiteness():
    r = qv.Report("x", "a = b", 0.5, 1.0)
    assert r.passed and r.as_dict()["pass"] is True
    assert not qv.Report("x", "a = b", 1.0, 1.0).passed
    nan = qv.Report("x", "a = b", float("nan"), 1.0)
    assert np.isfinite(nan.residual) and not nan.passed


def test_h_conjugation():
    p = ModelParams(N=3, l=1, r=4)
    assert qv.h_conjugation_residual(p, 0.13 + 0.07j) < 1e-13


@pytest.fixture(scope="module")
def spin_half():
    return Lattice(rs.build_basis(ModelParams(N=2, l=0.5, r=5)))


@pytest.mark.parametrize("method", ["baxter", "fabricius"])
def test_normalised_q_on_spin_half(spin_half, method):
    """Spin-1/2 on two sites: Q_R(u0) is invertible and the full chain of identities holds."""
    lat = spin_half
    builder = qb.BaxterQ(lat) if method == "baxter" else qf.FabriciusQ(lat)
    Q = qv.q_operator(lat, builder.qr, method)
    assert Q.cond < 1e10
    assert np.linalg.norm(Q(Q.u0) - np.eye(4)) < 1e-12
    grid = (0.13 + 0.02j, 0.29 - 0.03j)
    assert max(qv.q_left_right(Q, u) for u in grid) < 1e-6
    assert max(qv.tq_residual(lat, Q, u) for u in grid) < 1e-6
    assert max(qv.tq_residual(lat, Q, u, "right") for u in grid) < 1e-6
    assert qv.q_commutator(Q, *grid) < 1e-6
    U1, U3 = rs.unitary_U(1, lat.basis), rs.unitary_U(3, lat.basis)
    assert max(qv.quasi_periodicity_q(Q, U1, U3, 0.1).values()) < 1e-6
    res, count = qv.eigen_tq(Q, 0.19 + 0.01j, lat.params.seed)
    assert count >= 1 and res < 1e-5
    assert qv.adjoint_consistency(lat, builder.qr, 0.17, 1) < 1e-9


def test_degenerate_q_is_detected():
    lat = Lattice(rs.build_basis(ModelParams(N=3, l=1, r=4)))
    with pytest.raises(qv.DegenerateQ) as exc:
        qv.q_operator(lat, qb.BaxterQ(lat).qr, "baxter")
    assert len(exc.value.singular) == 8
    assert all(rank < n for _, rank, n in exc.value.singular.values())


def test_u0_candidates_are_seeded():
    p = ModelParams(N=2, l=0.5, r=5)
    a, b = qv.u0_candidates(p), qv.u0_candidates(p)
    assert a == b and len(a) == 8 and all(0.05 < x < 0.45 for x in a)
    assert qv.u0_candidates(ModelParams(N=2, l=0.5, r=5, u0=0.2)) == [0.2]
