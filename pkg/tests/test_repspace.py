import numpy as np
import pytest

from vertexq import repspace as rs
from vertexq.lattice import PAULI, pauli_identification
from vertexq.params import ConfigError, ModelParams


@pytest.fixture(scope="module", params=[(0.5, 2, 5), (1.0, 2, 4), (1.5, 2, 5)], ids=["l=1/2", "l=1", "l=3/2"])
def basis(request):
    l, N, r = request.param
    return rs.build_basis(ModelParams(N=N, l=l, r=r))


def test_basis_is_orthonormal_and_complete(basis):
    assert basis.dim == basis.params.two_l + 1
    assert np.linalg.norm(basis.gram - np.eye(basis.dim)) < 1e-10
    assert np.all(np.linalg.eigvalsh(basis.gram_raw) > 0)


def test_trapezoid_and_midpoint_grams_agree(basis):
    g_mid = rs.gram_matrix(basis, basis.quad_n, "midpoint")
    assert np.linalg.norm(g_mid - basis.gram) < 1e-9


def test_generators_satisfy_quadratic_relations(basis):
    S = rs.generators(basis)
    res = rs.commutation_residuals(S, basis.engine, basis.params.eta, 0.21 + 0.07j)
    assert max(res.values()) < 1e-9


def test_generators_self_adjoint(basis):
    for S in rs.generators(basis):
        assert np.linalg.norm(S - S.conj().T) < 1e-8 * np.linalg.norm(S)


def test_unitaries(basis):
    U = {a: rs.unitary_U(a, basis) for a in (1, 2, 3)}
    res = rs.unitary_algebra_residuals(U, basis.gram, basis.params.two_l)
    assert max(res.values()) < 1e-8
    assert rs.intertwining_residual(rs.generators(basis), U) < 1e-9


def test_generator_maps_into_space(basis):
    z = np.array([0.11 + 0.2j, -0.3 + 0.05j, 0.4 - 0.1j])
    for S in rs.generators(basis):
        for k in range(basis.dim):
            assert rs.membership_residual(basis, S[:, k], z) < 1e-9


def test_closed_form_shift_products(basis):
    p, e = basis.params, basis.engine
    rng = np.random.default_rng(3)
    for _ in range(4):
        a, c = rng.uniform(-0.4, 0.4, 2) + 1j * rng.uniform(-0.1, 0.1, 2)
        closed = rs.shift_product_form_closed(a, c, p, e)
        direct = rs.sklyanin_form(basis.shift_product(a), basis.shift_product(c), basis)
        assert abs(closed - direct) < 1e-9 * abs(direct)


def test_form_is_antilinear_in_first_argument(basis):
    rng = np.random.default_rng(4)
    f = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    g = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    c = 0.3 - 1.1j
    assert abs(basis.inner(c * f, g) - np.conj(c) * basis.inner(f, g)) < 1e-12 * abs(basis.inner(f, g))
    assert abs(rs.sklyanin_form(f, g, basis) - basis.inner(f, g)) < 1e-9 * abs(basis.inner(f, g))


def test_spin_half_is_pauli():
    b = rs.build_basis(ModelParams(N=2, l=0.5, r=5))
    P = pauli_identification(b)
    c = b.engine.bracket(2 * b.params.eta)
    for a, S in enumerate(rs.generators(b)):
        assert np.linalg.norm(np.linalg.inv(P) @ S @ P - c * PAULI[a]) < 1e-10


def test_pauli_identification_only_for_spin_half():
    b = rs.build_basis(ModelParams(N=2, l=1, r=4))
    with pytest.raises(ValueError):
        pauli_identification(b)


@pytest.mark.parametrize("kw,constraint", [
    ({"N": 3, "l": 0.5, "r": 5}, "Nl in Z"),
    ({"N": 2, "l": 0.3, "r": 5}, "2l in Z>0"),
    ({"N": 2, "l": 1, "r": 4, "r_prime": 2}, "gcd(r,r')=1"),
    ({"N": 2, "l": 1, "r": 2}, "eta range"),
    ({"N": 2, "l": 1, "r": 4, "tau": 0.1 + 1j}, "tau in iR>0"),
])
def test_invalid_parameters_name_the_constraint(kw, constraint):
    with pytest.raises(ConfigError) as exc:
        ModelParams(**kw)
    assert exc.value.constraint == constraint
