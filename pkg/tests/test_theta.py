import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vertexq import _kernels
from vertexq.theta import ThetaDomainError, ThetaEngine, ThetaParams

TAUS = [1j, 0.8j, 1.7j]
# Mumford characteristics against Jacobi's theta_1..4 at v = pi z, nome q = exp(i pi tau)
JACOBI = {(0, 0): (3, 1), (0, 1): (4, 1), (1, 0): (2, 1), (1, 1): (1, -1)}


@pytest.mark.parametrize("tau", TAUS)
@pytest.mark.parametrize("ab", sorted(JACOBI))
def test_theta_matches_mpmath(tau, ab):
    e = ThetaEngine(ThetaParams(tau))
    q = mp.exp(1j * mp.pi * tau)
    n, sign = JACOBI[ab]
    for z in (0.0, 0.23 + 0.11j, -0.41 - 0.3j, 0.77 + 0.6j):
        want = sign * complex(mp.jtheta(n, mp.pi * z, q))
        assert abs(e.theta(*ab, z) - want) < 1e-13 * max(1.0, abs(want))


zs = st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(z=zs)
def test_bracket_quasi_periodicity(z):
    e = ThetaEngine(ThetaParams(1j))
    lhs = e.bracket(z + 1j)
    rhs = -np.exp(-1j * np.pi * (1j + 2 * z)) * e.bracket(z)
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1.0)
    assert abs(e.bracket(z + 1) + e.bracket(z)) <= 1e-12 * max(abs(e.bracket(z)), 1.0)
    assert abs(e.bracket(-z) + e.bracket(z)) <= 1e-12 * max(abs(e.bracket(z)), 1.0)


@settings(max_examples=40, deadline=None)
@given(z=zs, two_l=st.integers(1, 3))
def test_G_and_pow2l_even_and_periodic(z, two_l):
    e = ThetaEngine(ThetaParams(1j))
    eta = 1 / (2 * two_l * 5)
    for f in (e.cap_G, e.theta_pow2l):
        v = f(z, two_l, eta)
        s = max(abs(v), 1.0)
        assert abs(f(-z, two_l, eta) - v) < 1e-12 * s
        assert abs(f(z + 1, two_l, eta) - v) < 1e-12 * s


def test_doubled_truncation_is_stable():
    e, e2 = ThetaEngine(ThetaParams(1j, 30)), ThetaEngine(ThetaParams(1j, 60))
    z = np.linspace(-1, 1, 41) + 0.7j
    for a in (0, 1):
        for b in (0, 1):
            assert np.max(np.abs(e.theta(a, b, z) - e2.theta(a, b, z))) < 1e-13


def test_numba_and_numpy_series_agree():
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    rng = np.random.default_rng(1)
    z = rng.normal(size=200) + 1j * rng.normal(size=200)
    k = np.arange(-30, 31) + 0.5
    a = _kernels.theta_series_numpy(z, k, 1.3j, 0.5)
    b = _kernels.theta_series_numba(z, k, 1.3j, 0.5)
    assert np.max(np.abs(a - b)) < 1e-12 * np.max(np.abs(a))


def test_domain_errors():
    e = ThetaEngine(ThetaParams(1j))
    with pytest.raises(ThetaDomainError):
        e.theta(0, 0, 10j)
    with pytest.raises(ValueError):
        ThetaParams(1 + 1j)
    with pytest.raises(ValueError):
        e.theta(2, 0, 0.1)


def test_bracket_runs():
    e = ThetaEngine(ThetaParams(1j))
    z, eta = 0.17 + 0.05j, 0.1
    assert e.bracket_run(z, 0, eta) == 1
    assert abs(e.bracket_run(z, 3, eta) - e.bracket(z) * e.bracket(z + 2 * eta) * e.bracket(z + 4 * eta)) < 1e-15
    with pytest.raises(ValueError):
        e.bracket_run(z, -1, eta)


def test_numpy_fallback_selected_by_environment():
    import os
    import subprocess
    import sys

    code = ("from vertexq import _kernels; from vertexq.theta import ThetaEngine, ThetaParams; "
            "print(_kernels.backend(), repr(ThetaEngine(ThetaParams(1j)).bracket(0.3 + 0.1j)))")
    env = {**os.environ, "VERTEXQ_NUMBA": "0"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    name, value = out.stdout.split(maxsplit=1)
    assert name == "numpy"
    here = ThetaEngine(ThetaParams(1j)).bracket(0.3 + 0.1j)
    assert abs(complex(eval(value)) - here) < 1e-14
