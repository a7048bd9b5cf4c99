import math

import numpy as np
import pytest
from scipy.integrate import quad

from zerosum import arithmetic as ar
from zerosum import interpolation as ip
from zerosum import testfn


@pytest.mark.parametrize("label", ["3.2", "4.3", "5.2", "5.3", "7.3", "7.2"])
def test_phi_chi_interpolates_and_is_bounded(label):
    chi = ar.character_from_label(label)
    phi = ip.phi_chi(chi)
    assert phi.integer_error(200) < 1e-12
    grid = np.linspace(0.01, 50, 5001)
    assert phi.growth_holds(grid)
    # large arguments keep the phase: reduction mod q
    assert abs(phi(np.array([1e9 + 1]))[0] - chi(10 ** 9 + 1)) < 1e-9


def test_phi_chi_rejects_imprimitive():
    with pytest.raises(ValueError):
        ip.phi_chi(ar.character_from_label("8.7"))


def test_interval_kernel():
    d = np.array([0.0, 1.0, -3.0, 1e-8, 0.37])
    k = ip.interval_kernel(d, 0.0)
    assert abs(k[0] - 1) < 1e-15 and abs(k[1]) < 1e-15 and abs(k[2]) < 1e-15
    assert abs(k[3] - 1) < 1e-7
    want = complex(quad(lambda X: math.cos(2 * math.pi * 0.37 * X), 0, 1)[0],
                   quad(lambda X: math.sin(2 * math.pi * 0.37 * X), 0, 1)[0])
    assert abs(k[4] - want) < 1e-13


def test_fourier_interp_tau():
    a = ar.ramanujan_tau(2000)
    A = ip.fourier_interp(ar.shifted_coefficients(a, 12), 0.5)
    assert A.integer_error(60) < 1e-9
    with pytest.raises(ip.TailError):
        ip.fourier_interp(a, 0.01)


def test_fourier_interp_short_stream_raises():
    a = ar.ramanujan_tau(30)
    with pytest.raises(ip.TailError, match="increase y"):
        ip.fourier_interp(a, 0.1)(np.array([25.0]))


def test_fourier_interp_u_integers():
    chi = ar.character_from_label("5.2")
    A = ip.fourier_interp_u(ar.character_stream(chi), -0.5)
    assert A.integer_error(50) < 1e-9


def test_phi_delta_integers_and_growth():
    phi = ip.phi_delta(4000)
    assert phi.integer_error(100) < 1e-10
    assert abs(phi(np.array([1.0]))[0] - 1) < 1e-12
    grid = np.geomspace(0.01, 300, 400)
    assert phi.growth_ratio(grid) < 1.1
    assert phi.growth_holds(grid)


def test_phi_delta_matches_defining_integral():
    u = 1.7
    tau = np.array(ar.tau_values(200), dtype=float)
    n = np.arange(1, 201)

    def integrand(X, part):
        z = X + 1j / u
        f = np.sum(tau * np.exp(2j * math.pi * n * z))
        v = f * np.exp(-2j * math.pi * u * z) * u ** -5.5
        return v.real if part == 0 else v.imag

    want = complex(quad(integrand, 1, 2, args=(0,), limit=200, epsabs=1e-13)[0],
                   quad(integrand, 1, 2, args=(1,), limit=200, epsabs=1e-13)[0])
    got = ip.phi_delta(4000)(np.array([u]))[0]
    assert abs(got - want) < 1e-9


def test_product_and_constant():
    chi = ar.character_from_label("4.3")
    prod = ip.product_interp(ip.phi_chi(chi), ip.phi_chi(chi))
    n = np.arange(1, 21)
    assert np.max(np.abs(prod(n) - np.array([chi(k) ** 2 for k in n]))) < 1e-12
    assert ip.constant_one().integer_error(10) == 0


@pytest.mark.parametrize("x", [0.05, 0.01])
def test_oscillation_integral_routes_agree(x):
    chi = ar.character_from_label("4.3")
    direct, parts = ip.oscillation_integral(chi, testfn.bump(2.5, 1), x)
    assert abs(direct - parts) < 1e-10
