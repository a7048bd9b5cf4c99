import math

import numpy as np
import pytest
from scipy.integrate import quad

from zerosum import testfn


def trapezoid_mellin(h, s, n=400001):
    # dense oracle: smooth compact integrand, trapezoid in log u is spectrally accurate
    v = np.linspace(math.log(h.a), math.log(h.b), n)
    g = h(np.exp(v)) * np.exp(s * v)
    return np.trapezoid(g, v)


@pytest.mark.parametrize("s", [0.5, 0.5 + 30j, 0.5 - 120j, 1.0, -2.0, 2 + 5j])
def test_mellin_matches_dense_oracle(s):
    h = testfn.bump(2.5, 1)
    m = h.mellin(s, 1e-12)
    assert abs(m.value - trapezoid_mellin(h, s)) < 1e-11
    assert m.err < 1e-10


def test_bump_derivatives_match_finite_differences():
    h = testfn.bump(2.5, 1)
    u = np.array([1.8, 2.2, 3.1])
    eps = 1e-5
    fd = (h(u + eps) - h(u - eps)) / (2 * eps)
    assert np.allclose(h.deriv(1, u), fd, atol=1e-8)
    fd2 = (h.deriv(1, u + eps) - h.deriv(1, u - eps)) / (2 * eps)
    assert np.allclose(h.deriv(2, u), fd2, atol=1e-7)


def test_bump_rejects_bad_support():
    with pytest.raises(ValueError):
        testfn.bump(1.0, 1.5)


def test_involution_and_scaling():
    h = testfn.bump(2.5, 1)
    hs = h.involution()
    assert hs.support == pytest.approx((1 / 3.5, 1 / 1.5))
    # h*^(s) = h^(1 - s)
    s = 0.3 + 7j
    assert abs(hs.mellin(s).value - h.mellin(1 - s).value) < 1e-10
    x = 0.01
    g = h.scaled(x)
    assert abs(g.mellin(s).value - x ** (-s) * h.mellin(s).value) < 1e-9


def test_twist_is_identity_for_real_mu():
    h = testfn.bump(2.5, 1)
    assert h.twisted(0.5, 0.25) is h
    t = h.twisted(1.0, 0.5 + 3j)
    u = np.array([2.0])
    assert abs(t(u)[0] - h(u)[0] * 2.0 ** (-3j)) < 1e-14


def test_j_integral_closed_form():
    h = testfn.bump(2.5, 1)
    x = 1e-3
    for mu in (1.0, 0.5, 2.0):
        direct, _ = quad(lambda u: h(np.array([x * u * u]))[0] * u ** (mu - 1),
                         math.sqrt(h.a / x), math.sqrt(h.b / x), epsabs=1e-13, limit=200)
        assert testfn.j_integral(h, x, mu) == pytest.approx(direct, rel=1e-9)


def test_antisymmetrized_kills_half():
    h = testfn.antisymmetrized(testfn.bump(2.5, 1), 0.5)
    assert abs(h.mellin(0.5, 1e-13).value) < 1e-12


def test_gevrey_bump_decays_faster():
    plain = testfn.bump(3.5, 2.4)
    sharp = testfn.bump(3.5, 2.4, 2)
    t = np.array([200.0, 300.0])
    ratio = testfn.decay_profile(sharp, 0.5, t) / testfn.decay_profile(plain, 0.5, t)
    assert ratio[0] < 0.1 and ratio[1] < ratio[0]
