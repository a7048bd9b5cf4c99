import math

import numpy as np
import pytest
import sympy

from zerosum import arithmetic as ar
from zerosum import euler
from zerosum import interpolation as ip
from zerosum import lfunctions as lf
from zerosum import relations as rel
from zerosum import testfn


@pytest.fixture(scope="module")
def h():
    return testfn.bump(2.5, 1)


def test_fit_order_recovers_power():
    x = np.array([0.1, 0.01, 0.001])
    assert rel.fit_order(x, 3 * x ** -0.4) == pytest.approx(0.4)
    assert rel.fit_order(x, 2 * x) == pytest.approx(-1.0)


def test_grid_validation():
    with pytest.raises(ValueError):
        rel.check_grid([0.01, 0.1])
    with pytest.raises(ValueError):
        rel.check_grid([0.1, -0.1])


def test_prime_weighted_sum_matches_brute_force(h):
    x = 0.01
    want = sum(float(sympy.log(p)) * float(h(np.array([x * p ** k]))[0])
               for k in (1, 2, 3, 4, 5, 6, 7, 8)
               for p in sympy.primerange(2, 400) if h.a < x * p ** k < h.b)
    got = rel.prime_weighted_sum(lf.zeta_function(), h, x)
    assert abs(got - want) < 1e-10


def test_report_serialisation():
    r = rel.RelationReport("demo", [0.1, 0.01], [1 + 1j, 2], [1, 2], [1e-3, 2e-3], 0.5, 0.3, True)
    assert r.status == "PASS"
    assert r.to_csv().splitlines()[0] == "x,lhs_re,lhs_im,rhs_re,rhs_im,residual"
    assert r.to_json()["rows"][0]["lhs_im"] == 1.0
    s = rel.skipped("thm6", "no zeros")
    assert s.status == "SKIPPED" and not s.passed


def test_prime_square_split_is_exact(h):
    spec = euler.delta_spec(4000)
    for x in (1e-2, 1e-3):
        assert rel.prime_square_split(spec, h, x)["residual"] < 1e-10


def test_j_term_asymptotic_for_delta(h):
    x = 1e-3
    a = rel.j_term_asymptotic(h, x, -1.0, 1.0)
    # -int h(x u^2) du = -(1/2) x^{-1/2} h^(1/2)
    assert a == pytest.approx(-0.5 * h.mellin(0.5).value.real / math.sqrt(x), rel=1e-9)


def test_tensor_splits_delta(h):
    spec = euler.delta_spec(4000)
    d = rel.tensor_decompositions(spec, spec, h, 1e-2)
    assert d["pass"]
    assert max(d["split_12"], d["split_21"], d["lambda_p2"]) < 1e-12


def test_tensor_splits_detect_wrong_local_factor(h):
    spec = euler.delta_spec(4000)
    f = spec.factor(17)
    wrong = euler.LocalFactor.from_roots(17, np.concatenate([f.roots, f.roots]))
    d = rel.tensor_decompositions(spec, spec, h, 1e-2, overrides={17: wrong})
    assert not d["pass"]


def test_symmetry_rejects_mismatched_interpolants(h, store):
    chi = ar.character_from_label("4.3")
    other = ip.phi_chi(ar.character_from_label("5.2"))
    with pytest.raises(ValueError, match="disagree"):
        rel.symmetry_experiment(ip.phi_chi(chi), other, h, [0.1], store)


def test_character_relation_wrong_character_diverges(h, store):
    # zeros of L(s, chi_4) against zeta weighted by the 5.2 interpolant
    Lchi = lf.from_label("4.3")
    wrong = ip.phi_chi(ar.character_from_label("5.2"))
    rep = rel.theorem1_compare(Lchi, wrong, h, [0.1, 0.05, 0.02], store)
    assert not rep.passed
    assert rep.residual[-1] > rep.residual[0]


def test_character_relation_trivial_character_is_exact(h, store):
    rep = rel.theorem1_compare(lf.zeta_function(), ip.constant_one(), h, [0.1, 0.05], store)
    assert max(rep.residual) < 1e-9


def test_delta_relation_without_zeros_skips_zero_side(h, store):
    spec = euler.delta_spec(4000)
    rep = rel.theorem2_compare(spec, lf.delta_function(200), ip.phi_delta(4000), h,
                               [1e-2, 1e-3], store, A=-1.0, mu=1.0)
    assert rep.extra["zero_side"] == "SKIPPED"
    assert rep.extra["split_residual"] < 1e-10
