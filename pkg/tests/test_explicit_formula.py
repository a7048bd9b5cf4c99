import dataclasses

import numpy as np
import pytest

from zerosum import arithmetic as ar
from zerosum import euler
from zerosum import explicit_formula as ef
from zerosum import lfunctions as lf
from zerosum import testfn
from zerosum.interpolation import phi_chi


@pytest.fixture(scope="module")
def h():
    return testfn.bump(2.5, 1)


@pytest.mark.parametrize("label", ["zeta", "4.3", "5.2"])
def test_formula_balances(label, h, store):
    rep = ef.verify(lf.from_label(label), h, store, tolerance=1e-6, T=500)
    assert rep.passed
    assert rep.discrepancy <= rep.budget + ef.ROUNDING
    assert rep.fe_residual < 1e-10
    assert rep.to_json()["pass"] is True


def test_unreachable_tolerance_fails(h, store):
    rep = ef.verify(lf.from_label("4.3"), h, store, tolerance=1e-15, T=500)
    assert not rep.passed


def test_wrong_root_number_is_caught(h, store):
    chi = ar.character_from_label("5.2")
    bad = lf.dirichlet_function(chi, omega=-lf.root_number(chi))
    rep = ef.verify(bad, h, store, T=500)
    assert rep.fe_residual > 1e-2 and not rep.passed


def test_wrong_coefficients_are_caught(h, store):
    # zeros of L(s, chi_4) against the primes of L(s, chi_5.2): must not balance
    Lf = lf.from_label("4.3")
    other = lf.from_label("5.2")
    bad = dataclasses.replace(Lf, lam=other.lam, spec=other.spec)
    rep = ef.verify(bad, h, store, T=500)
    assert rep.discrepancy > 1e-2 and not rep.passed


def test_missing_zeros_raise(h):
    with pytest.raises(ef.MissingZeroData):
        ef.verify(lf.delta_function(500), h, T=100)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_local_formula_zeta(p):
    h = testfn.bump(0.9, 0.6)
    spec = euler.zeta_spec()
    lattice, tail, err = ef.local_zero_sum(spec, h, p, 200)
    other = ef.local_W(spec, h, p) + ef.local_correction(spec, h, p)
    assert abs(lattice - other) < 1e-10 + tail + err


@pytest.mark.parametrize("p", [2, 3])
def test_local_formula_delta(p):
    h = testfn.bump(2.5, 1.2)
    spec = euler.delta_spec(50)
    lattice, tail, err = ef.local_zero_sum(spec, h, p, 200)
    other = ef.local_W(spec, h, p) + ef.local_correction(spec, h, p)
    assert abs(lattice - other) < 1e-9 + tail + err


def test_gamma_lattice_matches_archimedean_term(h):
    g = lf.zeta_function().gamma
    val, tail = ef.gamma_local_sum(g, h)
    w, err = lf.archimedean_W(0.5, 0.0, h)
    assert abs(val - w) < 1e-10 + tail + err


def test_identity_with_rank_one_interpolation(store):
    chi = ar.character_from_label("4.3")
    phi = phi_chi(chi)
    rep = ef.theorem7_identity(lf.dirichlet_function(chi), phi, testfn.bump(3.5, 2.4, 2),
                               store, T=300, omega_rate=phi.oscillation)
    assert rep.passed
    assert rep.discrepancies[0] < 1e-5


def test_identity_needs_tensor_zeros(store):
    chi = ar.character_from_label("4.3")
    with pytest.raises(ef.MissingZeroData):
        ef.theorem8_identity(lf.rankin_selberg_delta(500), lf.dirichlet_function(chi),
                             phi_chi(chi), phi_chi(chi), testfn.bump(2.5, 1), store)


@pytest.mark.parametrize("label", ["zeta", "4.3"])
def test_constant_term_with_support_through_one(label, store):
    # bump(2.5, 1) vanishes at u = 1; this one does not, so the h(1) coefficient matters
    g = testfn.bump(1.0, 0.7)
    Lf = lf.from_label(label)
    rep = ef.verify(Lf, g, store, tolerance=1e-6, T=500)
    assert rep.passed
    flipped = 2 * abs(ef.constant_term(Lf.gamma) * g.at(1.0))
    assert flipped > 1e3 * rep.discrepancy
