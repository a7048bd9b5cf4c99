import math

import numpy as np
import pytest
import sympy

from zerosum import arithmetic as ar


def test_primes_match_sympy():
    assert list(ar.primes_upto(2000)) == list(sympy.primerange(2, 2001))


def test_von_mangoldt_and_prime_powers():
    assert ar.von_mangoldt(1) == 0
    assert ar.von_mangoldt(12) == 0
    assert ar.von_mangoldt(27) == pytest.approx(math.log(3))
    n, p, m = ar.prime_powers_between(150, 250)
    want = [k for k in range(150, 251) if len(sympy.factorint(k)) == 1]
    assert list(n) == want
    assert all(int(pp) ** int(mm) == int(nn) for nn, pp, mm in zip(n, p, m))


def test_factorize_and_phi():
    assert ar.factorize(360) == {2: 3, 3: 2, 5: 1}
    assert [ar.euler_phi(k) for k in (1, 9, 10, 12)] == [1, 6, 4, 4]


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 12, 15])
def test_character_orthogonality(q):
    chars = ar.characters_mod(q)
    assert len(chars) == ar.euler_phi(q)
    units = [a for a in range(1, q + 1) if math.gcd(a, q) == 1]
    for c1 in chars:
        for c2 in chars:
            s = sum(c1(a) * np.conj(c2(a)) for a in units)
            assert abs(s - (len(units) if c1.index == c2.index else 0)) < 1e-12


def test_known_characters():
    chi = ar.character_from_label("4.3")
    assert chi.primitive and chi.parity == 1 and chi.is_real
    assert [chi(n) for n in range(1, 6)] == [1, 0, -1, 0, 1]
    assert not ar.character_from_label("8.7").primitive
    assert ar.character_from_label("5.4").parity == 0
    assert ar.character_from_label("5.2").parity == 1
    with pytest.raises(ValueError):
        ar.character_from_label("4.2")
    with pytest.raises(ValueError):
        ar.character_from_label("nonsense")


@pytest.mark.parametrize("label", ["3.2", "4.3", "5.2", "5.3", "5.4", "7.3", "7.2"])
def test_gauss_sum_modulus(label):
    chi = ar.character_from_label(label)
    assert abs(abs(ar.gauss_sum(chi)) - math.sqrt(chi.modulus)) < 1e-12


def test_gauss_sum_quadratic():
    assert abs(ar.gauss_sum(ar.character_from_label("3.2")) - 1j * math.sqrt(3)) < 1e-12


def test_tau_small_values_and_congruence():
    tau = ar.tau_values(400)
    assert tau[:5] == (1, -24, 252, -1472, 4830)
    # Ramanujan's congruence tau(n) = sigma_11(n) mod 691 as an independent check
    for n in range(1, 401):
        assert (tau[n - 1] - sympy.divisor_sigma(n, 11)) % 691 == 0
    # multiplicativity and the Hecke relation at p^2
    assert tau[2 * 3 - 1] == tau[1] * tau[2]
    assert tau[4 - 1] == tau[1] ** 2 - 2 ** 11


def test_tau_stream_length_and_checked_conversion():
    s = ar.ramanujan_tau(10)
    with pytest.raises(IndexError):
        s(11)
    with pytest.raises(OverflowError):
        ar.to_float_checked(10 ** 400)
    with pytest.raises(OverflowError):
        ar.to_int64_checked([2 ** 63])


def test_shifted_stream_is_bounded():
    s = ar.shifted_coefficients(ar.ramanujan_tau(2000), 12)
    v = np.abs(s.values(2000))
    n = np.arange(1, 2001)
    # Deligne: |tau(n)| n^{-11/2} <= d(n)
    d = np.array([sympy.divisor_count(int(k)) for k in n])
    assert np.all(v <= d + 1e-9)


def test_coefficient_file(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("# demo\n1,1,0\n2,0.5,-0.5\n")
    s = ar.load_coefficient_file(p)
    assert s(2) == complex(0.5, -0.5)
    bad = tmp_path / "bad.txt"
    bad.write_text("1,1\n")
    with pytest.raises(ValueError):
        ar.load_coefficient_file(bad)
