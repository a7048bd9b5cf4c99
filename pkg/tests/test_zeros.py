import mpmath
import numpy as np
import pytest

from zerosum import arithmetic as ar
from zerosum import lfunctions as lf
from zerosum import zeros as zz


def test_zeta_zeros_to_100_match_reference(zeta_reference):
    recs = zz.find_zeros_zeta(100)
    g = np.array([r.gamma for r in recs])
    assert g.size == 29
    assert np.max(np.abs(g - zeta_reference[:29])) < 1e-6


def test_argument_principle_counts():
    assert zz.count_by_argument_principle(lf.zeta_function(), 100) == 29
    assert zz.count_by_argument_principle(lf.zeta_function(), 10) == 0
    # complex character: positive and negative halves counted separately
    chi = ar.character_from_label("5.2")
    pos = zz.count_by_argument_principle(lf.dirichlet_function(chi), 50)
    neg = zz.count_by_argument_principle(lf.dirichlet_function(chi.conj()), 50)
    assert pos + neg == len(zz.find_zeros_dirichlet(chi, 50))


def test_dirichlet_zeros_are_zeros():
    chi = ar.character_from_label("4.3")
    recs = zz.find_zeros_dirichlet(chi, 40)
    table = [chi(a) for a in range(4)]
    for r in recs:
        assert abs(complex(mpmath.dirichlet(r.rho, table))) < 1e-8


def test_complex_character_zeros_are_asymmetric():
    chi = ar.character_from_label("5.2")
    g = np.array([r.gamma for r in zz.find_zeros_dirichlet(chi, 30)])
    assert np.any(g < 0) and np.any(g > 0)
    assert abs(np.min(-g[g < 0]) - np.min(g[g > 0])) > 0.1


def test_store_roundtrip_and_dedup(tmp_path, zeta_reference):
    s = zz.ZeroStore()
    s.add("zeta", zeta_reference[:10])
    assert s.add("zeta", zeta_reference[5:12] + 1e-12) == 12
    s.complete["zeta"] = 50.0
    s.save(tmp_path)
    t = zz.ZeroStore.load(tmp_path)
    assert t.count("zeta") == 12
    assert t.complete["zeta"] == 50.0
    assert np.max(np.abs(t.ordinates["zeta"] - s.ordinates["zeta"])) < 1e-11
    assert len(t.query("zeta", 14, 26)) == 3
    with pytest.raises(zz.ZeroCountError):
        t.rhos("zeta", 60.0)
    r = t.rhos("zeta", 30.0)
    assert r.size == 6 and np.all(r.real == 0.5)


def test_zero_file_errors(tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("# label: zeta\n14.1347\nabc\n")
    with pytest.raises(ValueError, match=":3:"):
        zz.parse_zero_file(p)
    p.write_text("21.0\n14.0\n")
    with pytest.raises(ValueError, match="not increasing"):
        zz.parse_zero_file(p)
    p.write_text("14.0\n")
    with pytest.raises(ValueError, match="no label"):
        zz.ingest(zz.ZeroStore(), p)
    p.write_text("# label: Delta\n9.22237939992110\n")
    s = zz.ZeroStore()
    assert zz.ingest(s, p) == 1
    assert s.sources["Delta"][0] == "ingested"


def test_budget_guards():
    with pytest.raises(ValueError):
        zz.find_zeros_zeta(2e5)
    with pytest.raises(ValueError):
        zz.find_zeros_dirichlet(ar.character_from_label("8.7"), 10)
