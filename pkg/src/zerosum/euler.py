"""Euler-factor algebra.

A local factor at p is the polynomial P_p(X) = 1 - c_1 X - ... - c_n X^n,
with 1/P_p(p^{-s}) the Euler factor.  Dirichlet coefficients phi(p^m) are the
series coefficients of 1/P_p(X); r_m(p) are those of X d/dX log(1/P_p(X)).
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .arithmetic import (DirichletCharacter, factorize, prime_power, primes_upto, tau_values,
                         to_float_checked)

ROOT_TOL = 1e-12


def _csum(values):
    values = np.asarray(values, dtype=complex)
    return complex(math.fsum(values.real), math.fsum(values.imag))


def coeffs_from_roots(roots):
    """c_1..c_n of prod(1 - alpha X) = 1 - sum c_l X^l."""
    poly = np.array([1.0 + 0j])
    for a in roots:
        poly = np.convolve(poly, [1.0, -a])
    return tuple(-poly[1:])


def roots_from_coeffs(c):
    """Roots alpha_i with 1 - sum c_l X^l = prod(1 - alpha_i X), via the companion matrix."""
    c = np.asarray(c, dtype=complex)
    while c.size and c[-1] == 0:
        c = c[:-1]
    if c.size == 0:
        return ()
    roots = np.roots(np.concatenate([[1.0], -c]))
    # one Newton polish step on the monic reversed polynomial
    mono = np.concatenate([[1.0], -c])
    d = np.polyder(mono)
    for _ in range(2):
        roots = roots - np.polyval(mono, roots) / np.where(np.polyval(d, roots) == 0, 1,
                                                           np.polyval(d, roots))
    return tuple(roots)


@dataclass(frozen=True)
class LocalFactor:
    p: int
    c: tuple
    roots: tuple | None = None

    def __post_init__(self):
        if self.roots is not None:
            expanded = coeffs_from_roots(self.roots)
            n = max(len(expanded), len(self.c))
            a = np.zeros(n, dtype=complex)
            b = np.zeros(n, dtype=complex)
            a[:len(expanded)] = expanded
            b[:len(self.c)] = self.c
            if np.max(np.abs(a - b), initial=0.0) > 1e-10:
                raise ValueError(f"roots and coefficients disagree at p={self.p}")

    @classmethod
    def from_roots(cls, p, roots):
        roots = tuple(complex(r) for r in roots)
        return cls(int(p), coeffs_from_roots(roots), roots)

    @classmethod
    def from_coeffs(cls, p, c, find_roots=True):
        c = tuple(complex(v) for v in c)
        roots = None
        if find_roots:
            roots = roots_from_coeffs(c)
            if len(roots) != len([v for v in c]) - _trailing_zeros(c):
                roots = None
        return cls(int(p), c, roots)

    @property
    def degree(self):
        return len(self.c) - _trailing_zeros(self.c)


def _trailing_zeros(c):
    k = 0
    for v in reversed(c):
        if v != 0:
            break
        k += 1
    return k


def dirichlet_from_local(f, m_max):
    """phi(p^0..p^m_max) from the recurrence phi(p^m) = sum_l c_l phi(p^{m-l})."""
    phi = [1.0 + 0j]
    c = f.c
    for m in range(1, m_max + 1):
        terms = [c[l - 1] * phi[m - l] for l in range(1, min(m, len(c)) + 1)]
        phi.append(_csum(terms) if terms else 0j)
    return np.array(phi, dtype=complex)


def _inverse_series_coeffs(phi, j):
    """c_1..c_j with P = 1/(sum phi(p^k) X^k), using the composition expansion
    c_j = sum_l (-1)^{l+1} [X^j] F^l with F = sum_{k>=1} phi(p^k) X^k."""
    F = np.zeros(j + 1, dtype=complex)
    F[1:] = phi[1:j + 1]
    power = F.copy()
    acc = [[] for _ in range(j + 1)]
    for l in range(1, j + 1):
        for k in range(1, j + 1):
            acc[k].append((-1) ** (l + 1) * power[k])
        power = np.convolve(power, F)[:j + 1]
    return [_csum(acc[k]) for k in range(1, j + 1)]


class RecurrenceError(ValueError):
    def __init__(self, message, residuals):
        super().__init__(message)
        self.residuals = residuals


def local_from_dirichlet(p, phi, n_p, tol=1e-10):
    """Recover c_1..c_{n_p} from phi(p^1..p^j) (phi(1) = 1 implied).

    Values supplied beyond degree n_p must obey the recurrence; otherwise a
    RecurrenceError carries the residuals.
    """
    phi = np.concatenate([[1.0], np.asarray(phi, dtype=complex)])
    j = phi.size - 1
    if j < n_p:
        raise ValueError("need at least n_p coefficients")
    c = _inverse_series_coeffs(phi, j)
    residuals = np.abs(np.array(c[n_p:], dtype=complex)) if j > n_p else np.zeros(0)
    if residuals.size and residuals.max() > tol * max(1.0, np.abs(phi).max()):
        raise RecurrenceError(
            f"phi(p^m) for m > {n_p} violates the degree-{n_p} recurrence "
            f"(max residual {residuals.max():.3g})", residuals)
    return LocalFactor.from_coeffs(p, c[:n_p])


def power_sum_coeffs(f, m_max):
    """r_1..r_{m_max}: r_m = phi(p^m) + sum_{j>=2} (j-1) c_j phi(p^{m-j})."""
    phi = dirichlet_from_local(f, m_max)
    c = f.c
    out = []
    for m in range(1, m_max + 1):
        terms = [phi[m]] + [(j - 1) * c[j - 1] * phi[m - j] for j in range(2, min(m, len(c)) + 1)]
        out.append(_csum(terms))
    return np.array(out, dtype=complex)


def newton_power_sums(roots, m_max):
    roots = np.asarray(roots, dtype=complex)
    return np.array([_csum(roots ** m) for m in range(1, m_max + 1)], dtype=complex)


@dataclass
class EulerProductSpec:
    """Rank-N Euler product given by a per-prime factor constructor.

    ``factor_fn`` may raise KeyError for primes it does not know about.
    ``exceptional`` lists the primes with c_N(p) = 0.
    """

    rank: int
    factor_fn: Callable
    exceptional: frozenset = frozenset()
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def factor(self, p):
        p = int(p)
        if p not in self._cache:
            try:
                self._cache[p] = self.factor_fn(p)
            except KeyError:
                raise KeyError(f"spec {self.label or '?'} has no local factor at p={p}") from None
        return self._cache[p]

    @classmethod
    def from_dict(cls, rank, factors, label=""):
        exc = frozenset(p for p, f in factors.items() if f.degree < rank)
        return cls(rank, lambda p: factors[p], exc, label)


def _power_sum(f, m):
    if f.roots is not None:
        return _csum(np.asarray(f.roots, dtype=complex) ** m)
    return power_sum_coeffs(f, m)[m - 1]


def lambda_phi(spec, n):
    """Lambda_phi(n) = r_m(p) log p for n = p^m, else 0."""
    pm = prime_power(n)
    if pm is None:
        return 0j
    p, m = pm
    return power_sum_coeffs(spec.factor(p), m)[m - 1] * math.log(p)


def omega_phi(spec, n):
    """omega_phi(n) = sum_i alpha(p,i)^m for n = p^m, else 0."""
    pm = prime_power(n)
    if pm is None:
        return 0j
    p, m = pm
    return _power_sum(spec.factor(p), m)


def tensor_local(f, g):
    """Rankin-Selberg local factor: roots are all products alpha_i gamma_j."""
    if f.p != g.p:
        raise ValueError("factors live at different primes")
    if f.roots is None or g.roots is None:
        raise ValueError(f"tensoring at p={f.p} needs root data (or an explicit override)")
    roots = [a * b for a in f.roots for b in g.roots]
    return LocalFactor.from_roots(f.p, roots)


def lambda_tensor(spec_phi, spec_psi, n, overrides=None):
    """Lambda_{phi x psi}(n) = (sum alpha^m)(sum gamma^m) log p off the exceptional set."""
    pm = prime_power(n)
    if pm is None:
        return 0j
    p, m = pm
    bad = spec_phi.exceptional | spec_psi.exceptional
    if p in bad:
        if not overrides or p not in overrides:
            raise ValueError(f"p={p} is exceptional for the pair; supply its local factor")
        return power_sum_coeffs(overrides[p], m)[m - 1] * math.log(p)
    return omega_phi(spec_phi, n) * omega_phi(spec_psi, n) * math.log(p)


# ----------------------------------------------------------- concrete specs

def zeta_spec():
    return EulerProductSpec(1, lambda p: LocalFactor(int(p), (1.0 + 0j,), (1.0 + 0j,)),
                            frozenset(), "zeta")


def character_spec(chi: DirichletCharacter):
    def fn(p):
        v = complex(chi(p))
        if v == 0:
            return LocalFactor(int(p), (), ())
        return LocalFactor(int(p), (v,), (v,))

    bad = frozenset(factorize(chi.modulus)) if chi.modulus > 1 else frozenset()
    return EulerProductSpec(1, fn, bad, f"chi {chi.label}")


def unit_root_pair(a):
    """Roots of 1 - a X + X^2 for real |a| <= 2 (unit circle, conjugate pair)."""
    a = float(a)
    im = math.sqrt(max(0.0, 1.0 - a * a / 4.0))
    return (complex(a / 2, im), complex(a / 2, -im))


@lru_cache(maxsize=4)
def _delta_table(limit):
    tau = tau_values(limit)
    return {int(p): to_float_checked(tau[p - 1]) / float(p) ** 5.5 for p in primes_upto(limit)}


def delta_spec(limit):
    """Level-one weight-12 form Delta, normalised: P_p = 1 - a_p X + X^2,
    a_p = tau(p) p^{-11/2}; factors known for p <= limit."""
    table = _delta_table(int(limit))

    def fn(p):
        a = table[int(p)]
        return LocalFactor(int(p), (complex(a), -1.0 + 0j), unit_root_pair(a))

    return EulerProductSpec(2, fn, frozenset(), "Delta")


def random_unit_spec(rng, rank, primes, max_rank=None):
    """Random spec with unit-circle roots at the given primes (for property checks)."""
    factors = {}
    for p in primes:
        r = rank if max_rank is None else int(rng.integers(1, max_rank + 1))
        theta = rng.uniform(0, 2 * np.pi, r)
        factors[int(p)] = LocalFactor.from_roots(int(p), np.exp(1j * theta))
    return EulerProductSpec.from_dict(rank if max_rank is None else max_rank, factors, "random")
