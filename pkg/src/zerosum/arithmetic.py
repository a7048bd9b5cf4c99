"""Primes, von Mangoldt, Dirichlet characters, Gauss sums and coefficient streams."""

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np


# ---------------------------------------------------------------- primes

def sieve(limit):
    """Boolean primality table for 0..limit (Eratosthenes)."""
    limit = int(limit)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return flags


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray

    @classmethod
    def upto(cls, limit):
        return cls(int(limit), np.flatnonzero(sieve(limit)))

    def __len__(self):
        return len(self.primes)

    def __contains__(self, n):
        i = np.searchsorted(self.primes, n)
        return i < len(self.primes) and self.primes[i] == n

    def between(self, lo, hi):
        """Primes p with lo <= p <= hi."""
        i = np.searchsorted(self.primes, lo, side="left")
        j = np.searchsorted(self.primes, hi, side="right")
        return self.primes[i:j]


@lru_cache(maxsize=8)
def _prime_table(limit):
    return PrimeTable.upto(limit)


def primes_upto(limit):
    """Sorted array of primes <= limit (cached by limit)."""
    return _prime_table(int(limit)).primes


def factorize(n):
    """Prime factorization of n as a dict {p: e} by trial division."""
    n = int(n)
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(n):
    """Return (p, m) if n = p^m with m >= 1, else None."""
    if n < 2:
        return None
    f = factorize(n)
    if len(f) != 1:
        return None
    (p, m), = f.items()
    return p, m


def von_mangoldt(n):
    """log p if n = p^m (m >= 1), else 0."""
    if n < 1:
        raise ValueError("von_mangoldt needs n >= 1")
    pm = prime_power(n)
    return math.log(pm[0]) if pm else 0.0


def prime_powers_upto(limit):
    """All prime powers n = p^m <= limit, as arrays (n, p, m) sorted by n."""
    limit = int(limit)
    ns, ps, ms = [], [], []
    for p in primes_upto(limit):
        p = int(p)
        q, m = p, 1
        while q <= limit:
            ns.append(q), ps.append(p), ms.append(m)
            q *= p
            m += 1
    order = np.argsort(ns, kind="stable")
    return (np.array(ns, dtype=np.int64)[order], np.array(ps, dtype=np.int64)[order],
            np.array(ms, dtype=np.int64)[order])


def prime_powers_between(lo, hi):
    """Prime powers p^m in [lo, hi] as arrays (n, p, m)."""
    n, p, m = prime_powers_upto(max(int(math.floor(hi)), 1))
    keep = n >= lo
    return n[keep], p[keep], m[keep]


def mangoldt_table(limit):
    """Array L with L[n] = Lambda(n) for 0 <= n <= limit."""
    out = np.zeros(int(limit) + 1)
    n, p, _ = prime_powers_upto(limit)
    out[n] = np.log(p)
    return out


def euler_phi(n):
    out = n
    for p in factorize(n):
        out = out // p * (p - 1)
    return out


# ------------------------------------------------------------ characters

def _primitive_root(p):
    """Least primitive root mod p that is also a primitive root mod p^2."""
    phi = p - 1
    fac = list(factorize(phi))
    for g in range(2, p):
        if all(pow(g, phi // f, p) != 1 for f in fac):
            if p == 2 or pow(g, p - 1, p * p) != 1:
                return g
    return 1


def _dlog_table(g, mod, order):
    table = {}
    x = 1
    for k in range(order):
        table[x] = k
        x = x * g % mod
    return table


def _conrey_prime_power(p, e, n):
    """Value table (length p^e) of the Conrey character chi_{p^e}(n, .)."""
    mod = p ** e
    vals = np.zeros(mod, dtype=complex)
    if p == 2:
        if e == 1:
            vals[1] = 1
            return vals
        if e == 2:
            for m in (1, 3):
                vals[m] = -1 if (n % 4 == 3 and m % 4 == 3) else 1
            return vals
        order = 2 ** (e - 2)
        logs = _dlog_table(5, mod, order)

        def split(x):
            eps = 1 if x % 4 == 1 else -1
            return eps, logs[(x * eps) % mod]

        en, an = split(n)
        for m in range(1, mod, 2):
            em, am = split(m)
            phase = ((1 - en) * (1 - em)) / 8 + an * am / order
            vals[m] = cmath.exp(2j * math.pi * phase)
        return vals
    g = _primitive_root(p)
    order = mod - mod // p
    logs = _dlog_table(g, mod, order)
    ln = logs[n % mod]
    for m, lm in logs.items():
        vals[m] = cmath.exp(2j * math.pi * ln * lm / order)
    return vals


def _snap(values):
    v = np.array(values, dtype=complex)
    re, im = v.real.copy(), v.imag.copy()
    for part in (re, im):
        r = np.round(part)
        close = np.abs(part - r) < 1e-14
        part[close] = r[close]
    return re + 1j * im


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character stored as an explicit value table mod q.

    ``index`` is the Conrey index, so the label ``"q.index"`` follows the
    usual convention (``4.3`` is the odd character mod 4).
    """

    modulus: int
    index: int
    values: tuple = field(repr=False)
    primitive: bool = True

    @property
    def label(self):
        return f"{self.modulus}.{self.index}"

    @property
    def table(self):
        return np.array(self.values, dtype=complex)

    def __call__(self, n):
        if np.isscalar(n):
            return self.values[int(n) % self.modulus]
        n = np.asarray(n, dtype=np.int64)
        return self.table[n % self.modulus]

    @property
    def parity(self):
        """0 for even characters, 1 for odd ones."""
        if self.modulus <= 2:
            return 0
        return 0 if abs(self.values[self.modulus - 1] - 1) < 1e-9 else 1

    @property
    def is_principal(self):
        return all(abs(v - 1) < 1e-12 or v == 0 for v in self.values)

    @property
    def is_real(self):
        return all(abs(complex(v).imag) < 1e-12 for v in self.values)

    def conj(self):
        idx = pow(self.index, -1, self.modulus) if self.modulus > 1 else 1
        return DirichletCharacter(self.modulus, idx, tuple(np.conj(self.table)), self.primitive)


def _is_primitive(q, table):
    for p in factorize(q):
        d = q // p
        induced = True
        for n in range(1, q, d):
            if math.gcd(n, q) == 1 and abs(table[n] - 1) > 1e-9:
                induced = False
                break
        if induced:
            return False
    return True


def conrey_character(q, n):
    """The Conrey character chi_q(n, .) as a DirichletCharacter."""
    q, n = int(q), int(n)
    if q < 1 or math.gcd(n, q) != 1:
        raise ValueError(f"no Conrey character {q}.{n}")
    table = np.ones(q, dtype=complex) if q == 1 else np.zeros(q, dtype=complex)
    if q > 1:
        table[:] = 1
        for p, e in factorize(q).items():
            local = _conrey_prime_power(p, e, n % p ** e)
            table = table * local[np.arange(q) % p ** e]
    table = _snap(table)
    return DirichletCharacter(q, n % q if q > 1 else 1, tuple(table), _is_primitive(q, table))


def characters_mod(q):
    """All phi(q) characters mod q, ordered by Conrey index."""
    if q < 1:
        raise ValueError("modulus must be positive")
    if q == 1:
        return [conrey_character(1, 1)]
    return [conrey_character(q, n) for n in range(1, q) if math.gcd(n, q) == 1]


def character_from_label(label):
    """Parse ``"q.n"`` into a character."""
    try:
        q, n = (int(t) for t in str(label).split("."))
    except ValueError:
        raise ValueError(f"bad character label {label!r}") from None
    return conrey_character(q, n)


def gauss_sum(chi):
    """tau(chi) = sum_{a=1}^{q} chi(a) e^{2 pi i a / q}."""
    q = chi.modulus
    a = np.arange(1, q + 1)
    terms = chi(a) * np.exp(2j * np.pi * a / q)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


# ---------------------------------------------------- coefficient streams

@dataclass(frozen=True)
class CoefficientStream:
    """A Dirichlet coefficient sequence n -> a(n) with a declared growth class.

    ``growth`` is the exponent kappa in a(n) = O(n^kappa); zero stands for
    the O(n^eps) class.
    """

    eval: Callable
    growth: float = 0.0
    label: str = ""
    length: int | None = None
    multiplicative: bool = True

    def __call__(self, n):
        if self.length is not None and int(n) > self.length:
            raise IndexError(f"{self.label}: coefficient {n} beyond stored length {self.length}")
        return self.eval(int(n))

    def values(self, N):
        """Array of a(1), ..., a(N)."""
        return np.array([self(n) for n in range(1, N + 1)], dtype=complex)

    def growth_holds(self, N, C=None):
        """Empirical check |a(n)| <= C n^(growth + 0.5) on 1..N; returns the fitted C."""
        n = np.arange(1, N + 1)
        ratio = np.abs(self.values(N)) / n ** (self.growth + 0.5)
        fitted = float(ratio.max())
        return fitted if C is None else fitted <= C


def character_stream(chi):
    return CoefficientStream(lambda n: complex(chi(n)), 0.0, f"chi {chi.label}")


def _eta_cubed(N):
    """Sparse q-expansion of prod (1-q^m)^3 = sum (-1)^k (2k+1) q^{k(k+1)/2}, up to q^N."""
    idx, coef = [], []
    k = 0
    while k * (k + 1) // 2 <= N:
        idx.append(k * (k + 1) // 2)
        coef.append((-1) ** k * (2 * k + 1))
        k += 1
    return idx, coef


@lru_cache(maxsize=4)
def _tau_table(N):
    idx, coef = _eta_cubed(N)
    series = np.zeros(N, dtype=object)
    series[:] = 0
    for i, c in zip(idx, coef):
        if i < N:
            series[i] = c
    for _ in range(7):
        out = np.zeros(N, dtype=object)
        out[:] = 0
        for i, c in zip(idx, coef):
            if i >= N:
                break
            out[i:] += c * series[:N - i]
        series = out
    # Delta = q * (eta^3 / q^(1/8))^8, so tau(n) is the q^(n-1) coefficient
    return tuple(int(v) for v in series)


def ramanujan_tau(N):
    """tau(1..N) as exact Python integers, from the eta-product expansion."""
    N = int(N)
    if N < 1:
        raise ValueError("N must be positive")
    table = _tau_table(N)
    return CoefficientStream(lambda n: table[n - 1], 5.5, "ramanujan tau", length=N)


def tau_values(N):
    """Exact tau(1..N) as a tuple of ints."""
    return _tau_table(int(N))


def to_float_checked(value):
    """Convert a big integer to float, raising OverflowError instead of wrapping."""
    out = float(value)
    if not math.isfinite(out):
        raise OverflowError(f"{value} does not fit in a double")
    return out


def to_int64_checked(values):
    """Convert exact integers to int64, refusing silently wrapped values."""
    lim = 2 ** 63 - 1
    for v in values:
        if abs(v) > lim:
            raise OverflowError(f"coefficient {v} exceeds int64")
    return np.array(values, dtype=np.int64)


def shifted_coefficients(a, k):
    """n -> a(n) n^{-(k-1)/2}; the result is in the O(n^eps) class."""
    if k <= 0 or k % 2:
        raise ValueError("weight must be a positive even integer")
    shift = (k - 1) / 2

    def ev(n):
        v = a(n)
        if isinstance(v, int):
            # exact rational scaling keeps big tau values from losing precision early
            return to_float_checked(v) / n ** shift
        return complex(v) / n ** shift

    return CoefficientStream(ev, 0.0, f"{a.label} shifted by {shift:g}", length=a.length)


def square_indicator_stream():
    """Coefficients of theta(z) = sum e^{i n^2 z}: 1 on squares, 0 elsewhere."""
    return CoefficientStream(lambda n: 1.0 if math.isqrt(n) ** 2 == n else 0.0, 0.0,
                             "squares", multiplicative=True)


def load_coefficient_file(path, label=None):
    """File-backed stream: lines ``n,re,im`` with n = 1, 2, ... and '#' comments."""
    vals = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                n, re, im = line.split(",")
                n = int(n)
                val = complex(float(re), float(im))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed coefficient line {line!r}") from None
            if n != len(vals) + 1:
                raise ValueError(f"{path}:{lineno}: expected n={len(vals) + 1}, got {n}")
            vals.append(val)
    table = tuple(vals)
    return CoefficientStream(lambda n: table[n - 1], 0.0, label or str(path), length=len(table))
