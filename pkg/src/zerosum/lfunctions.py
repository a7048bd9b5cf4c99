"""L-function registry, Dirichlet L evaluation, completed L-functions and the
archimedean functional W_{lambda,mu}."""

import configparser
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import bernoulli, loggamma

from . import arithmetic, euler
from .quadrature import integrate

EULER_GAMMA = 0.57721566490153286061
EM_TERMS = 15  # Bernoulli corrections through B_30
EM_RATIO = 0.3  # keep |s| / (2 pi N) at or below this


class PrecisionError(RuntimeError):
    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


@lru_cache(maxsize=1)
def _bernoulli_factors():
    b = bernoulli(2 * EM_TERMS)
    return np.array([b[2 * j] / math.factorial(2 * j) for j in range(1, EM_TERMS + 1)])


def em_cutoff(s_abs):
    """Direct-sum length N so that the Euler-Maclaurin tail converges fast."""
    return max(50, int(math.ceil(s_abs / (2 * math.pi * EM_RATIO))))


def _expm1_ratio(z):
    """(e^z - 1)/z with the removable point handled."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-8
    safe = np.where(small, 1.0, z)
    return np.where(small, 1 + z / 2, np.expm1(safe) / safe)


def hurwitz_tail(s, w, N, centred=False):
    """Euler-Maclaurin remainder sum_{k>=N} (k+w)^{-s}, vectorised over s.

    With ``centred`` the s-independent constant -1/(s-1) is removed from the
    integral term, which keeps character sums finite at s = 1 (the constants
    cancel there because sum_a chi(a) = 0).

    Returns (value, size of the last correction term)."""
    s = np.asarray(s, dtype=complex)
    x = N + w
    lx = math.log(x)
    xs = np.exp(-s * lx)
    if centred:
        out = -lx * _expm1_ratio((1 - s) * lx) + 0.5 * xs
    else:
        out = x * xs / (s - 1) + 0.5 * xs
    poch = s.copy()
    term = np.zeros_like(s)
    fac = _bernoulli_factors()
    xp = xs / x
    for j in range(EM_TERMS):
        term = fac[j] * poch * xp
        out = out + term
        poch = poch * (s + 2 * j + 1) * (s + 2 * j + 2)
        xp = xp / (x * x)
    return out, np.abs(term)


def hurwitz_zeta(s, w, N=None):
    """zeta(s, w) for 0 < w <= 1 by Euler-Maclaurin."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if N is None:
        N = em_cutoff(float(np.abs(s).max()))
    k = np.arange(N) + w
    head = np.exp(-np.outer(s, np.log(k))).sum(axis=1)
    tail, _ = hurwitz_tail(s, w, N)
    return head + tail


def dirichlet_L(chi, s, rel_tol=1e-10, with_error=False):
    """L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q), vectorised over s.

    The Hurwitz heads are merged into one Dirichlet sum over n <= qN; the
    tails are Euler-Maclaurin corrections at N + a/q.
    """
    s = np.asarray(s, dtype=complex)
    shape = s.shape
    s = s.ravel()
    q = chi.modulus
    out = np.empty(s.size, dtype=complex)
    err = np.empty(s.size)
    if s.size == 0:
        return out.reshape(shape)
    order = np.argsort(np.abs(s), kind="stable")
    chi_tab = chi.table
    residues = [a for a in range(1, q + 1) if chi_tab[a % q] != 0]
    principal = abs(sum(chi_tab[a % q] for a in residues)) > 0.5
    lo = 0
    while lo < s.size:
        N = em_cutoff(float(np.abs(s[order[lo]])) * 1.25 + 1)
        # take all s whose cutoff fits under this N
        hi = lo
        while hi < s.size and em_cutoff(float(np.abs(s[order[hi]]))) <= N:
            hi += 1
        hi = max(hi, lo + 1)
        idx = order[lo:hi]
        n = np.arange(1, q * N + 1)
        keep = chi_tab[n % q] != 0
        n = n[keep]
        cn = chi_tab[n % q]
        logn = np.log(n)
        step = max(1, 3_000_000 // n.size)
        for a0 in range(0, idx.size, step):
            sub = idx[a0:a0 + step]
            block = s[sub]
            head = np.exp(-np.outer(block, logn)) @ cn
            tail = np.zeros(block.size, dtype=complex)
            terr = np.zeros(block.size)
            qs = np.exp(-block * math.log(q))
            for a in residues:
                t, e = hurwitz_tail(block, a / q, N, centred=not principal)
                tail += chi_tab[a % q] * t
                terr += e
            out[sub] = head + qs * tail
            err[sub] = terr * np.abs(qs)
        lo = hi
    rel = err / np.maximum(np.abs(out), 1e-300)
    if rel_tol is not None and np.any((err > rel_tol) & (rel > rel_tol)):
        raise PrecisionError("Euler-Maclaurin tail above target", float(err.max()))
    if with_error:
        return out.reshape(shape), err.reshape(shape)
    return out.reshape(shape)


def zeta(s):
    return dirichlet_L(arithmetic.conrey_character(1, 1), s)


# ------------------------------------------------------------ Hardy Z / RS

def dirichlet_theta(chi, t):
    """Rotation angle making e^{i theta} L(1/2 + i t, chi) real."""
    t = np.asarray(t, dtype=float)
    q, a = chi.modulus, chi.parity
    omega = root_number(chi)
    return (loggamma((0.5 + a + 1j * t) / 2).imag + 0.5 * t * math.log(q / math.pi)
            - 0.5 * np.angle(omega))


def hardy_z(chi, t):
    """Real-valued rotation of L(1/2 + i t, chi) (Hardy Z for chi = 1 mod 1)."""
    t = np.asarray(t, dtype=float)
    vals = dirichlet_L(chi, 0.5 + 1j * t, rel_tol=None)
    return (np.exp(1j * dirichlet_theta(chi, t)) * vals).real


def riemann_siegel_theta(t):
    t = np.asarray(t, dtype=float)
    return loggamma(0.25 + 0.5j * t).imag - 0.5 * t * math.log(math.pi)


def _psi(z):
    return np.cos(2 * np.pi * (z * z - z - 1 / 16)) / np.cos(2 * np.pi * z)


@lru_cache(maxsize=1)
def _psi_taylor(n=512, radius=1.5, degree=60):
    """Taylor coefficients of Psi about 1/2 from a Cauchy integral (FFT on a circle)."""
    k = np.arange(n)
    z = 0.5 + radius * np.exp(2j * np.pi * k / n)
    c = np.fft.fft(_psi(z)) / n
    c = c[:degree].real / radius ** np.arange(degree)
    return c


def _psi_derivs(p, kmax=12):
    c = _psi_taylor()
    x = np.asarray(p) - 0.5
    out = []
    poly = c[::-1]
    for _ in range(kmax + 1):
        out.append(np.polyval(poly, x))
        poly = np.polyder(poly)
    return out


def riemann_siegel_z(t):
    """Hardy Z(t) by the Riemann-Siegel formula with corrections C0..C4.

    Intended for t >= 1000, where the truncation error is below ~1e-9.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(t.size)
    tau = np.sqrt(t / (2 * np.pi))
    N = np.floor(tau).astype(np.int64)
    p = tau - N
    th = riemann_siegel_theta(t)
    order = np.argsort(t, kind="stable")
    step = max(1, 4_000_000 // max(1, int(N.max())))
    for lo in range(0, t.size, step):
        idx = order[lo:lo + step]
        nmax = int(N[idx].max())
        n = np.arange(1, nmax + 1)
        ph = th[idx, None] - np.outer(t[idx], np.log(n))
        terms = np.cos(ph) / np.sqrt(n)
        terms[n[None, :] > N[idx, None]] = 0
        out[idx] = 2 * terms.sum(axis=1)
    d = _psi_derivs(p)
    pi2 = np.pi ** 2
    c0 = d[0]
    c1 = -d[3] / (96 * pi2)
    c2 = d[2] / (64 * pi2) + d[6] / (18432 * pi2 ** 2)
    c3 = -d[1] / (64 * pi2) - d[5] / (3840 * pi2 ** 2) - d[9] / (5308416 * pi2 ** 3)
    c4 = (d[0] / (128 * pi2) + 19 * d[4] / (24576 * pi2 ** 2) + 11 * d[8] / (5898240 * pi2 ** 3)
          + d[12] / (2038431744 * pi2 ** 4))
    inv = 1 / tau
    corr = c0 + inv * (c1 + inv * (c2 + inv * (c3 + inv * c4)))
    sign = np.where(N % 2 == 1, 1.0, -1.0)
    return out + sign * corr / np.sqrt(tau)


RS_THRESHOLD = 1000.0


def zeta_hardy_z(t):
    """Hardy Z for zeta: Euler-Maclaurin below RS_THRESHOLD, Riemann-Siegel above."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(t.size)
    low = np.abs(t) < RS_THRESHOLD
    if low.any():
        out[low] = hardy_z(arithmetic.conrey_character(1, 1), t[low])
    if (~low).any():
        tt = t[~low]
        out[~low] = riemann_siegel_z(np.abs(tt))
    return out


# ------------------------------------------------------------- Gamma data

def root_number(chi):
    """omega = tau(chi) / (i^a sqrt(q)) for primitive chi of parity a."""
    if chi.modulus == 1:
        return 1.0 + 0j
    return arithmetic.gauss_sum(chi) / (1j ** chi.parity * math.sqrt(chi.modulus))


@dataclass(frozen=True)
class GammaFactor:
    """Q^s prod Gamma(lambda_j s + mu_j) with root number omega."""

    Q: float
    pairs: tuple
    omega: complex = 1.0 + 0j

    def __post_init__(self):
        if self.Q <= 0:
            raise ValueError("Q must be positive")
        if abs(abs(self.omega) - 1) > 1e-12:
            raise ValueError("|omega| must be 1")
        for lam, mu in self.pairs:
            if lam <= 0 or complex(mu).real < 0:
                raise ValueError(f"bad Gamma pair ({lam}, {mu})")

    @property
    def degree(self):
        return 2 * sum(lam for lam, _ in self.pairs)

    def log_value(self, s):
        s = np.asarray(s, dtype=complex)
        out = s * math.log(self.Q)
        for lam, mu in self.pairs:
            out = out + loggamma(lam * s + mu)
        return out

    def pole_distance(self, s):
        s = np.asarray(s, dtype=complex)
        dist = np.full(s.shape, np.inf)
        for lam, mu in self.pairs:
            z = lam * s + mu
            k = np.maximum(0, np.round(-z.real))
            dist = np.minimum(dist, np.abs(z + k))
        return dist


@dataclass
class SelbergLFunction:
    """An L-function with Gamma data, pole order and von Mangoldt coefficients.

    ``lam`` maps n -> Lambda_L(n); ``evaluate`` (optional) maps an array of s
    to L(s).  ``spec`` is the Euler product, when one is known.
    """

    label: str
    gamma: GammaFactor
    pole_order: int
    lam: Callable
    evaluate: Callable | None = None
    spec: euler.EulerProductSpec | None = None
    coeffs: arithmetic.CoefficientStream | None = None
    theta: float = 0.0
    character: arithmetic.DirichletCharacter | None = field(default=None, repr=False)

    @property
    def self_dual(self):
        return self.character is None or self.character.is_real

    def lambda_values(self, n):
        """Vector of Lambda_L at an array of prime powers."""
        return np.array([self.lam(int(k)) for k in np.atleast_1d(n)], dtype=complex)


def zeta_function():
    return SelbergLFunction(
        "zeta", GammaFactor(math.pi ** -0.5, ((0.5, 0.0),), 1.0 + 0j), 1,
        lambda n: complex(arithmetic.von_mangoldt(n)), zeta, euler.zeta_spec(),
        arithmetic.CoefficientStream(lambda n: 1.0, 0.0, "one"))


def dirichlet_function(chi, omega=None):
    """L(s, chi) for primitive non-principal chi: Q = sqrt(q/pi), pair (1/2, a/2)."""
    if not chi.primitive or chi.is_principal:
        raise ValueError(f"character {chi.label} must be primitive and non-principal")
    q, a = chi.modulus, chi.parity
    w = root_number(chi) if omega is None else omega
    return SelbergLFunction(
        f"L{chi.label}", GammaFactor(math.sqrt(q / math.pi), ((0.5, a / 2),), w), 0,
        lambda n: complex(arithmetic.von_mangoldt(n) * chi(n)),
        lambda s: dirichlet_L(chi, s), euler.character_spec(chi),
        arithmetic.character_stream(chi), 0.0, chi)


def delta_function(limit=20000):
    """L(s, Delta) normalised to the critical strip 0 < Re s < 1 (no evaluator)."""
    spec = euler.delta_spec(limit)

    def lam(n):
        pm = arithmetic.prime_power(n)
        if pm is None:
            return 0j
        return euler.lambda_phi(spec, n)

    return SelbergLFunction("Delta", GammaFactor(1 / (2 * math.pi), ((1.0, 5.5),), 1.0 + 0j), 0,
                            lam, None, spec)


def rankin_selberg_delta(limit=20000):
    """L(s, Delta x Delta): (4 pi)^{-s} Gamma(s + 11) Gamma(s), simple pole at 1."""
    spec = euler.delta_spec(limit)

    def lam(n):
        return euler.lambda_tensor(spec, spec, n) if arithmetic.prime_power(n) else 0j

    return SelbergLFunction("DeltaxDelta",
                            GammaFactor(1 / (4 * math.pi), ((1.0, 11.0), (1.0, 0.0)), 1.0 + 0j),
                            1, lam, None, None)


def from_label(label):
    """'zeta', 'Delta', 'DeltaxDelta' or a character label 'q.n' (optionally 'Lq.n')."""
    if label == "zeta":
        return zeta_function()
    if label == "Delta":
        return delta_function()
    if label == "DeltaxDelta":
        return rankin_selberg_delta()
    chi = arithmetic.character_from_label(label[1:] if label.startswith("L") else label)
    return dirichlet_function(chi)


def load_registry(path):
    """Registry file: one section per label, with ``kind`` = zeta | dirichlet |
    modular | rankin-selberg | custom.  Custom entries give Q, pairs
    (``lam:mu_re:mu_im`` comma separated), omega and pole_order."""
    cfg = configparser.ConfigParser()
    if not cfg.read(path, encoding="utf-8"):
        raise FileNotFoundError(path)
    out = {}
    for name in cfg.sections():
        sec = cfg[name]
        kind = sec.get("kind", "custom")
        if kind == "zeta":
            out[name] = zeta_function()
        elif kind == "dirichlet":
            out[name] = dirichlet_function(arithmetic.character_from_label(sec["character"]))
        elif kind == "modular":
            out[name] = delta_function()
        elif kind == "rankin-selberg":
            out[name] = rankin_selberg_delta()
        elif kind == "custom":
            pairs = []
            for item in sec["pairs"].split(","):
                lam, re, im = (float(v) for v in item.split(":"))
                pairs.append((lam, complex(re, im)))
            omega = complex(sec.get("omega", "1").replace(" ", ""))
            gf = GammaFactor(float(sec["Q"]), tuple(pairs), omega)
            out[name] = SelbergLFunction(name, gf, sec.getint("pole_order", 0),
                                         lambda n: 0j)
        else:
            raise ValueError(f"{path}: unknown kind {kind!r} in [{name}]")
        out[name].label = name if kind == "custom" else out[name].label
    return out


# -------------------------------------------------------- completed values

def complete(Lf, s, pole_tol=1e-6):
    """L*(s) = Q^s prod Gamma(lambda_j s + mu_j) L(s)."""
    if Lf.evaluate is None:
        raise NotImplementedError(f"{Lf.label}: no evaluation route")
    s = np.asarray(s, dtype=complex)
    if np.any(Lf.gamma.pole_distance(s) < pole_tol):
        raise ValueError("too close to a Gamma pole")
    if Lf.pole_order and np.any(np.abs(s - 1) < pole_tol):
        raise ValueError("too close to the pole at s = 1")
    return np.exp(Lf.gamma.log_value(s)) * Lf.evaluate(s)


def functional_equation_residual(Lf, s):
    """|L*(s) - omega conj(L*(1 - conj s))| / max(|L*(s)|, 1)."""
    s = complex(s)
    a = complex(complete(Lf, np.array([s]))[0])
    b = complex(complete(Lf, np.array([1 - s.conjugate()]))[0])
    return abs(a - Lf.gamma.omega * b.conjugate()) / max(abs(a), 1.0)


# ----------------------------------------------------- archimedean terms

def archimedean_W(lam, mu, h, tol=1e-11):
    """W_{lam,mu}(h) = int_1^inf [h_{lam,mu}(u) + h*_{lam,mu}(u) - 2 h(1) u^{(Re mu - 1)/lam}]
    u^{(1 - Re mu)/lam} / (u^{1/lam} - 1) du/u.

    h*_{lam,mu} is the involution applied to h_{lam,mu}.  The integral runs in
    v = log u; Gauss nodes never touch v = 0 and the bracket vanishes there,
    so the quotient is evaluated directly.  Beyond the supports the integrand
    is -2 h(1) / (u^{1/lam} - 1), integrated in closed form.

    Returns (value, error estimate).
    """
    if lam <= 0 or complex(mu).real < 0:
        raise ValueError("need lam > 0 and Re mu >= 0")
    mu = complex(mu)
    w = mu.imag / lam
    rexp = (1 - mu.real) / lam
    h1 = h.at(1.0)
    B = max(h.b, 1 / h.a, 2.0)
    if h.a >= 1 and h1 == 0:
        lo, hi = math.log(h.a), math.log(h.b)
    else:
        lo, hi = 0.0, math.log(B)

    def integrand(v):
        u = np.exp(v)
        br = (h(u) * np.exp(-1j * w * v) + h(1 / u) / u * np.exp(1j * w * v)
              - 2 * h1 * np.exp(-rexp * v))
        return br * np.exp(rexp * v) / np.expm1(v / lam)

    osc = abs(w) + h.oscillation
    panels = max(8, int(osc * (hi - lo) / 4))
    val, err = integrate(integrand, lo, hi, tol, panels)
    if h1 != 0:
        val += 2 * lam * h1 * math.log1p(-B ** (-1 / lam))
    return val, err


def scaled_archimedean_W(lam, mu, h, x, tol=1e-11):
    """W_{lam,mu}(u -> h(x u)) = x^{mu/lam} int h(v) v^{(1-mu)/lam} / (v^{1/lam} - x^{1/lam}) dv/v.

    Requires the support of u -> h(x u) to lie in (1, inf)."""
    mu = complex(mu)
    if h.a / x <= 1:
        raise ValueError("support of h(x u) must lie in (1, inf)")
    e = (1 - mu) / lam
    xl = x ** (1 / lam)

    def integrand(v):
        return h(v) * v ** e / (v ** (1 / lam) - xl) / v

    panels = max(8, int(h.oscillation + abs(e.imag) * math.log(h.b / h.a)))
    val, err = integrate(integrand, h.a, h.b, tol, panels)
    return x ** (mu / lam) * val, err
