"""Smooth functions on (0, inf) that interpolate Dirichlet coefficient sequences."""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .arithmetic import (CoefficientStream, DirichletCharacter, euler_phi, gauss_sum,
                         ramanujan_tau, shifted_coefficients)
from .quadrature import integrate

TAIL_EPS = 1e-16
MIN_Y = 0.05
SERIES_CUTOFF = 1e-6
CHUNK = 256


class TailError(ValueError):
    """The q-expansion tail cannot be made small with the available coefficients."""


@dataclass(frozen=True)
class InterpolationFn:
    """u -> phi(u) with phi(n) = target(n), and |phi(u)| <= C u^kappa declared.

    ``oscillation`` is the largest phase rate in u (radians per unit u).
    """

    eval: Callable = field(repr=False)
    target: CoefficientStream | None = field(default=None, repr=False)
    kappa: float = 0.0
    C: float = math.inf
    label: str = ""
    oscillation: float = 0.0

    def __call__(self, u):
        return self.eval(np.asarray(u, dtype=float))

    def integer_error(self, N):
        """max_{n <= N} |phi(n) - target(n)|."""
        n = np.arange(1, N + 1, dtype=float)
        want = self.target.values(N)
        return float(np.max(np.abs(self(n) - want)))

    def growth_ratio(self, grid):
        """sup over the grid of |phi(u)| / u^kappa."""
        grid = np.asarray(grid, dtype=float)
        return float(np.max(np.abs(self(grid)) / grid ** self.kappa))

    def growth_holds(self, grid):
        return self.growth_ratio(grid) <= self.C


# ---------------------------------------------------------------- characters

def phi_chi(chi: DirichletCharacter):
    """(1/tau(conj chi)) sum_a conj(chi(a)) e^{2 pi i a u / q}; equals chi(n) at integers."""
    if not chi.primitive:
        raise ValueError(f"character {chi.label} is not primitive")
    q = chi.modulus
    stream = CoefficientStream(lambda n: complex(chi(n)), 0.0, f"chi {chi.label}")
    if q == 1:
        return InterpolationFn(lambda u: np.ones_like(u, dtype=complex), stream, 0.0, 1.0, "1")
    cbar = chi.conj()
    tau = gauss_sum(cbar)
    a = np.arange(1, q)
    w = np.array([complex(cbar(int(k))) for k in a]) / tau

    def ev(u):
        u = np.asarray(u, dtype=float)
        # reduce u mod q first so large arguments keep full phase accuracy
        r = np.mod(u, q)
        return np.exp(2j * math.pi * np.multiply.outer(r, a) / q) @ w

    bound = euler_phi(q) / math.sqrt(q)
    return InterpolationFn(ev, stream, 0.0, bound * (1 + 1e-12), f"phi_chi {chi.label}",
                           2 * math.pi * (q - 1) / q)


# ------------------------------------------------------- q-expansion routes

def interval_kernel(d, eta):
    """int_eta^{eta+1} e^{2 pi i d X} dX, exact (=1) at d = 0 and 0 at other integers."""
    d = np.asarray(d, dtype=float)
    frac = d - np.round(d)
    th = 2 * math.pi * frac
    num = -2 * np.sin(th / 2) ** 2 + 1j * np.sin(th)  # e^{i th} - 1 without cancellation
    z = 2 * math.pi * d
    small = np.abs(d) < SERIES_CUTOFF
    safe = np.where(small, 1.0, z)
    out = num / (1j * safe)
    zs = np.where(small, z, 0.0)
    series = 1 + 1j * zs / 2 - zs ** 2 / 6 - 1j * zs ** 3 / 24
    out = np.where(small, series, out)
    return np.exp(1j * eta * z) * out


def _stream_table(a, N):
    if a.length is not None and N > a.length:
        raise TailError(f"{a.label}: need {N} coefficients for the tail cutoff, "
                        f"only {a.length} available; increase y or extend the stream")
    return np.array([complex(a(n)) for n in range(1, N + 1)])


def _cutoff(u_max, y_min, kappa):
    """Index beyond which |a(n)| e^{-2 pi (n - u) y} < TAIL_EPS for a(n) = O(n^kappa)."""
    n = u_max + 1.0
    for _ in range(30):
        need = u_max + (kappa * math.log(max(n, 2.0)) - math.log(TAIL_EPS)) / (2 * math.pi * y_min)
        if need <= n:
            break
        n = need
    return int(math.ceil(n)) + 2


def _qexp_sum(table, u, weight_fn, eta):
    """sum_n table[n-1] weight_fn(n, u) K_eta(n - u), chunked over u.

    For integer n, K_eta(n - u) = e^{2 pi i eta (n - u)} (e^{-2 pi i u} - 1) / (2 pi i (n - u)),
    so only the 1/(n - u) factor is formed per pair; terms with |n - u| below
    SERIES_CUTOFF go through interval_kernel.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.zeros(u.shape, dtype=complex)
    n = np.arange(1, table.size + 1, dtype=float)
    coef = table * np.exp(2j * math.pi * eta * n)
    for i in range(0, u.size, CHUNK):
        uu = u[i:i + CHUNK]
        d = n[None, :] - uu[:, None]
        near = np.abs(d) < SERIES_CUTOFF
        w = weight_fn(n[None, :], uu[:, None])
        inv = np.where(near, 0.0, 1 / np.where(near, 1.0, d))
        th = -2 * math.pi * (uu - np.round(uu))
        pref = np.exp(-2j * math.pi * eta * uu) * (-2 * np.sin(th / 2) ** 2 + 1j * np.sin(th))
        main = pref / (2j * math.pi) * ((w * inv) @ coef)
        if near.any():
            r, c = np.nonzero(near)
            main = main.copy()
            np.add.at(main, r, table[c] * w[r, c] * interval_kernel(d[r, c], eta))
        out[i:i + CHUNK] = main
    return out


def fourier_interp(a: CoefficientStream, y, eta=0.0):
    """A(u) = e^{2 pi u y} int_eta^{eta+1} f_a(x + i y) e^{-2 pi i u x} dx, termwise.

    A(n) = a(n) exactly; off the integers A grows like e^{2 pi u y}.
    """
    y = float(y)
    if y < MIN_Y:
        raise TailError(f"y={y} is below the floor {MIN_Y}; use a larger y")
    kappa = a.growth + 0.5

    def ev(u):
        u = np.asarray(u, dtype=float)
        if u.size == 0:
            return np.zeros(u.shape, dtype=complex)
        N = _cutoff(float(u.max()), y, kappa)
        table = _stream_table(a, N)
        return _qexp_sum(table, u.ravel(), lambda n, uu: np.exp(2 * math.pi * (uu - n) * y),
                         eta).reshape(u.shape)

    return InterpolationFn(ev, a, math.inf, math.inf, f"A[{a.label}; y={y:g}, eta={eta:g}]",
                           2 * math.pi * max(abs(eta), abs(eta + 1)))


def fourier_interp_u(a: CoefficientStream, eta=0.0):
    """The y = 1/u specialisation: e^{2 pi} sum_n a(n) e^{-2 pi n/u} K_eta(n - u)."""
    kappa = a.growth + 0.5

    def ev(u):
        u = np.asarray(u, dtype=float)
        if u.size == 0:
            return np.zeros(u.shape, dtype=complex)
        if np.any(u <= 0):
            raise ValueError("u must be positive")
        N = _cutoff(float(u.max()), 1 / float(u.max()), kappa)
        table = _stream_table(a, N)
        w = lambda n, uu: np.exp(2 * math.pi * (1 - n / uu))
        return _qexp_sum(table, u.ravel(), w, eta).reshape(u.shape)

    return InterpolationFn(ev, a, a.growth + 1.0, math.inf, f"A_u[{a.label}; eta={eta:g}]",
                           2 * math.pi * max(abs(eta), abs(eta + 1)))


def phi_f(a: CoefficientStream, k):
    """u^{-(k-1)/2} int_1^2 f(X + i/u) e^{-2 pi i u (X + i/u)} dX for a level-one cusp form.

    ``a`` holds the unshifted coefficients a_f(n); phi_f(n) = a_f(n) n^{-(k-1)/2}.
    """
    if k < 12 or k % 2:
        raise ValueError("weight must be even and at least 12")
    shift = (k - 1) / 2
    shifted = shifted_coefficients(a, k)

    def ev(u):
        u = np.asarray(u, dtype=float)
        N = _cutoff(float(u.max()), 1 / float(u.max()), 0.5) if u.size else 1
        # a_f(n) = shifted(n) n^shift, and (n/u)^shift absorbs the u^{-shift} prefactor
        table = _stream_table(shifted, N)
        w = lambda n, uu: (n / uu) ** shift * np.exp(2 * math.pi * (1 - n / uu))
        return _qexp_sum(table, u.ravel(), w, 1.0).reshape(u.shape)

    return InterpolationFn(ev, shifted, 0.5, math.inf, f"phi_f[{a.label}]", 4 * math.pi)


def phi_delta(limit=4000):
    """phi_f for Ramanujan's Delta with tau known up to ``limit``.

    The growth constant C = 2 is empirical: sup |phi| / sqrt(u) is about 1.006
    on [0.01, 1000]."""
    fn = phi_f(ramanujan_tau(limit), 12)
    return InterpolationFn(fn.eval, fn.target, 0.5, 2.0, "phi_Delta", fn.oscillation)


def product_interp(phi: InterpolationFn, psi: InterpolationFn):
    """Pointwise product; interpolates the product sequence, growth exponents add."""
    stream = None
    if phi.target is not None and psi.target is not None:
        stream = CoefficientStream(lambda n: complex(phi.target(n)) * complex(psi.target(n)),
                                   phi.target.growth + psi.target.growth,
                                   f"{phi.target.label}*{psi.target.label}")
    return InterpolationFn(lambda u: phi(u) * psi(u), stream, phi.kappa + psi.kappa,
                           phi.C * psi.C, f"{phi.label}*{psi.label}",
                           phi.oscillation + psi.oscillation)


def constant_one():
    stream = CoefficientStream(lambda n: 1.0, 0.0, "1")
    return InterpolationFn(lambda u: np.ones(np.shape(u), dtype=complex), stream, 0.0, 1.0, "1")


# ------------------------------------------------------------ oscillation

def oscillation_integral(chi: DirichletCharacter, h, x, tol=1e-12):
    """int h(x u) phi_chi(u) du, directly and by one integration by parts.

    Returns (direct, by_parts); the second is
    -q / (2 pi i tau(conj chi)) sum_a conj(chi(a))/a int h'(v) e^{2 pi i a v/(q x)} dv.
    """
    if chi.is_principal or not chi.primitive:
        raise ValueError("needs a primitive non-principal character")
    q = chi.modulus
    phi = phi_chi(chi)
    freq = 2 * math.pi * (q - 1) / (q * x)
    panels = max(8, int(freq * (h.b - h.a) / math.pi) + 1)
    direct, _ = integrate(lambda v: h(v) * phi(v / x), h.a, h.b, tol, panels)
    direct /= x
    cbar = chi.conj()
    tau = gauss_sum(cbar)
    acc = 0j
    for a in range(1, q):
        c = complex(cbar(a))
        if c == 0:
            continue
        w = 2 * math.pi * a / (q * x)
        v, _ = integrate(lambda t: h.deriv(1, t) * np.exp(1j * w * t), h.a, h.b, tol, panels)
        acc += c / a * v
    return complex(direct), complex(-q / (2j * math.pi * tau) * acc)
