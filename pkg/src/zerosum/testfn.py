"""Compactly supported test functions and their Mellin-type integrals."""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quadrature import QuadratureError, integrate, log_mellin

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class MellinValue:
    s: complex
    value: complex
    err: float


@dataclass(frozen=True)
class TestFunction:
    """A smooth function on (0, inf) vanishing outside ``support``.

    ``oscillation`` is the largest phase rate of the function in the
    variable log u (radians per unit), used to size quadrature panels for
    complex-valued weights; it is zero for the plain bump family.
    """

    __test__ = False  # not a pytest class

    support: tuple
    fn: Callable = field(repr=False)
    derivs: Callable | None = field(default=None, repr=False)
    label: str = ""
    oscillation: float = 0.0
    params: dict = field(default_factory=dict)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return self.fn(u)

    def at(self, u):
        return complex(np.asarray(self(np.array([float(u)])))[0])

    @property
    def a(self):
        return self.support[0]

    @property
    def b(self):
        return self.support[1]

    def deriv(self, k, u):
        if k == 0:
            return self(u)
        if self.derivs is None:
            raise NotImplementedError(f"{self.label}: no analytic derivatives")
        return self.derivs(k, np.asarray(u, dtype=float))

    # Mellin-type integrals -------------------------------------------------

    def mellin_many(self, s, tol=DEFAULT_TOL):
        """Vectorised h^(s) = int h(u) u^s du/u; returns (values, errors)."""
        return log_mellin(self.fn, self.a, self.b, s, tol, self.oscillation)

    def mellin(self, s, tol=DEFAULT_TOL):
        v, e = self.mellin_many(np.array([complex(s)]), tol)
        return MellinValue(complex(s), complex(v[0]), float(e[0]))

    # transformations --------------------------------------------------------

    def scaled(self, x):
        """u -> h(x u)."""
        x = float(x)
        if x <= 0:
            raise ValueError("scale must be positive")
        f, d = self.fn, self.derivs
        derivs = None if d is None else (lambda k, u: x ** k * d(k, x * u))
        return TestFunction((self.a / x, self.b / x), lambda u: f(x * u), derivs,
                            f"{self.label}(x={x:g} u)", self.oscillation)

    def involution(self):
        """h*(u) = h(1/u)/u, supported on [1/b, 1/a]."""
        f = self.fn
        return TestFunction((1 / self.b, 1 / self.a), lambda u: f(1 / u) / u, None,
                            f"{self.label}*", self.oscillation)

    def twisted(self, lam, mu):
        """h_{lam,mu}(u) = h(u) u^{-i Im(mu)/lam}."""
        if lam <= 0:
            raise ValueError("lambda must be positive")
        w = complex(mu).imag / lam
        if w == 0:
            return self
        f = self.fn
        return TestFunction(self.support, lambda u: f(u) * np.exp(-1j * w * np.log(u)), None,
                            f"{self.label}_tw", self.oscillation + abs(w))

    def times(self, weight, oscillation=0.0, label=None):
        """Pointwise product with a weight function (e.g. an interpolation function).

        ``oscillation`` is the weight's phase rate in u (radians per unit u);
        it is converted to the log variable using the right end of the support.
        """
        f = self.fn
        rate = self.oscillation + oscillation * self.b
        return TestFunction(self.support, lambda u: f(u) * weight(u), None,
                            label or f"{self.label}*w", rate)

    def integral(self, weight=None, tol=1e-12):
        """int h(u) w(u) du over the support."""
        g = self.fn if weight is None else (lambda u: self.fn(u) * weight(u))
        panels = max(8, int(self.oscillation) // 2)
        v, _ = integrate(g, self.a, self.b, tol, panels)
        return v

    def abs_integral(self, power=-1.0):
        """int |h(u)| u^power du, a crude size measure used in tail bounds."""
        v, _ = integrate(lambda u: np.abs(self.fn(u)) * u ** power, self.a, self.b, 1e-8)
        return v.real


# ----------------------------------------------------------------- families

def _bump_derivs(c, r):
    def g_deriv(k, x):
        # g(x) = -1/(1-x^2) = -(1/2)[1/(1-x) + 1/(1+x)]
        return -0.5 * math.factorial(k) * (1 / (1 - x) ** (k + 1) + (-1) ** k / (1 + x) ** (k + 1))

    def derivs(k, u):
        u = np.asarray(u, dtype=float)
        x = (u - c) / r
        out = np.zeros_like(u)
        m = np.abs(x) < 1
        xm = x[m]
        h = [np.exp(-1 / (1 - xm ** 2))]
        for n in range(1, k + 1):
            acc = np.zeros_like(xm)
            for j in range(n):
                acc += math.comb(n - 1, j) * g_deriv(j + 1, xm) * h[n - 1 - j]
            h.append(acc)
        out[m] = h[k] / r ** k
        return out

    return derivs


def bump(center, radius, power=1):
    """exp(-1/(1 - x^2)^power) with x = (u - c)/r, supported on (c - r, c + r).

    power = 1 is the classical bump; larger powers (Gevrey-type bumps) give
    Mellin transforms decaying like exp(-C t^{power/(power+1)}), so zero sums
    converge faster.  Analytic derivatives are provided for power = 1.
    """
    c, r, k = float(center), float(radius), float(power)
    if c - r <= 0 or r <= 0:
        raise ValueError(f"bump({c}, {r}) would leave (0, inf)")
    if k <= 0:
        raise ValueError("power must be positive")

    def fn(u):
        u = np.asarray(u, dtype=float)
        x = (u - c) / r
        out = np.zeros(u.shape)
        m = np.abs(x) < 1
        out[m] = np.exp(-1 / (1 - x[m] ** 2) ** k)
        return out

    label = f"bump({c:g},{r:g})" if k == 1 else f"bump({c:g},{r:g},{k:g})"
    return TestFunction((c - r, c + r), fn, _bump_derivs(c, r) if k == 1 else None, label,
                        params={"center": c, "radius": r, "power": k})


def antisymmetrized(h, s0=0.5):
    """h(u) - 2^{s0} h(2u); its Mellin transform h^(s)(1 - 2^{s0 - s}) vanishes at s0."""
    f = h.fn
    k = 2.0 ** s0
    d = h.derivs
    derivs = None if d is None else (lambda n, u: d(n, u) - k * 2 ** n * d(n, 2 * u))
    return TestFunction((h.a / 2, h.b), lambda u: f(u) - k * f(2 * u), derivs,
                        f"anti({h.label})", h.oscillation)


# ------------------------------------------------------------ integrals

def mellin(h, s, tol=DEFAULT_TOL):
    return h.mellin(s, tol)


def involution(h):
    return h.involution()


def twisted(h, lam, mu):
    return h.twisted(lam, mu)


def zero_sum_integral(h, x, rho, phi=None, tol=DEFAULT_TOL, oscillation=0.0):
    """int_0^inf h(x u) phi(u) u^rho du/u over the support [a/x, b/x].

    ``rho`` may be an array; returns (values, errors).
    """
    g = h.scaled(x)
    if phi is not None:
        g = g.times(phi, oscillation)
    return g.mellin_many(np.atleast_1d(np.asarray(rho, dtype=complex)), tol)


def j_integral(h, x, mu, tol=DEFAULT_TOL):
    """int_0^inf h(x u^2) u^mu du/u = (1/2) x^{-mu/2} h^(mu/2)."""
    if x <= 0:
        raise ValueError("x must be positive")
    m = h.mellin(complex(mu) / 2, tol)
    return 0.5 * x ** (-complex(mu) / 2) * m.value


def decay_profile(h, sigma, ts, tol=1e-14):
    """|h^(sigma + i t)| along the given t values (for truncation estimates)."""
    s = sigma + 1j * np.asarray(ts, dtype=float)
    try:
        v, _ = h.mellin_many(s, tol)
    except QuadratureError as exc:
        v = exc.best
    return np.abs(v)
