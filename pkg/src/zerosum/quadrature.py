"""Composite Gauss-Legendre quadrature and compensated summation helpers.

Everything here works in the logarithmic variable v = log u, where Mellin-type
integrals ``int g(u) u^s du/u`` become ``int g(e^v) e^{s v} dv``.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

ORDER = 20
MAX_PANELS = 1 << 14


class QuadratureError(RuntimeError):
    """Raised when a tolerance cannot be met within the node budget."""

    def __init__(self, message, best=None, err=None):
        super().__init__(message)
        self.best = best
        self.err = err


@lru_cache(maxsize=None)
def legendre_rule(order=ORDER):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def panel_nodes(a, b, panels, order=ORDER):
    """Nodes and weights of a composite rule with equal panels on [a, b]."""
    x, w = legendre_rule(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def fsum_complex(values, axis=None):
    """Exactly rounded sum of complex values (math.fsum on each part)."""
    values = np.asarray(values, dtype=complex)
    if axis is None:
        flat = values.ravel()
        return complex(math.fsum(flat.real), math.fsum(flat.imag))
    moved = np.moveaxis(values, axis, -1)
    out = np.empty(moved.shape[:-1], dtype=complex)
    for idx in np.ndindex(out.shape):
        row = moved[idx]
        out[idx] = complex(math.fsum(row.real), math.fsum(row.imag))
    return out


def initial_panels(span, frequency, order=ORDER, per_period=8):
    """Panel count resolving ``frequency`` (radians per unit v) with the
    requested number of nodes per period."""
    periods = abs(frequency) * span / (2 * math.pi)
    need = periods * per_period / order
    return max(4, int(math.ceil(need)))


@dataclass(frozen=True)
class LogRule:
    """A composite rule on [log a, log b] with precomputed integrand samples."""

    v: np.ndarray
    w: np.ndarray
    g: np.ndarray

    def apply(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        out = np.empty(s.shape, dtype=complex)
        gw = self.g * self.w
        step = max(1, 2_000_000 // max(1, self.v.size))
        for lo in range(0, s.size, step):
            block = s[lo:lo + step]
            out[lo:lo + step] = np.exp(np.outer(block, self.v)) @ gw
        return out


def make_rule(g, a, b, panels, order=ORDER):
    v, w = panel_nodes(math.log(a), math.log(b), panels, order)
    return LogRule(v, w, np.asarray(g(np.exp(v)), dtype=complex))


def log_mellin(g, a, b, s, tol=1e-10, oscillation=0.0, max_panels=MAX_PANELS):
    """Integrate g(u) u^s du/u over [a, b] for an array of s.

    ``oscillation`` is the intrinsic phase rate of g in the log variable
    (radians per unit v); it is added to |Im s| when sizing panels.  The
    error estimate is the difference between the rule and one with twice as
    many panels; the finer value is returned.

    Returns (values, errors) as arrays shaped like ``s``.
    """
    s = np.asarray(s, dtype=complex)
    shape = s.shape
    s = s.ravel()
    values = np.empty(s.size, dtype=complex)
    errors = np.empty(s.size)
    if s.size == 0:
        return values.reshape(shape), errors.reshape(shape)
    span = math.log(b) - math.log(a)
    order = np.argsort(np.abs(s.imag), kind="stable")
    # group s values by the panel count they need
    need = np.array([initial_panels(span, abs(z.imag) + oscillation) for z in s[order]])
    buckets = np.unique(np.ceil(np.log2(need)).astype(int))
    for bexp in buckets:
        sel = order[np.ceil(np.log2(need)).astype(int) == bexp]
        panels = 1 << int(bexp)
        coarse = make_rule(g, a, b, panels).apply(s[sel])
        while True:
            fine = make_rule(g, a, b, 2 * panels).apply(s[sel])
            err = np.abs(fine - coarse)
            if np.all(err <= tol) or 2 * panels >= max_panels:
                break
            panels *= 2
            coarse = fine
        values[sel] = fine
        errors[sel] = err
        if np.any(err > tol):
            worst = float(err.max())
            raise QuadratureError(
                f"tolerance {tol:g} not reached with {2 * panels} panels (err {worst:.3g})",
                best=values.reshape(shape), err=worst)
    return values.reshape(shape), errors.reshape(shape)


def integrate(f, a, b, tol=1e-12, panels=8, max_panels=MAX_PANELS):
    """Plain integral of f over [a, b] by panel doubling; returns (value, err)."""
    def rule(n):
        x, w = panel_nodes(a, b, n)
        return fsum_complex(np.asarray(f(x), dtype=complex) * w)

    coarse = rule(panels)
    while True:
        fine = rule(2 * panels)
        err = abs(fine - coarse)
        if err <= tol or 2 * panels >= max_panels:
            break
        panels *= 2
        coarse = fine
    if err > tol:
        raise QuadratureError(f"tolerance {tol:g} not reached (err {err:.3g})", best=fine, err=err)
    return fine, err
