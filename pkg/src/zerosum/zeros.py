"""Zero acquisition, storage, and completeness checks."""

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.special import loggamma

from . import arithmetic, lfunctions

DEDUP_TOL = 1e-9
GRID_STEP = 0.05
REFINE_TOL = 1e-10


class ZeroCountError(RuntimeError):
    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


@dataclass(frozen=True)
class ZeroRecord:
    gamma: float
    multiplicity: int = 1
    source: str = "found"
    label: str = ""

    @property
    def rho(self):
        return complex(0.5, self.gamma)


@dataclass
class ZeroStore:
    """Per-label sorted ordinate lists with a completeness height.

    Ordinates are signed: a label whose zeros are not symmetric (complex
    characters) keeps both halves explicitly.  ``symmetric`` marks labels
    whose stored positive ordinates stand for the pairs +-gamma.
    """

    ordinates: dict = field(default_factory=dict)
    sources: dict = field(default_factory=dict)
    complete: dict = field(default_factory=dict)
    symmetric: dict = field(default_factory=dict)

    def count(self, label):
        return len(self.ordinates.get(label, ()))

    def add(self, label, gammas, source="found", symmetric=None):
        """Merge ordinates (deduplicated at DEDUP_TOL); returns the new count."""
        new = np.sort(np.asarray(gammas, dtype=float))
        old = self.ordinates.get(label, np.zeros(0))
        old_src = self.sources.get(label, np.zeros(0, dtype=object))
        merged = np.concatenate([old, new])
        src = np.concatenate([old_src, np.array([source] * new.size, dtype=object)])
        order = np.argsort(merged, kind="stable")
        merged, src = merged[order], src[order]
        keep = np.ones(merged.size, dtype=bool)
        if merged.size:
            keep[1:] = np.diff(merged) > DEDUP_TOL
        self.ordinates[label] = merged[keep]
        self.sources[label] = src[keep]
        if symmetric is not None:
            self.symmetric[label] = symmetric
        return self.count(label)

    def query(self, label, lo, hi):
        g = self.ordinates.get(label, np.zeros(0))
        i = np.searchsorted(g, lo, side="left")
        j = np.searchsorted(g, hi, side="right")
        return [ZeroRecord(float(x), 1, str(s), label)
                for x, s in zip(g[i:j], self.sources[label][i:j])]

    def rhos(self, label, T):
        """All zeros rho = 1/2 + i gamma with |gamma| <= T, pairs expanded."""
        g = self.ordinates.get(label, np.zeros(0))
        if label in self.complete and T > self.complete[label] + 1e-12:
            raise ZeroCountError(f"{label}: store complete only to {self.complete[label]}, asked {T}")
        g = g[np.abs(g) <= T]
        if self.symmetric.get(label, True):
            g = g[g > 0]
            g = np.concatenate([g, -g])
        return 0.5 + 1j * g

    # persistence ----------------------------------------------------------

    def save(self, directory):
        os.makedirs(directory, exist_ok=True)
        index = {}
        for label, g in self.ordinates.items():
            fname = f"{_safe(label)}.txt"
            export_zeros(g, os.path.join(directory, fname), label)
            index[label] = {"file": fname, "count": int(g.size),
                            "complete": self.complete.get(label),
                            "symmetric": self.symmetric.get(label, True)}
        with open(os.path.join(directory, "index.json"), "w", encoding="utf-8") as fh:
            json.dump(index, fh, indent=1, sort_keys=True)

    @classmethod
    def load(cls, directory):
        store = cls()
        path = os.path.join(directory, "index.json")
        if not os.path.exists(path):
            return store
        with open(path, encoding="utf-8") as fh:
            index = json.load(fh)
        for label, meta in index.items():
            g, _ = parse_zero_file(os.path.join(directory, meta["file"]))
            store.ordinates[label] = g
            store.sources[label] = np.array(["stored"] * g.size, dtype=object)
            if meta.get("complete") is not None:
                store.complete[label] = float(meta["complete"])
            store.symmetric[label] = bool(meta.get("symmetric", True))
        return store


def _safe(label):
    return "".join(c if c.isalnum() or c in "._-" else "_" for c in label)


def parse_zero_file(path):
    """Read a zero file: one ordinate per line, optional '# label:' header."""
    vals = []
    label = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                body = s[1:].strip()
                if body.lower().startswith("label:"):
                    label = body.split(":", 1)[1].strip()
                continue
            try:
                v = float(s)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed ordinate {s!r}") from None
            if vals and v <= vals[-1]:
                raise ValueError(f"{path}:{lineno}: ordinates not increasing ({v} after {vals[-1]})")
            vals.append(v)
    return np.array(vals, dtype=float), label


def export_zeros(gammas, path, label=None):
    with open(path, "w", encoding="utf-8") as fh:
        if label:
            fh.write(f"# label: {label}\n")
        for g in gammas:
            fh.write(f"{g:.12f}\n")


def ingest(store, path, label=None):
    """Merge a zero file into the store; returns the label's record count."""
    g, file_label = parse_zero_file(path)
    label = label or file_label
    if not label:
        raise ValueError(f"{path}: no label given and no '# label:' header")
    return store.add(label, g, source="ingested")


# ------------------------------------------------------------ root finding

def _refine(f, a, b, fa, fb, tol=REFINE_TOL, max_iter=100):
    """Vectorised Illinois iteration on sign-change brackets."""
    a, b, fa, fb = (np.array(v, dtype=float) for v in (a, b, fa, fb))
    side = np.zeros(a.size, dtype=int)
    for _ in range(max_iter):
        active = np.abs(b - a) > tol
        if not active.any():
            break
        idx = np.flatnonzero(active)
        aa, bb, ffa, ffb = a[idx], b[idx], fa[idx], fb[idx]
        c = bb - ffb * (bb - aa) / (ffb - ffa)
        bad = ~np.isfinite(c) | (c <= np.minimum(aa, bb)) | (c >= np.maximum(aa, bb))
        c[bad] = 0.5 * (aa[bad] + bb[bad])
        fc = f(c)
        same = np.sign(fc) == np.sign(ffb)
        # replace b by c; keep the bracket through a
        new_a = np.where(same, aa, bb)
        new_fa = np.where(same, ffa, ffb)
        sd = side[idx]
        # Illinois: halve the retained endpoint's value when it is kept twice
        new_fa = np.where(same & (sd == 1), new_fa / 2, new_fa)
        side[idx] = np.where(same, 1, 0)
        a[idx], fa[idx] = new_a, new_fa
        b[idx], fb[idx] = c, fc
        exact = fc == 0
        if exact.any():
            a[idx[exact]] = c[exact]
    return 0.5 * (a + b)


def _sign_change_roots(f, lo, hi, step):
    n = max(2, int(math.ceil((hi - lo) / step)) + 1)
    t = np.linspace(lo, hi, n)
    z = f(t)
    s = np.sign(z)
    ch = np.flatnonzero(s[:-1] * s[1:] < 0)
    exact = t[s == 0]
    roots = _refine(f, t[ch], t[ch + 1], z[ch], z[ch + 1]) if ch.size else np.zeros(0)
    return np.sort(np.concatenate([roots, exact])), t, z


def _scan(f, lo, hi, step=GRID_STEP, chunk=20000.0):
    out = []
    a = lo
    while a < hi:
        b = min(hi, a + chunk)
        r, _, _ = _sign_change_roots(f, a, b, step)
        out.append(r)
        a = b
    return _merge(np.concatenate(out) if out else np.zeros(0))


def _merge(roots, tol=1e-6):
    """Sorted roots with near-duplicates (from overlapping scans) removed."""
    roots = np.sort(np.asarray(roots, dtype=float))
    if roots.size < 2:
        return roots
    keep = np.concatenate([[True], np.diff(roots) > tol])
    return roots[keep]


# --------------------------------------------------- argument principle

def _arg_steps(values):
    return np.angle(values[1:] / values[:-1])


def _tracked_phase(fun, s0, s1, n0=64, max_depth=14, max_step=math.pi / 4):
    """Continuous change of arg fun(s) along the segment s0 -> s1."""
    x = np.linspace(0.0, 1.0, n0 + 1)
    v = fun(s0 + (s1 - s0) * x)
    for _ in range(max_depth):
        d = _arg_steps(v)
        bad = np.flatnonzero(np.abs(d) > max_step)
        if bad.size == 0:
            return float(d.sum())
        mids = 0.5 * (x[bad] + x[bad + 1])
        vm = fun(s0 + (s1 - s0) * mids)
        x = np.insert(x, bad + 1, mids)
        v = np.insert(v, bad + 1, vm)
    raise ZeroCountError(f"phase jump > {max_step:.3g} persists near {s0}..{s1}")


def count_by_argument_principle(Lf, T):
    """Number of zeros of L* with 0 < Im rho <= T, counted with multiplicity.

    The phase of F(s) = (s(s-1))^m L*(s) is tracked along 1/2 -> 2 -> 2+iT ->
    1/2+iT.  The functional equation reflects this path onto the left half of
    the box [-1, 2] x [0, T], so the winding number equals the phase change
    divided by pi.
    """
    if Lf.evaluate is None:
        raise NotImplementedError(f"{Lf.label}: no evaluation route")
    if T <= 0:
        return 0
    m = Lf.pole_order
    gf = Lf.gamma

    def L(s):
        return Lf.evaluate(np.asarray(s, dtype=complex))

    def full(s):
        s = np.asarray(s, dtype=complex)
        return (s * (s - 1)) ** m * np.exp(gf.log_value(s) - gf.log_value(s.real)) * L(s)

    # bottom edge: Gamma part is real and positive for real s
    if m:
        bottom = _tracked_phase(lambda s: s * (s - 1) * np.where(np.abs(s - 1) < 1e-9, 1, L(s)),
                                0.5 + 0j, 2.0 + 0j, n0=61)
    else:
        bottom = _tracked_phase(L, 0.5 + 0j, 2.0 + 0j)
    # right edge: Re L(2 + it) > 0, so the principal argument is continuous there
    s2 = complex(2.0, T)
    right = (m * (math.atan2(T, 2.0) + math.atan2(T, 1.0)) + T * math.log(gf.Q)
             + sum((loggamma(lam * s2 + mu) - loggamma(lam * 2.0 + mu)).imag for lam, mu in gf.pairs)
             + np.angle(complex(L(np.array([s2]))[0])) - np.angle(complex(L(np.array([2.0 + 0j]))[0])))
    # top edge: track L; the Gamma and polynomial parts are continuous in closed form
    top_L = _tracked_phase(L, s2, complex(0.5, T))
    s_end = complex(0.5, T)
    top_rest = m * (np.unwrap(np.angle([s2 * (s2 - 1), (1.25 + 1j * T) * (0.25 + 1j * T),
                                        s_end * (s_end - 1)]))[-1] - np.angle(s2 * (s2 - 1)))
    top_rest += sum((loggamma(lam * s_end + mu) - loggamma(lam * s2 + mu)).imag
                    for lam, mu in gf.pairs)
    total = (bottom + right + top_L + top_rest) / math.pi
    k = round(total)
    if abs(total - k) > 0.1:
        raise ZeroCountError(f"{Lf.label}: non-integral winding {total:.4f} at T={T}")
    return int(k)


# --------------------------------------------------------------- finders

def _complete_finder(f, count_fn, lo, hi, label, step=GRID_STEP, max_levels=6):
    """Sign-change search on [lo, hi] until the count function is matched.

    Each gap located by bisection on the count is rescanned with steps
    step/8, step/64, ... until the missing zeros there appear.
    """
    roots = _scan(f, lo, hi, step)
    target = count_fn(hi)
    while roots.size != target:
        if roots.size > target:
            raise ZeroCountError(f"{label}: found {roots.size} zeros, argument principle "
                                 f"gives {target}")
        a, b = _locate_gap(roots, count_fn, lo, hi)
        before = roots.size
        for level in range(1, max_levels + 1):
            roots = _merge(np.concatenate([roots, _scan(f, a, b, step / 8 ** level)]))
            if roots.size > before:
                break
        else:
            raise ZeroCountError(f"{label}: zeros missing between {a:.6f} and {b:.6f}", (a, b))
    return roots


def _locate_gap(roots, count_fn, lo, hi):
    """Bisect on zero index for the first height where counts disagree."""
    if roots.size == 0:
        return lo, hi
    heights = np.concatenate([[lo], 0.5 * (roots[1:] + roots[:-1]), [hi]])
    i, j = 0, heights.size - 1  # count agrees at heights[i], disagrees at heights[j]
    while j - i > 1:
        k = (i + j) // 2
        if count_fn(heights[k]) == k:
            i = k
        else:
            j = k
    return heights[i], heights[j]


def find_zeros_zeta(T, step=GRID_STEP):
    """All zeta zeros 0 < gamma <= T from sign changes of Hardy's Z."""
    if T > 1e5:
        raise ValueError("T beyond the desk-scale budget")
    Lf = lfunctions.zeta_function()
    if T < 14:
        return []
    roots = _complete_finder(lfunctions.zeta_hardy_z, lambda h: count_by_argument_principle(Lf, h),
                             10.0, float(T), "zeta", step)
    return [ZeroRecord(float(g), 1, "found", "zeta") for g in roots]


def find_zeros_dirichlet(chi, T, step=GRID_STEP):
    """Zeros of L(s, chi) on the critical line with 0 < |gamma| <= T.

    For complex chi the negative ordinates come from the conjugate character
    and are validated by its own argument-principle count.
    """
    if chi.is_principal or not chi.primitive:
        raise ValueError("need a primitive non-principal character")
    if chi.modulus > 100 or T > 1e4:
        raise ValueError("outside the desk-scale budget")
    Lf = lfunctions.dirichlet_function(chi)
    pos = _complete_finder(lambda t: lfunctions.hardy_z(chi, t),
                           lambda h: count_by_argument_principle(Lf, h), 0.0, float(T),
                           Lf.label, step)
    out = list(pos)
    if not chi.is_real:
        cc = chi.conj()
        Lc = lfunctions.dirichlet_function(cc)
        neg = _complete_finder(lambda t: lfunctions.hardy_z(cc, t),
                               lambda h: count_by_argument_principle(Lc, h), 0.0, float(T),
                               Lc.label, step)
        out = list(-neg[::-1]) + out
    return [ZeroRecord(float(g), 1, "found", Lf.label) for g in out]


def fill_store(store, Lf, T):
    """Find zeros for a zeta/Dirichlet label and record them as complete to T."""
    if Lf.label == "zeta":
        recs = find_zeros_zeta(T)
        sym = True
    else:
        recs = find_zeros_dirichlet(Lf.character, T)
        sym = Lf.character.is_real
    store.add(Lf.label, [r.gamma for r in recs], "found", symmetric=sym)
    store.complete[Lf.label] = float(T)
    return store
