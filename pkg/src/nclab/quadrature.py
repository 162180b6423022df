"""Deterministic adaptive quadrature in one to six dimensions.

One dimension uses a 10/21-point Gauss-Kronrod pair with QUADPACK-style
error scaling; d = 2..6 uses the Genz-Malik degree-7/5 embedded rule on
hyperrectangles.  Both refine largest-error-first and bisect.

Integrands are *vectorised*: ``f(x)`` receives an array of nodes (shape
``(n,)`` in 1D, ``(n, d)`` otherwise) and returns ``n`` real or complex
values.  They must act pointwise and be free of side effects.  Node batches
are cut into fixed-size blocks before being handed to worker threads, and
totals are summed with :func:`math.fsum`, so results are bit-identical for
any thread count (see :func:`worker_count`).
"""

from __future__ import annotations

import functools
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable

import numpy as np

BLOCK_SIZE = 4096
MAX_DIM = 6

# splitting order: bisect the axis with the largest fourth difference;
# ties (within 1e-12 relative) go to the widest axis, then the lowest index
_TIE_REL = 1e-12


class QuadratureError(RuntimeError):
    pass


class IntegrandNaNError(QuadratureError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-15
    max_evals: int = 2_000_000
    cutoff: float = math.inf
    regulator: str = "gaussian"
    subdivision_limit: int = 200_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_evals <= 0 or self.subdivision_limit <= 0:
            raise ValueError("evaluation and subdivision budgets must be positive")
        if not self.cutoff > 0:
            raise ValueError("cutoff must be positive")
        if self.regulator not in ("sharp", "gaussian"):
            raise ValueError(f"unknown regulator {self.regulator!r}")

    @classmethod
    def for_dimension(cls, d: int, **kw) -> QuadratureSpec:
        """Default tolerances, loosening with dimension."""
        rel = {1: 1e-8, 2: 1e-6, 3: 1e-5}.get(d, 1e-3)
        kw.setdefault("rel_tol", rel)
        return cls(**kw)

    def with_(self, **kw) -> QuadratureSpec:
        return replace(self, **kw)

    def target(self, value: complex) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    error: float
    evals: int
    converged: bool

    def __complex__(self):
        return complex(self.value)

    @property
    def real(self) -> float:
        return float(np.real(self.value))


# --------------------------------------------------------------------------
# thread pool

def worker_count() -> int:
    """Workers for integrand evaluation, from ``NCLAB_THREADS`` (0 = auto)."""
    raw = os.environ.get("NCLAB_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("NCLAB_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


@functools.lru_cache(maxsize=None)
def _pool(n: int) -> ThreadPoolExecutor:
    return ThreadPoolExecutor(max_workers=n, thread_name_prefix="nclab-quad")


def evaluate(f: Callable, nodes: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` over ``nodes`` in fixed blocks; raise on NaN."""
    n = len(nodes)
    if n <= BLOCK_SIZE:
        out = np.asarray(f(nodes))
    else:
        blocks = [nodes[i:i + BLOCK_SIZE] for i in range(0, n, BLOCK_SIZE)]
        workers = worker_count()
        if workers > 1:
            parts = list(_pool(workers).map(f, blocks))
        else:
            parts = [f(b) for b in blocks]
        out = np.concatenate([np.asarray(p) for p in parts])
    if out.shape != (n,):
        out = np.broadcast_to(out, (n,)).copy() if out.ndim == 0 else out.reshape(n)
    if np.any(np.isnan(out)):
        raise IntegrandNaNError("integrand returned NaN")
    return out


def _fsum_complex(values) -> complex:
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return complex(math.fsum(values), 0.0)


# --------------------------------------------------------------------------
# Gauss-Kronrod construction

def _legendre(n: int) -> list:
    p0, p1 = [Fraction(1)], [Fraction(0), Fraction(1)]
    if n == 0:
        return p0
    for k in range(1, n):
        xp = [Fraction(0)] + p1
        pm = p0 + [Fraction(0)] * (len(xp) - len(p0))
        p0, p1 = p1, [((2 * k + 1) * a - k * b) / (k + 1) for a, b in zip(xp, pm)]
    return p1


def _pmul(a, b):
    r = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            r[i + j] += x * y
    return r


def _pint(a):
    return sum(c * Fraction(2, k + 1) for k, c in enumerate(a) if k % 2 == 0)


@functools.lru_cache(maxsize=None)
def gauss_kronrod(n: int = 10):
    """Nodes and weights of the ``n``-point Gauss / ``2n+1``-point Kronrod pair.

    The Stieltjes polynomial is solved for in exact rationals; roots and
    weights are then taken at 60 digits and rounded once.
    Returns ``(nodes, kronrod_weights, gauss_weights)`` where the Gauss
    weights are zero at the Kronrod-only nodes.
    """
    import mpmath

    P = [_legendre(i) for i in range(n + 2)]
    idx = [i for i in range(n + 1) if (i - n - 1) % 2 == 0]
    tests = [j for j in range(n + 1) if (j + 1) % 2 == 0]
    size = len(idx)
    M = [[_pint(_pmul(_pmul(P[n], P[i]), P[j])) for i in idx]
         + [-_pint(_pmul(_pmul(P[n], P[n + 1]), P[j]))] for j in tests]
    for c in range(size):
        piv = next(r for r in range(c, size) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        for r in range(size):
            if r != c and M[r][c] != 0:
                fac = M[r][c] / M[c][c]
                M[r] = [x - fac * y for x, y in zip(M[r], M[c])]
    coef = {i: M[k][size] / M[k][k] for k, i in enumerate(idx)}
    coef[n + 1] = Fraction(1)
    stieltjes = [Fraction(0)] * (n + 2)
    for i, ci in coef.items():
        for k, v in enumerate(P[i]):
            stieltjes[k] += ci * v

    with mpmath.workdps(60):
        def roots(poly):
            cs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(poly)]
            return sorted(mpmath.re(r) for r in mpmath.polyroots(cs, maxsteps=500, extraprec=400))

        gnodes = roots(P[n])
        nodes = sorted(gnodes + roots(stieltjes))

        def weights(xs):
            V = mpmath.matrix([[x ** k for x in xs] for k in range(len(xs))])
            mom = mpmath.matrix([mpmath.mpf(2) / (k + 1) if k % 2 == 0 else 0 for k in range(len(xs))])
            return mpmath.lu_solve(V, mom)

        wk = weights(nodes)
        wg = weights(gnodes)
        gmap = {float(x): float(w) for x, w in zip(gnodes, wg)}
        x = np.array([float(v) for v in nodes])
        wkf = np.array([float(v) for v in wk])
    wgf = np.array([gmap.get(v, 0.0) for v in x])
    return x, wkf, wgf


# --------------------------------------------------------------------------
# one dimension

def _map_interval(f, a: float, b: float):
    """Return ``(g, lo, hi)`` with ``int_a^b f = int_lo^hi g``."""
    if math.isfinite(a) and math.isfinite(b):
        return f, a, b
    if math.isfinite(a):  # [a, inf)
        def g(t):
            s = 1.0 - t
            return f(a + t / s) / (s * s)
        return g, 0.0, 1.0
    if math.isfinite(b):  # (-inf, b]
        def g(t):
            s = 1.0 - t
            return f(b - t / s) / (s * s)
        return g, 0.0, 1.0

    def g(t):  # (-inf, inf)
        s = 1.0 - t * t
        return f(t / s) * (1.0 + t * t) / (s * s)
    return g, -1.0, 1.0


_EPS = np.finfo(float).eps


def _gk_batch(g, lo: np.ndarray, hi: np.ndarray):
    x, wk, wg = gauss_kronrod(10)
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    nodes = (c[:, None] + h[:, None] * x[None, :]).ravel()
    vals = evaluate(g, nodes).reshape(len(lo), len(x))
    resk = (vals * wk).sum(axis=1) * h
    resg = (vals * wg).sum(axis=1) * h
    absh = np.abs(h)
    resabs = (np.abs(vals) * wk).sum(axis=1) * absh
    mean = resk / np.where(h == 0, 1.0, h) * 0.5
    resasc = (np.abs(vals - mean[:, None]) * wk).sum(axis=1) * absh
    err = np.abs(resk - resg)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    floor = 50.0 * _EPS * resabs
    err = np.where(resabs > np.finfo(float).tiny / (50 * _EPS), np.maximum(floor, err), err)
    return resk, err, resabs


def _adaptive_1d(g, lo: float, hi: float, spec: QuadratureSpec, initial: int = 1) -> IntegralResult:
    edges = np.linspace(lo, hi, initial + 1)
    a, b = edges[:-1], edges[1:]
    vals, errs, _ = _gk_batch(g, a, b)
    evals = 21 * len(a)
    npts = 21
    while True:
        total = _fsum_complex(vals)
        err = math.fsum(errs)
        tol = spec.target(total)
        if err <= tol:
            return IntegralResult(total, err, evals, True)
        if evals >= spec.max_evals or len(a) >= spec.subdivision_limit:
            return IntegralResult(total, err, evals, False)
        order = np.argsort(-errs, kind="stable")
        cum = np.cumsum(errs[order])
        need = err - 0.5 * tol
        nsplit = int(np.searchsorted(cum, need) + 1)
        budget = max(1, (spec.max_evals - evals) // (2 * npts))
        nsplit = max(1, min(nsplit, len(order), budget, spec.subdivision_limit - len(a)))
        pick = np.sort(order[:nsplit])
        keep = np.ones(len(a), bool)
        keep[pick] = False
        mid = 0.5 * (a[pick] + b[pick])
        if np.any((mid <= a[pick]) | (mid >= b[pick])):
            return IntegralResult(total, err, evals, False)
        na = np.concatenate([a[pick], mid])
        nb = np.concatenate([mid, b[pick]])
        nv, ne, _ = _gk_batch(g, na, nb)
        evals += 21 * len(na)
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
        # canonical order: by left endpoint
        srt = np.argsort(a, kind="stable")
        a, b, vals, errs = a[srt], b[srt], vals[srt], errs[srt]


def integrate_1d(f: Callable, a: float, b: float, spec: QuadratureSpec | None = None,
                 *, period: float | None = None, initial_intervals: int = 1) -> IntegralResult:
    """Adaptive integral of a vectorised ``f`` over ``[a, b]``.

    Infinite endpoints are mapped to a finite range by rational
    substitutions.  If ``period`` is given and the range is infinite, the
    range is instead cut into consecutive half-periods whose partial sums
    are accelerated with Wynn's epsilon algorithm; use this for slowly
    decaying oscillatory integrands such as ``cos(k x)/(k^2+w^2)``.
    """
    spec = spec or QuadratureSpec()
    a, b = float(a), float(b)
    if a == b:
        return IntegralResult(0j, 0.0, 0, True)
    if a > b:
        r = integrate_1d(f, b, a, spec, period=period, initial_intervals=initial_intervals)
        return IntegralResult(-r.value, r.error, r.evals, r.converged)
    if period is not None and not (math.isfinite(a) and math.isfinite(b)):
        return _oscillatory_tail(f, a, b, spec, float(period))
    g, lo, hi = _map_interval(f, a, b)
    return _adaptive_1d(g, lo, hi, spec, initial_intervals)


def wynn_epsilon(seq) -> tuple[complex, float]:
    """Wynn epsilon extrapolation of a sequence of partial sums.

    Returns the estimate from the deepest even column and the distance to
    the previous such estimate as an error indicator.
    """
    s = [complex(v) for v in seq]
    n = len(s)
    if n < 3:
        return s[-1], abs(s[-1] - s[-2]) if n == 2 else math.inf
    prev = [0j] * (n + 1)
    cur = list(s)
    estimates = [s[-1]]
    k = 0
    while len(cur) > 1:
        nxt = []
        for j in range(len(cur) - 1):
            d = cur[j + 1] - cur[j]
            if d == 0:
                # exact convergence in this column
                return cur[j + 1], abs(estimates[-1] - cur[j + 1]) if len(estimates) > 1 else 0.0
            nxt.append(prev[j + 1] + 1.0 / d)
        prev, cur = cur, nxt
        k += 1
        if k % 2 == 0:
            estimates.append(cur[-1])
    best = estimates[-1]
    err = abs(best - estimates[-2]) if len(estimates) > 1 else math.inf
    return best, err


def _oscillatory_tail(f, a: float, b: float, spec: QuadratureSpec, period: float,
                      max_cycles: int = 400) -> IntegralResult:
    if not math.isfinite(a) and not math.isfinite(b):
        # fold onto [0, inf) so odd parts cancel pointwise
        return _oscillatory_tail(lambda x: f(x) + f(-x), 0.0, math.inf, spec, period, max_cycles)
    if not math.isfinite(a):
        return _oscillatory_tail(lambda x: f(-x), -b, math.inf, spec, period, max_cycles)
    half = 0.5 * abs(period)
    # pieces may cancel internally: floor their tolerance at the absolute
    # mass of the first half-period, just above the roundoff floor
    _, _, mass = _gk_batch(f, np.array([a]), np.array([a + half]))
    piece_spec = spec.with_(rel_tol=min(spec.rel_tol, 1e-13),
                            abs_tol=max(spec.abs_tol * 1e-3, 1e-13 * float(mass[0])))
    partial = []
    total = 0j
    evals = 21
    ok = True
    last_est = None
    best = (math.inf, 0j)
    for j in range(max_cycles):
        r = _adaptive_1d(f, a + j * half, a + (j + 1) * half, piece_spec)
        evals += r.evals
        ok = ok and r.converged
        total += r.value
        partial.append(total)
        if len(partial) >= 8 and len(partial) % 2 == 0:
            est, err = wynn_epsilon(partial[-min(len(partial), 40):])
            if last_est is not None:
                err = max(err, abs(est - last_est))
            last_est = est
            if err < best[0]:
                best = (err, est)
            if err <= spec.target(est):
                return IntegralResult(est, err, evals, ok)
        if evals >= spec.max_evals:
            break
    return IntegralResult(best[1], best[0], evals, False)


# --------------------------------------------------------------------------
# d dimensions

@dataclass(frozen=True)
class Box:
    lower: tuple
    upper: tuple

    def __init__(self, lower, upper):
        lo = tuple(float(v) for v in np.atleast_1d(lower))
        hi = tuple(float(v) for v in np.atleast_1d(upper))
        if len(lo) != len(hi):
            raise ValueError("box bounds differ in length")
        if not all(math.isfinite(v) for v in lo + hi):
            raise ValueError("box bounds must be finite; use Ball(inf) for all of R^d")
        if any(l >= h for l, h in zip(lo, hi)):
            raise ValueError("box must have positive extent")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def cube(cls, halfwidth: float, d: int, center=None) -> Box:
        c = np.zeros(d) if center is None else np.asarray(center, float)
        return cls(c - halfwidth, c + halfwidth)

    @property
    def dim(self) -> int:
        return len(self.lower)


@dataclass(frozen=True)
class Ball:
    """Ball of ``radius`` (may be ``inf``) about ``center``; integrated in
    hyperspherical coordinates.  For an infinite radius the radial variable
    is mapped as ``r = scale * s / (1 - s)``."""

    radius: float
    center: tuple | None = None
    scale: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")


def _genz_malik(d: int):
    l2, l4, l5 = math.sqrt(9 / 70), math.sqrt(9 / 10), math.sqrt(9 / 19)
    pts, w7, w5 = [np.zeros(d)], [(12824 - 9120 * d + 400 * d * d) / 19683], \
        [(729 - 950 * d + 50 * d * d) / 729]
    for lam, a7, a5 in ((l2, 980 / 6561, 245 / 486), (l4, (1820 - 400 * d) / 19683, (265 - 100 * d) / 1458)):
        for i in range(d):
            for s in (1.0, -1.0):
                p = np.zeros(d)
                p[i] = s * lam
                pts.append(p)
                w7.append(a7)
                w5.append(a5)
    for i, j in itertools.combinations(range(d), 2):
        for si, sj in itertools.product((1.0, -1.0), repeat=2):
            p = np.zeros(d)
            p[i], p[j] = si * l4, sj * l4
            pts.append(p)
            w7.append(200 / 19683)
            w5.append(25 / 729)
    for s in itertools.product((1.0, -1.0), repeat=d):
        pts.append(l5 * np.array(s))
        w7.append(6859 / 19683 / 2 ** d)
        w5.append(0.0)
    return np.array(pts), np.array(w7), np.array(w5), (l2 / l4) ** 2


_GM_CACHE: dict = {}


def _gm(d):
    if d not in _GM_CACHE:
        _GM_CACHE[d] = _genz_malik(d)
    return _GM_CACHE[d]


def _gm_batch(g, d: int, centers: np.ndarray, halves: np.ndarray):
    pts, w7, w5, ratio = _gm(d)
    n = len(centers)
    nodes = centers[:, None, :] + halves[:, None, :] * pts[None, :, :]
    vals = evaluate(g, nodes.reshape(-1, d)).reshape(n, len(pts))
    vol = np.prod(2.0 * halves, axis=1)
    r7 = (vals * w7).sum(axis=1) * vol
    r5 = (vals * w5).sum(axis=1) * vol
    err = np.abs(r7 - r5)
    # fourth differences along each axis pick the split direction
    f0 = vals[:, 0]
    i2 = 1 + 2 * np.arange(d)
    i4 = 1 + 2 * d + 2 * np.arange(d)
    diff = np.abs(vals[:, i2] + vals[:, i2 + 1] - 2 * f0[:, None]
                  - ratio * (vals[:, i4] + vals[:, i4 + 1] - 2 * f0[:, None]))
    dmax = diff.max(axis=1, keepdims=True)
    near = diff >= dmax * (1 - _TIE_REL)
    width = np.where(near, halves, -1.0)
    split = np.argmax(width, axis=1)
    return r7, err, split


def _adaptive_nd(g, d: int, lower: np.ndarray, upper: np.ndarray, spec: QuadratureSpec,
                 initial_splits: int = 1) -> IntegralResult:
    npts = len(_gm(d)[0])
    edges = [np.linspace(l, u, initial_splits + 1) for l, u in zip(lower, upper)]
    cells = list(itertools.product(*[range(initial_splits)] * d))
    lo = np.array([[edges[i][c[i]] for i in range(d)] for c in cells])
    hi = np.array([[edges[i][c[i] + 1] for i in range(d)] for c in cells])
    centers, halves = 0.5 * (lo + hi), 0.5 * (hi - lo)
    vals, errs, split = _gm_batch(g, d, centers, halves)
    evals = npts * len(centers)
    while True:
        total = _fsum_complex(vals)
        err = math.fsum(errs)
        tol = spec.target(total)
        if err <= tol:
            return IntegralResult(total, err, evals, True)
        if evals >= spec.max_evals or len(vals) >= spec.subdivision_limit:
            return IntegralResult(total, err, evals, False)
        order = np.argsort(-errs, kind="stable")
        cum = np.cumsum(errs[order])
        nsplit = int(np.searchsorted(cum, err - 0.5 * tol) + 1)
        budget = max(1, (spec.max_evals - evals) // (2 * npts))
        nsplit = max(1, min(nsplit, len(order), budget, spec.subdivision_limit - len(vals)))
        pick = np.sort(order[:nsplit])
        keep = np.ones(len(vals), bool)
        keep[pick] = False
        c, h, ax = centers[pick], halves[pick].copy(), split[pick]
        rows = np.arange(len(pick))
        h[rows, ax] *= 0.5
        c1, c2 = c.copy(), c.copy()
        c1[rows, ax] -= h[rows, ax]
        c2[rows, ax] += h[rows, ax]
        nc = np.concatenate([c1, c2])
        nh = np.concatenate([h, h])
        nv, ne, ns = _gm_batch(g, d, nc, nh)
        evals += npts * len(nc)
        centers = np.concatenate([centers[keep], nc])
        halves = np.concatenate([halves[keep], nh])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
        split = np.concatenate([split[keep], ns])
        # canonical order: lexicographic in the cell centres
        srt = np.lexsort(centers.T[::-1])
        centers, halves, vals, errs, split = centers[srt], halves[srt], vals[srt], errs[srt], split[srt]


def _spherical(f, d: int, radius: float, center, scale: float = 1.0):
    """Integrand and box for a ball in hyperspherical coordinates
    ``(r, phi_1..phi_{d-2} in [0, pi], phi_{d-1} in [0, 2 pi])``."""
    c = np.zeros(d) if center is None else np.asarray(center, float)
    infinite = not math.isfinite(radius)

    def g(u):
        if infinite:
            s = u[:, 0]
            r = scale * s / (1.0 - s)
            jac = scale / (1.0 - s) ** 2
        else:
            r = u[:, 0]
            jac = np.ones(len(u))
        x = np.empty((len(u), d))
        sprod = np.ones(len(u))
        for j in range(d - 1):
            phi = u[:, 1 + j]
            x[:, j] = sprod * np.cos(phi)
            if j < d - 2:
                jac = jac * np.sin(phi) ** (d - 2 - j)
            sprod = sprod * np.sin(phi)
        x[:, d - 1] = sprod
        x = c + r[:, None] * x
        return f(x) * jac * r ** (d - 1)

    lower = np.zeros(d)
    upper = np.array([1.0 if infinite else radius] + [math.pi] * (d - 2) + [2 * math.pi])
    return g, lower, upper


def integrate_nd(f: Callable, d: int, domain, spec: QuadratureSpec | None = None,
                 *, initial_splits: int = 1) -> IntegralResult:
    """Adaptive cubature of a vectorised ``f: (n, d) -> (n,)``.

    ``domain`` is a :class:`Box`, a :class:`Ball`, or a number ``L`` meaning
    the cube ``[-L, L]^d``.
    """
    if not 2 <= d <= MAX_DIM:
        raise ValueError(f"dimension {d} outside 2..{MAX_DIM}")
    spec = spec or QuadratureSpec.for_dimension(d)
    if isinstance(domain, Ball):
        g, lower, upper = _spherical(f, d, domain.radius, domain.center, domain.scale)
    else:
        if not isinstance(domain, Box):
            domain = Box.cube(float(domain), d)
        if domain.dim != d:
            raise ValueError("domain dimension mismatch")
        g, lower, upper = f, np.array(domain.lower), np.array(domain.upper)
    return _adaptive_nd(g, d, lower, upper, spec, initial_splits)


def regulate(f: Callable, regulator: str, cutoff: float) -> Callable:
    """Multiply ``f`` by a UV regulator in ``|p|`` (the norm over the last axis)."""
    if not cutoff > 0:
        raise ValueError("cutoff must be positive")
    if regulator == "sharp":
        def g(p):
            p = np.asarray(p, float)
            r2 = p * p if p.ndim == 1 else np.sum(p * p, axis=-1)
            return np.where(r2 <= cutoff * cutoff, f(p), 0.0)
    elif regulator == "gaussian":
        def g(p):
            p = np.asarray(p, float)
            r2 = p * p if p.ndim == 1 else np.sum(p * p, axis=-1)
            return f(p) * np.exp(-r2 / (cutoff * cutoff))
    else:
        raise ValueError(f"unknown regulator {regulator!r}")
    return g


def regulator_radius(regulator: str, cutoff: float, tol: float = 1e-16) -> float:
    """Radius beyond which the regulated integrand is below ``tol`` of its unregulated size."""
    if regulator == "sharp":
        return cutoff
    return cutoff * math.sqrt(math.log(1.0 / tol))
