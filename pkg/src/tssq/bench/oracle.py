"""Reference integrators used to score the quadrature methods.

The curve oracle is an adaptive composite Gauss-Legendre rule evaluated in
extended precision (``np.longdouble``), graded geometrically toward the
closest point of the curve. It is run at two refinement levels and only
trusted when they agree. The prototype integral on a straight segment also
has a series oracle built from the closed-form translated integrals in
multiprecision arithmetic.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Sequence

import mpmath as mp
import numpy as np
from scipy.optimize import minimize_scalar

from ..curves import ParametricCurve, panel_resolved
from ..errors import OracleNotConverged
from ..ssq import PowerTerm

LD = np.longdouble
MIN_DISTANCE = 1e-9
_EPS_LD = np.finfo(LD).eps

Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]


@lru_cache(maxsize=None)
def gauss_legendre_ld(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights polished to extended precision."""
    x = np.polynomial.legendre.leggauss(n)[0].astype(LD)
    for _ in range(3):
        p0, p1 = np.ones_like(x), x.copy()
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = n * (x * p1 - p0) / (x * x - 1)
        x = x - p1 / dp
    p0, p1 = np.ones_like(x), x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1)
    w = 2 / ((1 - x * x) * dp * dp)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def closest_point(curve: ParametricCurve, x, samples: int = 4096, candidates: int = 4,
                  seed_t=None, seed_pts=None) -> tuple[float, float]:
    """Global minimizer of ``|gamma(t) - x|`` by dense sampling plus Brent refinement.

    The ``candidates`` best local minima of the sampled distance are refined.
    ``seed_t``/``seed_pts`` may supply sorted samples and their curve points.
    """
    x = np.asarray(x, dtype=float)
    lo, hi = curve.domain
    if seed_t is not None:
        t = np.asarray(seed_t, dtype=float)
        d2 = ((seed_pts - x) ** 2).sum(-1)
        return _refine_minima(curve, x, t, d2, candidates)
    if curve.periodic:
        t = np.linspace(lo, hi, samples, endpoint=False)
    else:
        t = np.linspace(lo, hi, samples + 1)
    d2 = ((curve.gamma(t) - x) ** 2).sum(-1)
    return _refine_minima(curve, x, t, d2, candidates)


def _refine_minima(curve, x, t, d2, candidates):
    lo, hi = curve.domain
    if curve.periodic:
        is_min = (d2 <= np.roll(d2, 1)) & (d2 <= np.roll(d2, -1))
    else:
        pad = np.concatenate([[np.inf], d2, [np.inf]])
        is_min = (d2 <= pad[:-2]) & (d2 <= pad[2:])
    idx = np.flatnonzero(is_min)
    idx = idx[np.argsort(d2[idx])][:candidates]
    best_t, best_d2 = float(t[idx[0]]), float(d2[idx[0]])

    def f(s):
        return float(((curve.gamma(np.array(s)) - x) ** 2).sum())

    for i in idx:
        # bracket by the neighbouring samples (wrapping on periodic curves)
        if curve.periodic:
            a = t[i - 1] - (hi - lo if i == 0 else 0)
            b = t[(i + 1) % t.size] + (hi - lo if i == t.size - 1 else 0)
        else:
            a, b = t[max(i - 1, 0)], t[min(i + 1, t.size - 1)]
        if not curve.periodic:
            a, b = max(a, lo), min(b, hi)
        res = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": 1e-15 * max(1.0, abs(t[i]))})
        if res.fun < best_d2:
            best_t, best_d2 = float(res.x), float(res.fun)
    if curve.periodic:
        best_t = best_t % (2 * np.pi)
    return best_t, math.sqrt(max(best_d2, 0.0))


def terms_integrand(terms: Sequence[PowerTerm]) -> Integrand:
    """Full integrand ``sum_m numerator_m / R^m`` built from power terms."""

    def integrand(r, sigma):
        R2 = (r * r).sum(-1)
        out = 0
        for term in terms:
            num = term.numerator(r, sigma)
            num = num[:, None] if num.ndim == 1 else num
            out = out + num / (R2 ** (LD(term.m) / 2))[:, None]
        return out

    return integrand


def _panel_values(curve, x, integrand, density, lo, hi, n):
    s, w = gauss_legendre_ld(n)
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    t = (mid[:, None] + half[:, None] * s).ravel()
    r = x - curve.gamma(t)
    dg = curve.dgamma(t)
    speed = np.sqrt((dg * dg).sum(-1))
    vals = integrand(r, density(t)) * speed[:, None]
    vals = vals.reshape(lo.size, n, -1)
    value = np.einsum("j,ijk->ik", w, vals) * half[:, None]
    size = np.einsum("j,ijk->i", w, np.abs(vals)) * np.abs(half)
    return value, size


def _graded_breaks(lo: float, hi: float, a: float, w0: float, ratio: float = 2.0) -> np.ndarray:
    """Breakpoints on [lo, hi] that shrink geometrically toward ``a``."""
    pts = [lo, hi]
    if lo < a < hi:
        pts.append(a)
    for sign in (-1, 1):
        s = w0
        while True:
            p = a + sign * s
            if not lo < p < hi:
                break
            pts.append(p)
            s *= ratio
    return np.unique(np.array(pts, dtype=LD))


def _adaptive(curve, x, integrand, density, lo, hi, n, rel_tol, max_intervals, a, w0, scale=LD(0)):
    tmag = LD(1) + np.abs(LD(a))
    coarse, size = _panel_values(curve, x, integrand, density, lo, hi, n)
    scale = max(scale, np.abs(coarse.sum(0)).max())
    total = 0
    done = 0
    while lo.size:
        mid = (lo + hi) / 2
        left, lsize = _panel_values(curve, x, integrand, density, lo, mid, n)
        right, rsize = _panel_values(curve, x, integrand, density, mid, hi, n)
        fine = left + right
        err = np.abs(fine - coarse).max(axis=1)
        # rounding floor: node positions carry an absolute error ~eps*|t|, which
        # the integrand amplifies by 1/(distance to the peak)
        reach = np.maximum(np.minimum(np.abs(lo - a), np.abs(hi - a)), LD(w0))
        reach[(lo <= a) & (a <= hi)] = w0
        floor = _EPS_LD * size * (64 + 8 * tmag / reach)
        ok = err <= np.maximum(rel_tol * max(scale, LD(1e-300)), floor)
        total = total + fine[ok].sum(0)
        done += int(ok.sum())
        bad = ~ok
        lo, hi = np.concatenate([lo[bad], mid[bad]]), np.concatenate([mid[bad], hi[bad]])
        coarse = np.concatenate([left[bad], right[bad]])
        size = np.concatenate([lsize[bad], rsize[bad]])
        if done + lo.size > max_intervals:
            raise OracleNotConverged("interval budget exhausted")
    return total


def attainable_tolerance(a: float, w0: float) -> float:
    """Relative accuracy the extended-precision rule can certify near a peak of width w0."""
    return float(64 * _EPS_LD * (1 + abs(a)) / w0)


class _Grid:
    """Fixed composite Gauss-Legendre rule of one order, cached in extended precision."""

    def __init__(self, curve: ParametricCurve, density, edges: np.ndarray, n: int):
        s, w = gauss_legendre_ld(n)
        lo, hi = edges[:-1], edges[1:]
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        self.t = (mid[:, None] + half[:, None] * s).ravel()
        self.pts = curve.gamma(self.t)
        self.ws = (half[:, None] * w).ravel() * curve.speed(self.t).astype(LD)
        self.dens = np.asarray(density(self.t))
        self.n = n

    def panel_sum(self, x, integrand, mask) -> np.ndarray:
        idx = np.repeat(mask, self.n)
        vals = integrand(x - self.pts[idx], self.dens[idx])
        vals = vals[:, None] if vals.ndim == 1 else vals
        return (self.ws[idx][:, None] * vals).sum(0)


def _resolved_edges(curve: ParametricCurve, panels: int, eps: float = 1e-12) -> np.ndarray:
    """Uniform panel edges, bisected until the speed is resolved by 24 points."""
    lo, hi = curve.domain
    todo = list(zip(np.linspace(lo, hi, panels + 1)[:-1], np.linspace(lo, hi, panels + 1)[1:]))
    out = []
    while todo:
        a, b = todo.pop()
        if b - a < 1e-6 * (hi - lo) or panel_resolved(curve, (a, b), 24, eps):
            out.append(a)
        else:
            todo += [(a, (a + b) / 2), ((a + b) / 2, b)]
    return np.array(sorted(out) + [hi], dtype=LD)


class Oracle:
    """Reference integrator for one curve, integrand and density.

    The parameter domain is split into ``panels`` equal panels, bisected where
    the speed is not resolved. Panels farther than ``far_factor`` panel lengths
    from the target are summed with cached 16- and 24-point rules; contiguous
    blocks of nearer panels are refined adaptively with breakpoints graded
    toward the closest point. The two orders give the two refinement levels
    that must agree.

    ``density`` must accept extended-precision parameter arrays.
    """

    def __init__(
        self,
        curve: ParametricCurve,
        integrand: Integrand | Sequence[PowerTerm],
        density: Callable[[np.ndarray], np.ndarray],
        tol: float = 1e-13,
        panels: int = 256,
        far_factor: float = 3.0,
        max_intervals: int = 20000,
    ):
        self.curve = curve
        self.integrand = integrand if callable(integrand) else terms_integrand(integrand)
        self.density = density
        self.tol = tol
        self.max_intervals = max_intervals
        self.far_factor = far_factor
        self.period = float(curve.domain[1] - curve.domain[0]) if curve.periodic else None
        self.edges = _resolved_edges(curve, panels)
        self.grids = (_Grid(curve, density, self.edges, 16), _Grid(curve, density, self.edges, 24))
        M = self.edges.size - 1
        self.lengths = self.grids[0].ws.reshape(M, 16).sum(1).astype(float)
        self._probe = self.grids[0].pts.astype(float)

    def closest(self, x) -> tuple[float, float]:
        """Closest curve parameter and distance, seeded from the cached nodes."""
        return closest_point(self.curve, x, seed_t=self.grids[0].t.astype(float), seed_pts=self._probe)

    def _blocks(self, near: np.ndarray) -> list[tuple[LD, LD]]:
        """Parameter intervals of maximal runs of near panels, unwrapped on periodic curves."""
        M = near.size
        idx = np.flatnonzero(near)
        cut = np.flatnonzero(np.diff(idx) > 1)
        runs = [[idx[i], idx[j]] for i, j in zip(np.r_[0, cut + 1], np.r_[cut, idx.size - 1])]
        span = [[self.edges[i], self.edges[j + 1]] for i, j in runs]
        if self.period is not None and len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == M - 1:
            span[0][0] = span[-1][0] - LD(self.period)
            span.pop()
        return span

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        a, d = self.closest(x)
        if d < MIN_DISTANCE:
            raise OracleNotConverged(f"target distance {d:.3g} below the oracle floor {MIN_DISTANCE}")
        xl = x.astype(LD)
        w0 = 0.5 * d / float(self.curve.speed(np.array([a]))[0])
        M = self.lengths.size
        dmin = np.sqrt(((self._probe - x) ** 2).sum(-1)).reshape(M, 16).min(1)
        near = dmin < self.far_factor * self.lengths
        near[min(max(int(np.searchsorted(self.edges, LD(a), side="right")) - 1, 0), M - 1)] = True
        los, his = [], []
        for lo, hi in self._blocks(near):
            # the closest point, moved into this block's unwrapped range
            ac = LD(a)
            if self.period is not None and not lo <= ac <= hi:
                ac = ac - LD(self.period) if ac > hi else ac + LD(self.period)
            br = _graded_breaks(lo, hi, ac, w0)
            los.append(br[:-1])
            his.append(br[1:])
        lo, hi = np.concatenate(los), np.concatenate(his)
        levels = []
        for grid, n, rel in zip(self.grids, (16, 24), (LD(1e-16), LD(1e-18))):
            total = grid.panel_sum(xl, self.integrand, ~near)
            total = total + _adaptive(self.curve, xl, self.integrand, self.density, lo, hi, n, rel,
                                      self.max_intervals, a, w0, np.abs(total).max())
            levels.append(total)
        coarse, fine = levels
        scale = np.abs(fine).max()
        if not np.abs(fine - coarse).max() <= max(self.tol, attainable_tolerance(a, w0)) * scale:
            raise OracleNotConverged(
                f"refinement levels differ by {float(np.abs(fine - coarse).max() / scale):.2e}"
            )
        return fine.astype(float)


def oracle_integral(
    curve: ParametricCurve,
    x,
    integrand: Integrand | Sequence[PowerTerm],
    density: Callable[[np.ndarray], np.ndarray],
    tol: float = 1e-13,
    max_intervals: int = 20000,
) -> np.ndarray:
    """Reference value of ``int integrand(x - gamma(t), density(t)) |gamma'(t)| dt``.

    ``density`` must accept extended-precision parameter arrays. Raises
    :class:`OracleNotConverged` below ``MIN_DISTANCE`` or when two refinement
    levels disagree by more than ``tol`` relative to the max norm. Very close
    targets relax ``tol`` to the level set by rounding of the parameter. For
    many targets on one curve build an :class:`Oracle` once and call it.
    """
    return Oracle(curve, integrand, density, tol=tol, max_intervals=max_intervals)(x)


# -- prototype integral on [-1, 1] ----------------------------------------------


def _translated_mp(a, b, m: int, kmax: int) -> list:
    """Translated monomial integrals in multiprecision, k = 1..kmax."""
    t1, t2 = -1 - a, 1 - a
    u1, u2 = mp.sqrt(t1**2 + b**2), mp.sqrt(t2**2 + b**2)
    tabs = {}
    for p in (1, 3, 5):
        if p > m:
            break
        if p == 1:
            P = [mp.log((t2 + u2) / (t1 + u1)), u2 - u1]
            for k in range(2, kmax):
                P.append((t2 ** (k - 1) * u2 - t1 ** (k - 1) * u1 - (k - 1) * b**2 * P[k - 2]) / k)
        else:
            if p == 3:
                P = [(t2 / u2 - t1 / u1) / b**2, 1 / u1 - 1 / u2]
            else:
                P = [(t2 / u2**3 - t1 / u1**3 + 2 * tabs[3][0]) / (3 * b**2), (1 / u1**3 - 1 / u2**3) / 3]
            for k in range(2, kmax):
                P.append(tabs[p - 2][k - 2] - b**2 * P[k - 2])
        tabs[p] = P
    return tabs[m]


def prototype_series_oracle(a: float, b: float, m: int, delta: float, dps: int = 60, terms: int = 70) -> float:
    """``int_{-1}^{1} ((t-a)^2 + delta) sin(t + 1.53) / |t - t0|^m dt`` by Taylor series.

    The density is expanded about ``a`` and each power is integrated with the
    exact translated integrals in ``dps``-digit arithmetic.
    """
    with mp.workdps(dps):
        A, B, D = mp.mpf(a), mp.mpf(b), mp.mpf(delta)
        P = _translated_mp(A, B, m, terms + 3)
        phase = A + mp.mpf("1.53")
        total = mp.mpf(0)
        fact = mp.mpf(1)
        for j in range(terms):
            if j:
                fact *= j
            coef = mp.sin(phase + j * mp.pi / 2) / fact
            total += coef * (P[j + 2] + D * P[j])
        return float(total)


def prototype_quad_oracle(a: float, b: float, m: int, delta: float, dps: int = 40) -> float:
    """The same prototype integral by tanh-sinh quadrature split around ``a``."""
    with mp.workdps(dps):
        A, B, D = mp.mpf(a), mp.mpf(b), mp.mpf(delta)
        f = lambda t: ((t - A) ** 2 + D) * mp.sin(t + mp.mpf("1.53")) / ((t - A) ** 2 + B**2) ** (mp.mpf(m) / 2)
        pts = [mp.mpf(-1)]
        for s in (-100, -10, -1, 0, 1, 10, 100):
            p = A + s * B
            if -1 < p < 1:
                pts.append(p)
        pts.append(mp.mpf(1))
        return float(mp.quad(f, sorted(set(pts))))
