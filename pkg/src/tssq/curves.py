"""Space curves, their discretizations, and the complex squared-distance root.

Curves are given by closed-form maps that accept real, complex or
``longdouble`` parameters, so the squared distance ``R(t)^2`` can be continued
into the complex plane without any fitting step.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError, MaxDepthExceeded

EPS = np.finfo(float).eps

OPEN = "open"
PERIODIC = "periodic"


@dataclass(frozen=True, eq=False)
class ParametricCurve:
    """Analytic curve ``t -> gamma(t)`` in R^3.

    ``gamma`` and ``dgamma`` map an array of parameters of shape ``S`` to an
    array of shape ``S + (3,)``. Open curves live on [-1, 1], periodic ones
    on [0, 2*pi).
    """

    name: str
    gamma: Callable[[np.ndarray], np.ndarray]
    dgamma: Callable[[np.ndarray], np.ndarray]
    domain_kind: str = OPEN

    @property
    def periodic(self) -> bool:
        return self.domain_kind == PERIODIC

    @property
    def domain(self) -> tuple[float, float]:
        return (0.0, 2 * np.pi) if self.periodic else (-1.0, 1.0)

    def speed(self, t) -> np.ndarray:
        return np.linalg.norm(self.dgamma(np.asarray(t, dtype=float)), axis=-1)

    def restrict(self, lo: float, hi: float) -> "ParametricCurve":
        """Reparametrize the piece over [lo, hi] onto [-1, 1]."""
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        g, dg = self.gamma, self.dgamma
        return ParametricCurve(
            name=f"{self.name}[{lo:.6g},{hi:.6g}]",
            gamma=lambda s: g(mid + half * np.asarray(s)),
            dgamma=lambda s: half * dg(mid + half * np.asarray(s)),
            domain_kind=OPEN,
        )


def _stack(*comps):
    return np.stack(np.broadcast_arrays(*comps), axis=-1)


def line() -> ParametricCurve:
    return ParametricCurve(
        "line",
        lambda t: _stack(t, 0 * t, 0 * t),
        lambda t: _stack(1 + 0 * t, 0 * t, 0 * t),
    )


def circle(radius: float = 1.0) -> ParametricCurve:
    r = radius
    return ParametricCurve(
        "circle",
        lambda t: _stack(r * np.cos(t), r * np.sin(t), 0 * t),
        lambda t: _stack(-r * np.sin(t), r * np.cos(t), 0 * t),
        PERIODIC,
    )


def helix() -> ParametricCurve:
    p = np.pi
    return ParametricCurve(
        "helix",
        lambda t: _stack(np.cos(p * t), np.sin(p * t), t),
        lambda t: _stack(-p * np.sin(p * t), p * np.cos(p * t), 1 + 0 * t),
    )


def starfish3d() -> ParametricCurve:
    """Deformed thin starfish, a closed curve with five-fold radial wobble."""

    def gamma(t):
        rad = 1 + 0.3 * np.cos(5 * t)
        return _stack(rad * np.cos(t), rad * np.sin(t), 2 * np.sin(t))

    def dgamma(t):
        rad = 1 + 0.3 * np.cos(5 * t)
        drad = -1.5 * np.sin(5 * t)
        return _stack(
            drad * np.cos(t) - rad * np.sin(t),
            drad * np.sin(t) + rad * np.cos(t),
            2 * np.cos(t),
        )

    return ParametricCurve("starfish3d", gamma, dgamma, PERIODIC)


TANGLE_SEED = 20250101
TANGLE_MODES = 24
TANGLE_DECAY = 16.0
TANGLE_FREQUENCY = 0.8 * np.pi


@lru_cache(maxsize=None)
def _tangle_coefficients(seed: int, modes: int):
    rng = np.random.default_rng(seed)
    k = np.arange(1, modes + 1)
    decay = np.exp(-k / TANGLE_DECAY)
    cos_c = rng.standard_normal((3, modes)) * decay
    sin_c = rng.standard_normal((3, modes)) * decay
    return k * TANGLE_FREQUENCY, cos_c, sin_c


def tangle(seed: int = TANGLE_SEED, modes: int = TANGLE_MODES) -> ParametricCurve:
    """Long tangled filament on [-1, 1] built from random damped Fourier modes.

    Each coordinate is ``sum_k A_k cos(w_k t) + B_k sin(w_k t)`` with
    ``w_k = 0.8 k pi`` and coefficients ``N(0, 1) * exp(-k/16)`` drawn from a
    PCG64 stream seeded with ``seed``. The frequencies are not multiples of
    ``pi``, so the two ends do not meet. With the defaults the curve has arc
    length about 186 and needs 64 (eps=1e-4) or 92 (eps=1e-6) sixteen-point
    panels.
    """
    w, cos_c, sin_c = _tangle_coefficients(seed, modes)

    def trig(t):
        # cos(w_k t), sin(w_k t) from powers of e^{+-i w_1 t}: two trig calls per point
        t = np.asarray(t)
        z = np.cos(w[0] * t) + 1j * np.sin(w[0] * t)
        shape = t.shape + w.shape
        up = np.cumprod(np.broadcast_to(z[..., None], shape), axis=-1)
        if not np.iscomplexobj(t):
            return up.real, up.imag
        # far off the real axis the powers overflow; callers see inf, not a warning
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            down = np.cumprod(np.broadcast_to(1 / z[..., None], shape), axis=-1)
            return (up + down) / 2, (up - down) / 2j

    def gamma(t):
        c, s = trig(t)
        return c @ cos_c.T + s @ sin_c.T

    def dgamma(t):
        c, s = trig(t)
        return (c * w) @ sin_c.T - (s * w) @ cos_c.T

    return ParametricCurve("tangle", gamma, dgamma)


CURVES: dict[str, Callable[[], ParametricCurve]] = {
    "line": line,
    "circle": circle,
    "helix": helix,
    "starfish3d": starfish3d,
    "tangle": tangle,
}


def get_curve(name: str) -> ParametricCurve:
    try:
        return CURVES[name]()
    except KeyError:
        raise DomainError(f"unknown curve {name!r}; choose from {sorted(CURVES)}") from None


# -- discretizations ---------------------------------------------------------


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True, eq=False)
class Panel:
    """Gauss-Legendre panel over ``interval`` in the global parameter."""

    interval: tuple[float, float]
    n: int = 16
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        lo, hi = self.interval
        x, w = gauss_legendre(self.n)
        object.__setattr__(self, "nodes", 0.5 * (lo + hi) + 0.5 * (hi - lo) * x)
        object.__setattr__(self, "weights", 0.5 * (hi - lo) * w)

    @property
    def mid(self) -> float:
        return 0.5 * (self.interval[0] + self.interval[1])

    @property
    def half(self) -> float:
        return 0.5 * (self.interval[1] - self.interval[0])

    def to_local(self, t):
        return (t - self.mid) / self.half

    def to_global(self, s):
        return self.mid + self.half * s

    def upsampled(self, n: int | None = None) -> "Panel":
        return Panel(self.interval, n or 2 * self.n)


@dataclass(frozen=True, eq=False)
class PeriodicGrid:
    n: int
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n <= 0 or self.n % 2:
            raise DomainError(f"periodic grid needs a positive even n, got {self.n}")
        object.__setattr__(self, "nodes", 2 * np.pi * np.arange(self.n) / self.n)

    @property
    def h(self) -> float:
        return 2 * np.pi / self.n

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n, self.h)


def legendre_coeffs(samples) -> np.ndarray:
    """Legendre coefficients from samples at the standard n-point GL nodes.

    Exact (up to rounding) for polynomial data of degree < n. Works along the
    first axis, so vector-valued samples of shape (n, p) are accepted.
    """
    samples = np.asarray(samples)
    n = samples.shape[0]
    x, w = gauss_legendre(n)
    V = np.polynomial.legendre.legvander(x, n - 1)  # (n, n): P_k(x_j)
    scale = (2 * np.arange(n) + 1) / 2
    return scale[(...,) + (None,) * (samples.ndim - 1)] * np.tensordot(
        V * w[:, None], samples, axes=(0, 0)
    )


def panel_resolved(curve: ParametricCurve, interval, n: int, eps: float) -> bool:
    lo, hi = interval
    x, _ = gauss_legendre(n)
    s = curve.speed(0.5 * (lo + hi) + 0.5 * (hi - lo) * x)
    coef = np.abs(legendre_coeffs(s))
    return max(coef[-2], coef[-1]) < eps * coef.max()


def adaptive_panelize(
    curve: ParametricCurve,
    n: int = 16,
    eps: float = 1e-6,
    interval: tuple[float, float] = (-1.0, 1.0),
    max_depth: int = 40,
) -> list[Panel]:
    """Bisect until the speed's trailing Legendre coefficients fall below eps."""
    if curve.periodic:
        raise DomainError("adaptive_panelize expects an open curve")
    if n < 4 or eps <= 0:
        raise DomainError("need n >= 4 and eps > 0")

    def split(lo, hi, depth):
        if panel_resolved(curve, (lo, hi), n, eps):
            return [Panel((lo, hi), n)]
        if depth >= max_depth:
            raise MaxDepthExceeded(
                f"panel [{lo}, {hi}] still unresolved after {max_depth} bisections"
            )
        mid = 0.5 * (lo + hi)
        return split(lo, mid, depth + 1) + split(mid, hi, depth + 1)

    return split(float(interval[0]), float(interval[1]), 0)


def bernstein_radius(z) -> np.ndarray:
    """Radius rho of the Bernstein ellipse (foci +-1) passing through z."""
    z = np.asarray(z, dtype=complex)
    w = z + np.sqrt(z - 1) * np.sqrt(z + 1)
    return np.maximum(np.abs(w), 1 / np.abs(w))


# -- squared distance and its complex root -----------------------------------


def squared_distance(curve: ParametricCurve, t, x) -> np.ndarray:
    """``R(t)^2`` as a sum of squared component differences (no modulus)."""
    diff = curve.gamma(t) - np.asarray(x)
    return (diff * diff).sum(axis=-1)


# rounding-noise multiplier for Newton steps and residuals of R^2
_NOISE = 256


@dataclass(frozen=True)
class ComplexRoot:
    t0: complex
    converged: bool
    residual: float
    iterations: int = 0
    # low-order part of Re(t0): the real part is a + a_lo to extended precision
    a_lo: float = 0.0

    @property
    def a(self) -> float:
        return self.t0.real

    @property
    def a_ext(self) -> np.longdouble:
        return np.longdouble(self.t0.real) + np.longdouble(self.a_lo)

    @property
    def b(self) -> float:
        return self.t0.imag


def find_root(
    curve: ParametricCurve,
    x,
    t_init: complex,
    tol_root: float = 1e-26,
    tol_step: float = 1e-14,
    max_iter: int = 30,
) -> ComplexRoot:
    """Newton's method on ``R(t)^2 = 0`` in the complex parameter plane.

    The returned root has a non-negative imaginary part. ``converged`` is set
    when the last Newton step is below ``tol_step`` (relative to ``max(1, |t|)``)
    or within the rounding noise of ``R^2`` divided by its derivative, and the
    residual is below ``tol_root`` or, failing that, below the rounding floor
    of evaluating the sum of squares at the root.
    """
    x = np.asarray(x, dtype=float)
    t = complex(t_init)
    it = 0
    with np.errstate(all="ignore"):
        for it in range(1, max_iter + 1):
            g = curve.gamma(t)
            diff = g - x
            r2 = complex((diff * diff).sum())
            dr2 = complex(2 * (diff * curve.dgamma(t)).sum())
            if not np.isfinite(r2) or not np.isfinite(dr2) or abs(dr2) < 1e-300:
                break
            step = r2 / dr2
            t -= step
            # a step inside the rounding noise of r2 cannot be improved in double
            noise = _NOISE * EPS * float(((np.abs(g) + np.abs(x)) * np.abs(diff)).sum()) / abs(dr2)
            small = abs(step) <= max(tol_step * max(1.0, abs(t)), noise)
            if small or it == max_iter:
                g = curve.gamma(t)
                diff = g - x
                res = abs(complex((diff * diff).sum()))
                floor = _NOISE * EPS * float(((np.abs(g) + np.abs(x)) * np.abs(diff)).sum())
                # out of iterations: accept a root whose steps are already tiny
                ok = res <= max(tol_root, floor) and (small or abs(step) <= 1e-10 * max(1.0, abs(t)))
                if ok:
                    t, a_lo = _polish(curve, x, t)
                    return _normalized(t, ok, res, it, a_lo)
                return _normalized(t, ok, res, it)
        res = abs(complex(squared_distance(curve, t, x))) if np.isfinite(t) else np.inf
    return _normalized(t, False, res, it)


def find_roots(curve: ParametricCurve, x, t_init, tol_step: float = 1e-14, max_iter: int = 30):
    """Vectorized Newton iteration for many starting points at once.

    A screening variant of :func:`find_root`: returns the roots (conjugated
    into the upper half plane) and a mask of iterations whose last step fell
    below the step tolerance or the rounding noise. No residual check and no
    extended-precision polish are done.
    """
    x = np.asarray(x, dtype=float)
    t = np.array(t_init, dtype=complex).ravel()
    active = np.ones(t.size, dtype=bool)
    done = np.zeros(t.size, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            g = curve.gamma(t[idx])
            diff = g - x
            r2 = (diff * diff).sum(-1)
            dr2 = 2 * (diff * curve.dgamma(t[idx])).sum(-1)
            bad = ~np.isfinite(r2) | ~np.isfinite(dr2) | (np.abs(dr2) < 1e-300)
            step = np.where(bad, 0, r2 / np.where(bad, 1, dr2))
            t[idx] -= step
            noise = _NOISE * EPS * ((np.abs(g) + np.abs(x)) * np.abs(diff)).sum(-1) / np.abs(dr2)
            small = np.abs(step) <= np.maximum(tol_step * np.maximum(1.0, np.abs(t[idx])), noise)
            done[idx[small & ~bad]] = True
            active[idx[small | bad]] = False
    t = np.where(t.imag < 0, t.conj(), t)
    return t, done & np.isfinite(t)


def _polish(curve: ParametricCurve, x: np.ndarray, t: complex, steps: int = 2) -> tuple[complex, float]:
    """Newton steps in extended precision on a converged root.

    A root with imaginary part b carries an absolute rounding error of about
    eps*|t| from double arithmetic, i.e. a relative error eps*|t|/b that the
    near-singular integrals amplify directly. Returns the root rounded to
    double and the low part of its real part. Curves that cannot be evaluated
    in extended precision leave the root unchanged.
    """
    xl = x.astype(np.longdouble)
    tl = np.clongdouble(t)
    try:
        with np.errstate(all="ignore"):
            for _ in range(steps):
                diff = curve.gamma(tl) - xl
                r2 = (diff * diff).sum()
                dr2 = 2 * (diff * curve.dgamma(tl)).sum()
                tl = tl - r2 / dr2
    except (TypeError, ValueError):
        return t, 0.0
    if not np.isfinite(tl) or abs(complex(tl) - t) > 1e-8 * max(1.0, abs(t)):
        return t, 0.0
    hi = complex(tl)
    return hi, float(tl.real - np.longdouble(hi.real))


def _normalized(t: complex, converged: bool, residual: float, it: int, a_lo: float = 0.0) -> ComplexRoot:
    if t.imag < 0:
        t = t.conjugate()
    return ComplexRoot(t, bool(converged), float(residual), it, a_lo)


def nearest_node(points: np.ndarray, x) -> tuple[int, float]:
    d2 = ((points - np.asarray(x)) ** 2).sum(-1)
    j = int(np.argmin(d2))
    return j, float(np.sqrt(d2[j]))
