"""Singularity swap quadrature for open panels and closed curves.

A near-singular integral ``int f(t) sigma(t) / R(t)^m dt`` is rewritten as
``int F(t) / g(t, t0)^m dt`` with ``F = f sigma g^m / R^m`` smooth. ``F`` is
interpolated at the quadrature nodes and the basis functions are integrated
against ``g^-m`` analytically. The standard basis is used unless its
cancellation estimate exceeds the policy tolerance, in which case m = 3, 5
are recomputed in the translated (open) or modified (closed) basis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import basis_integrals as bi
from .curves import (
    EPS,
    ComplexRoot,
    Panel,
    ParametricCurve,
    adaptive_panelize,
    bernstein_radius,
    find_root,
    find_roots,
    gauss_legendre,
)
from .errors import DomainError, ShiftTooCloseToNode
from .interp import (
    fourier_coeffs,
    gl_barycentric_eval,
    ModifiedFourierExpansion,
    modified_fourier_fast,
    modified_fourier_transform,
    resample_periodic,
    trig_interp_eval,
    vandermonde_solve,
)

DIRECT = "direct"
SSQ_STANDARD = "ssq_standard"
TSSQ = "tssq"

Numerator = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PowerTerm:
    """One ``numerator / R^m`` term of a kernel.

    ``numerator(r, sigma)`` receives ``r = x - gamma(t)`` of shape (N, 3) and
    the density samples of shape (N, p); it returns the smooth factor times
    the density, shape (N, q).
    """

    m: int
    numerator: Numerator

    def __post_init__(self):
        if self.m not in bi.POWERS:
            raise DomainError(f"power m must be one of {bi.POWERS}, got {self.m}")


def scalar_term(m: int, ftilde: Callable[[np.ndarray], np.ndarray] | None = None) -> PowerTerm:
    """``ftilde(r) * sigma / R^m`` for a scalar smooth factor (default 1)."""

    def numerator(r, sigma):
        if ftilde is None:
            return sigma
        return np.asarray(ftilde(r))[:, None] * sigma

    return PowerTerm(m, numerator)


@dataclass(frozen=True)
class Policy:
    """Dispatch settings.

    ``tol`` is the cancellation threshold above which m = 3, 5 switch basis
    (``inf`` never switches, ``0`` always does). ``near_factor`` sets the
    periodic near field ``b < near_factor * h``; ``bernstein`` is the panel
    near-field radius. ``max_growth`` bounds ``|b| * kmax`` for the Fourier
    recurrences; the engine only needs absolute accuracy there, so it allows
    more than the table default. ``stable_constant=False`` keeps the
    interpolated constant coefficient (diagnostics only).
    """

    tol: float = 1e-10
    near_factor: float = 2.0
    bernstein: float = 3.0
    upsample: int = 32
    max_growth: float = 8.0
    fast_guard: float = 0.25
    stable_constant: bool = True


# -- discretizations ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PanelDiscretization:
    """Composite Gauss-Legendre panels covering an open curve."""

    curve: ParametricCurve
    panels: tuple[Panel, ...]

    @classmethod
    def adaptive(cls, curve: ParametricCurve, eps: float = 1e-6, n: int = 16) -> "PanelDiscretization":
        return cls(curve, tuple(adaptive_panelize(curve, n=n, eps=eps)))

    @classmethod
    def uniform(cls, curve: ParametricCurve, npanels: int, n: int = 16) -> "PanelDiscretization":
        lo, hi = curve.domain
        edges = np.linspace(lo, hi, npanels + 1)
        return cls(curve, tuple(Panel((float(edges[i]), float(edges[i + 1])), n) for i in range(npanels)))

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.concatenate([p.nodes for p in self.panels])

    @cached_property
    def weights(self) -> np.ndarray:
        return np.concatenate([p.weights for p in self.panels])

    @cached_property
    def offsets(self) -> np.ndarray:
        """Index of each panel's first node, followed by the total node count."""
        return np.concatenate([[0], np.cumsum([p.n for p in self.panels])])

    def split(self, samples) -> list[np.ndarray]:
        samples = np.asarray(samples)
        out, i = [], 0
        for p in self.panels:
            out.append(samples[i : i + p.n])
            i += p.n
        return out


@dataclass(frozen=True, eq=False)
class PeriodicDiscretization:
    """``n`` equispaced nodes on [0, 2*pi) with the trapezoidal rule."""

    curve: ParametricCurve
    n: int

    def __post_init__(self):
        if self.n % 2 or self.n < 8:
            raise DomainError("periodic discretization needs an even n >= 8")

    @property
    def h(self) -> float:
        return 2 * np.pi / self.n

    @property
    def nodes(self) -> np.ndarray:
        return self.h * np.arange(self.n)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n, self.h)


# -- swap context -----------------------------------------------------------------


@dataclass(frozen=True)
class SwapContext:
    """Everything one basis evaluation needs for a single power ``m``.

    ``numerator_at_a`` is the smooth factor times the interpolated density at
    ``t = a`` (speed included), i.e. the product ``f(a) sigma(a)``.
    """

    t0: ComplexRoot
    g_kind: str
    m: int
    nodes: np.ndarray
    F_samples: np.ndarray
    numerator_at_a: np.ndarray
    sigma_at_a: np.ndarray
    R2_at_a: float


def _g2(kind: str, t, root: ComplexRoot):
    b = root.b
    # near the root t - a is exact, so the low part keeps the offset accurate
    s = (t - root.a) - root.a_lo
    if kind == "open":
        return s * s + b * b
    # |e^{it} - e^{it0}|^2 = (1-alpha)^2 + 4 alpha sin^2((t-a)/2)
    alpha = math.exp(-abs(b))
    return math.expm1(-abs(b)) ** 2 + 4 * alpha * np.sin(s / 2) ** 2


def _as_2d(v) -> np.ndarray:
    v = np.asarray(v)
    return v[:, None] if v.ndim == 1 else v


def _separation(curve, t, x) -> np.ndarray:
    """``x - gamma(t)`` formed in extended precision where the curve allows it.

    Near the target the difference cancels to the distance d, so forming it in
    double precision costs a relative error eps/d.
    """
    try:
        r = x.astype(np.longdouble)[None, :] - curve.gamma(np.asarray(t).astype(np.longdouble))
    except (TypeError, ValueError):
        return x[None, :] - curve.gamma(t)
    return r.astype(float)


def assemble_numerators(curve, x, t0: ComplexRoot, terms: Sequence[PowerTerm], nodes, density_samples,
                        sigma_at_a) -> list[SwapContext]:
    """Sample ``F = f sigma g^m / R^m`` at ``nodes`` for each term, sharing the geometry."""
    x = np.asarray(x, dtype=float)
    kind = "periodic" if curve.periodic else "open"
    nodes = np.asarray(nodes, dtype=float)
    sigma = _as_2d(density_samples)
    r = _separation(curve, nodes, x)
    R2 = np.einsum("ij,ij->i", r, r)
    speed = curve.speed(nodes)[:, None]
    ratio = _g2(kind, nodes, t0) / R2
    # r(a) moves at the curve speed, so the extended-precision a matters here
    a = np.array([t0.a_ext])
    r_a = _separation(curve, a, x)
    R2_a = float(r_a[0] @ r_a[0])
    speed_a = curve.speed(a)[:, None]
    sig_a = np.atleast_2d(sigma_at_a)
    out = []
    for term in terms:
        F = _as_2d(term.numerator(r, sigma)) * speed * (ratio ** (term.m / 2))[:, None]
        num_a = _as_2d(term.numerator(r_a, sig_a)) * speed_a
        out.append(SwapContext(t0, kind, term.m, nodes, F, num_a[0], np.atleast_1d(sigma_at_a), R2_a))
    return out


def assemble_numerator(curve, x, t0: ComplexRoot, term: PowerTerm, nodes, density_samples, sigma_at_a) -> SwapContext:
    """Sample ``F = f sigma g^m / R^m`` at ``nodes`` for the root ``t0``."""
    return assemble_numerators(curve, x, t0, [term], nodes, density_samples, sigma_at_a)[0]


def cancellation_estimate(a_vec, b_vec) -> float:
    """``eps * |a|_inf |b|_inf / |a.b|`` on the flattened real view."""
    a = np.asarray(a_vec)
    b = np.asarray(b_vec)
    if np.iscomplexobj(a) or np.iscomplexobj(b):
        # Re(sum a_k b_k) = Re(a).Re(b) - Im(a).Im(b)
        a = np.concatenate([np.real(a).ravel(), -np.imag(a).ravel()])
        b = np.concatenate([np.real(b).ravel(), np.imag(b).ravel()])
    a, b = a.ravel().astype(float), b.ravel().astype(float)
    dot = float(a @ b)
    if dot == 0.0:
        return math.inf
    return EPS * float(np.abs(a).max() * np.abs(b).max()) / abs(dot)


def _componentwise_estimate(coeffs: np.ndarray, integrals: np.ndarray) -> float:
    return max(cancellation_estimate(coeffs[:, j], integrals) for j in range(coeffs.shape[1]))


def stable_d1(ctx: SwapContext) -> np.ndarray:
    """Constant coefficient of the translated monomial expansion, from the density."""
    b = abs(ctx.t0.b)
    return ctx.numerator_at_a * (b / math.sqrt(ctx.R2_at_a)) ** ctx.m


def stable_a0(ctx: SwapContext) -> np.ndarray:
    """Constant coefficient of the modified Fourier expansion, from the density."""
    one_minus = -math.expm1(-abs(ctx.t0.b))
    return ctx.numerator_at_a * (one_minus / math.sqrt(ctx.R2_at_a)) ** ctx.m


@dataclass
class PowerResult:
    value: np.ndarray
    method: str
    cancellation_estimate: float
    quadrature_vector: np.ndarray | None = None


def ssq_open(ctx: SwapContext, basis: str = "std", stable_constant: bool = True, coeffs=None) -> PowerResult:
    """Interpolatory SSQ on one panel in local coordinates [-1, 1].

    ``coeffs`` may carry monomial coefficients of ``F`` already solved for in
    the requested basis.
    """
    t0 = ctx.t0.t0
    n = ctx.nodes.size
    if basis == "std":
        c = vandermonde_solve(ctx.nodes, ctx.F_samples).coeffs if coeffs is None else coeffs
        P = bi.monomial_std_table(t0, ctx.m, n).values
    elif basis == "translated":
        c = (vandermonde_solve(ctx.nodes, ctx.F_samples, shift=ctx.t0.a).coeffs if coeffs is None else coeffs).copy()
        if stable_constant:
            c[0] = stable_d1(ctx)
        P = bi.monomial_translated_table(t0, ctx.m, n).values
    else:
        raise DomainError(f"unknown open basis {basis!r}")
    qv = c * P[:, None]
    return PowerResult(qv.sum(axis=0), SSQ_STANDARD if basis == "std" else TSSQ,
                       _componentwise_estimate(c, P), qv)


def _std_fourier_weights(S: bi.BasisIntegralTable, n: int) -> np.ndarray:
    h = n // 2
    w = S.symmetric(-h, h - 1).astype(complex)
    # split the Nyquist mode symmetrically so real data integrate to real values
    w[0] = 0.5 * (S[-h] + S[h])
    return w


def _complex(v):
    return np.asarray(v).astype(complex)


def ssq_closed(ctx: SwapContext, basis: str = "std", policy: Policy = Policy(), mu=None) -> PowerResult:
    """Interpolatory SSQ on the full periodic grid."""
    t0 = ctx.t0.t0
    n = ctx.nodes.size
    h = n // 2
    if mu is None:
        mu = bi._mu_tables(bi._alpha_terms(t0.imag), ctx.m, h, policy.max_growth)
    if basis == "std":
        c = fourier_coeffs(ctx.F_samples).coeffs
        S = bi.fourier_std_table(ctx.t0, ctx.m, h, mu=mu)
        w = _std_fourier_weights(S, n)
        qv = c * w[:, None]
        value = qv.sum(axis=0).real
        return PowerResult(value, SSQ_STANDARD, _componentwise_estimate(c, w), qv)
    if basis != "modified":
        raise DomainError(f"unknown closed basis {basis!r}")
    if ctx.m == 1:
        raise DomainError("the modified Fourier route needs m = 3 or 5")
    a = ctx.t0.a_ext
    # The kernel weights are nearly flat in k with size ~1/b^2, so transform
    # rounding of order eps*max|F| in any b_k reaches the result undamped.
    # The coefficients are therefore computed in extended precision.
    F = np.asarray(ctx.F_samples).astype(np.clongdouble if np.iscomplexobj(ctx.F_samples) else np.longdouble)
    if policy.stable_constant:
        a0 = stable_a0(ctx)
        try:
            mf = modified_fourier_fast(F, a, np.asarray(a0).astype(np.clongdouble), guard=policy.fast_guard)
        except ShiftTooCloseToNode:
            mf = modified_fourier_transform(fourier_coeffs(F), a)
        mf = ModifiedFourierExpansion(mf.shift, a0, mf.a1, mf.b.astype(complex))
    else:
        mf = modified_fourier_transform(fourier_coeffs(F), a)
        mf = ModifiedFourierExpansion(mf.shift, _complex(mf.a0), _complex(mf.a1), mf.b.astype(complex))
    St = bi.fourier_modified_table(ctx.t0, ctx.m, h - 1, mu=mu)
    w = St.symmetric(-h + 1, h - 2)
    qv = mf.b * w[:, None]
    value = (np.asarray(mf.a0) * St.B1 + qv.sum(axis=0)).real
    full = np.concatenate([np.atleast_2d(mf.a0 * St.B1), qv])
    return PowerResult(value, TSSQ, _componentwise_estimate(np.concatenate([np.atleast_2d(mf.a0), mf.b]),
                                                             np.concatenate([[St.B1], w])), full)


# -- dispatch ---------------------------------------------------------------------


@dataclass
class EvalReport:
    """Result of :func:`evaluate` for one target.

    ``baseline`` is the same sum with the standard basis everywhere, which is
    the plain SSQ result at no extra cost. ``cone_fallbacks`` counts panels
    whose root lay in an endpoint cone, where the translated tables are not
    trusted and the standard basis is kept. ``near_methods`` holds a pair
    ``(root, {m: method})`` for each near-field evaluation: one per near panel,
    or one on a closed curve.
    """

    value: np.ndarray
    method: str
    cancellation_estimate: float
    per_power: dict = field(default_factory=dict)
    methods: dict = field(default_factory=dict)
    estimates: dict = field(default_factory=dict)
    roots: list = field(default_factory=list)
    root_failures: int = 0
    baseline: np.ndarray | None = None
    cone_fallbacks: int = 0
    near_methods: list = field(default_factory=list)


def _want_switch(m: int, estimate: float, tol: float) -> bool:
    return m in (3, 5) and (tol == 0 or estimate > tol)


def in_endpoint_cone(root: ComplexRoot) -> bool:
    """Root beyond a panel end and closer to the real axis than ``0.1 (|a| - 1)``."""
    excess = abs(root.a) - 1.0
    return excess > 0 and abs(root.b) < 0.1 * excess


def _merge_method(old: str | None, new: str) -> str:
    order = {None: -1, DIRECT: 0, SSQ_STANDARD: 1, TSSQ: 2}
    return new if order[new] > order[old] else old


def _direct(curve, terms, t, w, x, sigma):
    r = x[None, :] - curve.gamma(t)
    R2 = np.einsum("ij,ij->i", r, r)
    ws = w * curve.speed(t)
    sigma = _as_2d(sigma)
    out = {}
    for term in terms:
        num = _as_2d(term.numerator(r, sigma))
        out[term.m] = out.get(term.m, 0) + (ws / R2 ** (term.m / 2)) @ num
    return out


def _batched_solve(nodes, ctxs: list[SwapContext], shift: float) -> list[np.ndarray]:
    """Monomial coefficients for several contexts through one Vandermonde solve."""
    widths = [c.F_samples.shape[1] for c in ctxs]
    coeffs = vandermonde_solve(nodes, np.concatenate([c.F_samples for c in ctxs], axis=1), shift=shift).coeffs
    return np.split(coeffs, np.cumsum(widths)[:-1], axis=1)


def _panel_root(curve: ParametricCurve, x, s_nodes):
    pts = curve.gamma(s_nodes)
    d2 = np.einsum("ij,ij->i", pts - x, pts - x)
    j = int(np.argmin(d2))
    sp = float(curve.speed(np.array([s_nodes[j]]))[0])
    seed = complex(s_nodes[j], max(math.sqrt(d2[j]) / sp, 1e-3))
    return find_root(curve, x, seed)


# screened roots this far outside the Bernstein limit are not re-solved
_SCREEN_SLACK = 0.05


def _evaluate_open(disc: PanelDiscretization, density, terms, x, policy: Policy) -> EvalReport:
    curve = disc.curve
    up_s, _ = gauss_legendre(policy.upsample)
    rep = EvalReport(None, DIRECT, 0.0)
    t, w, off = disc.nodes, disc.weights, disc.offsets
    sigma = _as_2d(density)
    pts = curve.gamma(t)
    d2 = np.einsum("ij,ij->i", pts - x, pts - x)
    speed = curve.speed(t)
    lengths = np.add.reduceat(w * speed, off[:-1])
    dmin = np.sqrt(np.minimum.reduceat(d2, off[:-1]))
    far = np.ones(t.size, dtype=bool)
    near_panels = []
    cand = np.flatnonzero(dmin < 2 * lengths)
    # screen all candidate panels with one batched Newton solve in global
    # coordinates; only panels that may pass the Bernstein test are re-solved
    # and polished in their own local coordinates
    nearest = np.array([off[i] + int(np.argmin(d2[off[i] : off[i + 1]])) for i in cand], dtype=int)
    seeds = t[nearest] + 1j * np.maximum(np.sqrt(d2[nearest]) / speed[nearest], 1e-3)
    screened, ok = find_roots(curve, x, seeds)
    for i, tg, good in zip(cand, screened, ok):
        panel = disc.panels[i]
        lo, hi = panel.interval
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        if good and bernstein_radius((tg - mid) / half) >= policy.bernstein + _SCREEN_SLACK:
            continue
        loc = curve.restrict(lo, hi)
        root = find_root(loc, x, (tg - mid) / half) if good else None
        if root is None or not root.converged:
            root = _panel_root(loc, x, gauss_legendre(panel.n)[0])
        rep.roots.append(root)
        if not root.converged:
            rep.root_failures += 1
            continue
        if bernstein_radius(root.t0) < policy.bernstein:
            far[off[i] : off[i + 1]] = False
            near_panels.append((loc, sigma[off[i] : off[i + 1]], root))
    # panels without a usable nearby root take the direct rule in one batch
    totals = _direct(curve, terms, t[far], w[far], x, sigma[far])
    base = dict(totals)
    for loc, sig, root in near_panels:
        sig_up = gl_barycentric_eval(sig, up_s)
        sig_a = gl_barycentric_eval(sig, root.a)
        ctxs = assemble_numerators(loc, x, root, terms, up_s, sig_up, sig_a)
        std = _batched_solve(up_s, ctxs, 0.0)
        results = [ssq_open(ctx, "std", coeffs=c) for ctx, c in zip(ctxs, std)]
        for term, res in zip(terms, results):
            base[term.m] = base.get(term.m, 0) + res.value
        switch = [i for i, (term, res) in enumerate(zip(terms, results))
                  if _want_switch(term.m, res.cancellation_estimate, policy.tol)]
        if switch and in_endpoint_cone(root):
            rep.cone_fallbacks += 1
            switch = []
        if switch:
            sub = [ctxs[i] for i in switch]
            for i, c in zip(switch, _batched_solve(up_s, sub, root.a)):
                est = results[i].cancellation_estimate
                results[i] = ssq_open(ctxs[i], "translated", policy.stable_constant, coeffs=c)
                results[i].cancellation_estimate = est
        rep.near_methods.append((root, {term.m: res.method for term, res in zip(terms, results)}))
        for term, res in zip(terms, results):
            est = res.cancellation_estimate
            totals[term.m] = totals.get(term.m, 0) + res.value
            rep.methods[term.m] = _merge_method(rep.methods.get(term.m), res.method)
            rep.estimates[term.m] = max(rep.estimates.get(term.m, 0.0), est)
    return _finish(rep, totals, terms, base)


# periodic direct rule: grow the grid until the integrand's spectrum has
# decayed to this level near the Nyquist band
_SPECTRAL_TAIL = 1e-13
_MAX_PERIODIC_N = 1 << 15


def _periodic_direct(curve, terms, x, sigma, n_start):
    """Trapezoidal rule on a grid fine enough for the integrand at ``x``.

    The convergence rate is set by the complex singularity nearest the real
    axis, which may belong to the target or to the speed of the curve, so the
    grid is chosen from the computed spectrum rather than from one root.
    """
    n_src = sigma.shape[0]
    n_up = max(n_src, n_start + n_start % 2)
    while True:
        t = 2 * np.pi * np.arange(n_up) / n_up
        sig = resample_periodic(sigma, n_up) if n_up != n_src else sigma
        r = x[None, :] - curve.gamma(t)
        R2 = np.einsum("ij,ij->i", r, r)
        sp = curve.speed(t)
        samples = {}
        for term in terms:
            f = (sp / R2 ** (term.m / 2))[:, None] * _as_2d(term.numerator(r, sig))
            samples[term.m] = samples.get(term.m, 0) + f
        spec = np.abs(np.fft.rfft(np.concatenate(list(samples.values()), axis=1), axis=0))
        tail = spec[-max(2, n_up // 16):].max()
        if tail <= _SPECTRAL_TAIL * spec.max() or 2 * n_up > _MAX_PERIODIC_N:
            return {m: 2 * np.pi / n_up * f.sum(axis=0) for m, f in samples.items()}
        n_up *= 2


def _evaluate_periodic(disc: PeriodicDiscretization, density, terms, x, policy: Policy) -> EvalReport:
    curve = disc.curve
    t = disc.nodes
    sigma = _as_2d(density)
    rep = EvalReport(None, DIRECT, 0.0)
    pts = curve.gamma(t)
    d2 = np.einsum("ij,ij->i", pts - x, pts - x)
    j = int(np.argmin(d2))
    sp = float(curve.speed(t[j : j + 1])[0])
    root = find_root(curve, x, complex(t[j], max(math.sqrt(d2[j]) / sp, 1e-3)))
    rep.roots.append(root)
    near = root.converged and abs(root.b) < policy.near_factor * disc.h
    if not root.converged:
        rep.root_failures += 1
    if not near:
        # trapezoidal error decays like exp(-b n); upsample so b n >= 40
        n_up = disc.n
        if root.converged:
            n_up = max(disc.n, 2 * math.ceil(20.0 / abs(root.b)))
        return _finish(rep, _periodic_direct(curve, terms, x, sigma, n_up), terms)
    sig_a = trig_interp_eval(sigma, root.a)
    # one set of mu tables serves every power and both bases
    mu = bi._mu_tables(bi._alpha_terms(root.b), max(tt.m for tt in terms), disc.n // 2, policy.max_growth)
    totals = {}
    base = {}
    for term, ctx in zip(terms, assemble_numerators(curve, x, root, terms, t, sigma, sig_a)):
        res = ssq_closed(ctx, "std", policy, mu)
        base[term.m] = base.get(term.m, 0) + res.value
        est = res.cancellation_estimate
        if _want_switch(term.m, est, policy.tol):
            res = ssq_closed(ctx, "modified", policy, mu)
        totals[term.m] = totals.get(term.m, 0) + res.value
        rep.methods[term.m] = _merge_method(rep.methods.get(term.m), res.method)
        rep.estimates[term.m] = max(rep.estimates.get(term.m, 0.0), est)
    rep.near_methods.append((root, dict(rep.methods)))
    return _finish(rep, totals, terms, base)


def _finish(rep: EvalReport, totals, terms, base=None) -> EvalReport:
    rep.per_power = {m: np.asarray(v) for m, v in totals.items()}
    rep.value = sum(rep.per_power.values())
    base = totals if base is None else base
    rep.baseline = sum(np.asarray(base[m]) for m in rep.per_power)
    rep.method = DIRECT
    for meth in rep.methods.values():
        rep.method = _merge_method(rep.method, meth)
    rep.cancellation_estimate = max(rep.estimates.values(), default=0.0)
    return rep


def evaluate(disc, density, terms: Sequence[PowerTerm] | PowerTerm, x, policy: Policy = Policy()) -> EvalReport:
    """Evaluate ``sum_terms int numerator / R^m ds`` at target ``x``.

    ``density`` holds samples at ``disc.nodes`` (shape (N,) or (N, p)).
    """
    if isinstance(terms, PowerTerm):
        terms = [terms]
    x = np.asarray(x, dtype=float)
    if isinstance(disc, PeriodicDiscretization):
        return _evaluate_periodic(disc, density, terms, x, policy)
    if isinstance(disc, PanelDiscretization):
        return _evaluate_open(disc, density, terms, x, policy)
    raise DomainError(f"unsupported discretization {type(disc).__name__}")
