"""Interpolation in monomial, Fourier and modified Fourier bases.

All coefficient routines operate along the first axis so that vector-valued
samples of shape ``(n, p)`` are handled componentwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft

from .errors import DomainError, ShiftTooCloseToNode


@dataclass(frozen=True)
class MonomialExpansion:
    """``F(t) ~ sum_k coeffs[k] (t - shift)**k``, k = 0..n-1."""

    shift: float
    coeffs: np.ndarray

    def __call__(self, t):
        s = np.asarray(t, dtype=float) - self.shift
        out = np.zeros(np.shape(s) + self.coeffs.shape[1:], dtype=self.coeffs.dtype)
        for c in self.coeffs[::-1]:
            out = out * (s[..., None] if self.coeffs.ndim > 1 else s) + c
        return out


def vandermonde_solve(nodes, samples, shift: float = 0.0) -> MonomialExpansion:
    """Björck-Pereyra solve for coefficients in powers of ``(t - shift)``."""
    x = np.asarray(nodes, dtype=float) - shift
    n = x.size
    if n > 64:
        raise DomainError(f"vandermonde_solve supports n <= 64, got {n}")
    c = np.array(samples, dtype=np.result_type(samples, float), copy=True)
    col = (slice(None),) + (None,) * (c.ndim - 1)
    # Newton divided differences
    for k in range(n - 1):
        c[k + 1 :] = (c[k + 1 :] - c[k:-1]) / (x[k + 1 :] - x[: n - k - 1])[col]
    # Newton form -> monomial form
    for k in range(n - 2, -1, -1):
        c[k:-1] = c[k:-1] - x[k] * c[k + 1 :]
    return MonomialExpansion(float(shift), c)


def barycentric_weights(nodes) -> np.ndarray:
    x = np.asarray(nodes, dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    # scale by the half-width to keep the products in range for large n
    diff *= 2.0 / (x.max() - x.min())
    w = 1.0 / diff.prod(axis=1)
    return w / np.abs(w).max()


@lru_cache(maxsize=None)
def _gl_barycentric_weights(n: int) -> np.ndarray:
    from .curves import gauss_legendre

    w = barycentric_weights(gauss_legendre(n)[0])
    w.setflags(write=False)
    return w


def barycentric_eval(nodes, samples, t_query, weights=None):
    """Second-form barycentric interpolation at ``t_query`` (scalar or array)."""
    x = np.asarray(nodes, dtype=float)
    f = np.asarray(samples)
    w = barycentric_weights(x) if weights is None else weights
    tq = np.atleast_1d(np.asarray(t_query, dtype=float))
    diff = tq[:, None] - x[None, :]
    exact = diff == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        kern = w / diff
    kern[exact.any(axis=1)] = 0.0
    kern[exact] = 1.0
    denom = kern.sum(axis=1)
    out = np.tensordot(kern, f, axes=(1, 0))
    out = out / denom.reshape(denom.shape + (1,) * (f.ndim - 1))
    return out[0] if np.ndim(t_query) == 0 else out


def gl_barycentric_eval(samples, s_query):
    """Barycentric evaluation on the standard n-point Gauss-Legendre nodes."""
    from .curves import gauss_legendre

    n = np.shape(samples)[0]
    return barycentric_eval(gauss_legendre(n)[0], samples, s_query, _gl_barycentric_weights(n))


# -- Fourier -------------------------------------------------------------------


@dataclass(frozen=True)
class FourierExpansion:
    """Coefficients ``c_k`` for k = -n/2 .. n/2-1 stored in increasing k."""

    coeffs: np.ndarray

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(-self.n // 2, self.n // 2)

    def __getitem__(self, k: int):
        return self.coeffs[k + self.n // 2]

    def __call__(self, t, symmetric: bool = False):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        k = self.wavenumbers
        E = np.exp(1j * np.outer(t, k))
        if symmetric:
            E[:, 0] = np.cos(self.n // 2 * t)
        return np.tensordot(E, self.coeffs, axes=(1, 0))


def fourier_coeffs(samples) -> FourierExpansion:
    samples = np.asarray(samples)
    n = samples.shape[0]
    if n % 2:
        raise DomainError("fourier_coeffs needs an even number of samples")
    # scipy's FFT keeps extended-precision input in extended precision
    c = np.fft.fftshift(scipy.fft.fft(samples, axis=0) / n, axes=0)
    return FourierExpansion(c)


def trig_interp_eval(samples, t_query):
    """Band-limited interpolant through periodic samples, Nyquist mode split.

    Real samples give real values.
    """
    samples = np.asarray(samples)
    val = fourier_coeffs(samples)(t_query, symmetric=True)
    if not np.iscomplexobj(samples):
        val = val.real
    return val[0] if np.ndim(t_query) == 0 else val


def resample_periodic(samples, n_new: int) -> np.ndarray:
    """Zero-padded FFT resampling of periodic samples to ``n_new`` points."""
    samples = np.asarray(samples)
    n = samples.shape[0]
    if n_new == n:
        return samples.copy()
    c = np.fft.fft(samples, axis=0)
    pad = np.zeros((n_new,) + samples.shape[1:], dtype=complex)
    h = n // 2
    pad[:h] = c[:h]
    pad[-h + 1 :] = c[-h + 1 :]
    # split the Nyquist term so real data stays real
    pad[h] = 0.5 * c[h]
    pad[-h] = 0.5 * c[h]
    out = np.fft.ifft(pad, axis=0) * (n_new / n)
    return out.real if not np.iscomplexobj(samples) else out


# -- modified Fourier basis --------------------------------------------------


@dataclass(frozen=True)
class ModifiedFourierExpansion:
    """``a0 + a1 sin(t-a) + sum_k b_k sin^2((t-a)/2) e^{ikt}``.

    ``b`` holds k = -n/2+1 .. n/2-2 in increasing order.
    """

    shift: float
    a0: complex | np.ndarray
    a1: complex | np.ndarray
    b: np.ndarray

    @property
    def n(self) -> int:
        return self.b.shape[0] + 2

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(-self.n // 2 + 1, self.n // 2 - 1)

    def bk(self, k: int):
        return self.b[k + self.n // 2 - 1]

    def to_fourier(self) -> FourierExpansion:
        """Exact standard-basis coefficients of the same trigonometric polynomial."""
        n, h = self.n, self.n // 2
        ep, em = np.exp(1j * self.shift), np.exp(-1j * self.shift)
        c = np.zeros((n,) + self.b.shape[1:], dtype=complex)
        # sin^2(s/2) e^{ikt} = e^{ikt}/2 - e^{-ia} e^{i(k+1)t}/4 - e^{ia} e^{i(k-1)t}/4
        c[1:-1] += 0.5 * self.b
        c[2:] += -0.25 * em * self.b
        c[:-2] += -0.25 * ep * self.b
        c[h] += self.a0
        c[h + 1] += self.a1 * em / 2j
        c[h - 1] -= self.a1 * ep / 2j
        return FourierExpansion(c)

    def __call__(self, t):
        return self.to_fourier()(t)


def _unit_phase(a: float, dtype) -> tuple:
    """``e^{ia}`` and ``e^{-ia}`` in the precision of ``dtype``."""
    real = np.finfo(dtype).dtype.type
    ep = np.exp(1j * real(a)).astype(np.result_type(dtype, 1j))
    return ep, np.conj(ep)


def modified_fourier_transform(c: FourierExpansion, a: float) -> ModifiedFourierExpansion:
    """Map standard Fourier coefficients to the modified basis centred at ``a``.

    Two three-term back-substitutions run from the outermost wavenumbers
    inwards; the three central modes are then solved in closed form. The
    arithmetic follows the precision of the coefficients.
    """
    n = c.n
    if n < 6:
        raise DomainError("modified Fourier transform needs n >= 6")
    h = n // 2
    cc = c.coeffs
    ctype = np.result_type(cc.dtype, 1j)
    ep, em = _unit_phase(a, ctype)
    b = np.zeros((n - 2,) + cc.shape[1:], dtype=ctype)
    off = h - 1  # b[k + off] holds b_k

    def C(k):
        return cc[k + h]

    b[h - 2 + off] = -4 * ep * C(h - 1)
    b[h - 3 + off] = 2 * ep * (b[h - 2 + off] - 2 * C(h - 2))
    for k in range(h - 4, 0, -1):
        b[k + off] = ep * (2 * b[k + 1 + off] - ep * b[k + 2 + off] - 4 * C(k + 1))

    b[-h + 1 + off] = -4 * em * C(-h)
    b[-h + 2 + off] = 2 * em * (b[-h + 1 + off] - 2 * C(-h + 1))
    for k in range(-h + 3, 0):
        b[k + off] = em * (2 * b[k - 1 + off] - em * b[k - 2 + off] - 4 * C(k - 1))

    d1 = -0.5 * b[1 + off] + 0.25 * ep * b[2 + off] + C(1)
    d2 = 0.25 * em * b[-1 + off] + 0.25 * ep * b[1 + off] + C(0)
    d3 = -0.5 * b[-1 + off] + 0.25 * em * b[-2 + off] + C(-1)
    b0 = -2 * (ep * d1 + em * d3)
    b[off] = b0
    a0 = d2 - 0.5 * b0
    a1 = 1j * (ep * d1 - em * d3)
    return ModifiedFourierExpansion(float(a), a0, a1, b)


def nearest_node_gap(n: int, a: float) -> float:
    h = 2 * np.pi / n
    r = np.mod(a, h)
    return float(min(r, h - r))


def modified_fourier_fast(samples, a: float, a0, guard: float = 0.25) -> ModifiedFourierExpansion:
    """Modified-basis coefficients through one extra FFT.

    ``a1`` is the derivative at ``a`` of the standard Fourier interpolant of the
    samples, since every other basis function has zero slope there. The
    remainder divided by ``sin^2((t-a)/2)`` is transformed directly.
    ``guard`` is the minimum distance from ``a`` to a node in units of the
    grid spacing; closer shifts raise :class:`ShiftTooCloseToNode`.
    """
    F = np.asarray(samples)
    n = F.shape[0]
    h = 2 * np.pi / n
    if nearest_node_gap(n, a) < guard * h:
        raise ShiftTooCloseToNode(f"shift {a} within {guard}*h of a grid node")
    real = np.finfo(np.result_type(F.dtype, 1.0)).dtype.type
    c = fourier_coeffs(F)
    k = c.wavenumbers
    phase = 1j * k * np.exp(1j * k * real(a))
    a1 = np.tensordot(phase, c.coeffs, axes=(0, 0))
    t = (h * np.arange(n)).astype(real)
    s = t - real(a)
    shape = (n,) + (1,) * (F.ndim - 1)
    G = (F - a0 - a1 * np.sin(s).reshape(shape)) / (np.sin(s / 2) ** 2).reshape(shape)
    g = fourier_coeffs(G).coeffs
    return ModifiedFourierExpansion(float(a), a0, a1, g[1:-1])
