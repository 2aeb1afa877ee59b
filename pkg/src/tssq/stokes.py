"""Slender-body Stokes kernels and their split into pure power-law terms.

The slender-body velocity of a fiber of radius ``rho`` is
``u(x) = int (S(r) + rho^2/2 D(r)) sigma(y) ds(y)`` with ``r = x - y``,
Stokeslet ``S = I/|r| + r r^T/|r|^3`` and doublet ``D = I/|r|^3 - 3 r r^T/|r|^5``.
Grouping by power of ``1/|r|`` gives three integrals with smooth numerators:

    m = 1:  sigma
    m = 3:  r (r . sigma) + rho^2/2 sigma
    m = 5:  -3 rho^2/2 r (r . sigma)
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import ParametricCurve
from .errors import DomainError
from .ssq import EvalReport, Policy, PowerTerm, evaluate

DEFAULT_RHO = 1e-3


def _check_r(r) -> tuple[np.ndarray, np.ndarray]:
    r = np.asarray(r, dtype=float)
    rr = np.sqrt((r * r).sum(-1))
    if np.any(rr == 0):
        raise DomainError("kernel evaluated at r = 0")
    return r, rr


def stokeslet(r) -> np.ndarray:
    """``I/|r| + r r^T/|r|^3`` for r of shape (3,) or (..., 3)."""
    r, rr = _check_r(r)
    eye = np.eye(3)
    outer = r[..., :, None] * r[..., None, :]
    return eye / rr[..., None, None] + outer / rr[..., None, None] ** 3


def doublet(r) -> np.ndarray:
    """``I/|r|^3 - 3 r r^T/|r|^5`` for r of shape (3,) or (..., 3)."""
    r, rr = _check_r(r)
    eye = np.eye(3)
    outer = r[..., :, None] * r[..., None, :]
    return eye / rr[..., None, None] ** 3 - 3 * outer / rr[..., None, None] ** 5


@dataclass(frozen=True)
class SlenderBodySpec:
    """Fiber radius and force-density samples (shape (N, 3)) on the nodes."""

    density: np.ndarray
    rho: float = DEFAULT_RHO

    def __post_init__(self):
        if not self.rho > 0:
            raise DomainError("fiber radius must be positive")
        d = np.asarray(self.density)
        if d.ndim != 2 or d.shape[1] != 3:
            raise DomainError("density must have shape (N, 3)")


def _rdot(r, sigma):
    return (r * sigma).sum(-1, keepdims=True)


def numerator_matrix(m: int, r, rho: float) -> np.ndarray:
    """The 3x3 numerator of the ``1/|r|^m`` term at separations ``r`` (..., 3)."""
    r = np.asarray(r)
    eye = np.broadcast_to(np.eye(3, dtype=r.dtype), r.shape[:-1] + (3, 3))
    outer = r[..., :, None] * r[..., None, :]
    if m == 1:
        return eye.copy()
    if m == 3:
        return outer + rho * rho / 2 * eye
    if m == 5:
        return -1.5 * rho * rho * outer
    raise DomainError(f"no slender-body term for m = {m}")


def slender_body_terms(rho: float = DEFAULT_RHO) -> list[PowerTerm]:
    """The three power terms consumed by :func:`tssq.ssq.evaluate`."""
    h = rho * rho / 2
    return [
        PowerTerm(1, lambda r, s: s),
        PowerTerm(3, lambda r, s: r * _rdot(r, s) + h * s),
        PowerTerm(5, lambda r, s: -3 * h * r * _rdot(r, s)),
    ]


def slender_body_integrand(rho: float = DEFAULT_RHO):
    """Unsplit integrand ``(S(r) + rho^2/2 D(r)) sigma``, usable in any float type."""
    h = rho * rho / 2

    def integrand(r, sigma):
        R2 = (r * r).sum(-1, keepdims=True)
        R = np.sqrt(R2)
        rs = _rdot(r, sigma)
        stokes = sigma / R + r * rs / (R * R2)
        dbl = sigma / (R * R2) - 3 * r * rs / (R * R2 * R2)
        return stokes + h * dbl

    return integrand


@dataclass(frozen=True)
class PowerSplit:
    """Numerator factories of the three power terms for one target."""

    rho: float
    x: np.ndarray
    curve: ParametricCurve

    def numerator(self, m: int, t) -> np.ndarray:
        """Numerator matrices at real parameters ``t`` (shape (N, 3, 3))."""
        r = self.x - self.curve.gamma(np.atleast_1d(np.asarray(t, dtype=float)))
        return numerator_matrix(m, r, self.rho)

    def integrand(self, t, sigma) -> dict[int, np.ndarray]:
        """Per-power integrands ``N_m sigma / |r|^m`` (without the speed)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        r = self.x - self.curve.gamma(t)
        R = np.sqrt((r * r).sum(-1))
        return {
            m: np.einsum("nij,nj->ni", self.numerator(m, t), sigma) / R[:, None] ** m
            for m in (1, 3, 5)
        }

    @property
    def terms(self) -> list[PowerTerm]:
        return slender_body_terms(self.rho)


def power_split(rho: float, x, curve: ParametricCurve) -> PowerSplit:
    return PowerSplit(float(rho), np.asarray(x, dtype=float), curve)


def slender_body_velocity(disc, spec: SlenderBodySpec, x, policy: Policy = Policy()) -> EvalReport:
    """Slender-body velocity at ``x`` through the swap-quadrature engine."""
    return evaluate(disc, spec.density, slender_body_terms(spec.rho), x, policy)
