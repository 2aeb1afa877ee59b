"""Analytic basis integrals against the swapped singularity ``g(t, t0)^-m``.

Open curves use ``g = |t - t0|`` on [-1, 1]; closed curves use
``g = |e^{it} - e^{it0}|`` on [0, 2*pi). Fourier-type integrals are built from
the scaled sequences ``mu_k^m(alpha)``, ``alpha = exp(-|b|)``, which start from
complete elliptic integrals and continue by recurrence in k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

import numpy as np
from scipy.special import comb

from .errors import DomainError, RecurrenceUnstable

MONOMIAL_STD = "monomial_std"
MONOMIAL_TRANSLATED = "monomial_translated"
FOURIER_STD = "fourier_std"
FOURIER_MODIFIED = "fourier_modified"

POWERS = (1, 3, 5)

_PI = Decimal("3.14159265358979323846264338327950288419716939937510582097494459")


def elliptic_KE(msq: float, mc: float | None = None) -> tuple[float, float]:
    """Complete elliptic integrals K(msq), E(msq) by the AGM.

    ``msq`` is the parameter (square of the modulus). ``mc``, when given, is an
    accurately computed ``1 - msq``; it controls the result near msq -> 1 where
    forming ``1 - msq`` from a rounded ``msq`` would lose digits. The iteration
    runs in 40-digit decimal arithmetic so both values come back correctly
    rounded to double.
    """
    msq = float(msq)
    if not 0.0 <= msq < 1.0:
        raise DomainError(f"elliptic parameter must lie in [0, 1), got {msq!r}")
    with localcontext() as ctx:
        ctx.prec = 40
        m = Decimal(msq)
        kc2 = Decimal(mc) if mc is not None else 1 - m
        if kc2 <= 0:
            raise DomainError("complementary parameter must be positive")
        a, b = Decimal(1), kc2.sqrt()
        total = m / 2
        weight = Decimal(1) / 2
        tiny = Decimal(10) ** -44
        for _ in range(64):
            c = (a - b) / 2
            a, b = (a + b) / 2, (a * b).sqrt()
            weight *= 2
            total += weight * c * c
            if c * c < tiny:
                break
        K = _PI / (2 * a)
        E = K * (1 - total)
    return float(K), float(E)


@dataclass(frozen=True)
class _AlphaTerms:
    b: float
    alpha: float
    one_minus: float  # 1 - alpha
    one_plus_sq: float  # 1 + alpha^2
    msq: float  # alpha^2
    mc: float  # 1 - alpha^2


def _alpha_terms(b: float) -> _AlphaTerms:
    b = abs(float(b))
    return _AlphaTerms(
        b=b,
        alpha=math.exp(-b),
        one_minus=-math.expm1(-b),
        one_plus_sq=1.0 + math.exp(-2 * b),
        msq=math.exp(-2 * b),
        mc=-math.expm1(-2 * b),
    )


def _mu1_miller(at: _AlphaTerms, kmax: int, mu0: float) -> np.ndarray:
    """Minimal solution of the m=1 three-term recurrence by backward sweep."""
    alpha = at.alpha
    z = at.one_plus_sq / alpha
    extra = int(math.ceil(20.0 / at.b)) + 16
    N = kmax + extra
    y = np.zeros(N + 2)
    y[N] = 1e-280
    for k in range(N + 1, 1, -1):
        # mu_k = z*2(k-1)/(2k-1) mu_{k-1} - (2k-3)/(2k-1) mu_{k-2}, solved for mu_{k-2}
        y[k - 2] = (z * 2 * (k - 1) / (2 * k - 1) * y[k - 1] - y[k]) * (2 * k - 1) / (2 * k - 3)
        if abs(y[k - 2]) > 1e250:
            y[k - 2 :] *= 1e-250
    return (mu0 / y[0]) * y[: kmax + 1]


def _mu_tables(at: _AlphaTerms, m: int, kmax: int, max_growth: float) -> dict[int, np.ndarray]:
    """mu_k^p for p = 1, 3, .., m and k = 0..kmax."""
    if m not in POWERS:
        raise DomainError(f"power m must be one of {POWERS}, got {m}")
    if kmax < 0:
        raise DomainError("kmax must be non-negative")
    if m > 1 and at.b * kmax > max_growth:
        raise RecurrenceUnstable(
            f"|b|*kmax = {at.b * kmax:.3g} exceeds growth budget {max_growth}"
        )
    alpha, om = at.alpha, at.one_minus
    K, E = elliptic_KE(at.msq, at.mc)
    tables: dict[int, np.ndarray] = {}

    mu1 = np.empty(kmax + 2)
    mu1[0] = 2 * K
    if at.b * (kmax + 1) > 1.0:
        mu1[:] = _mu1_miller(at, kmax + 1, 2 * K)
    else:
        mu1[1] = 2 / alpha * (K - E)
        z = at.one_plus_sq / alpha
        for k in range(2, kmax + 2):
            mu1[k] = z * 2 * (k - 1) / (2 * k - 1) * mu1[k - 1] - (2 * k - 3) / (2 * k - 1) * mu1[k - 2]
    tables[1] = mu1[: kmax + 1]
    if m == 1:
        return tables

    half_z = at.one_plus_sq / (2 * alpha)
    damp = om * om / (2 * alpha)
    op = 1 + alpha
    starts = {
        3: 2 / op * (2 / op * E - om * K),
        5: 2 / (3 * op**4) * (8 * at.one_plus_sq * E - om * op * (5 + 3 * alpha**2) * K),
    }
    for p in (3, 5):
        if p > m:
            break
        prev = tables[p - 2]
        mu = np.empty(kmax + 1)
        mu[0] = starts[p]
        for k in range(1, kmax + 1):
            mu[k] = half_z * mu[k - 1] - damp * (p / 2 + k - 2) / (p / 2 - 1) * prev[k - 1]
        tables[p] = mu
    return tables


def mu_table(alpha: float, m: int, kmax: int, max_growth: float = 0.7) -> np.ndarray:
    """Scaled Fourier basis integrals ``mu_k^m(alpha)`` for k = 0..kmax.

    For m = 3, 5 the forward recurrence amplifies rounding roughly like
    ``exp(|b| k)``; tables with ``|b| * kmax > max_growth`` are refused.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return _mu_tables(_alpha_terms(-math.log(alpha)), m, kmax, max_growth)[m]


@dataclass(frozen=True)
class BasisIntegralTable:
    """Basis integrals for one root, power and basis.

    For monomial kinds ``values[k-1]`` holds the k-th integral (k = 1..kmax).
    For ``fourier_std`` ``values`` runs over k = -kmax..kmax. For
    ``fourier_modified`` ``values`` holds the sin^2-weighted integrals for
    k = 0..kmax, with ``B1`` and ``B2`` the constant and ``sin(t - a)`` terms.
    """

    m: int
    basis_kind: str
    t0: complex
    values: np.ndarray
    alpha: float | None = None
    B1: float | None = None
    B2: float | None = None

    def __getitem__(self, k: int):
        if self.basis_kind in (MONOMIAL_STD, MONOMIAL_TRANSLATED):
            return self.values[k - 1]
        if self.basis_kind == FOURIER_STD:
            return self.values[k + (len(self.values) - 1) // 2]
        v = self.values[abs(k)]
        return v if k >= 0 else np.conj(v)

    def symmetric(self, kmin: int, kmax: int) -> np.ndarray:
        """Fourier-kind values for k = kmin..kmax (negative k by conjugation)."""
        return np.array([self[k] for k in range(kmin, kmax + 1)])


def _as_t0(t0) -> complex:
    return complex(getattr(t0, "t0", t0))


# -- open curves --------------------------------------------------------------


def _log_arg(t: float, u: float, b2: float) -> float:
    """``t + u`` with ``u = sqrt(t^2 + b^2)``, without cancellation for t < 0."""
    return t + u if t >= 0 else b2 / (u - t)


def _initial_translated(a: float, b: float):
    t1, t2 = -1.0 - a, 1.0 - a
    b2 = b * b
    u1, u2 = math.hypot(t1, b), math.hypot(t2, b)
    du = -4 * a / (u1 + u2)  # u2 - u1
    same_sign = t1 * t2 > 0
    sgn = 1.0 if t1 > 0 else -1.0

    P1 = {1: math.log(_log_arg(t2, u2, b2) / _log_arg(t1, u1, b2))}
    P2 = {1: du, 3: du / (u1 * u2), 5: du * (u1 * u1 + u1 * u2 + u2 * u2) / (3 * u1**3 * u2**3)}
    if same_sign:
        # t/u = sgn (1 - b^2/(u(u+|t|))): the 1/b^2 prefactor cancels analytically
        P1[3] = sgn * (1 / (u1 * (u1 + abs(t1))) - 1 / (u2 * (u2 + abs(t2))))

        def q(t, u):
            r = b2 / (t * t)
            w = (1 + r) ** 1.5
            return -(3 + 4 * r) / (t**4 * w * ((2 + 3 * r) + 2 * w))

        P1[5] = sgn * (q(t2, u2) - q(t1, u1)) / 3
    else:
        P1[3] = (t2 / u2 - t1 / u1) / b2
        P1[5] = (t2 / u2**3 - t1 / u1**3 + 2 * P1[3]) / (3 * b2)
    return t1, t2, u1, u2, P1, P2


def monomial_translated_table(t0, m: int, kmax: int) -> BasisIntegralTable:
    """``int_{-1}^{1} (t-a)^{k-1} / |t - t0|^m dt`` for k = 1..kmax."""
    t0 = _as_t0(t0)
    a, b = t0.real, abs(t0.imag)
    if b == 0:
        raise DomainError("translated monomial integrals need a non-real t0")
    if m not in POWERS:
        raise DomainError(f"power m must be one of {POWERS}, got {m}")
    kmax = max(int(kmax), 2)
    t1, t2, u1, u2, P1, P2 = _initial_translated(a, b)
    b2 = b * b
    tabs: dict[int, np.ndarray] = {}
    for p in POWERS:
        if p > m:
            break
        P = np.empty(kmax)
        P[0], P[1] = P1[p], P2[p]
        if p == 1:
            pw1, pw2 = 1.0, 1.0  # t1^(k-1), t2^(k-1) starting at k = 1
            for k in range(2, kmax):
                pw1 *= t1
                pw2 *= t2
                P[k] = (pw2 * u2 - pw1 * u1 - (k - 1) * b2 * P[k - 2]) / k
        else:
            lower = tabs[p - 2]
            for k in range(2, kmax):
                P[k] = lower[k - 2] - b2 * P[k - 2]
        tabs[p] = P
    return BasisIntegralTable(m, MONOMIAL_TRANSLATED, t0, tabs[m])


def monomial_std_table(t0, m: int, kmax: int, method: str = "recurrence") -> BasisIntegralTable:
    """``int_{-1}^{1} t^{k-1} / |t - t0|^m dt`` for k = 1..kmax.

    ``method="recurrence"`` runs forward recurrences in the standard basis,
    whose rounding grows like ``|t0|^k``. ``method="binomial"`` recombines the
    translated table, ``P_k = sum_j C(k-1, j) a^j Pt_{k-j}``, which amplifies
    rounding like ``(1 + |a|)^k`` and is kept as a cross-check.
    """
    t0 = _as_t0(t0)
    a, b = t0.real, abs(t0.imag)
    if method == "binomial":
        Pt = monomial_translated_table(t0, m, kmax).values
        kmax = Pt.size
        P = np.empty(kmax)
        for k in range(1, kmax + 1):
            j = np.arange(k)
            P[k - 1] = np.sum(comb(k - 1, j) * a**j * Pt[k - 1 - j])
        return BasisIntegralTable(m, MONOMIAL_STD, t0, P)
    if method != "recurrence":
        raise DomainError(f"unknown method {method!r}")
    Pt = {p: monomial_translated_table(t0, p, 2).values for p in POWERS if p <= m}
    kmax = max(int(kmax), 2)
    mod2 = a * a + b * b
    u1, u2 = math.hypot(1 + a, b), math.hypot(1 - a, b)
    tabs: dict[int, np.ndarray] = {}
    for p in POWERS:
        if p > m:
            break
        P = np.empty(kmax)
        P[0] = Pt[p][0]
        P[1] = Pt[p][1] + a * Pt[p][0]
        if p == 1:
            # (k-1) P_k = [t^{k-2} u] + (2k-3) a P_{k-1} - (k-2) |t0|^2 P_{k-2}
            for k in range(3, kmax + 1):
                edge = u2 - (-1) ** (k - 2) * u1
                P[k - 1] = (edge + (2 * k - 3) * a * P[k - 2] - (k - 2) * mod2 * P[k - 3]) / (k - 1)
        else:
            # t^2 = |t - t0|^2 + 2 a t - |t0|^2
            lower = tabs[p - 2]
            for k in range(3, kmax + 1):
                P[k - 1] = lower[k - 3] + 2 * a * P[k - 2] - mod2 * P[k - 3]
        tabs[p] = P
    return BasisIntegralTable(m, MONOMIAL_STD, t0, tabs[m])


# -- closed curves ------------------------------------------------------------


def _phases(root, k: np.ndarray) -> np.ndarray:
    """``e^{ika}``, using the extended-precision real part of a root when given."""
    a = np.longdouble(_as_t0(root).real) + np.longdouble(getattr(root, "a_lo", 0.0))
    return np.exp(1j * k * a).astype(complex)


def _fourier_prep(t0, kmax: int):
    t0 = _as_t0(t0)
    if t0.imag == 0:
        raise DomainError("Fourier basis integrals need a non-real t0")
    if kmax < 0:
        raise DomainError("kmax must be non-negative")
    return t0, _alpha_terms(t0.imag)


def _lower_half_factor(t0: complex, m: int) -> float:
    # |e^{it} - e^{i conj(t0)}| = e^{|b|} |e^{it} - e^{it0}| for Im t0 > 0
    return math.exp(-m * abs(t0.imag)) if t0.imag < 0 else 1.0


def fourier_std_table(t0, m: int, kmax: int, max_growth: float = 0.7, mu=None) -> BasisIntegralTable:
    """``int_0^{2pi} e^{ikt} / |e^{it} - e^{it0}|^m dt`` for k = -kmax..kmax."""
    root = t0
    t0, at = _fourier_prep(t0, kmax)
    mu = mu if mu is not None else _mu_tables(at, m, kmax, max_growth)
    k = np.arange(kmax + 1)
    pos = 2 * _phases(root, k) * mu[m][: kmax + 1] / at.one_minus ** (m - 1)
    pos *= _lower_half_factor(t0, m)
    vals = np.concatenate([np.conj(pos[:0:-1]), pos])
    return BasisIntegralTable(m, FOURIER_STD, t0, vals, alpha=at.alpha)


def fourier_modified_table(t0, m: int, kmax: int, max_growth: float = 0.7, mu=None) -> BasisIntegralTable:
    """Integrals of the modified Fourier basis against ``|e^{it}-e^{it0}|^-m``.

    Only m = 3, 5 are supported.
    """
    if m not in (3, 5):
        raise DomainError(f"modified Fourier integrals are defined for m = 3, 5, got {m}")
    root = t0
    t0, at = _fourier_prep(t0, kmax)
    mu = mu if mu is not None else _mu_tables(at, m, max(kmax, 1), max_growth)
    alpha, om = at.alpha, at.one_minus
    hi, lo = mu[m][: kmax + 1], mu[m - 2]
    k = np.arange(kmax + 1)
    # mu_{-1} = mu_1 supplies the k = 0 entry
    lo_prev = np.concatenate([lo[1:2], lo[:kmax]])
    lo = lo[: kmax + 1]
    C1 = om ** (3 - m) / 2 * _phases(root, k)
    C2 = om * om / (2 * alpha * at.one_plus_sq)
    C3 = (m / 2 + k - 1) / (2 * alpha)
    C4 = (m / 2 + k - 2) / at.one_plus_sq
    S = C1 * (-C2 * hi + 2 / (m - 2) * (C3 * lo - C4 * lo_prev))
    fac = _lower_half_factor(t0, m)
    B1 = 2 * hi[0] / om ** (m - 1) * fac
    return BasisIntegralTable(m, FOURIER_MODIFIED, t0, S * fac, alpha=alpha, B1=B1, B2=0.0)
