"""Random targets at a prescribed distance from a curve."""
from __future__ import annotations

import numpy as np

from ..curves import ParametricCurve
from ..errors import DomainError, RejectionBudgetExceeded
from .oracle import closest_point


def sample_targets_at_distance(
    curve: ParametricCurve,
    d: float,
    count: int,
    seed: int = 0,
    rel_check: float = 1e-3,
    max_draws: int | None = None,
    closest=None,
) -> np.ndarray:
    """``count`` points at distance ``d`` from ``curve``, shape (count, 3).

    Each candidate is ``gamma(t) + d * nu`` with ``t`` uniform on the parameter
    domain and ``nu`` a uniform unit vector normal to the tangent. Candidates
    whose global distance to the curve differs from ``d`` by more than
    ``rel_check * d`` are redrawn. ``closest(x) -> (t, distance)`` may replace
    the default global search (e.g. :meth:`Oracle.closest`). ``seed`` is
    anything :func:`numpy.random.default_rng` accepts.
    """
    if d <= 0 or count < 0:
        raise DomainError("need d > 0 and count >= 0")
    rng = np.random.default_rng(seed)
    lo, hi = curve.domain
    budget = max_draws if max_draws is not None else 20 * count + 100
    out = []
    draws = 0
    while len(out) < count:
        if draws >= budget:
            raise RejectionBudgetExceeded(f"{draws} draws gave only {len(out)} of {count} targets at d={d}")
        draws += 1
        t = rng.uniform(lo, hi)
        tan = curve.dgamma(np.array(t))
        tan = tan / np.linalg.norm(tan)
        # uniform direction in the normal plane
        e1 = np.cross(tan, np.eye(3)[np.argmin(np.abs(tan))])
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(tan, e1)
        phi = rng.uniform(0, 2 * np.pi)
        x = curve.gamma(np.array(t)) + d * (np.cos(phi) * e1 + np.sin(phi) * e2)
        _, dist = closest(x) if closest is not None else closest_point(curve, x)
        if abs(dist - d) <= rel_check * d:
            out.append(x)
    return np.array(out).reshape(count, 3)
