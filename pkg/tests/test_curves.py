import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from tssq.curves import (
    Panel,
    PeriodicGrid,
    adaptive_panelize,
    bernstein_radius,
    circle,
    find_root,
    find_roots,
    gauss_legendre,
    get_curve,
    helix,
    legendre_coeffs,
    line,
    squared_distance,
    starfish3d,
    tangle,
)
from tssq.errors import DomainError, MaxDepthExceeded


@pytest.mark.parametrize("name", ["line", "circle", "helix", "starfish3d", "tangle"])
def test_complex_extension_restricts_to_real(name):
    c = get_curve(name)
    lo, hi = c.domain
    t = np.linspace(lo, hi, 37)[:-1]
    g = c.gamma(t)
    gc = c.gamma(t.astype(complex))
    scale = np.abs(g).max()
    np.testing.assert_allclose(gc.real, g, rtol=0, atol=1e-14 * scale)
    assert np.abs(gc.imag).max() <= 1e-14 * scale
    assert np.all(c.speed(t) > 0)


@pytest.mark.parametrize("name", ["helix", "starfish3d", "tangle"])
def test_dgamma_matches_finite_differences(name):
    c = get_curve(name)
    lo, hi = c.domain
    t = np.linspace(lo + 0.1, hi - 0.1, 11)
    h = 1e-6
    fd = (c.gamma(t + h) - c.gamma(t - h)) / (2 * h)
    scale = np.abs(c.dgamma(t)).max()
    np.testing.assert_allclose(c.dgamma(t), fd, atol=1e-7 * scale)


def test_tangle_is_analytic_off_axis():
    # Cauchy-Riemann: d/dt along the imaginary direction equals i * dgamma
    c = tangle()
    t = np.array([-0.3 + 0.01j, 0.7 + 0.002j])
    h = 1e-7
    fd = (c.gamma(t + 1j * h) - c.gamma(t - 1j * h)) / (2j * h)
    np.testing.assert_allclose(fd, c.dgamma(t), rtol=1e-6)


def test_unknown_curve():
    with pytest.raises(DomainError):
        get_curve("trefoil")


def test_squared_distance_line():
    c = line()
    a, b = 0.23, 1e-3
    t = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(squared_distance(c, t, [a, b, 0]), (t - a) ** 2 + b * b, rtol=1e-15)
    assert abs(squared_distance(c, np.array(a + 1j * b), [a, b, 0])) < 1e-30


def test_squared_distance_circle_center():
    t = np.linspace(0, 2 * np.pi, 13)
    np.testing.assert_allclose(squared_distance(circle(), t, [0, 0, 0]), 1.0, rtol=1e-15)


def test_squared_distance_is_componentwise_not_modulus():
    # at complex t the sum of squares differs from |gamma - x|^2
    c = line()
    v = squared_distance(c, np.array(0.5 + 0.1j), [0, 0, 0])
    assert v == pytest.approx((0.5 + 0.1j) ** 2)


def test_find_root_line():
    r = find_root(line(), [0.23, 1e-3, 0], 0.2 + 0.01j)
    assert r.converged
    assert r.t0 == pytest.approx(0.23 + 1e-3j, abs=1e-15)
    assert r.residual <= 1e-26


def test_find_root_circle_against_brute_force():
    theta, d = 1.1, 1e-3
    x = (1 + d) * np.array([np.cos(theta), np.sin(theta), 0.0])
    c = circle()
    r = find_root(c, x, theta - 0.01 + 0.01j)
    # independent: 2D minimisation of the real distance for a, exact log for b
    res = minimize_scalar(lambda t: np.sum((c.gamma(np.array([t]))[0] - x) ** 2),
                          bounds=(theta - 0.5, theta + 0.5), method="bounded",
                          options={"xatol": 1e-12})
    assert r.converged
    assert r.a == pytest.approx(res.x, abs=1e-7)
    assert r.b == pytest.approx(np.log1p(d), rel=1e-12)


def test_find_root_conjugate_seed_gives_same_root():
    x = [0.23, 1e-3, 0]
    r1 = find_root(line(), x, 0.2 + 0.01j)
    r2 = find_root(line(), x, 0.2 - 0.01j)
    assert r1.t0 == r2.t0 and r2.b > 0


def test_find_root_garbage_seed_fails():
    r = find_root(helix(), [50.0, -40.0, 30.0], 1e6 + 1e6j)
    assert not r.converged


def test_find_roots_batch_matches_scalar():
    c = starfish3d()
    x = c.gamma(np.array([0.7]))[0] + np.array([0.0, 0.0, 1e-3])
    seeds = np.array([0.69 + 0.01j, 0.71 + 0.02j])
    t, ok = find_roots(c, x, seeds)
    r = find_root(c, x, seeds[0])
    assert ok.all()
    np.testing.assert_allclose(t, r.t0, atol=1e-12)


@given(st.floats(-0.95, 0.95), st.floats(1e-6, 0.3))
@settings(max_examples=40, deadline=None)
def test_root_residual_property(a, b):
    c = helix()
    x = c.gamma(np.array([a]))[0]
    n = np.cross(c.dgamma(np.array([a]))[0], [0, 0, 1.0])
    x = x + b * n / np.linalg.norm(n)
    r = find_root(c, x, a + 1j * b / c.speed(np.array([a]))[0])
    assert r.converged and r.b > 0
    assert abs(squared_distance(c, np.array(r.t0), x)) <= max(1e-26, 1e-13 * b)


def test_gauss_legendre_exactness():
    x, w = gauss_legendre(16)
    for k in range(32):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert abs(w @ x**k - exact) <= 1e-14 * max(1.0, exact)


def test_panel_and_grid_invariants():
    p = Panel((-0.3, 0.5), 16)
    assert np.all(np.diff(p.nodes) > 0) and p.nodes[0] > -0.3 and p.nodes[-1] < 0.5
    assert p.weights.sum() == pytest.approx(0.8, rel=1e-15)
    assert p.upsampled().n == 32
    g = PeriodicGrid(8)
    np.testing.assert_allclose(np.diff(g.nodes), g.h)
    with pytest.raises(DomainError):
        PeriodicGrid(7)


def test_legendre_coeffs_examples():
    x, _ = gauss_legendre(12)
    np.testing.assert_allclose(legendre_coeffs(np.ones(12)), np.eye(12)[0], atol=1e-14)
    P2 = 0.5 * (3 * x**2 - 1)
    np.testing.assert_allclose(legendre_coeffs(P2), np.eye(12)[2], atol=1e-14)


def test_legendre_coeffs_roundtrip():
    rng = np.random.default_rng(3)
    c = rng.standard_normal(20)
    x, _ = gauss_legendre(20)
    samples = np.polynomial.legendre.legval(x, c)
    np.testing.assert_allclose(legendre_coeffs(samples), c, atol=1e-13 * np.abs(c).max())


def test_line_needs_one_panel():
    assert len(adaptive_panelize(line(), 16, 1e-12)) == 1


def _reference_panel_count(curve, n, eps):
    # independent criterion check: least-squares Legendre fit on the nodes
    x, _ = gauss_legendre(n)
    stack, count = [(-1.0, 1.0)], 0
    while stack:
        lo, hi = stack.pop()
        s = curve.speed(0.5 * (lo + hi) + 0.5 * (hi - lo) * x)
        c = np.abs(np.polynomial.legendre.legfit(x, s, n - 1))
        if max(c[-2], c[-1]) < eps * c.max():
            count += 1
        else:
            mid = 0.5 * (lo + hi)
            stack += [(lo, mid), (mid, hi)]
    return count


def test_helix_panel_count_matches_reference():
    c = helix()
    assert len(adaptive_panelize(c, 16, 1e-10)) == _reference_panel_count(c, 16, 1e-10)


def test_chirped_helix_panel_count_matches_reference():
    # a helix with nonconstant speed, so that refinement actually happens
    from tssq.curves import ParametricCurve

    def gamma(t):
        t = np.asarray(t)
        return np.stack([np.cos(np.pi * t**2), np.sin(np.pi * t**2), t], axis=-1)

    def dgamma(t):
        t = np.asarray(t)
        w = 2 * np.pi * t
        return np.stack([-w * np.sin(np.pi * t**2), w * np.cos(np.pi * t**2), np.ones_like(t)], axis=-1)

    c = ParametricCurve("chirp", gamma, dgamma)
    assert len(adaptive_panelize(c, 16, 1e-10)) == _reference_panel_count(c, 16, 1e-10)


def test_tangle_refines_with_tolerance():
    c = tangle()
    assert len(adaptive_panelize(c, 16, 1e-6)) > len(adaptive_panelize(c, 16, 1e-4))


def test_panelization_is_idempotent():
    c = tangle()
    for p in adaptive_panelize(c, 16, 1e-6)[::7]:
        assert len(adaptive_panelize(c, 16, 1e-6, interval=p.interval)) == 1


def test_panelize_errors():
    with pytest.raises(MaxDepthExceeded):
        adaptive_panelize(tangle(), 16, 1e-17, max_depth=3)
    with pytest.raises(DomainError):
        adaptive_panelize(circle(), 16, 1e-6)


def test_bernstein_radius():
    assert bernstein_radius(0.0 + 0j) == pytest.approx(1.0)
    # the ellipse of radius rho meets the imaginary axis at (rho - 1/rho)/2
    rho = 3.0
    assert bernstein_radius(1j * (rho - 1 / rho) / 2) == pytest.approx(rho)
    assert bernstein_radius(2.0 + 0j) == pytest.approx(2 + np.sqrt(3))
