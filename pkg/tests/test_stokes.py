import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tssq.curves import helix, line, starfish3d
from tssq.errors import DomainError
from tssq.ssq import DIRECT, PanelDiscretization, PeriodicDiscretization
from tssq.stokes import (
    SlenderBodySpec,
    doublet,
    numerator_matrix,
    power_split,
    slender_body_integrand,
    slender_body_terms,
    slender_body_velocity,
    stokeslet,
)

vec = st.lists(st.floats(-10, 10), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-3)


def test_kernel_examples():
    np.testing.assert_array_equal(stokeslet([1.0, 0, 0]), np.diag([2.0, 1, 1]))
    np.testing.assert_array_equal(doublet([1.0, 0, 0]), np.diag([-2.0, 1, 1]))


def test_kernels_reject_zero():
    with pytest.raises(DomainError):
        stokeslet([0.0, 0, 0])
    with pytest.raises(DomainError):
        doublet(np.zeros((2, 3)))


@given(vec, st.floats(0.1, 10))
@settings(max_examples=50, deadline=None)
def test_kernel_symmetry_trace_scaling(r, lam):
    r = np.array(r)
    S, D = stokeslet(r), doublet(r)
    np.testing.assert_array_equal(S, S.T)
    np.testing.assert_array_equal(D, D.T)
    assert abs(np.trace(D)) <= 1e-14 * np.abs(D).max()
    np.testing.assert_allclose(stokeslet(lam * r), S / lam, rtol=1e-13, atol=1e-13 * np.abs(S).max() / lam)
    np.testing.assert_allclose(doublet(lam * r), D / lam**3, rtol=1e-13, atol=1e-13 * np.abs(D).max() / lam**3)


def test_kernels_batch_shape():
    r = np.random.default_rng(0).standard_normal((4, 5, 3))
    assert stokeslet(r).shape == (4, 5, 3, 3)
    np.testing.assert_allclose(doublet(r)[2, 3], doublet(r[2, 3]))


def test_power_split_sums_to_integrand():
    rng = np.random.default_rng(1)
    c = helix()
    for rho in (1e-3, 0.1):
        x = rng.standard_normal(3)
        t = rng.uniform(-1, 1, 7)
        sig = rng.standard_normal((7, 3))
        ps = power_split(rho, x, c)
        total = sum(ps.integrand(t, sig).values())
        r = x - c.gamma(t)
        ref = np.einsum("nij,nj->ni", stokeslet(r) + rho**2 / 2 * doublet(r), sig)
        np.testing.assert_allclose(total, ref, rtol=1e-14, atol=1e-14 * np.abs(ref).max())
        np.testing.assert_allclose(slender_body_integrand(rho)(r, sig), ref, rtol=1e-13)


def test_terms_match_numerator_matrices():
    rng = np.random.default_rng(2)
    r, sig = rng.standard_normal((6, 3)), rng.standard_normal((6, 3))
    for term in slender_body_terms(0.05):
        np.testing.assert_allclose(term.numerator(r, sig),
                                   np.einsum("nij,nj->ni", numerator_matrix(term.m, r, 0.05), sig), rtol=1e-14)


def test_rho_zero_split():
    r = np.array([[0.3, -0.2, 0.5]])
    assert np.all(numerator_matrix(5, r, 0.0) == 0)
    np.testing.assert_array_equal(numerator_matrix(3, r, 0.0)[0], np.outer(r[0], r[0]))


def test_m3_numerator_vanishes_on_approach():
    c = line()
    for d in (1e-2, 1e-4, 1e-6):
        ps = power_split(0.0, [0.23, d, 0.0], c)
        N = ps.numerator(3, 0.23)[0]
        assert np.linalg.norm(N, 2) == pytest.approx(d * d, rel=1e-12)


def test_spec_validation():
    with pytest.raises(DomainError):
        SlenderBodySpec(np.zeros((4, 3)), rho=0.0)
    with pytest.raises(DomainError):
        SlenderBodySpec(np.zeros((4, 2)))
    with pytest.raises(DomainError):
        numerator_matrix(2, np.ones(3), 1e-3)


def test_far_field_equivalence():
    c = starfish3d()
    disc = PeriodicDiscretization(c, 128)
    dens = c.gamma(disc.nodes)
    x = np.array([0.4, -0.3, 0.1])
    # more than 0.5 from the curve
    assert np.sqrt(((c.gamma(np.linspace(0, 2 * np.pi, 2000)) - x) ** 2).sum(1)).min() >= 0.5
    rep = slender_body_velocity(disc, SlenderBodySpec(dens), x)
    assert rep.method == DIRECT
    # unsplit integrand on a fine trapezoidal grid with the exact density
    t = 2 * np.pi * np.arange(4096) / 4096
    ref = (2 * np.pi / 4096 * c.speed(t)) @ slender_body_integrand()(x - c.gamma(t), c.gamma(t))
    np.testing.assert_allclose(rep.value, ref, rtol=1e-13)


def test_open_far_field_equivalence():
    c = helix()
    disc = PanelDiscretization.adaptive(c, eps=1e-10)
    dens = c.gamma(disc.nodes)
    x = np.array([30.0, -25.0, 20.0])
    rep = slender_body_velocity(disc, SlenderBodySpec(dens), x)
    assert rep.method == DIRECT
    ref = (disc.weights * c.speed(disc.nodes)) @ slender_body_integrand()(x - c.gamma(disc.nodes), dens)
    np.testing.assert_allclose(rep.value, ref, rtol=1e-13, atol=1e-13 * np.abs(ref).max())
