import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amucd import (
    DictionaryElement as E,
    DomainViolation,
    KernelCombination,
    OrderCapExceeded,
    SpaceMismatch,
    SpaceModel,
    TaylorPolynomial,
    kernel_mixed_derivative,
    kernel_signal,
    signal_eval,
    signal_moment,
    signal_norm_sq,
)
from amucd.rkhs import Spectrum
from amucd.testkit import finite_difference_derivative, taylor_series_szego

H = SpaceModel.hardy()
PW = SpaceModel.paley_wiener(1.0)


class TestKernelMixedDerivative:
    def test_szego_origin(self):
        assert kernel_mixed_derivative(H, 0, 0, 0, 0) == pytest.approx(1.0)

    def test_szego_real_point(self):
        assert kernel_mixed_derivative(H, 0.5, 0.5, 0, 0) == pytest.approx(4 / 3, rel=1e-15)

    def test_szego_first_mixed_at_origin(self):
        assert kernel_mixed_derivative(H, 0, 0, 1, 1) == pytest.approx(1.0)

    def test_sinc_diagonal(self):
        assert kernel_mixed_derivative(PW, 0.5, 0.5, 0, 0) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("a", range(5))
    @pytest.mark.parametrize("b", range(5))
    def test_szego_matches_power_series(self, a, b):
        p, q = 0.4 + 0.2j, -0.3 + 0.5j
        expected = taylor_series_szego(p, np.conj(q), a, b, terms=400)
        got = kernel_mixed_derivative(H, p, q, a, b)
        assert abs(got - expected) <= 1e-12 * abs(expected)

    @pytest.mark.parametrize("a", range(9))
    @pytest.mark.parametrize("b", range(9))
    def test_sinc_series_and_closed_form_agree_at_switch(self, a, b):
        # evaluate on both sides of |s| = 0.1 and compare with Gauss-Legendre
        # quadrature of the spectral representation (1/2pi) int (it)^a (-it)^b e^{i(p - conj q) t}
        x, w = np.polynomial.legendre.leggauss(200)
        t = np.pi * x
        for p, q in [(0.099, 0.0), (0.101, 0.0), (1.5 + 0.3j, -0.2j), (3.0, 0.0)]:
            s = p - np.conj(q)
            ref = np.pi * np.sum(w * (1j * t) ** a * (-1j * t) ** b * np.exp(1j * s * t)) / (2 * np.pi)
            got = kernel_mixed_derivative(PW, p, q, a, b)
            scale = np.pi ** (a + b + 1) / np.pi
            assert abs(got - ref) <= 1e-12 * scale

    def test_order_cap(self):
        with pytest.raises(OrderCapExceeded):
            kernel_mixed_derivative(H, 0, 0, 9, 0)
        with pytest.raises(OrderCapExceeded):
            kernel_mixed_derivative(SpaceModel.hardy(max_order=2), 0, 0, 0, 3)

    def test_domain(self):
        with pytest.raises(DomainViolation):
            kernel_mixed_derivative(H, 1.0, 0, 0, 0)
        with pytest.raises(DomainViolation):
            kernel_mixed_derivative(PW, complex("nan"), 0, 0, 0)

    def test_broadcasts(self):
        p = np.array([0.1, 0.2, 0.3])
        got = kernel_mixed_derivative(H, p, 0.5, 0, 0)
        np.testing.assert_allclose(got, 1 / (1 - 0.5 * p))


disc = st.builds(
    lambda r, t: r * np.exp(1j * t),
    st.floats(0, 0.95), st.floats(0, 2 * np.pi),
)
plane = st.builds(complex, st.floats(-6, 6), st.floats(-3, 3))
orders = st.integers(0, 8)


@settings(max_examples=150, deadline=None)
@given(p=disc, q=disc, a=orders, b=orders)
def test_hermitian_symmetry_hardy(p, q, a, b):
    lhs = kernel_mixed_derivative(H, p, q, a, b)
    rhs = np.conj(kernel_mixed_derivative(H, q, p, b, a))
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1e-300)


@settings(max_examples=150, deadline=None)
@given(p=plane, q=plane, a=orders, b=orders)
def test_hermitian_symmetry_pw(p, q, a, b):
    lhs = kernel_mixed_derivative(PW, p, q, a, b)
    rhs = np.conj(kernel_mixed_derivative(PW, q, p, b, a))
    scale = max(abs(lhs), np.pi ** (a + b) * 1e-3)
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(p=disc, a=orders)
def test_diagonal_positive_hardy(p, a):
    v = kernel_mixed_derivative(H, p, p, a, a)
    assert v.real > 0 and abs(v.imag) <= 1e-12 * v.real


@settings(max_examples=60, deadline=None)
@given(p=plane, a=orders)
def test_diagonal_positive_pw(p, a):
    v = kernel_mixed_derivative(PW, p, p, a, a)
    assert v.real > 0 and abs(v.imag) <= 1e-12 * v.real


@pytest.mark.parametrize("space,points", [
    (H, [(0.5, 0.2j), (0.3 - 0.4j, -0.6 + 0.1j), (0.0, 0.7)]),
    (PW, [(0.5, 0.0), (1.3 + 0.4j, -2.0 + 0.5j), (0.02, 0.01)]),
])
@pytest.mark.parametrize("a,b", [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)])
def test_derivative_matches_finite_differences(space, points, a, b):
    for p, q in points:
        exact = kernel_mixed_derivative(space, p, q, a, b)
        fd = finite_difference_derivative(space, p, q, a, b, step=1e-4)
        scale = max(abs(exact), abs(kernel_mixed_derivative(space, p, p, a, a)) ** 0.5 * 1e-2, 1e-3)
        assert abs(fd - exact) <= 1e-6 * scale


@pytest.mark.parametrize("space", [H, PW])
@pytest.mark.parametrize("a,b", [(3, 2), (5, 1), (8, 8), (4, 7)])
def test_high_orders_one_step_finite_difference(space, a, b):
    # each recurrence step is the derivative of the previous one
    p, q, h = 0.3 + 0.1j, -0.2 + 0.3j, 1e-4
    exact = kernel_mixed_derivative(space, p, q, a, b)
    up = kernel_mixed_derivative(space, p + h, q, a - 1, b)
    dn = kernel_mixed_derivative(space, p - h, q, a - 1, b)
    assert abs((up - dn) / (2 * h) - exact) <= 1e-6 * abs(exact)


class TestSignalMoment:
    def test_taylor_derivative(self):
        f = TaylorPolynomial(H, [0, 0, 1])
        assert signal_moment(H, f, E(0.5, 1)) == pytest.approx(1.0)

    def test_taylor_at_origin(self):
        assert signal_moment(H, TaylorPolynomial(H, [0, 1]), E(0, 0)) == 0

    def test_sinc_kernel_value(self):
        f = kernel_signal(PW, 0)
        assert signal_moment(PW, f, E(0.5, 0)) == pytest.approx(2 / math.pi, rel=1e-14)

    def test_order_beyond_degree_is_zero(self):
        assert signal_moment(H, TaylorPolynomial(H, [1, 2]), E(0.3, 4)) == 0

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatch):
            signal_moment(PW, TaylorPolynomial(H, [1]), E(0, 0))
        with pytest.raises(SpaceMismatch):
            signal_moment(SpaceModel.paley_wiener(2.0), kernel_signal(PW, 0), E(0, 0))

    @pytest.mark.parametrize("space", [H, PW])
    def test_reproducing_property(self, space):
        rng = np.random.default_rng(3)
        for _ in range(20):
            pts = 0.8 * (rng.random(4) - 0.5) + 0.8j * (rng.random(4) - 0.5)
            terms = tuple((E(c, int(rng.integers(0, 3))), complex(*rng.normal(size=2))) for c in pts)
            f = KernelCombination(space, terms)
            p = complex(0.6 * (rng.random() - 0.5), 0.6 * (rng.random() - 0.5))
            direct = sum(c * kernel_mixed_derivative(space, p, e.center, 0, e.order) for e, c in terms)
            assert abs(signal_moment(space, f, E(p, 0)) - direct) <= 1e-10

    def test_spectrum_moments_match_closed_form_derivatives(self):
        # F(t) = 1 on the band is K(., 0); its derivatives are sinc derivatives
        f = Spectrum(PW, (-math.pi, 0.0, math.pi), (1, 1, 1))
        for m in range(4):
            for p in (0.0, 0.7, 2.5 - 1.0j):
                assert abs(signal_moment(PW, f, E(p, m)) - kernel_mixed_derivative(PW, p, 0, m, 0)) < 1e-9


class TestSignalNorm:
    def test_taylor(self):
        assert signal_norm_sq(H, TaylorPolynomial(H, [1, 1])) == pytest.approx(2.0)

    def test_szego_kernel(self):
        assert signal_norm_sq(H, kernel_signal(H, 0.5)) == pytest.approx(4 / 3)

    def test_sinc_kernel(self):
        assert signal_norm_sq(PW, kernel_signal(PW, 0)) == pytest.approx(1.0)

    def test_spectrum_parseval_constant_matches_kernel(self):
        for h in (1.0, 0.5, 2.0):
            space = SpaceModel.paley_wiener(h)
            band = math.pi / h
            f = Spectrum(space, (-band, band), (1, 1))
            assert signal_norm_sq(space, f) == pytest.approx(
                kernel_mixed_derivative(space, 0, 0, 0, 0).real, rel=1e-14)

    def test_zero_signals(self):
        assert signal_norm_sq(H, KernelCombination(H, ())) == 0
        assert signal_norm_sq(PW, Spectrum(PW, (-1, 1), (0, 0))) == 0


def test_space_model_boundary_distance():
    assert H.boundary_distance(0.5) == pytest.approx(0.5)
    assert PW.boundary_distance(3.0) == pytest.approx(0.25)
    assert bool(H.contains(0.999)) and not bool(H.contains(1.0))
    assert bool(PW.contains(1e6j))


def test_signal_eval_vectorised():
    f = TaylorPolynomial(H, [1, 2, 3])
    z = np.array([0.0, 0.5j])
    np.testing.assert_allclose(signal_eval(f, z), 1 + 2 * z + 3 * z**2)
