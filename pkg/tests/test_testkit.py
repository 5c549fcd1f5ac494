import math

import numpy as np
import pytest

from amucd import (
    DictionaryElement as E,
    SingularSystem,
    SpaceModel,
    TaylorPolynomial,
    kernel_mixed_derivative,
    kernel_signal,
    signal_moment,
)
from amucd.rkhs import KernelCombination, Spectrum, signal_eval
from amucd.testkit import (
    finite_difference_derivative,
    least_squares_oracle,
    quadrature_inner_product,
    spectrum_of,
    taylor_as_kernels,
    taylor_series_szego,
)

from conftest import random_disc_point

H = SpaceModel.hardy()
PW = SpaceModel.paley_wiener(1.0)
Z = TaylorPolynomial(H, [0, 1])


class TestLeastSquaresOracle:
    def test_two_points(self):
        c, res = least_squares_oracle(H, Z, [E(0), E(0.5)])
        np.testing.assert_allclose(c, [-1.5, 1.5], atol=1e-13)
        assert res == pytest.approx(0.25)

    def test_sinc_integer_nodes(self):
        c, res = least_squares_oracle(PW, kernel_signal(PW, 0), [E(0)])
        np.testing.assert_allclose(c, [1.0])
        assert res == pytest.approx(0, abs=1e-15)

    def test_singular(self):
        # a genuinely repeated order-0 element gives a rank-deficient matrix
        with pytest.raises(SingularSystem):
            least_squares_oracle(H, Z, [E(0.3), E(0.3)])


class TestFiniteDifference:
    def test_szego_value(self):
        assert finite_difference_derivative(H, 0.5, 0.5, 0, 0) == pytest.approx(4 / 3)

    def test_szego_mixed_first(self):
        assert finite_difference_derivative(H, 0, 0, 1, 1) == pytest.approx(1.0, abs=1e-7)

    def test_sinc_second(self):
        got = finite_difference_derivative(PW, 0, 0, 2, 0)
        assert got == pytest.approx(-math.pi**2 / 3, rel=1e-6)

    def test_step_validated(self):
        with pytest.raises(ValueError):
            finite_difference_derivative(H, 0, 0, 1, 0, step=0)


class TestQuadratureInnerProduct:
    def test_hardy_monomials(self):
        assert quadrature_inner_product(H, Z, Z) == pytest.approx(1.0)
        assert quadrature_inner_product(H, Z, TaylorPolynomial(H, [1])) == pytest.approx(0, abs=1e-15)

    def test_szego_kernels(self):
        v = quadrature_inner_product(H, kernel_signal(H, 0.5), kernel_signal(H, 0.5))
        assert v == pytest.approx(4 / 3, rel=1e-12)

    def test_sinc_kernels(self):
        assert quadrature_inner_product(PW, kernel_signal(PW, 0), kernel_signal(PW, 0)) == pytest.approx(1.0)
        assert quadrature_inner_product(PW, kernel_signal(PW, 0), kernel_signal(PW, 1)) == pytest.approx(0, abs=1e-12)

    @pytest.mark.parametrize("space,radius", [(H, 0.9), (PW, 4.0)])
    def test_agrees_with_closed_form_gram(self, space, radius):
        rng = np.random.default_rng(17)
        if space.is_hardy:
            point = lambda: random_disc_point(rng, radius)  # noqa: E731
        else:
            point = lambda: complex(*(radius * (rng.random(2) - 0.5) * [2, 0.5]))  # noqa: E731
        for _ in range(15):
            p, q = point(), point()
            a, b = int(rng.integers(0, 3)), int(rng.integers(0, 3))
            quad = quadrature_inner_product(space, kernel_signal(space, q, b), kernel_signal(space, p, a))
            exact = kernel_mixed_derivative(space, p, q, a, b)
            assert abs(quad - exact) <= 1e-7 * max(1.0, abs(exact))


def test_taylor_series_szego_origin():
    assert taylor_series_szego(0, 0, 1, 1, terms=10) == 1
    assert taylor_series_szego(0.5, 0.5, 0, 0, terms=200) == pytest.approx(4 / 3)


def test_taylor_as_kernels_same_function():
    f = TaylorPolynomial(H, [1, -2, 0.5j, 3])
    g = taylor_as_kernels(f)
    for z in (0.0, 0.3 - 0.2j, -0.7):
        assert signal_eval(g, z) == pytest.approx(signal_eval(f, z), abs=1e-14)
    for e in (E(0.2), E(0.2, 2)):
        assert signal_moment(H, g, e) == pytest.approx(signal_moment(H, f, e), abs=1e-12)


def test_spectrum_of_kernel_combination():
    f = KernelCombination(PW, ((E(0.5), 2.0), (E(-1 + 0.2j, 1), 1j)))
    F = spectrum_of(f)
    x, w = np.polynomial.legendre.leggauss(200)
    t = math.pi * x
    for z in (0.1, 1.0 - 0.5j):
        val = math.pi * np.sum(w * F(t) * np.exp(-1j * z * t)) / (2 * math.pi)
        assert val == pytest.approx(signal_eval(f, z), abs=1e-12)


def test_spectrum_of_spectrum_is_interpolant():
    f = Spectrum(PW, (-1.0, 0.0, 1.0), (0, 2, 0))
    F = spectrum_of(f)
    np.testing.assert_allclose(F(np.array([-2, -0.5, 0, 0.25, 3])), [0, 1, 2, 1.5, 0])
